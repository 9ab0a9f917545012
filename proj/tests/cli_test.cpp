#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli/config.hpp"
#include "npsa/errors.hpp"
#include "npsa/stack_file.hpp"

namespace npsa::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("npsa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI inside the scratch directory and returns its exit code.
  int npsa(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" NPSA_CLI_PATH "' " + args +
                            " > '" + (dir_ / "stdout.txt").string() + "' 2> '" +
                            (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string stderr_text() const { return slurp(dir_ / "stderr.txt"); }
  json read_json(const fs::path& rel) const { return json::parse(slurp(dir_ / rel)); }

  fs::path dir_;
};

TEST(Settings, ParsesLinesAndComments) {
  const Settings s = parse_settings("# header\nscene = peaks\n\n size=32 # trailing\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (std::pair<std::string, std::string>{"scene", "peaks"}));
  EXPECT_EQ(s[1], (std::pair<std::string, std::string>{"size", "32"}));
  EXPECT_THROW(parse_settings("no equals sign\n"), InvalidInput);
}

TEST(Settings, LaterEntriesOverride) {
  const SynthConfig c = build_synth_config({{"preset", "paper3"}, {"steps", "0,1,2,3"}});
  EXPECT_EQ(c.steps.size(), 4u);
  EXPECT_EQ(c.steps_source, "explicit");
}

TEST(Settings, UnknownKeyRejected) {
  EXPECT_THROW(build_synth_config({{"colour", "blue"}}), InvalidInput);
}

TEST(Settings, NumberListsAndHarmonics) {
  EXPECT_EQ(parse_number_list("0, 1.5,3"), (std::vector<double>{0.0, 1.5, 3.0}));
  EXPECT_THROW(parse_number_list("0,,1"), InvalidInput);
  const HarmonicSpec h = parse_harmonics("2:0.5,3:0.1");
  ASSERT_EQ(h.terms.size(), 2u);
  EXPECT_EQ(h.terms[0].order, 2);
  EXPECT_DOUBLE_EQ(h.terms[0].amplitude, 0.5);
  EXPECT_EQ(h.terms[1].order, 3);
  EXPECT_THROW(parse_harmonics("1:0.5"), InvalidInput);
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(npsa("synth --scene peaks --size 32 --preset paper9 --eta 0.01 -o a.npsa --seed 9"), 0);
  ASSERT_EQ(npsa("synth --scene peaks --size 32 --preset paper9 --eta 0.01 -o b.npsa --seed 9"), 0);
  ASSERT_EQ(npsa("synth --scene peaks --size 32 --preset paper9 --eta 0.01 -o c.npsa --seed 10"), 0);
  EXPECT_EQ(slurp(dir_ / "a.npsa"), slurp(dir_ / "b.npsa"));
  EXPECT_NE(slurp(dir_ / "a.npsa"), slurp(dir_ / "c.npsa"));
  EXPECT_EQ(slurp(dir_ / "a.truth.f64"), slurp(dir_ / "b.truth.f64"));
  const json meta = read_json("a.meta.json");
  EXPECT_EQ(meta["noise"]["seed"], 9);
  EXPECT_EQ(meta["steps"].size(), 9u);
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  std::ofstream(dir_ / "run.cfg") << "scene = sphere-4\nsize = 24\npreset = paper3\n";
  ASSERT_EQ(npsa("synth --config run.cfg --set size=16 -o s.npsa"), 0);
  const FringeStack st = read_stack(dir_ / "s.npsa");
  EXPECT_EQ(st.width(), 16u);
  EXPECT_EQ(st.size(), 3u);
}

TEST_F(CliTest, ReportsAreThreadInvariant) {
  ASSERT_EQ(npsa("synth --scene peaks --size 64 --preset paper9 --eta 0.02 --seed 3 -o s.npsa"), 0);
  ASSERT_EQ(npsa("demod s.npsa --threads 1 --out-dir t1"), 0);
  ASSERT_EQ(npsa("demod s.npsa --threads 4 --out-dir t4"), 0);
  EXPECT_EQ(slurp(dir_ / "t1/report.json"), slurp(dir_ / "t4/report.json"));
  EXPECT_EQ(slurp(dir_ / "t1/phase.f64"), slurp(dir_ / "t4/phase.f64"));
}

TEST_F(CliTest, DemodWritesArtifacts) {
  ASSERT_EQ(npsa("synth --scene tilt-8 --size 64 --preset paper3 -o s.npsa"), 0);
  ASSERT_EQ(npsa("demod s.npsa --out-dir out --mode corrected"), 0);
  for (const char* f : {"report.json", "phase.f64", "phase.pgm", "lissajous.csv", "covariance.csv",
                        "eigenpairs.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  EXPECT_EQ(fs::file_size(dir_ / "out/phase.f64"), 64u * 64u * 8u);
  const json r = read_json("out/report.json");
  EXPECT_EQ(r["command"], "demod");
  EXPECT_EQ(r["reference"], "truth");
  EXPECT_NEAR(r["rho"].get<double>(), 0.435, 0.01);
}

TEST_F(CliTest, CompareOrdersMethods) {
  ASSERT_EQ(npsa("synth --scene tilt-8 --size 128 --preset paper3 -o p3.npsa"), 0);
  ASSERT_EQ(npsa("compare p3.npsa --out-dir c3"), 0);
  const json r = read_json("c3/compare.json");
  ASSERT_EQ(r["rows"].size(), 3u);
  EXPECT_EQ(r["rows"][0]["method"], "plain");
  EXPECT_GT(r["rows"][0]["phase_error"]["rms"].get<double>(), 0.05);
  EXPECT_LT(r["rows"][1]["phase_error"]["rms"].get<double>(), 0.01);
  EXPECT_LT(r["rows"][2]["phase_error"]["rms"].get<double>(), 1e-10);
  EXPECT_TRUE(r["checks"]["plain_snr_ge_corrected"].get<bool>());

  ASSERT_EQ(npsa("synth --scene tilt-8 --size 128 --preset paper9 -o p9.npsa"), 0);
  ASSERT_EQ(npsa("compare p9.npsa --out-dir c9"), 0);
  const json r9 = read_json("c9/compare.json");
  EXPECT_GT(r9["rows"][0]["ftf"]["r_h"].get<double>(), r9["rows"][1]["ftf"]["r_h"].get<double>());
}

TEST_F(CliTest, CsvFormat) {
  ASSERT_EQ(npsa("synth --size 32 --preset paper3 -o s.npsa"), 0);
  ASSERT_EQ(npsa("analyze s.npsa --format csv --out-dir a"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "a/ftf.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a/spectrum.csv"));
}

TEST_F(CliTest, InvalidInputExitsTwo) {
  EXPECT_EQ(npsa("synth --steps 0 -o s.npsa"), 2);
  EXPECT_NE(stderr_text().find("need >= 3 steps"), std::string::npos);
  EXPECT_EQ(npsa("synth --steps 0,0,0 -o s.npsa"), 2);
  EXPECT_EQ(npsa("synth --set colour=blue -o s.npsa"), 2);
  EXPECT_EQ(npsa("synth --no-such-flag"), 2);
  EXPECT_EQ(npsa("demod s.npsa --mode sideways"), 2);
}

TEST_F(CliTest, CorruptStackExitsTwo) {
  ASSERT_EQ(npsa("synth --size 16 --preset paper3 -o s.npsa"), 0);
  std::string bytes = slurp(dir_ / "s.npsa");
  bytes[bytes.size() / 2] ^= 0x10;
  std::ofstream(dir_ / "s.npsa", std::ios::binary) << bytes;
  EXPECT_EQ(npsa("demod s.npsa"), 2);
  EXPECT_NE(stderr_text().find("CRC"), std::string::npos);
}

TEST_F(CliTest, AnalyzeWithoutStepsExitsTwo) {
  const auto steps = PhaseSteps::preset("paper3");
  write_stack(dir_ / "blind.npsa",
              sample_fringes(make_scene(canonical_scene("tilt-8", 32)), steps).with_steps(std::nullopt));
  EXPECT_EQ(npsa("analyze blind.npsa"), 2);
  EXPECT_NE(stderr_text().find("steps required for FTF"), std::string::npos);
  EXPECT_EQ(npsa("analyze blind.npsa --steps " + std::string("0,1.5,3.0")), 0);
  EXPECT_EQ(npsa("analyze blind.npsa --steps 0,1"), 2);
}

TEST_F(CliTest, IdenticalFramesExitThree) {
  const Scene s = make_scene(canonical_scene("tilt-8", 16));
  const FringeStack one = sample_fringes(s, PhaseSteps({0.4}));
  write_stack(dir_ / "flat.npsa", FringeStack({one.frame(0), one.frame(0), one.frame(0)}, std::nullopt));
  EXPECT_EQ(npsa("demod flat.npsa"), 3);
}

TEST_F(CliTest, MissingFileExitsFour) {
  EXPECT_EQ(npsa("demod nowhere.npsa"), 4);
}

}  // namespace
}  // namespace npsa::cli
