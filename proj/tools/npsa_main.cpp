#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "npsa/errors.hpp"
#include "npsa/parallel.hpp"

namespace {

enum ExitCode : int { kOk = 0, kBadInput = 2, kDegenerate = 3, kIo = 4 };

int exit_code(npsa::ErrorKind kind) {
  switch (kind) {
    case npsa::ErrorKind::kInvalidInput: return kBadInput;
    case npsa::ErrorKind::kDegenerateData: return kDegenerate;
    case npsa::ErrorKind::kIo: return kIo;
  }
  return kBadInput;
}

// Synth flags, in the order they are layered over the config file.
struct SynthKey {
  const char* name;
  const char* help;
  std::optional<std::string> value;
};

struct SynthFlags {
  std::optional<std::string> config;
  std::vector<SynthKey> keys{
      {"scene", "tilt-8, sphere-4 or peaks", {}},
      {"size", "Square size in pixels", {}},
      {"kind", "tilt, sphere or peaks", {}},
      {"width", "Width in pixels", {}},
      {"height", "Height in pixels", {}},
      {"fringes", "Fringes across the field", {}},
      {"carrier", "Extra horizontal tilt fringes", {}},
      {"aperture", "full or circular", {}},
      {"background", "Background intensity a", {}},
      {"modulation", "Modulation b", {}},
      {"preset", "paper3 or paper9", {}},
      {"steps", "Comma-separated steps in radians", {}},
      {"harmonics", "order:amplitude list, e.g. 2:0.5", {}},
      {"eta", "AWGN variance", {}},
      {"quantize", "Bits per sample, 0 keeps float64", {}}};
  std::vector<std::string> sets;
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = npsa::cli;
  CLI::App app{"Nonuniform phase-shifting demodulation by principal component analysis"};
  app.require_subcommand(1);
  // Global flags may appear before or after the subcommand.
  app.fallthrough();

  cli::GlobalOptions global;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string format = "json";
  std::string out_dir = ".";
  app.add_option("--seed", seed, "RNG seed for synthesized noise");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--out-dir", out_dir, "Directory for all outputs");
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a fringe stack");
  SynthFlags sflags;
  cli::SynthOptions synth_opts;
  std::string synth_output = "stack.npsa";
  synth->add_option("--config", sflags.config, "key = value config file");
  for (auto& key : sflags.keys) {
    synth->add_option(std::string("--") + key.name, key.value, key.help);
  }
  synth->add_option("--set", sflags.sets, "Extra key=value setting (repeatable)");
  synth->add_option("-o,--output", synth_output, "Stack file, relative to --out-dir");

  // demod
  auto* demod = app.add_subcommand("demod", "Demodulate a stack with PCA");
  cli::DemodOptions demod_opts;
  std::string demod_mode = "corrected";
  demod->add_option("stack", demod_opts.stack, "Stack file")->required();
  demod->add_option("--mode", demod_mode)->check(CLI::IsMember({"plain", "corrected"}));
  demod->add_option("--lissajous-points", demod_opts.lissajous_points);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Frequency transfer function of the PCA filter");
  cli::AnalyzeOptions analyze_opts;
  std::string analyze_mode = "corrected";
  std::optional<std::string> analyze_steps;
  analyze->add_option("stack", analyze_opts.stack, "Stack file")->required();
  analyze->add_option("--mode", analyze_mode)->check(CLI::IsMember({"plain", "corrected"}));
  analyze->add_option("--omega-lo", analyze_opts.grid.lo);
  analyze->add_option("--omega-hi", analyze_opts.grid.hi);
  analyze->add_option("--omega-step", analyze_opts.grid.step);
  analyze->add_option("--k-max", analyze_opts.k_max);
  analyze->add_option("--steps", analyze_steps, "Comma-separated steps when the stack has none");

  // compare
  auto* compare = app.add_subcommand("compare", "Plain vs corrected vs least-squares report");
  cli::CompareOptions compare_opts;
  std::optional<std::string> compare_truth;
  compare->add_option("stack", compare_opts.stack, "Stack file")->required();
  compare->add_option("--truth", compare_truth, "float64 truth phase (default: <stem>.truth.f64)");
  compare->add_option("--k-max", compare_opts.k_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    npsa::parallel::set_threads(threads);
    global.out_dir = out_dir;
    global.format = format == "csv" ? cli::ReportFormat::kCsv : cli::ReportFormat::kJson;
    global.seed = seed;

    if (*synth) {
      if (sflags.config) synth_opts.settings = cli::load_settings(*sflags.config);
      for (const auto& key : sflags.keys) {
        if (key.value) synth_opts.settings.emplace_back(key.name, *key.value);
      }
      for (const auto& s : sflags.sets) {
        const auto parsed = cli::parse_settings(s);
        synth_opts.settings.insert(synth_opts.settings.end(), parsed.begin(), parsed.end());
      }
      synth_opts.output = synth_output;
      const auto result = cli::cmd_synth(global, synth_opts);
      std::cout << "wrote " << result.stack_path.generic_string() << " ("
                << result.config.steps.size() << " frames, " << result.config.scene.width << "x"
                << result.config.scene.height << ")\n";
    } else if (*demod) {
      demod_opts.mode = cli::parse_mode(demod_mode);
      const auto doc = cli::cmd_demod(global, demod_opts);
      std::cout << "rho " << doc["rho"].dump() << "\n";
    } else if (*analyze) {
      analyze_opts.mode = cli::parse_mode(analyze_mode);
      if (analyze_steps) analyze_opts.steps = cli::parse_number_list(*analyze_steps);
      const auto doc = cli::cmd_analyze(global, analyze_opts);
      const auto& f = doc["rows"][0]["ftf"];
      std::cout << "g_snr " << f["g_snr"].dump() << " r_h " << f["r_h"].dump()
                << " detuning_ratio " << f["detuning_ratio"].dump() << "\n";
    } else if (*compare) {
      if (compare_truth) compare_opts.truth = *compare_truth;
      const auto doc = cli::cmd_compare(global, compare_opts);
      for (const auto& row : doc["rows"]) {
        std::cout << row["method"].get<std::string>() << " rms " << row["phase_error"]["rms"].dump()
                  << " g_snr " << row["ftf"]["g_snr"].dump() << "\n";
      }
    }
  } catch (const npsa::Error& e) {
    std::cerr << "npsa: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "npsa: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
