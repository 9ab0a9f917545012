#include "commands.hpp"

#include <cstdio>
#include <system_error>

#include "npsa/errors.hpp"
#include "npsa/oracle.hpp"
#include "npsa/pca_core.hpp"
#include "npsa/stack_file.hpp"
#include "report.hpp"

namespace npsa::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const GlobalOptions& global, const fs::path& p) {
  return p.is_absolute() ? p : global.out_dir / p;
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

fs::path sidecar(const fs::path& stack, const char* suffix) {
  return stack.parent_path() / (stack.stem().string() + suffix);
}

std::string digest(std::span<const std::uint8_t> bytes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc32(bytes)));
  return std::string("crc32:") + buf;
}

struct LoadedStack {
  FringeStack stack;
  json input;
};

LoadedStack load(const fs::path& path) {
  const auto bytes = read_file(path);
  LoadedStack out{decode_stack(bytes), {}};
  out.input = {{"path", path.generic_string()},
               {"digest", digest(bytes)},
               {"frames", out.stack.size()},
               {"width", out.stack.width()},
               {"height", out.stack.height()},
               {"steps", out.stack.steps() ? to_json(*out.stack.steps()) : json(nullptr)}};
  return out;
}

std::optional<Image> load_truth(const FringeStack& stack, const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  return read_image_f64(path, stack.width(), stack.height());
}

struct Pipeline {
  PcaBasis basis;
  double rho = 1.0;
  DemodCoefficients plain;
  DemodCoefficients corrected;
};

// Orientation needs the steps; without them the coefficients stay as-is.
Pipeline run_pipeline(const FringeStack& stack, const std::optional<PhaseSteps>& steps) {
  if (steps) steps->require_well_posed();
  Pipeline p{pca_basis(stack), 1.0, {}, {}};
  p.plain = plain_coefficients(p.basis);
  p.rho = correction_ratio(demodulate(stack, p.plain));
  p.corrected = corrected_coefficients(p.basis, p.rho);
  if (steps) {
    p.plain = orient(p.plain, *steps);
    p.corrected = orient(p.corrected, *steps);
  }
  return p;
}

const DemodCoefficients& pick(const Pipeline& p, Mode mode) {
  return mode == Mode::kPlain ? p.plain : p.corrected;
}

json quadrature_json(const QuadratureDiagnostics& q) {
  return {{"quadrature", q.quadrature()},
          {"rejects_conjugate", q.rejects_conjugate},
          {"rejects_background", q.rejects_background},
          {"passes_signal", q.passes_signal},
          {"conjugate_ratio", number(q.conjugate_ratio)},
          {"background_ratio", number(q.background_ratio)},
          {"signal_gain", number(q.signal_gain)}};
}

json header(const char* command, const json& input) {
  return {{"schema_version", kReportSchemaVersion}, {"command", command}, {"input", input}};
}

void emit(const GlobalOptions& global, const std::string& stem, const json& doc) {
  if (global.format == ReportFormat::kJson) {
    write_json(global.out_dir / (stem + ".json"), doc);
  } else {
    write_text(global.out_dir / (stem + ".csv"), rows_csv(doc));
  }
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "plain") return Mode::kPlain;
  if (text == "corrected") return Mode::kCorrected;
  throw InvalidInput("unknown mode '" + text + "' (expected plain or corrected)");
}

std::string_view to_string(Mode mode) {
  return mode == Mode::kPlain ? "plain" : "corrected";
}

SynthResult cmd_synth(const GlobalOptions& global, const SynthOptions& options) {
  Settings settings = options.settings;
  if (global.seed) settings.emplace_back("seed", std::to_string(*global.seed));
  SynthConfig config = build_synth_config(settings);

  const Scene scene = make_scene(config.scene);
  const PhaseSteps steps(config.steps);
  FringeStack stack = sample_fringes(scene, steps, config.harmonics, config.noise);
  if (config.quantize_bits > 0) stack = quantize(stack, config.quantize_bits);
  Provenance prov{config.scene_name, std::nullopt};
  if (config.noise.eta > 0.0) prov.noise_seed = config.noise.seed;
  stack = FringeStack(stack.frames(), stack.steps(), prov);

  SynthResult result;
  result.stack_path = resolve(global, options.output);
  result.truth_path = sidecar(result.stack_path, ".truth.f64");
  result.meta_path = sidecar(result.stack_path, ".meta.json");
  result.config = config;
  ensure_dir(result.stack_path.parent_path());

  write_stack(result.stack_path, stack);
  write_image_f64(result.truth_path, scene.phase);

  json harmonics = json::array();
  for (const auto& h : config.harmonics.terms) {
    harmonics.push_back({{"order", h.order}, {"amplitude", h.amplitude}});
  }
  const SceneSpec& s = config.scene;
  json meta = {{"schema_version", kReportSchemaVersion},
               {"command", "synth"},
               {"scene",
                {{"name", config.scene_name},
                 {"kind", std::string(to_string(s.kind))},
                 {"width", s.width},
                 {"height", s.height},
                 {"fringes", s.fringes},
                 {"carrier", s.carrier},
                 {"aperture", s.aperture == Aperture::kCircular ? "circular" : "full"},
                 {"background", s.background},
                 {"modulation", s.modulation}}},
               {"steps", config.steps},
               {"steps_source", config.steps_source},
               {"harmonics", harmonics},
               {"noise",
                {{"model", "AWGN independent per pixel per frame"},
                 {"eta", config.noise.eta},
                 {"seed", config.noise.seed}}},
               {"quantize_bits", config.quantize_bits},
               {"stack", result.stack_path.filename().generic_string()},
               {"truth", result.truth_path.filename().generic_string()},
               {"digest", digest(read_file(result.stack_path))}};
  write_json(result.meta_path, meta);
  return result;
}

json cmd_demod(const GlobalOptions& global, const DemodOptions& options) {
  const LoadedStack in = load(options.stack);
  const FringeStack& stack = in.stack;
  const Pipeline p = run_pipeline(stack, stack.steps());
  const DemodCoefficients& coeffs = pick(p, options.mode);

  const AnalyticField field = demodulate(stack, coeffs);
  const WrappedPhase wrapped = phase(field);

  ensure_dir(global.out_dir);
  write_phase_f64(global.out_dir / "phase.f64", wrapped);
  write_text(global.out_dir / "phase.pgm", encode_pgm(wrapped));
  write_text(global.out_dir / "lissajous.csv",
             lissajous_csv(lissajous(field, options.lissajous_points)));
  write_text(global.out_dir / "covariance.csv", matrix_csv(p.basis.covariance));
  write_text(global.out_dir / "eigenpairs.csv", eigenpairs_csv(p.basis));

  json row = {{"method", std::string(to_string(options.mode))},
              {"coefficients", to_json(coeffs)},
              {"ftf", nullptr},
              {"phase_error", nullptr}};
  json checks = json::object();
  if (stack.steps()) {
    const FtfReport report = ftf(coeffs, *stack.steps());
    row["ftf"] = to_json(report);
    checks["quadrature"] = quadrature_json(quadrature_check(report));
  }
  std::string reference = "none";
  if (const auto truth = load_truth(stack, sidecar(options.stack, ".truth.f64"))) {
    row["phase_error"] = to_json(phase_error(wrapped, *truth));
    reference = "truth";
  }

  json doc = header("demod", in.input);
  doc["mode"] = std::string(to_string(options.mode));
  doc["pca"] = to_json(p.basis);
  doc["rho"] = number(p.rho);
  doc["reference"] = reference;
  doc["rows"] = json::array({row});
  doc["checks"] = checks;
  emit(global, "report", doc);
  return doc;
}

json cmd_analyze(const GlobalOptions& global, const AnalyzeOptions& options) {
  const LoadedStack in = load(options.stack);
  std::optional<PhaseSteps> steps = in.stack.steps();
  if (options.steps) {
    steps = PhaseSteps(*options.steps);
    if (steps->size() != in.stack.size()) {
      throw InvalidInput("--steps has " + std::to_string(steps->size()) + " values for " +
                         std::to_string(in.stack.size()) + " frames");
    }
  }
  if (!steps) throw InvalidInput("steps required for FTF");
  if (!(options.grid.step > 0.0) || !(options.grid.hi >= options.grid.lo)) {
    throw InvalidInput("frequency grid needs lo <= hi and a positive step");
  }
  if (options.k_max < 2) throw InvalidInput("k-max must be >= 2");

  const Pipeline p = run_pipeline(in.stack, steps);
  const DemodCoefficients& coeffs = pick(p, options.mode);
  const FtfReport report = ftf(coeffs, *steps, options.grid, options.k_max);

  ensure_dir(global.out_dir);
  write_text(global.out_dir / "spectrum.csv", spectrum_csv(report));

  json input = in.input;
  input["steps"] = to_json(*steps);
  json doc = header("analyze", input);
  doc["mode"] = std::string(to_string(options.mode));
  doc["grid"] = {{"lo", options.grid.lo}, {"hi", options.grid.hi}, {"step", options.grid.step}};
  doc["rho"] = number(p.rho);
  doc["rows"] = json::array({{{"method", std::string(to_string(options.mode))},
                              {"coefficients", to_json(coeffs)},
                              {"ftf", to_json(report)},
                              {"phase_error", nullptr}}});
  doc["checks"] = {{"quadrature", quadrature_json(quadrature_check(report))}};
  emit(global, "ftf", doc);
  return doc;
}

json cmd_compare(const GlobalOptions& global, const CompareOptions& options) {
  const LoadedStack in = load(options.stack);
  const FringeStack& stack = in.stack;
  const PhaseSteps& steps = stack.require_steps();
  if (options.k_max < 2) throw InvalidInput("k-max must be >= 2");
  const Pipeline p = run_pipeline(stack, steps);
  const LsqResult lsq = lsq_demodulate(stack, steps);
  const DemodCoefficients lsq_coeffs = orient(lsq_coefficients(steps), steps);

  std::optional<Image> truth;
  if (options.truth) {
    truth = read_image_f64(*options.truth, stack.width(), stack.height());
  } else {
    truth = load_truth(stack, sidecar(options.stack, ".truth.f64"));
  }
  const std::string reference = truth ? "truth" : "oracle";
  const Image ref = truth ? *truth : lsq.phi_hat.values;

  const FrequencyGrid grid;
  auto make_row = [&](const char* method, const DemodCoefficients& c, const WrappedPhase& est) {
    return json{{"method", method},
                {"coefficients", to_json(c)},
                {"ftf", to_json(ftf(c, steps, grid, options.k_max))},
                {"phase_error", to_json(phase_error(est, ref))}};
  };
  json rows = json::array();
  rows.push_back(make_row("plain", p.plain, phase(demodulate(stack, p.plain))));
  rows.push_back(make_row("corrected", p.corrected, phase(demodulate(stack, p.corrected))));
  rows.push_back(make_row("oracle", lsq_coeffs, lsq.phi_hat));

  const double plain_g = snr_gain(p.plain, steps);
  const double corrected_g = snr_gain(p.corrected, steps);

  json doc = header("compare", in.input);
  doc["pca"] = to_json(p.basis);
  doc["rho"] = number(p.rho);
  doc["reference"] = reference;
  doc["oracle_condition"] = number(lsq.condition);
  doc["rows"] = rows;
  doc["checks"] = {{"plain_snr_ge_corrected", plain_g >= corrected_g}};
  ensure_dir(global.out_dir);
  emit(global, "compare", doc);
  return doc;
}

}  // namespace npsa::cli
