#include "npsa/fringe_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "npsa/errors.hpp"
#include "npsa/parallel.hpp"

namespace npsa {
namespace {

double peaks(double x, double y) {
  return 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0)) -
         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y) -
         std::exp(-(x + 1.0) * (x + 1.0) - y * y) / 3.0;
}

// Rescales a shape to [0, 1] over the pixel grid; flat shapes map to 0.
void normalize_unit(Image& shape) {
  const auto [lo, hi] = std::minmax_element(shape.values().begin(), shape.values().end());
  const double low = *lo;
  const double span = *hi - *lo;
  for (double& v : shape.values()) v = span > 0.0 ? (v - low) / span : 0.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t row_stream_seed(std::uint64_t seed, std::size_t frame, std::size_t row) {
  return splitmix64(splitmix64(splitmix64(seed) ^ frame) ^ (row + 0x51ed2701ULL));
}

double wrap_two_pi(double v) {
  double r = std::fmod(v, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

}  // namespace

Scene make_scene(const SceneSpec& spec) {
  if (spec.width < 2 || spec.height < 2) {
    throw InvalidInput("scene dimensions must be at least 2x2");
  }
  if (spec.modulation < 0.0) throw InvalidInput("modulation must be non-negative");
  if (!std::isfinite(spec.fringes) || !std::isfinite(spec.carrier) ||
      !std::isfinite(spec.background) || !std::isfinite(spec.modulation)) {
    throw InvalidInput("scene parameters must be finite");
  }

  const std::size_t w = spec.width;
  const std::size_t h = spec.height;
  Image shape(w, h);
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x);
      const double fy = static_cast<double>(y);
      switch (spec.kind) {
        case PhaseKind::kTilt:
          shape(x, y) = fx / static_cast<double>(w);
          break;
        case PhaseKind::kSphere:
          shape(x, y) = (fx - cx) * (fx - cx) + (fy - cy) * (fy - cy);
          break;
        case PhaseKind::kPeaks:
          shape(x, y) = peaks(-3.0 + 6.0 * fx / (static_cast<double>(w) - 1.0),
                              -3.0 + 6.0 * fy / (static_cast<double>(h) - 1.0));
          break;
      }
    }
  }
  // The tilt is already expressed in cycles per width; the others span [0, 1].
  if (spec.kind != PhaseKind::kTilt) normalize_unit(shape);

  Scene scene{Image(w, h, spec.background), Image(w, h, spec.modulation), Image(w, h)};
  const double radius = static_cast<double>(std::min(w, h)) / 2.0 - 0.5;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      scene.phase(x, y) = kTwoPi * (spec.fringes * shape(x, y) +
                                    spec.carrier * static_cast<double>(x) /
                                        static_cast<double>(w));
      if (spec.aperture == Aperture::kCircular) {
        const double dx = static_cast<double>(x) - cx;
        const double dy = static_cast<double>(y) - cy;
        if (dx * dx + dy * dy > radius * radius) scene.modulation(x, y) = 0.0;
      }
    }
  }
  return scene;
}

SceneSpec canonical_scene(std::string_view name, std::size_t size) {
  SceneSpec spec;
  spec.width = spec.height = size;
  if (name == "tilt-8") {
    spec.kind = PhaseKind::kTilt;
    spec.fringes = 8.0;
  } else if (name == "sphere-4") {
    spec.kind = PhaseKind::kSphere;
    spec.fringes = 4.0;
    spec.aperture = Aperture::kCircular;
  } else if (name == "peaks") {
    spec.kind = PhaseKind::kPeaks;
    spec.fringes = 4.0;
    spec.carrier = 8.0;
  } else {
    throw InvalidInput("unknown scene '" + std::string(name) +
                       "' (expected tilt-8, sphere-4 or peaks)");
  }
  return spec;
}

const std::vector<std::string>& canonical_scene_names() {
  static const std::vector<std::string> names{"tilt-8", "sphere-4", "peaks"};
  return names;
}

PhaseKind parse_phase_kind(std::string_view name) {
  if (name == "tilt") return PhaseKind::kTilt;
  if (name == "sphere") return PhaseKind::kSphere;
  if (name == "peaks") return PhaseKind::kPeaks;
  throw InvalidInput("unknown phase kind '" + std::string(name) + "'");
}

std::string_view to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::kTilt: return "tilt";
    case PhaseKind::kSphere: return "sphere";
    case PhaseKind::kPeaks: return "peaks";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

PhaseSteps::PhaseSteps(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("phase step list is empty");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("phase steps must be finite");
  }
}

PhaseSteps PhaseSteps::preset(std::string_view name) {
  if (name == "paper3") return PhaseSteps({0.0, 1.49, 5.13});
  if (name == "paper9") {
    return PhaseSteps({0.0, 1.13, 2.49, 1.52, 3.55, 3.78, 6.2, 6.42, 8.74});
  }
  throw InvalidInput("unknown step preset '" + std::string(name) +
                     "' (expected paper3 or paper9)");
}

PhaseSteps PhaseSteps::uniform(std::size_t count) {
  if (count == 0) throw InvalidInput("uniform step count must be positive");
  std::vector<double> v(count);
  for (std::size_t n = 0; n < count; ++n) {
    v[n] = kTwoPi * static_cast<double>(n) / static_cast<double>(count);
  }
  return PhaseSteps(std::move(v));
}

std::size_t PhaseSteps::distinct_count(double tolerance) const {
  std::vector<double> wrapped;
  for (double v : values_) wrapped.push_back(wrap_two_pi(v));
  std::sort(wrapped.begin(), wrapped.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    if (i == 0 || wrapped[i] - wrapped[i - 1] > tolerance) ++distinct;
  }
  // 0 and 2*pi - tiny are the same point on the circle.
  if (distinct > 1 && kTwoPi - wrapped.back() + wrapped.front() <= tolerance) --distinct;
  return distinct;
}

void PhaseSteps::require_well_posed() const {
  if (values_.size() < 3) {
    throw InvalidInput("need >= 3 steps (got " + std::to_string(values_.size()) + ")");
  }
  if (distinct_count() < 3) {
    throw InvalidInput("need >= 3 steps that are distinct modulo 2*pi");
  }
}

void HarmonicSpec::validate() const {
  std::set<int> seen;
  for (const Harmonic& h : terms) {
    if (h.order < 2) throw InvalidInput("harmonic order must be >= 2");
    if (!std::isfinite(h.amplitude)) throw InvalidInput("harmonic amplitude must be finite");
    if (!seen.insert(h.order).second) {
      throw InvalidInput("duplicate harmonic order " + std::to_string(h.order));
    }
  }
}

double HarmonicSpec::total_amplitude() const {
  double s = 0.0;
  for (const Harmonic& h : terms) s += std::abs(h.amplitude);
  return s;
}

// ---------------------------------------------------------------------------

FringeStack::FringeStack(std::vector<Image> frames, std::optional<PhaseSteps> steps,
                         Provenance provenance)
    : frames_(std::move(frames)), steps_(std::move(steps)),
      provenance_(std::move(provenance)) {
  for (const Image& f : frames_) {
    if (!f.same_shape(frames_.front())) {
      throw InvalidInput("all frames in a stack must share dimensions");
    }
  }
  if (steps_ && steps_->size() != frames_.size()) {
    throw InvalidInput("step count (" + std::to_string(steps_->size()) +
                       ") does not match frame count (" +
                       std::to_string(frames_.size()) + ")");
  }
}

const PhaseSteps& FringeStack::require_steps() const {
  if (!steps_) throw InvalidInput("steps required for FTF");
  return *steps_;
}

FringeStack FringeStack::with_steps(std::optional<PhaseSteps> steps) const {
  return FringeStack(frames_, std::move(steps), provenance_);
}

FringeStack sample_fringes(const Scene& scene, const PhaseSteps& steps,
                           const HarmonicSpec& harmonics, const NoiseSpec& noise) {
  harmonics.validate();
  if (!(noise.eta >= 0.0) || !std::isfinite(noise.eta)) {
    throw InvalidInput("noise variance must be finite and non-negative");
  }
  if (!scene.background.same_shape(scene.phase) ||
      !scene.modulation.same_shape(scene.phase)) {
    throw InvalidInput("scene fields must share dimensions");
  }

  const std::size_t w = scene.width();
  const std::size_t h = scene.height();
  const double sigma = std::sqrt(noise.eta);
  std::vector<Image> frames(steps.size(), Image(w, h));

  for (std::size_t n = 0; n < steps.size(); ++n) {
    const double theta = kFringeFrequency * steps[n];
    Image& frame = frames[n];
    parallel::for_each_index(h, [&](std::size_t y) {
      std::mt19937_64 engine(row_stream_seed(noise.seed, n, y));
      std::normal_distribution<double> gauss(0.0, sigma > 0.0 ? sigma : 1.0);
      for (std::size_t x = 0; x < w; ++x) {
        const double phi = scene.phase(x, y);
        const double b = scene.modulation(x, y);
        double v = scene.background(x, y) + b * std::cos(phi + theta);
        for (const Harmonic& hk : harmonics.terms) {
          const double k = static_cast<double>(hk.order);
          v += b * hk.amplitude * std::cos(k * phi + k * theta);
        }
        if (sigma > 0.0) v += gauss(engine);
        frame(x, y) = v;
      }
    });
  }

  Provenance provenance;
  if (sigma > 0.0) provenance.noise_seed = noise.seed;
  return FringeStack(std::move(frames), steps, std::move(provenance));
}

FringeStack quantize(const FringeStack& stack, int bits) {
  if (bits < 1 || bits > 16) throw InvalidInput("quantization depth must be 1..16 bits");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Image& f : stack.frames()) {
    for (double v : f.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double levels = std::ldexp(1.0, bits) - 1.0;
  const double span = hi - lo;
  std::vector<Image> frames = stack.frames();
  if (span > 0.0) {
    for (Image& f : frames) {
      for (double& v : f.values()) v = lo + std::round((v - lo) / span * levels) * span / levels;
    }
  }
  return FringeStack(std::move(frames), stack.steps(), stack.provenance());
}

}  // namespace npsa
