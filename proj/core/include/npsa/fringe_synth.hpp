#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npsa/grid.hpp"

namespace npsa {

/// Temporal fringe frequency. Steps are phases, so this only fixes units.
inline constexpr double kFringeFrequency = 1.0;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class PhaseKind { kTilt, kSphere, kPeaks };
enum class Aperture { kFull, kCircular };

/// Parameters for a synthetic scene.
///
/// `fringes` is the number of 2*pi cycles spanned by the phase shape
/// (max - min over the pixel grid). `carrier` adds a horizontal tilt with
/// that many fringes across the width. A circular aperture zeroes the
/// modulation outside the inscribed disk of radius min(w, h) / 2 - 0.5.
struct SceneSpec {
  PhaseKind kind = PhaseKind::kTilt;
  std::size_t width = 256;
  std::size_t height = 256;
  double fringes = 8.0;
  double carrier = 0.0;
  Aperture aperture = Aperture::kFull;
  double background = 1.0;
  double modulation = 1.0;
};

struct Scene {
  Image background;  // a(x, y)
  Image modulation;  // b(x, y) >= 0
  Image phase;       // phi(x, y), unwrapped radians

  std::size_t width() const noexcept { return phase.width(); }
  std::size_t height() const noexcept { return phase.height(); }
};

Scene make_scene(const SceneSpec& spec);

/// Named reference scenes used by the regression suites:
///   tilt-8    a = b = 1, eight vertical fringes.
///   sphere-4  quadratic phase, four fringes corner to center, circular pupil.
///   peaks     peaks() surface spanning four fringes on an eight-fringe tilt.
SceneSpec canonical_scene(std::string_view name, std::size_t size = 256);
const std::vector<std::string>& canonical_scene_names();

PhaseKind parse_phase_kind(std::string_view name);
std::string_view to_string(PhaseKind kind);

/// Ordered list of phase steps theta_n in radians.
///
/// Any non-empty list of finite values is representable, since filter
/// analysis works with arbitrary tap positions. Demodulation paths call
/// require_well_posed().
class PhaseSteps {
 public:
  explicit PhaseSteps(std::vector<double> values);

  static PhaseSteps preset(std::string_view name);  // "paper3", "paper9"
  static PhaseSteps uniform(std::size_t count);     // 2*pi*n/count

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Number of values that are pairwise distinct modulo 2*pi.
  std::size_t distinct_count(double tolerance = 1e-9) const;

  /// Throws InvalidInput unless there are >= 3 steps with >= 3 distinct
  /// values modulo 2*pi.
  void require_well_posed() const;

  friend bool operator==(const PhaseSteps&, const PhaseSteps&) = default;

 private:
  std::vector<double> values_;
};

struct Harmonic {
  int order = 2;           // k >= 2
  double amplitude = 0.0;  // b_k as a fraction of b
};

/// Empty list means a pure sinusoid.
struct HarmonicSpec {
  std::vector<Harmonic> terms;

  void validate() const;
  double total_amplitude() const;
};

/// Additive white Gaussian noise, independent per pixel and frame.
struct NoiseSpec {
  double eta = 0.0;  // variance, intensity units squared
  std::uint64_t seed = 0;
};

struct Provenance {
  std::string scene;
  std::optional<std::uint64_t> noise_seed;
};

class FringeStack {
 public:
  FringeStack() = default;
  FringeStack(std::vector<Image> frames, std::optional<PhaseSteps> steps,
              Provenance provenance = {});

  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t width() const noexcept { return frames_.empty() ? 0 : frames_[0].width(); }
  std::size_t height() const noexcept { return frames_.empty() ? 0 : frames_[0].height(); }

  const Image& frame(std::size_t n) const { return frames_[n]; }
  const std::vector<Image>& frames() const noexcept { return frames_; }
  const std::optional<PhaseSteps>& steps() const noexcept { return steps_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Throws InvalidInput when no ground-truth steps are attached.
  const PhaseSteps& require_steps() const;

  FringeStack with_steps(std::optional<PhaseSteps> steps) const;

 private:
  std::vector<Image> frames_;
  std::optional<PhaseSteps> steps_;
  Provenance provenance_;
};

/// I_n = a + b cos(phi + theta_n) + sum_k b b_k cos(k phi + k theta_n) + noise.
FringeStack sample_fringes(const Scene& scene, const PhaseSteps& steps,
                           const HarmonicSpec& harmonics = {},
                           const NoiseSpec& noise = {});

/// Rounds every frame to 2^bits levels spanning the stack's intensity range.
FringeStack quantize(const FringeStack& stack, int bits);

}  // namespace npsa
