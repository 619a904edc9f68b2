#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gmerton {

/// Monotone time grid on [0, T] with t[0] = 0 and t[n] = T exactly.
class TimeGrid {
 public:
  TimeGrid() = default;

  /// Uniform grid with dt = T / n_steps. Throws std::invalid_argument for
  /// T <= 0 or n_steps < 1.
  static TimeGrid uniform(double horizon, std::size_t n_steps);

  /// Arbitrary grid; points must start at 0 and be strictly increasing.
  static TimeGrid from_points(std::vector<double> points);

  double horizon() const { return points_.back(); }
  std::size_t n_steps() const { return points_.size() - 1; }
  double t(std::size_t k) const { return points_[k]; }
  double dt(std::size_t k) const { return steps_[k]; }
  std::span<const double> points() const { return points_; }
  std::span<const double> steps() const { return steps_; }
  bool is_uniform() const { return uniform_; }

  /// Index of the grid point closest to `time` (ties go to the earlier point).
  std::size_t nearest_point(double time) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  std::vector<double> points_;
  std::vector<double> steps_;
  bool uniform_ = false;
};

/// Same as TimeGrid::uniform.
TimeGrid make_grid(double horizon, std::size_t n_steps);

/// Volatility uncertainty interval [sigma_lo, sigma_hi], 0 < lo <= hi.
class VolatilityBand {
 public:
  VolatilityBand(double sigma_lo, double sigma_hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool degenerate() const { return lo_ == hi_; }
  bool contains(double gamma) const { return lo_ <= gamma && gamma <= hi_; }

  bool operator==(const VolatilityBand&) const = default;

 private:
  double lo_;
  double hi_;
};

/// Generator for one member of a scenario family.
struct ControlSpec {
  enum class Kind { Constant, BangBang, UniformIid };

  Kind kind = Kind::Constant;
  /// Constant: the volatility level. BangBang: per-step switch probability.
  double parameter = 0.0;

  static ControlSpec constant(double level) { return {Kind::Constant, level}; }
  static ControlSpec bang_bang(double switch_prob) {
    return {Kind::BangBang, switch_prob};
  }
  static ControlSpec uniform_iid() { return {Kind::UniformIid, 0.0}; }

  /// "constant(0.5)", "bang_bang(0.1)", "uniform_iid".
  std::string label() const;
  /// Inverse of label(); also accepts the shorthands "lo" and "hi" resolved
  /// against `band`. Throws std::invalid_argument on unknown text.
  static ControlSpec parse(const std::string& text, const VolatilityBand& band);

  bool operator==(const ControlSpec&) const = default;
};

/// Piecewise-constant volatility path: gamma[k] applies on [t[k], t[k+1]).
struct VolControl {
  TimeGrid grid;
  std::vector<double> gamma;
};

/// Draws one control. Deterministic in (spec, band, grid, seed). A degenerate
/// band forces gamma == sigma_lo for every spec.
VolControl gen_control(const ControlSpec& spec, const VolatilityBand& band,
                       const TimeGrid& grid, std::uint64_t seed);

/// Finite index set of priors. The constructor inserts the constant extremes
/// constant(lo) and constant(hi) in front when missing; a default-constructed
/// family is empty.
class ScenarioFamily {
 public:
  ScenarioFamily() = default;
  ScenarioFamily(VolatilityBand band, std::vector<ControlSpec> members);

  const VolatilityBand& band() const { return band_; }
  std::span<const ControlSpec> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::vector<std::string> labels() const;

 private:
  VolatilityBand band_{1.0, 1.0};
  std::vector<ControlSpec> members_;
};

/// rho[k] = 1 / gamma[k]^2.
struct RhoPath {
  TimeGrid grid;
  std::vector<double> rho;
};

RhoPath rho_of(const VolControl& control);

}  // namespace gmerton
