#include "gmerton/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "gmerton/rng.hpp"

namespace gmerton {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && *first == ' ') ++first;
  while (last != first && last[-1] == ' ') --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

// Extracts "x" from "name(x)"; returns false if text is not of that shape.
bool call_argument(const std::string& text, const std::string& name,
                   std::string& arg) {
  if (text.size() < name.size() + 2 || text.compare(0, name.size(), name) != 0 ||
      text[name.size()] != '(' || text.back() != ')') {
    return false;
  }
  arg = text.substr(name.size() + 1, text.size() - name.size() - 2);
  return true;
}

}  // namespace

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time grid horizon must be positive");
  }
  if (n_steps < 1) {
    throw std::invalid_argument("time grid needs at least one step");
  }
  TimeGrid grid;
  grid.points_.resize(n_steps + 1);
  grid.steps_.assign(n_steps, horizon / static_cast<double>(n_steps));
  for (std::size_t k = 0; k < n_steps; ++k) {
    grid.points_[k] = horizon * static_cast<double>(k) / static_cast<double>(n_steps);
  }
  grid.points_[n_steps] = horizon;
  grid.uniform_ = true;
  return grid;
}

TimeGrid TimeGrid::from_points(std::vector<double> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("time grid needs at least one step");
  }
  if (points.front() != 0.0) {
    throw std::invalid_argument("time grid must start at 0");
  }
  TimeGrid grid;
  grid.steps_.resize(points.size() - 1);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (!(points[k + 1] > points[k])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
    grid.steps_[k] = points[k + 1] - points[k];
  }
  grid.points_ = std::move(points);
  grid.uniform_ = false;
  return grid;
}

std::size_t TimeGrid::nearest_point(double time) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), time);
  if (it == points_.begin()) return 0;
  if (it == points_.end()) return points_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - points_.begin());
  return (time - points_[hi - 1] <= points_[hi] - time) ? hi - 1 : hi;
}

TimeGrid make_grid(double horizon, std::size_t n_steps) {
  return TimeGrid::uniform(horizon, n_steps);
}

VolatilityBand::VolatilityBand(double sigma_lo, double sigma_hi)
    : lo_(sigma_lo), hi_(sigma_hi) {
  if (!(sigma_lo > 0.0) || !(sigma_lo <= sigma_hi) || !std::isfinite(sigma_hi)) {
    throw std::invalid_argument("volatility band requires 0 < sigma_lo <= sigma_hi");
  }
}

std::string ControlSpec::label() const {
  switch (kind) {
    case Kind::Constant:
      return "constant(" + format_number(parameter) + ")";
    case Kind::BangBang:
      return "bang_bang(" + format_number(parameter) + ")";
    case Kind::UniformIid:
      return "uniform_iid";
  }
  return {};
}

ControlSpec ControlSpec::parse(const std::string& text, const VolatilityBand& band) {
  std::string arg;
  if (text == "lo") return constant(band.lo());
  if (text == "hi") return constant(band.hi());
  if (text == "uniform_iid") return uniform_iid();
  if (call_argument(text, "constant", arg)) return constant(parse_number(arg));
  if (call_argument(text, "bang_bang", arg)) return bang_bang(parse_number(arg));
  throw std::invalid_argument("unknown scenario generator '" + text + "'");
}

VolControl gen_control(const ControlSpec& spec, const VolatilityBand& band,
                       const TimeGrid& grid, std::uint64_t seed) {
  const std::size_t n = grid.n_steps();
  VolControl control{grid, std::vector<double>(n, band.lo())};
  if (spec.kind == ControlSpec::Kind::Constant && !band.contains(spec.parameter)) {
    throw std::invalid_argument("constant control " + format_number(spec.parameter) +
                                " lies outside the volatility band");
  }
  if (spec.kind == ControlSpec::Kind::BangBang &&
      !(spec.parameter >= 0.0 && spec.parameter <= 1.0)) {
    throw std::invalid_argument("bang_bang switch probability must lie in [0, 1]");
  }
  if (band.degenerate()) return control;

  SplitMix64 rng(seed);
  switch (spec.kind) {
    case ControlSpec::Kind::Constant:
      std::fill(control.gamma.begin(), control.gamma.end(), spec.parameter);
      break;
    case ControlSpec::Kind::BangBang: {
      bool high = rng.uniform() < 0.5;
      for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && rng.uniform() < spec.parameter) high = !high;
        control.gamma[k] = high ? band.hi() : band.lo();
      }
      break;
    }
    case ControlSpec::Kind::UniformIid:
      for (std::size_t k = 0; k < n; ++k) {
        const double g = band.lo() + (band.hi() - band.lo()) * rng.uniform();
        control.gamma[k] = std::clamp(g, band.lo(), band.hi());
      }
      break;
  }
  return control;
}

ScenarioFamily::ScenarioFamily(VolatilityBand band, std::vector<ControlSpec> members)
    : band_(band) {
  std::vector<ControlSpec> extremes{ControlSpec::constant(band.lo())};
  if (!band.degenerate()) extremes.push_back(ControlSpec::constant(band.hi()));
  for (const auto& spec : extremes) {
    if (std::find(members.begin(), members.end(), spec) == members.end()) {
      members_.push_back(spec);
    }
  }
  for (const auto& spec : members) {
    if (spec.kind == ControlSpec::Kind::Constant && !band.contains(spec.parameter)) {
      throw std::invalid_argument("scenario " + spec.label() + " lies outside the band");
    }
    members_.push_back(spec);
  }
}

std::vector<std::string> ScenarioFamily::labels() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.label());
  return out;
}

RhoPath rho_of(const VolControl& control) {
  RhoPath path{control.grid, std::vector<double>(control.gamma.size())};
  for (std::size_t k = 0; k < control.gamma.size(); ++k) {
    const double g = control.gamma[k];
    path.rho[k] = 1.0 / (g * g);
  }
  return path;
}

}  // namespace gmerton
