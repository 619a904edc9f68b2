#include "cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gmerton/errors.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton::cli {

namespace pt = boost::property_tree;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"market",
       {"r_per_year", "mu_per_year", "sigma", "c", "sigma_r", "x0", "dividends", "mu_schedule",
        "sigma_schedule", "c_schedule", "sigma_floor"}},
      {"band", {"sigma_lo", "sigma_hi"}},
      {"grid", {"horizon_years", "n_steps"}},
      {"scenarios", {"family"}},
      {"run", {"master_seed", "output_dir"}},
      {"simulate", {"n_paths", "functionals", "wealth_strategies", "sample_paths"}},
      {"lattice",
       {"n_steps", "sweep", "cap", "tolerance_k", "pi_grid_lo", "pi_grid_hi", "pi_grid_step",
        "gap_constant_step", "random_functionals"}},
      {"strategies", {"optimal", "perturbation", "alternatives"}},
      {"statics", {"c_grid", "rho_grid", "sigma_grid", "sigma_r_grid"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string current;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(trim(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!trim(current).empty() || !items.empty()) items.push_back(trim(current));
  return items;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& path) const {
    auto node = tree_.get_child_optional(pt::ptree::path_type(path, '.'));
    if (!node) return std::nullopt;
    return trim(node->data());
  }

  double number(const std::string& path, double fallback) const {
    auto text = raw(path);
    return text ? to_double(path, *text) : fallback;
  }

  std::size_t count(const std::string& path, std::size_t fallback) const {
    auto text = raw(path);
    return text ? to_size(path, *text) : fallback;
  }

  std::vector<double> numbers(const std::string& path, std::vector<double> fallback) const {
    auto text = raw(path);
    if (!text) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*text)) out.push_back(to_double(path, item));
    return out;
  }

  std::vector<std::string> strings(const std::string& path,
                                   std::vector<std::string> fallback) const {
    auto text = raw(path);
    return text ? split_list(*text) : fallback;
  }

  // "a:b, c:d" pairs.
  std::vector<std::pair<double, double>> pairs(const std::string& path) const {
    std::vector<std::pair<double, double>> out;
    auto text = raw(path);
    if (!text || text->empty()) return out;
    for (const auto& item : split_list(*text)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError(path, "expected time:value pairs");
      out.emplace_back(to_double(path, item.substr(0, colon)),
                       to_double(path, item.substr(colon + 1)));
    }
    return out;
  }

  static double to_double(const std::string& path, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw ConfigError(path, "expected a number, got '" + text + "'");
    }
    return v;
  }

  static std::uint64_t to_u64(const std::string& path, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw ConfigError(path, "expected a non-negative integer, got '" + text + "'");
    }
    return v;
  }

  static std::size_t to_size(const std::string& path, const std::string& text) {
    return static_cast<std::size_t>(to_u64(path, text));
  }

 private:
  const pt::ptree& tree_;
};

StepSchedule schedule_from(const std::string& path,
                           const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> starts;
  std::vector<double> values;
  for (const auto& [t, v] : pairs) {
    starts.push_back(t);
    values.push_back(v);
  }
  try {
    return StepSchedule(std::move(starts), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

void validate(const ExperimentConfig& cfg, const std::string& optimal_label) {
  try {
    cfg.market.validate(cfg.horizon_years);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("market", e.what());
  }
  if (!(cfg.x0 > 0.0)) throw ConfigError("market.x0", "initial wealth must be positive");
  if (!(cfg.horizon_years > 0.0)) throw ConfigError("grid.horizon_years", "must be positive");
  if (cfg.n_steps < 1) throw ConfigError("grid.n_steps", "must be at least 1");
  if (cfg.simulate.n_paths < 2) throw ConfigError("simulate.n_paths", "must be at least 2");
  if (cfg.lattice.n_steps < 1) throw ConfigError("lattice.n_steps", "must be at least 1");
  if (cfg.lattice.n_steps > cfg.lattice.cap) {
    throw ConfigError("lattice.n_steps", "exceeds lattice.cap");
  }
  for (std::size_t n : cfg.lattice.sweep) {
    if (n < 1 || n > cfg.lattice.cap) throw ConfigError("lattice.sweep", "entry outside [1, cap]");
  }
  if (!(cfg.lattice.tolerance_k >= 0.0)) {
    throw ConfigError("lattice.tolerance_k", "must be non-negative");
  }
  if (!(cfg.lattice.pi_grid_step > 0.0) || !(cfg.lattice.pi_grid_hi >= cfg.lattice.pi_grid_lo)) {
    throw ConfigError("lattice.pi_grid_step", "needs step > 0 and pi_grid_hi >= pi_grid_lo");
  }
  if (!(cfg.lattice.gap_constant_step > 0.0)) {
    throw ConfigError("lattice.gap_constant_step", "must be positive");
  }
  for (const auto& spec : cfg.scenarios) {
    if (spec.kind == ControlSpec::Kind::Constant && !cfg.band.contains(spec.parameter)) {
      throw ConfigError("scenarios.family", spec.label() + " lies outside the band");
    }
    if (spec.kind == ControlSpec::Kind::BangBang &&
        !(spec.parameter >= 0.0 && spec.parameter <= 1.0)) {
      throw ConfigError("scenarios.family", "bang_bang probability must lie in [0, 1]");
    }
  }

  // Resolve every strategy label now so bad labels fail before any run.
  auto uses_dothan = [](const std::string& label) {
    return label.find("dothan") != std::string::npos;
  };
  std::vector<std::string> labels = cfg.strategies.alternatives;
  labels.insert(labels.end(), cfg.simulate.wealth_strategies.begin(),
                cfg.simulate.wealth_strategies.end());
  labels.push_back(optimal_label);
  bool dothan_strategy = cfg.market.dothan() && optimal_label == "model";
  for (const auto& label : labels) dothan_strategy = dothan_strategy || uses_dothan(label);
  if (dothan_strategy && cfg.market.sigma_r.value_or(0.0) == cfg.market.sigma) {
    throw ConfigError("market.sigma_r",
                      "equals market.sigma; the stochastic-rate strategy is singular");
  }
  try {
    const Strategy optimum = optimal_label == "model"
                                 ? model_optimal_strategy(cfg.market)
                                 : strategy_from_label(optimal_label, cfg.market,
                                                       zero_strategy());
    for (const auto& label : labels) {
      if (label != "model") strategy_from_label(label, cfg.market, optimum);
    }
  } catch (const SingularParameters& e) {
    throw ConfigError("market.sigma_r", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("strategies", e.what());
  }
  static const std::set<std::string> plain{"B_T", "Btilde_T", "qv_T", "qvtilde_T", "Z_T", "M_0"};
  for (const auto& f : cfg.simulate.functionals) {
    if (plain.count(f) != 0) continue;
    if (f.rfind("log_wealth_T:", 0) == 0) {
      const std::string label = f.substr(13);
      try {
        if (label != "model") strategy_from_label(label, cfg.market, zero_strategy());
      } catch (const std::exception& e) {
        throw ConfigError("simulate.functionals", e.what());
      }
      continue;
    }
    throw ConfigError("simulate.functionals", "unknown functional '" + f + "'");
  }
  for (double s : cfg.statics.sigma_grid) {
    if (!(s > 0.0)) throw ConfigError("statics.sigma_grid", "entries must be positive");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", std::string("malformed: ") + e.message() + " at line " +
                                    std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "keys must be inside a [section]");
    }
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) {
      if (it->second.count(key) == 0) throw ConfigError(section + "." + key, "unknown key");
    }
  }

  const Reader in(tree);
  ExperimentConfig cfg;

  MarketParams& m = cfg.market;
  m.r = in.number("market.r_per_year", m.r);
  m.mu = in.number("market.mu_per_year", m.mu);
  m.sigma = in.number("market.sigma", m.sigma);
  m.c = in.number("market.c", m.c);
  if (in.raw("market.sigma_r")) m.sigma_r = in.number("market.sigma_r", 0.0);
  m.sigma_floor = in.number("market.sigma_floor", m.sigma_floor);
  for (const auto& [t, d] : in.pairs("market.dividends")) m.dividends.push_back({t, d});
  if (in.raw("market.mu_schedule")) {
    m.mu_schedule = schedule_from("market.mu_schedule", in.pairs("market.mu_schedule"));
  }
  if (in.raw("market.sigma_schedule")) {
    m.sigma_schedule = schedule_from("market.sigma_schedule", in.pairs("market.sigma_schedule"));
  }
  if (in.raw("market.c_schedule")) {
    m.c_schedule = schedule_from("market.c_schedule", in.pairs("market.c_schedule"));
  }
  cfg.x0 = in.number("market.x0", cfg.x0);

  try {
    cfg.band = VolatilityBand(in.number("band.sigma_lo", cfg.band.lo()),
                              in.number("band.sigma_hi", cfg.band.hi()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("band", e.what());
  }
  cfg.horizon_years = in.number("grid.horizon_years", cfg.horizon_years);
  cfg.n_steps = in.count("grid.n_steps", cfg.n_steps);

  if (auto family = in.raw("scenarios.family")) {
    const auto items = split_list(*family);
    if (items.empty()) throw ConfigError("scenarios.family", "scenario family is empty");
    for (const auto& item : items) {
      try {
        cfg.scenarios.push_back(ControlSpec::parse(item, cfg.band));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("scenarios.family", e.what());
      }
    }
  }

  if (auto seed = in.raw("run.master_seed")) {
    cfg.master_seed = Reader::to_u64("run.master_seed", *seed);
  }
  if (auto dir = in.raw("run.output_dir")) cfg.output_dir = *dir;

  SimulateConfig& sim = cfg.simulate;
  sim.n_paths = in.count("simulate.n_paths", sim.n_paths);
  sim.functionals = in.strings("simulate.functionals", sim.functionals);
  sim.wealth_strategies = in.strings("simulate.wealth_strategies", sim.wealth_strategies);
  sim.sample_paths = in.count("simulate.sample_paths", sim.sample_paths);

  LatticeConfig& lat = cfg.lattice;
  lat.n_steps = in.count("lattice.n_steps", lat.n_steps);
  if (auto sweep = in.raw("lattice.sweep")) {
    lat.sweep.clear();
    for (const auto& item : split_list(*sweep)) {
      lat.sweep.push_back(Reader::to_size("lattice.sweep", item));
    }
  }
  lat.cap = in.count("lattice.cap", lat.cap);
  lat.tolerance_k = in.number("lattice.tolerance_k", lat.tolerance_k);
  lat.pi_grid_lo = in.number("lattice.pi_grid_lo", lat.pi_grid_lo);
  lat.pi_grid_hi = in.number("lattice.pi_grid_hi", lat.pi_grid_hi);
  lat.pi_grid_step = in.number("lattice.pi_grid_step", lat.pi_grid_step);
  lat.gap_constant_step = in.number("lattice.gap_constant_step", lat.gap_constant_step);
  lat.random_functionals = in.count("lattice.random_functionals", lat.random_functionals);

  StrategiesConfig& strat = cfg.strategies;
  if (auto optimal = in.raw("strategies.optimal")) strat.optimal = *optimal;
  strat.perturbation = in.number("strategies.perturbation", strat.perturbation);
  strat.alternatives = in.strings("strategies.alternatives", strat.alternatives);

  StaticsConfig& st = cfg.statics;
  st.c_grid = in.numbers("statics.c_grid", st.c_grid);
  st.rho_grid = in.numbers("statics.rho_grid", st.rho_grid);
  st.sigma_grid = in.numbers("statics.sigma_grid", st.sigma_grid);
  st.sigma_r_grid = in.numbers("statics.sigma_r_grid", st.sigma_r_grid);

  if (overrides.seed) cfg.master_seed = *overrides.seed;
  if (overrides.lattice_steps) cfg.lattice.n_steps = *overrides.lattice_steps;
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;

  validate(cfg, strat.optimal);

  std::string hashed = text;
  hashed += "\n#seed=" + std::to_string(cfg.master_seed);
  hashed += "\n#lattice_steps=" + std::to_string(cfg.lattice.n_steps);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(hashed)));
  cfg.config_hash = buf;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides);
}

}  // namespace gmerton::cli
