#include "experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "reloc/errors.hpp"
#include "reloc/verify.hpp"

namespace reloc::cli {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Scgf:
      return "scgf";
    case ExperimentKind::Tails:
      return "tails";
    case ExperimentKind::Equivalence:
      return "equivalence";
    case ExperimentKind::Dobrow:
      return "dobrow";
    case ExperimentKind::Lemmas:
      return "lemmas";
    case ExperimentKind::Residual:
      return "residual";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::Scgf,   ExperimentKind::Tails,  ExperimentKind::Equivalence,
      ExperimentKind::Dobrow, ExperimentKind::Lemmas, ExperimentKind::Residual};
  return kinds;
}

ExperimentKind kind_from_name(const std::string& name) {
  for (ExperimentKind k : all_kinds()) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("", "unknown experiment kind '" + name +
                            "' (scgf, tails, equivalence, dobrow, lemmas, residual)");
}

namespace {

void flatten(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
  if (node.is_object() && (prefix.empty() || !node.empty())) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  if (out.count(prefix)) throw ConfigError("", "key '" + prefix + "' given twice");
  out[prefix] = node;
}

// Consumes keys as they are read; whatever is left over is unknown.
class Keys {
 public:
  explicit Keys(std::map<std::string, json> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<json> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    json v = std::move(it->second);
    values_.erase(it);
    return v;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError("", key + " must be a string");
    return v->get<std::string>();
  }

  std::string required_str(const std::string& key) {
    if (!has(key)) throw ConfigError("", "missing required key '" + key + "'");
    return str(key, "");
  }

  double number(const std::string& key, double fallback) {
    auto v = take(key);
    if (!v) return fallback;
    return as_number(key, *v);
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw ConfigError("", "missing required key '" + key + "'");
    return number(key, 0.0);
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    auto v = take(key);
    if (!v) return fallback;
    return as_uint(key, *v);
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError("", key + " must be an array of numbers");
    std::vector<double> out;
    for (const json& e : *v) out.push_back(as_number(key, e));
    return out;
  }

  std::vector<std::uint64_t> uints(const std::string& key, std::vector<std::uint64_t> fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError("", key + " must be an array of integers");
    std::vector<std::uint64_t> out;
    for (const json& e : *v) out.push_back(as_uint(key, e));
    return out;
  }

  void reject_leftovers() const {
    if (values_.empty()) return;
    std::string names;
    for (const auto& [k, v] : values_) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("", "unknown or inapplicable keys: " + names);
  }

 private:
  static double as_number(const std::string& key, const json& v) {
    if (!v.is_number()) throw ConfigError("", key + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("", key + " must be finite");
    return d;
  }

  static std::uint64_t as_uint(const std::string& key, const json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("", key + " must be a non-negative integer");
  }

  std::map<std::string, json> values_;
};

std::vector<std::size_t> to_sizes(const std::vector<std::uint64_t>& v) {
  return {v.begin(), v.end()};
}

std::vector<std::uint64_t> to_u64(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

MemoryKernelSpec parse_kernel(Keys& keys) {
  const std::string family = keys.required_str("kernel.family");
  if (family == "Mu1") {
    return MemoryKernelSpec::mu1(keys.required_number("kernel.alpha"),
                                 keys.required_number("kernel.beta"));
  }
  if (family == "Mu2") {
    return MemoryKernelSpec::mu2(keys.required_number("kernel.gamma"),
                                 keys.required_number("kernel.delta"));
  }
  throw ConfigError("A1", "unknown kernel family '" + family + "' (Mu1 or Mu2)");
}

RunLengthSpec parse_runs(Keys& keys) {
  const std::string name = keys.required_str("runlength.family");
  switch (RunLengthSpec::family_from_name(name)) {
    case RunLengthFamily::Deterministic:
      return RunLengthSpec::deterministic(keys.required_number("runlength.c"));
    case RunLengthFamily::UniformInterval:
      return RunLengthSpec::uniform_interval(keys.required_number("runlength.a"),
                                             keys.required_number("runlength.b"));
    case RunLengthFamily::StretchedExpTail:
      return RunLengthSpec::stretched_exp_tail(keys.required_number("runlength.kappa"),
                                               keys.required_number("runlength.lambda"));
  }
  throw ConfigError("A2", "unknown run-length family");
}

MarkovModel parse_markov(Keys& keys) {
  const std::string family = keys.required_str("markov.family");
  const auto dim = keys.uint("markov.dimension", 1);
  if (dim < 1 || dim > 64) throw ConfigError("A3", "markov.dimension must be in [1, 64]");
  MarkovFamily fam;
  if (family == "BrownianMotion") {
    fam = MarkovFamily::BrownianMotion;
  } else if (family == "LatticeWalk") {
    fam = MarkovFamily::LatticeWalk;
  } else {
    throw ConfigError("A3", "unknown Markov family '" + family + "' (BrownianMotion, LatticeWalk)");
  }
  const std::string default_mode = fam == MarkovFamily::LatticeWalk ? "Discrete" : "Continuous";
  const std::string mode_name = keys.str("markov.time_mode", default_mode);
  TimeMode mode;
  if (mode_name == "Discrete") {
    mode = TimeMode::Discrete;
  } else if (mode_name == "Continuous") {
    mode = TimeMode::Continuous;
  } else {
    throw ConfigError("A3", "markov.time_mode must be Discrete or Continuous");
  }
  return MarkovModel::make(fam, static_cast<int>(dim), mode);
}

void require_increasing(const std::vector<double>& v, const std::string& key, double floor) {
  if (v.empty()) throw ConfigError("", key + " must not be empty");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > floor)) {
      throw ConfigError("", key + " values must exceed " + std::to_string(floor) +
                                " (scale s(t) undefined below)");
    }
    if (k > 0 && !(v[k] > v[k - 1])) throw ConfigError("", key + " must be increasing");
  }
}

void validate(const ExperimentConfig& c) {
  c.model.validate();
  const double floor = c.model.kernel.scale_floor();
  switch (c.kind) {
    case ExperimentKind::Scgf:
      if (c.scgf.xi_grid.empty()) throw ConfigError("", "scgf.xi_grid must not be empty");
      require_increasing(c.scgf.horizons, "scgf.horizons", floor);
      if (c.scgf.horizons.size() < kMinScgfLadder) {
        throw ConfigError("", "scgf.horizons needs at least " + std::to_string(kMinScgfLadder) +
                                  " ladder points for the slope fit");
      }
      if (c.scgf.theory_points < 2 || !(c.scgf.theory_xi_max > c.scgf.theory_xi_min)) {
        throw ConfigError("", "scgf theory grid needs >= 2 points on a non-empty range");
      }
      break;
    case ExperimentKind::Tails:
      require_increasing(c.tails.horizons, "tails.horizons", floor);
      if (c.tails.samples == 0) throw ConfigError("", "tails.samples must be > 0");
      if (c.tails.x_grid.empty()) throw ConfigError("", "tails.x_grid must not be empty");
      for (double x : c.tails.x_grid) {
        if (!(x >= 0.0)) throw ConfigError("", "tails.x_grid values must be >= 0");
      }
      if (!c.model.rate_function().radial_ok()) {
        throw ConfigError("A3", "tail exponents need Brownian motion or a symmetric 1-d walk");
      }
      if (c.tails.theory_points < 2 || !(c.tails.theory_x_max > 0.0)) {
        throw ConfigError("", "tails theory grid needs >= 2 points and theory_x_max > 0");
      }
      break;
    case ExperimentKind::Equivalence:
      if (!(c.equivalence.t >= 0.0)) throw ConfigError("", "equivalence.t must be >= 0");
      if (c.equivalence.samples < 2) throw ConfigError("", "equivalence.samples must be >= 2");
      if (!(c.equivalence.alpha > 0.0 && c.equivalence.alpha < 1.0)) {
        throw ConfigError("", "equivalence.alpha must be in (0, 1)");
      }
      break;
    case ExperimentKind::Dobrow:
      if (c.dobrow.targets.empty()) throw ConfigError("", "dobrow.targets must not be empty");
      for (std::size_t n : c.dobrow.targets) {
        if (n < 2 || n > kMaxExactAncestryTarget) {
          throw ConfigError("", "dobrow.targets must lie in [2, " +
                                    std::to_string(kMaxExactAncestryTarget) + "]");
        }
        if (!c.dobrow.weights.empty() && n > c.dobrow.weights.size()) {
          throw ConfigError("", "dobrow.weights has fewer entries than the largest target");
        }
      }
      for (double w : c.dobrow.weights) {
        if (!(w > 0.0)) throw ConfigError("", "dobrow.weights must be > 0");
      }
      break;
    case ExperimentKind::Lemmas: {
      if (c.lemmas.sum != "log_power" && c.lemmas.sum != "delta_power") {
        throw ConfigError("", "lemmas.sum must be log_power or delta_power");
      }
      if (c.lemmas.sum == "delta_power" && !(c.lemmas.exponent > 0.0 && c.lemmas.exponent <= 0.5)) {
        throw ConfigError("A1", "lemmas.exponent (delta) must be in (0, 1/2]");
      }
      TestFunction::from_name(c.lemmas.g, c.lemmas.g_xi);
      const auto& n = c.lemmas.n_ladder;
      if (n.empty()) throw ConfigError("", "lemmas.n_ladder must not be empty");
      for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] < 2 || (k > 0 && n[k] <= n[k - 1])) {
          throw ConfigError("", "lemmas.n_ladder must increase and start at >= 2");
        }
      }
      break;
    }
    case ExperimentKind::Residual:
      require_increasing(c.residual.horizons, "residual.horizons", floor);
      if (c.residual.env_seeds.empty()) throw ConfigError("", "residual.env_seeds must not be empty");
      if (!(c.residual.threshold > 0.0)) throw ConfigError("", "residual.threshold must be > 0");
      break;
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  std::map<std::string, json> flat;
  flatten(doc, "", flat);
  Keys keys(std::move(flat));

  ExperimentConfig c;
  c.kind = kind_from_name(keys.required_str("experiment"));
  c.model = ModelSpec{parse_kernel(keys), parse_runs(keys), parse_markov(keys)};
  c.master_seed = keys.uint("seeds.master", c.master_seed);
  c.env_seed = keys.uint("seeds.env", c.env_seed);
  if (keys.has("run.workers")) {
    const auto w = keys.uint("run.workers", 1);
    if (w < 1 || w > 1024) throw ConfigError("", "run.workers must be in [1, 1024]");
    c.workers = static_cast<unsigned>(w);
  }

  auto& s = c.scgf;
  s.xi_grid = keys.numbers("scgf.xi_grid", s.xi_grid);
  s.horizons = keys.numbers("scgf.horizons", s.horizons);
  s.theory_xi_min = keys.number("scgf.theory_xi_min", s.theory_xi_min);
  s.theory_xi_max = keys.number("scgf.theory_xi_max", s.theory_xi_max);
  s.theory_points = keys.uint("scgf.theory_points", s.theory_points);

  auto& t = c.tails;
  t.x_grid = keys.numbers("tails.x_grid", t.x_grid);
  t.horizons = keys.numbers("tails.horizons", {std::exp(6.0), std::exp(8.0), std::exp(10.0)});
  t.samples = keys.uint("tails.samples", t.samples);
  t.min_hits = keys.uint("tails.min_hits", t.min_hits);
  t.theory_x_max = keys.number("tails.theory_x_max", t.theory_x_max);
  t.theory_points = keys.uint("tails.theory_points", t.theory_points);

  auto& e = c.equivalence;
  e.t = keys.number("equivalence.t", e.t);
  e.samples = keys.uint("equivalence.samples", e.samples);
  e.threshold = keys.number("equivalence.threshold", e.threshold);
  e.alpha = keys.number("equivalence.alpha", e.alpha);

  auto& d = c.dobrow;
  d.targets = to_sizes(keys.uints("dobrow.targets", to_u64(d.targets)));
  d.samples = keys.uint("dobrow.samples", d.samples);
  d.weights = keys.numbers("dobrow.weights", d.weights);

  auto& l = c.lemmas;
  l.sum = keys.str("lemmas.sum", l.sum);
  l.exponent = keys.number("lemmas.exponent", l.exponent);
  l.g = keys.str("lemmas.g", l.g);
  l.g_xi = keys.number("lemmas.g_xi", l.g_xi);
  l.n_ladder = to_sizes(keys.uints("lemmas.n_ladder", to_u64(l.n_ladder)));

  auto& r = c.residual;
  r.horizons = keys.numbers("residual.horizons", r.horizons);
  r.env_seeds = keys.uints("residual.env_seeds", r.env_seeds);
  r.dense_points = keys.uint("residual.dense_points", r.dense_points);
  r.threshold = keys.number("residual.threshold", r.threshold);

  keys.reject_leftovers();
  validate(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError("", std::string("malformed JSON: ") + err.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const ExperimentConfig& c) {
  json j = json::object();
  j["experiment"] = to_string(c.kind);
  const auto& k = c.model.kernel;
  j["kernel.family"] = to_string(k.family());
  if (k.family() == KernelFamily::Mu1) {
    j["kernel.alpha"] = k.alpha();
    j["kernel.beta"] = k.beta();
  } else {
    j["kernel.gamma"] = k.gamma();
    j["kernel.delta"] = k.delta();
  }
  const auto& rl = c.model.runs;
  j["runlength.family"] = to_string(rl.family());
  switch (rl.family()) {
    case RunLengthFamily::Deterministic:
      j["runlength.c"] = rl.c();
      break;
    case RunLengthFamily::UniformInterval:
      j["runlength.a"] = rl.a();
      j["runlength.b"] = rl.b();
      break;
    case RunLengthFamily::StretchedExpTail:
      j["runlength.kappa"] = rl.kappa();
      j["runlength.lambda"] = rl.lambda_scale();
      break;
  }
  j["markov.family"] = to_string(c.model.markov.family());
  j["markov.dimension"] = c.model.markov.dimension();
  j["markov.time_mode"] = to_string(c.model.markov.time_mode());
  j["seeds.master"] = c.master_seed;
  j["seeds.env"] = c.env_seed;
  if (c.workers) j["run.workers"] = *c.workers;

  j["scgf.xi_grid"] = c.scgf.xi_grid;
  j["scgf.horizons"] = c.scgf.horizons;
  j["scgf.theory_xi_min"] = c.scgf.theory_xi_min;
  j["scgf.theory_xi_max"] = c.scgf.theory_xi_max;
  j["scgf.theory_points"] = c.scgf.theory_points;
  j["tails.x_grid"] = c.tails.x_grid;
  j["tails.horizons"] = c.tails.horizons;
  j["tails.samples"] = c.tails.samples;
  j["tails.min_hits"] = c.tails.min_hits;
  j["tails.theory_x_max"] = c.tails.theory_x_max;
  j["tails.theory_points"] = c.tails.theory_points;
  j["equivalence.t"] = c.equivalence.t;
  j["equivalence.samples"] = c.equivalence.samples;
  j["equivalence.threshold"] = c.equivalence.threshold;
  j["equivalence.alpha"] = c.equivalence.alpha;
  j["dobrow.targets"] = c.dobrow.targets;
  j["dobrow.samples"] = c.dobrow.samples;
  j["dobrow.weights"] = c.dobrow.weights;
  j["lemmas.sum"] = c.lemmas.sum;
  j["lemmas.exponent"] = c.lemmas.exponent;
  j["lemmas.g"] = c.lemmas.g;
  j["lemmas.g_xi"] = c.lemmas.g_xi;
  j["lemmas.n_ladder"] = c.lemmas.n_ladder;
  j["residual.horizons"] = c.residual.horizons;
  j["residual.env_seeds"] = c.residual.env_seeds;
  j["residual.dense_points"] = c.residual.dense_points;
  j["residual.threshold"] = c.residual.threshold;
  return j;
}

}  // namespace reloc::cli
