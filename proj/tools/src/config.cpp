#include "isinglearn_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "isinglearn/exact.hpp"

namespace isinglearn::cli {

using json = nlohmann::json;

namespace {

void require_known_keys(const json& obj, const std::string& block, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(block + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(block + "." + key + ": unknown field");
  }
}

double get_double(const json& obj, const std::string& block, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(block + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& block, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(block + "." + key + ": expected an integer");
  const auto value = v.get<std::int64_t>();
  if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
    throw ConfigError(block + "." + key + ": out of range");
  return static_cast<int>(value);
}

std::uint64_t as_seed(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(where + ": expected a non-negative integer");
}

EnsembleSpec parse_ensemble(const json& obj) {
  require_known_keys(obj, "ensemble", {"kind", "n", "beta", "d", "width", "seed"});
  EnsembleSpec spec;
  if (!obj.contains("kind") || !obj.at("kind").is_string()) throw ConfigError("ensemble.kind: expected a string");
  try {
    spec.kind = ensemble_kind_from_string(obj.at("kind").get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(std::string("ensemble.kind: ") + e.what());
  }
  if (obj.contains("n")) spec.n = get_int(obj, "ensemble", "n");
  if (obj.contains("beta")) spec.beta = get_double(obj, "ensemble", "beta");
  if (obj.contains("d")) spec.d = get_int(obj, "ensemble", "d");
  if (obj.contains("width")) spec.width = get_double(obj, "ensemble", "width");
  if (obj.contains("seed")) spec.seed = as_seed(obj.at("seed"), "ensemble.seed");
  return spec;
}

ConstraintSet parse_constraint_block(const json& obj) {
  if (!obj.is_object()) throw ConfigError("constraint: expected an object");
  if (!obj.contains("kind") || !obj.at("kind").is_string()) throw ConfigError("constraint.kind: expected a string");
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "OpNormBall") {
    require_known_keys(obj, "constraint", {"kind", "lambda"});
    return OpNormBall{get_double(obj, "constraint", "lambda")};
  }
  if (kind == "SpectralSpread") {
    require_known_keys(obj, "constraint", {"kind", "spread"});
    return SpectralSpread{get_double(obj, "constraint", "spread")};
  }
  if (kind == "WidthBall") {
    require_known_keys(obj, "constraint", {"kind", "width"});
    return WidthBall{get_double(obj, "constraint", "width")};
  }
  if (kind == "AntiferroSpike") {
    require_known_keys(obj, "constraint", {"kind", "alpha", "c"});
    return AntiferroSpike{get_double(obj, "constraint", "alpha"), get_double(obj, "constraint", "c")};
  }
  throw ConfigError("constraint.kind: unknown constraint \"" + kind + "\"");
}

FitConfig parse_optimizer(const json& obj) {
  require_known_keys(obj, "optimizer",
                     {"max_iters", "grad_map_tol", "initial_step", "backtracking_factor", "armijo_const", "projection"});
  FitConfig cfg;
  if (obj.contains("max_iters")) cfg.max_iters = get_int(obj, "optimizer", "max_iters");
  if (obj.contains("grad_map_tol")) cfg.grad_map_tol = get_double(obj, "optimizer", "grad_map_tol");
  if (obj.contains("initial_step")) cfg.initial_step = get_double(obj, "optimizer", "initial_step");
  if (obj.contains("backtracking_factor")) cfg.backtracking_factor = get_double(obj, "optimizer", "backtracking_factor");
  if (obj.contains("armijo_const")) cfg.armijo_const = get_double(obj, "optimizer", "armijo_const");
  if (obj.contains("projection")) {
    const json& p = obj.at("projection");
    require_known_keys(p, "optimizer.projection", {"tol", "max_iter"});
    if (p.contains("tol")) cfg.projection.tol = get_double(p, "optimizer.projection", "tol");
    if (p.contains("max_iter")) cfg.projection.max_iter = get_int(p, "optimizer.projection", "max_iter");
  }
  return cfg;
}

SweepSpec parse_sweep(const json& obj) {
  require_known_keys(obj, "sweep", {"l_values", "seeds", "metrics", "method", "timing"});
  SweepSpec spec;
  if (obj.contains("l_values")) {
    const json& ls = obj.at("l_values");
    if (!ls.is_array()) throw ConfigError("sweep.l_values: expected an array");
    for (const auto& v : ls) {
      if (!v.is_number_integer()) throw ConfigError("sweep.l_values: expected integers");
      spec.l_values.push_back(v.get<int>());
    }
  }
  if (obj.contains("seeds")) {
    const json& ss = obj.at("seeds");
    if (!ss.is_array()) throw ConfigError("sweep.seeds: expected an array");
    for (const auto& v : ss) spec.seeds.push_back(as_seed(v, "sweep.seeds"));
  }
  if (obj.contains("metrics")) {
    const json& ms = obj.at("metrics");
    if (!ms.is_array()) throw ConfigError("sweep.metrics: expected an array");
    for (const auto& v : ms) {
      if (!v.is_string()) throw ConfigError("sweep.metrics: expected strings");
      spec.metrics.push_back(v.get<std::string>());
    }
  }
  if (obj.contains("method")) {
    if (!obj.at("method").is_string()) throw ConfigError("sweep.method: expected a string");
    spec.method = sample_method_from_string(obj.at("method").get<std::string>());
  }
  if (obj.contains("timing")) {
    if (!obj.at("timing").is_boolean()) throw ConfigError("sweep.timing: expected a boolean");
    spec.timing = obj.at("timing").get<bool>();
  }
  return spec;
}

}  // namespace

ConfigFile parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require_known_keys(doc, "config", {"ensemble", "constraint", "optimizer", "sweep"});
  ConfigFile file;
  if (doc.contains("ensemble")) file.ensemble = parse_ensemble(doc.at("ensemble"));
  if (doc.contains("constraint")) file.constraint = parse_constraint_block(doc.at("constraint"));
  if (doc.contains("optimizer")) file.optimizer = parse_optimizer(doc.at("optimizer"));
  if (doc.contains("sweep")) file.sweep = parse_sweep(doc.at("sweep"));
  return file;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

ConstraintSet parse_constraint(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw ConfigError("--constraint: expected Kind(params), got \"" + text + "\"");
  const std::string kind = text.substr(0, open);
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::vector<double> params;
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ';')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--constraint: bad parameter \"" + item + "\"");
    }
  }
  const auto expect = [&](std::size_t count) {
    if (params.size() != count)
      throw ConfigError("--constraint: " + kind + " takes " + std::to_string(count) + " parameter(s)");
  };
  if (kind == "OpNormBall") return expect(1), ConstraintSet{OpNormBall{params[0]}};
  if (kind == "SpectralSpread") return expect(1), ConstraintSet{SpectralSpread{params[0]}};
  if (kind == "WidthBall") return expect(1), ConstraintSet{WidthBall{params[0]}};
  if (kind == "AntiferroSpike") return expect(2), ConstraintSet{AntiferroSpike{params[0], params[1]}};
  throw ConfigError("--constraint: unknown constraint \"" + kind + "\"");
}

SampleMethod sample_method_from_string(const std::string& name) {
  if (name == "glauber") return SampleMethod::Glauber;
  if (name == "exact") return SampleMethod::Exact;
  throw ConfigError("method: expected glauber or exact, got \"" + name + "\"");
}

SweepSpec resolve_sweep(const ConfigFile& file) {
  if (!file.ensemble) throw ConfigError("ensemble: block required for sweep");
  SweepSpec spec = file.sweep.value_or(SweepSpec{});
  spec.ensemble = *file.ensemble;
  if (file.constraint) spec.constraint = *file.constraint;
  if (file.optimizer) spec.optimizer = *file.optimizer;
  if (spec.metrics.empty()) {
    spec.metrics = {"frobenius"};
    if (spec.ensemble.n <= kTableCap) {
      spec.metrics.push_back("tv_exact");
      spec.metrics.push_back("kl_exact");
    }
  }
  validate(spec);
  return spec;
}

void validate(const SweepSpec& spec) {
  try {
    isinglearn::validate(spec.ensemble);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("ensemble: ") + e.what());
  }
  try {
    isinglearn::validate(spec.constraint);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("constraint: ") + e.what());
  }
  try {
    isinglearn::validate(spec.optimizer);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (spec.l_values.empty()) throw ConfigError("sweep.l_values: must not be empty");
  for (int l : spec.l_values)
    if (l <= 0) throw ConfigError("sweep.l_values: entries must be positive");
  if (spec.seeds.empty()) throw ConfigError("sweep.seeds: must not be empty");
  bool exact_metric = false;
  for (const auto& m : spec.metrics) {
    if (m == "tv_exact" || m == "kl_exact") {
      exact_metric = true;
    } else if (m != "frobenius") {
      throw ConfigError("sweep.metrics: unsupported metric \"" + m + "\"");
    }
  }
  if (exact_metric || spec.method == SampleMethod::Exact) check_enumeration_cap(spec.ensemble.n, kTableCap);
}

}  // namespace isinglearn::cli
