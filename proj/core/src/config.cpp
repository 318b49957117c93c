#include "fvcg/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "fvcg/errors.hpp"
#include "json_codec.hpp"

namespace fvcg {

namespace {

using detail::Json;

void reject_unknown(const Json& section, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!section.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& item : section.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError("unknown key '" + where + "." + item.key() + "'");
  }
}

template <typename T>
void read(const Json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

UniformRange read_range(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("'" + where + "' must be [lo, hi]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json range_json(const UniformRange& r) { return Json::array({r.lo, r.hi}); }

}  // namespace

void CheckConfig::validate() const {
  if (dic_tolerance < 0.0 || surplus_tolerance < 0.0) {
    throw ConfigError("check tolerances must be non-negative");
  }
  for (std::size_t k = 0; k < shrink_factors.size(); ++k) {
    const double f = shrink_factors[k];
    if (!(f > 0.0) || f > 1.0) throw ConfigError("shrink factors must lie in (0, 1]");
    if (k > 0 && !(f < shrink_factors[k - 1])) {
      throw ConfigError("shrink factors must be strictly decreasing");
    }
  }
}

double RunConfig::effective_alpha() const {
  return alpha > 0.0 ? alpha : std::sqrt(static_cast<double>(n));
}

EconomicSpec RunConfig::economy() const {
  return EconomicSpec::sqrt_sum(effective_alpha(), prior_q, prior_gamma);
}

void RunConfig::validate() const {
  if (n < 1) throw ConfigError("economy.n must be at least 1");
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("economy.alpha must be positive");
  try {
    economy().validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("economy: ") + e.what());
  }
  training.validate();
  check.validate();
  for (const auto& s : scenarios) {
    if (s.q.size() != s.gamma.size()) {
      throw ConfigError("scenario '" + s.name + "': q and gamma lengths differ");
    }
    if (s.q.empty()) throw ConfigError("scenario '" + s.name + "' has no owners");
    try {
      (void)s.instance();
    } catch (const Error& e) {
      throw ConfigError("scenario '" + s.name + "': " + e.what());
    }
  }
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto& ta = a.training;
  const auto& tb = b.training;
  return a.n == b.n && a.alpha == b.alpha && a.prior_q.lo == b.prior_q.lo &&
         a.prior_q.hi == b.prior_q.hi && a.prior_gamma.lo == b.prior_gamma.lo &&
         a.prior_gamma.hi == b.prior_gamma.hi && ta.lambda1 == tb.lambda1 &&
         ta.lambda2 == tb.lambda2 && ta.lambda3 == tb.lambda3 && ta.batch_size == tb.batch_size &&
         ta.learning_rate == tb.learning_rate && ta.bias_bump == tb.bias_bump &&
         ta.iterations == tb.iterations && ta.seed == tb.seed && ta.h_hidden == tb.h_hidden &&
         ta.g_hidden == tb.g_hidden && ta.zero_h_output == tb.zero_h_output &&
         ta.g_bias_offset == tb.g_bias_offset && a.scenarios == b.scenarios &&
         a.check == b.check;
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  try {
    const Json root = Json::parse(text);
    reject_unknown(root, "config", {"economy", "training", "scenarios", "check"});

    if (root.contains("economy")) {
      const Json& e = root.at("economy");
      reject_unknown(e, "economy", {"n", "alpha", "prior_q", "prior_gamma"});
      read(e, "n", c.n);
      read(e, "alpha", c.alpha);
      if (e.contains("prior_q")) c.prior_q = read_range(e.at("prior_q"), "economy.prior_q");
      if (e.contains("prior_gamma")) {
        c.prior_gamma = read_range(e.at("prior_gamma"), "economy.prior_gamma");
      }
    }

    if (root.contains("training")) {
      const Json& t = root.at("training");
      reject_unknown(t, "training",
                     {"lambda1", "lambda2", "lambda3", "T", "a", "b", "iterations", "seed",
                      "h_hidden", "g_hidden", "zero_h_output", "g_bias_offset"});
      auto& tc = c.training;
      read(t, "lambda1", tc.lambda1);
      read(t, "lambda2", tc.lambda2);
      read(t, "lambda3", tc.lambda3);
      read(t, "T", tc.batch_size);
      read(t, "a", tc.learning_rate);
      read(t, "b", tc.bias_bump);
      read(t, "iterations", tc.iterations);
      read(t, "seed", tc.seed);
      read(t, "h_hidden", tc.h_hidden);
      read(t, "g_hidden", tc.g_hidden);
      read(t, "zero_h_output", tc.zero_h_output);
      read(t, "g_bias_offset", tc.g_bias_offset);
    }

    if (root.contains("scenarios")) {
      const Json& list = root.at("scenarios");
      if (!list.is_array()) throw ConfigError("'scenarios' must be an array");
      for (const Json& s : list) {
        reject_unknown(s, "scenarios[]", {"name", "q", "gamma"});
        for (const char* key : {"name", "q", "gamma"}) {
          if (!s.contains(key)) throw ConfigError(std::string("scenario lacks '") + key + "'");
        }
        c.scenarios.push_back({s.at("name").get<std::string>(),
                               s.at("q").get<std::vector<double>>(),
                               s.at("gamma").get<std::vector<double>>()});
      }
    }

    if (root.contains("check")) {
      const Json& k = root.at("check");
      reject_unknown(k, "check",
                     {"seed", "monotonicity_instances", "dominance_instances", "dic_instances",
                      "dic_deviations", "dic_tolerance", "surplus_tolerance",
                      "monotone_net_points", "monotone_net_draws", "feasibility_instances",
                      "shrink_factors"});
      auto& cc = c.check;
      read(k, "seed", cc.seed);
      read(k, "monotonicity_instances", cc.monotonicity_instances);
      read(k, "dominance_instances", cc.dominance_instances);
      read(k, "dic_instances", cc.dic_instances);
      read(k, "dic_deviations", cc.dic_deviations);
      read(k, "dic_tolerance", cc.dic_tolerance);
      read(k, "surplus_tolerance", cc.surplus_tolerance);
      read(k, "monotone_net_points", cc.monotone_net_points);
      read(k, "monotone_net_draws", cc.monotone_net_draws);
      read(k, "feasibility_instances", cc.feasibility_instances);
      read(k, "shrink_factors", cc.shrink_factors);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string serialize_run_config(const RunConfig& c) {
  Json root;
  root["economy"] = {{"n", c.n},
                     {"alpha", c.alpha},
                     {"prior_q", range_json(c.prior_q)},
                     {"prior_gamma", range_json(c.prior_gamma)}};
  const auto& t = c.training;
  root["training"] = {{"lambda1", t.lambda1},
                      {"lambda2", t.lambda2},
                      {"lambda3", t.lambda3},
                      {"T", t.batch_size},
                      {"a", t.learning_rate},
                      {"b", t.bias_bump},
                      {"iterations", t.iterations},
                      {"seed", t.seed},
                      {"h_hidden", t.h_hidden},
                      {"g_hidden", t.g_hidden},
                      {"zero_h_output", t.zero_h_output},
                      {"g_bias_offset", t.g_bias_offset}};
  Json scenarios = Json::array();
  for (const auto& s : c.scenarios) {
    scenarios.push_back({{"name", s.name}, {"q", s.q}, {"gamma", s.gamma}});
  }
  root["scenarios"] = std::move(scenarios);
  const auto& k = c.check;
  root["check"] = {{"seed", k.seed},
                   {"monotonicity_instances", k.monotonicity_instances},
                   {"dominance_instances", k.dominance_instances},
                   {"dic_instances", k.dic_instances},
                   {"dic_deviations", k.dic_deviations},
                   {"dic_tolerance", k.dic_tolerance},
                   {"surplus_tolerance", k.surplus_tolerance},
                   {"monotone_net_points", k.monotone_net_points},
                   {"monotone_net_draws", k.monotone_net_draws},
                   {"feasibility_instances", k.feasibility_instances},
                   {"shrink_factors", k.shrink_factors}};
  return root.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace fvcg
