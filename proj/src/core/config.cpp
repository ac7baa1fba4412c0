#include "core/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"

namespace minplan {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(errc::config, "unknown key '" + item.key() + "' in " + where);
  }
}

double get_double(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(errc::config, where + "." + key + " must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(errc::config, where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(errc::config, where + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) fail(errc::config, where + "." + key + " must be a string");
  return v.get<std::string>();
}

State parse_state(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(errc::config, where + " must be a non-empty array of numbers");
  State x;
  for (const auto& e : v) {
    if (!e.is_number()) fail(errc::config, where + " must contain only numbers");
    x.push_back(e.get<double>());
  }
  return x;
}

std::vector<std::pair<double, double>> parse_table(const json& obj, const std::string& where) {
  require_keys(obj, where, {"table"});
  const json& t = obj.at("table");
  if (!t.is_array() || t.size() < 2)
    fail(errc::config, where + ".table must be an array of at least two [s, value] pairs");
  std::vector<std::pair<double, double>> points;
  for (const auto& row : t) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
      fail(errc::config, where + ".table rows must be [s, value] number pairs");
    points.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return points;
}

json table_to_json(const std::vector<std::pair<double, double>>& points) {
  json t = json::array();
  for (const auto& [s, v] : points) t.push_back(json::array({s, v}));
  return json{{"table", t}};
}

}  // namespace

ComparisonFunction table_comparison(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) fail(errc::invalid_argument, "table needs at least two points");
  if (points.front().first != 0.0 || points.front().second != 0.0)
    fail(errc::invalid_argument, "table must start at [0, 0]");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first) || !(points[i].second > points[i - 1].second))
      fail(errc::invalid_argument, "table must be strictly increasing in both coordinates");
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
      fail(errc::invalid_argument, "table entries must be finite");
  }
  auto interp = [points](double v, bool inverse) {
    auto coord = [inverse](const std::pair<double, double>& p) {
      return inverse ? p.second : p.first;
    };
    auto other = [inverse](const std::pair<double, double>& p) {
      return inverse ? p.first : p.second;
    };
    std::size_t hi = 1;
    while (hi + 1 < points.size() && v > coord(points[hi])) ++hi;
    const double x0 = coord(points[hi - 1]), x1 = coord(points[hi]);
    const double y0 = other(points[hi - 1]), y1 = other(points[hi]);
    return y0 + (v - x0) * (y1 - y0) / (x1 - x0);
  };
  ComparisonFunction f;
  f.fn = [interp](double s) { return interp(s, false); };
  f.inverse = [interp](double y) { return interp(y, true); };
  f.domain_hint = points.back().first;
  f.unbounded = true;  // last segment extrapolates with positive slope
  return f;
}

AssumptionOneData BoundsConfig::to_assumption_data() const {
  if (!present) fail(errc::invalid_argument, "bounds section not configured");
  if (linear) return AssumptionOneData::from_linear(linear_params);
  AssumptionOneData d;
  d.alpha_w = table_comparison(alpha_w_table);
  d.alpha_v_bar = table_comparison(alpha_v_bar_table);
  d.alpha_w_bar = alpha_w_bar_table.empty() ? zero_comparison()
                                            : table_comparison(alpha_w_bar_table);
  validate_assumption_data(d);
  return d;
}

std::string ExperimentConfig::resolved_json() const {
  json doc;
  json sys{{"name", system_name}};
  if (!system_params.empty()) sys["params"] = system_params;
  doc["system"] = sys;
  doc["gamma"] = gamma;
  if (!budgets.empty()) doc["budgets"] = budgets;
  if (!initial_states.empty()) {
    json xs = json::array();
    for (const State& x : initial_states) xs.push_back(x);
    doc["initial_states"] = xs;
  }
  if (steps > 0) doc["steps"] = steps;
  doc["delta"] = delta;
  doc["gamma_star"] = gamma_star;
  doc["trace"] = trace;
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["out_dir"] = out_dir;
  if (bounds.present) {
    if (bounds.linear) {
      doc["bounds"] = json{{"a_w", bounds.linear_params.a_w},
                           {"a_v_bar", bounds.linear_params.a_v_bar},
                           {"a_w_bar", bounds.linear_params.a_w_bar}};
    } else {
      json b{{"alpha_w", table_to_json(bounds.alpha_w_table)},
             {"alpha_v_bar", table_to_json(bounds.alpha_v_bar_table)}};
      if (!bounds.alpha_w_bar_table.empty())
        b["alpha_w_bar"] = table_to_json(bounds.alpha_w_bar_table);
      doc["bounds"] = b;
    }
  }
  if (certificate.present) {
    if (certificate.fit) {
      doc["certificate"] = json{{"fit", true}};
    } else {
      doc["certificate"] = json{{"k", certificate.user.k_overshoot},
                                {"lambda", certificate.user.lambda_decay},
                                {"gamma_star", certificate.user.gamma_star},
                                {"d_bar", certificate.user.d_bar}};
    }
  }
  doc["oracle"] = json{{"instances", oracle.instances}, {"seed", oracle.seed},
                       {"cap", oracle.cap},             {"modes", oracle.modes},
                       {"max_dim", oracle.max_dim},     {"gammas", oracle.gammas}};
  return doc.dump();
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail(errc::config, "config root must be a JSON object");
  require_keys(doc, "config",
               {"system", "gamma", "budget", "budgets", "initial_state", "initial_states",
                "steps", "delta", "gamma_star", "bounds", "certificate", "oracle", "seed",
                "threads", "trace", "out_dir"});
  ExperimentConfig cfg;

  if (!doc.contains("system")) fail(errc::config, "config.system is required");
  const json& sys = doc.at("system");
  if (!sys.is_object()) fail(errc::config, "config.system must be an object");
  require_keys(sys, "config.system", {"name", "params"});
  if (!sys.contains("name")) fail(errc::config, "config.system.name is required");
  cfg.system_name = get_string(sys, "config.system", "name");
  cfg.system_params = sys.contains("params") ? sys.at("params") : json::object();
  if (!cfg.system_params.is_object()) fail(errc::config, "config.system.params must be an object");
  if (cfg.system_name == "cubic_integrator") {
    require_keys(cfg.system_params, "config.system.params", {});
  } else if (cfg.system_name == "zero_cost_fixture") {
    require_keys(cfg.system_params, "config.system.params", {"state_dim", "num_modes"});
  } else if (cfg.system_name == "random_affine") {
    require_keys(cfg.system_params, "config.system.params",
                 {"seed", "state_dim", "num_modes", "cost", "contractive"});
  } else {
    fail(errc::config, "unknown system '" + cfg.system_name + "'");
  }

  if (doc.contains("gamma")) {
    cfg.gamma = get_double(doc, "config", "gamma");
    if (!(cfg.gamma > 0.0) || cfg.gamma > 1.0)
      fail(errc::config, "config.gamma must be in (0, 1]");
  }

  if (doc.contains("budget") && doc.contains("budgets"))
    fail(errc::config, "config: give either budget or budgets, not both");
  if (doc.contains("budget")) {
    cfg.budgets.push_back(get_int(doc, "config", "budget"));
  } else if (doc.contains("budgets")) {
    const json& bs = doc.at("budgets");
    if (!bs.is_array() || bs.empty()) fail(errc::config, "config.budgets must be a non-empty array");
    for (const auto& b : bs) {
      if (!b.is_number_integer()) fail(errc::config, "config.budgets must contain integers");
      cfg.budgets.push_back(b.get<std::int64_t>());
    }
  }
  for (std::int64_t b : cfg.budgets)
    if (b < 1) fail(errc::config, "budgets must be >= 1");

  if (doc.contains("initial_state") && doc.contains("initial_states"))
    fail(errc::config, "config: give either initial_state or initial_states, not both");
  if (doc.contains("initial_state")) {
    cfg.initial_states.push_back(parse_state(doc.at("initial_state"), "config.initial_state"));
  } else if (doc.contains("initial_states")) {
    const json& xs = doc.at("initial_states");
    if (!xs.is_array() || xs.empty())
      fail(errc::config, "config.initial_states must be a non-empty array");
    for (const auto& x : xs) cfg.initial_states.push_back(parse_state(x, "config.initial_states[]"));
  }

  if (doc.contains("steps")) {
    const std::int64_t s = get_int(doc, "config", "steps");
    if (s < 1 || s > 10'000'000) fail(errc::config, "config.steps must be in [1, 1e7]");
    cfg.steps = static_cast<int>(s);
  }
  if (doc.contains("delta")) {
    cfg.delta = get_double(doc, "config", "delta");
    if (!(cfg.delta > 0.0)) fail(errc::config, "config.delta must be > 0");
  }
  if (doc.contains("gamma_star")) {
    cfg.gamma_star = get_double(doc, "config", "gamma_star");
    if (!(cfg.gamma_star > 0.0) || cfg.gamma_star > 1.0)
      fail(errc::config, "config.gamma_star must be in (0, 1]");
  }
  if (doc.contains("trace")) cfg.trace = get_bool(doc, "config", "trace");
  if (doc.contains("seed")) {
    const std::int64_t s = get_int(doc, "config", "seed");
    if (s < 0) fail(errc::config, "config.seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (doc.contains("threads")) {
    const std::int64_t t = get_int(doc, "config", "threads");
    if (t < 1 || t > 256) fail(errc::config, "config.threads must be in [1, 256]");
    cfg.threads = static_cast<int>(t);
  }
  if (doc.contains("out_dir")) cfg.out_dir = get_string(doc, "config", "out_dir");

  if (doc.contains("bounds")) {
    const json& b = doc.at("bounds");
    if (!b.is_object()) fail(errc::config, "config.bounds must be an object");
    cfg.bounds.present = true;
    if (b.contains("a_w") || b.contains("a_v_bar") || b.contains("a_w_bar")) {
      require_keys(b, "config.bounds", {"a_w", "a_v_bar", "a_w_bar"});
      if (!b.contains("a_w") || !b.contains("a_v_bar"))
        fail(errc::config, "config.bounds requires a_w and a_v_bar");
      cfg.bounds.linear = true;
      cfg.bounds.linear_params.a_w = get_double(b, "config.bounds", "a_w");
      cfg.bounds.linear_params.a_v_bar = get_double(b, "config.bounds", "a_v_bar");
      cfg.bounds.linear_params.a_w_bar =
          b.contains("a_w_bar") ? get_double(b, "config.bounds", "a_w_bar") : 0.0;
      validate_params(cfg.bounds.linear_params);
    } else {
      require_keys(b, "config.bounds", {"alpha_w", "alpha_v_bar", "alpha_w_bar"});
      if (!b.contains("alpha_w") || !b.contains("alpha_v_bar"))
        fail(errc::config, "config.bounds requires alpha_w and alpha_v_bar tables");
      cfg.bounds.alpha_w_table = parse_table(b.at("alpha_w"), "config.bounds.alpha_w");
      cfg.bounds.alpha_v_bar_table = parse_table(b.at("alpha_v_bar"), "config.bounds.alpha_v_bar");
      if (b.contains("alpha_w_bar"))
        cfg.bounds.alpha_w_bar_table = parse_table(b.at("alpha_w_bar"), "config.bounds.alpha_w_bar");
      cfg.bounds.to_assumption_data();  // validate eagerly
    }
  }

  if (doc.contains("certificate")) {
    const json& c = doc.at("certificate");
    if (!c.is_object()) fail(errc::config, "config.certificate must be an object");
    cfg.certificate.present = true;
    if (c.contains("fit")) {
      require_keys(c, "config.certificate", {"fit"});
      cfg.certificate.fit = get_bool(c, "config.certificate", "fit");
      if (!cfg.certificate.fit) fail(errc::config, "config.certificate.fit must be true when given");
    } else {
      require_keys(c, "config.certificate", {"k", "lambda", "gamma_star", "d_bar"});
      for (const char* k : {"k", "lambda", "gamma_star", "d_bar"})
        if (!c.contains(k))
          fail(errc::config, std::string("config.certificate requires ") + k + " (or fit: true)");
      cfg.certificate.user.k_overshoot = get_double(c, "config.certificate", "k");
      cfg.certificate.user.lambda_decay = get_double(c, "config.certificate", "lambda");
      cfg.certificate.user.gamma_star = get_double(c, "config.certificate", "gamma_star");
      const std::int64_t db = get_int(c, "config.certificate", "d_bar");
      if (db < 0 || db > 1'000'000) fail(errc::config, "config.certificate.d_bar out of range");
      cfg.certificate.user.d_bar = static_cast<int>(db);
      cfg.certificate.user.provenance = StabilityCertificate::Provenance::user_supplied;
      validate_certificate(cfg.certificate.user);
    }
  }

  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    if (!o.is_object()) fail(errc::config, "config.oracle must be an object");
    require_keys(o, "config.oracle", {"instances", "seed", "cap", "modes", "max_dim", "gammas"});
    if (o.contains("instances")) {
      const std::int64_t n = get_int(o, "config.oracle", "instances");
      if (n < 1 || n > 100'000) fail(errc::config, "config.oracle.instances must be in [1, 1e5]");
      cfg.oracle.instances = static_cast<int>(n);
    }
    if (o.contains("seed")) {
      const std::int64_t s = get_int(o, "config.oracle", "seed");
      if (s < 0) fail(errc::config, "config.oracle.seed must be >= 0");
      cfg.oracle.seed = static_cast<std::uint64_t>(s);
    }
    if (o.contains("cap")) {
      cfg.oracle.cap = get_int(o, "config.oracle", "cap");
      if (cfg.oracle.cap < 1) fail(errc::config, "config.oracle.cap must be >= 1");
    }
    if (o.contains("modes")) {
      const json& ms = o.at("modes");
      if (!ms.is_array() || ms.empty())
        fail(errc::config, "config.oracle.modes must be a non-empty array");
      cfg.oracle.modes.clear();
      for (const auto& m : ms) {
        if (!m.is_number_integer() || m.get<std::int64_t>() < 2 || m.get<std::int64_t>() > 8)
          fail(errc::config, "config.oracle.modes entries must be integers in [2, 8]");
        cfg.oracle.modes.push_back(m.get<int>());
      }
    }
    if (o.contains("max_dim")) {
      const std::int64_t d = get_int(o, "config.oracle", "max_dim");
      if (d < 1 || d > 8) fail(errc::config, "config.oracle.max_dim must be in [1, 8]");
      cfg.oracle.max_dim = static_cast<int>(d);
    }
    if (o.contains("gammas")) {
      const json& gs = o.at("gammas");
      if (!gs.is_array() || gs.empty())
        fail(errc::config, "config.oracle.gammas must be a non-empty array");
      cfg.oracle.gammas.clear();
      for (const auto& g : gs) {
        if (!g.is_number() || !(g.get<double>() > 0.0) || g.get<double>() > 1.0)
          fail(errc::config, "config.oracle.gammas entries must be in (0, 1]");
        cfg.oracle.gammas.push_back(g.get<double>());
      }
    }
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(errc::config, "config parse error in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.threads) {
    if (*ov.threads < 1 || *ov.threads > 256)
      fail(errc::config, "threads override must be in [1, 256]");
    cfg.threads = *ov.threads;
  }
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
}

SwitchedSystem make_system_from_config(const ExperimentConfig& cfg) {
  const json& p = cfg.system_params;
  const std::string where = "config.system.params";
  if (cfg.system_name == "cubic_integrator") return make_cubic_integrator();
  if (cfg.system_name == "zero_cost_fixture") {
    int dim = 2, modes = 2;
    if (p.contains("state_dim")) {
      const std::int64_t d = get_int(p, where, "state_dim");
      if (d < 1 || d > 64) fail(errc::config, where + ".state_dim must be in [1, 64]");
      dim = static_cast<int>(d);
    }
    if (p.contains("num_modes")) {
      const std::int64_t m = get_int(p, where, "num_modes");
      if (m < 1 || m > 64) fail(errc::config, where + ".num_modes must be in [1, 64]");
      modes = static_cast<int>(m);
    }
    return make_zero_cost_fixture(dim, modes);
  }
  if (cfg.system_name == "random_affine") {
    RandomAffineParams rp;
    rp.seed = cfg.seed;
    if (p.contains("seed")) {
      const std::int64_t s = get_int(p, where, "seed");
      if (s < 0) fail(errc::config, where + ".seed must be >= 0");
      rp.seed = static_cast<std::uint64_t>(s);
    }
    if (p.contains("state_dim")) {
      const std::int64_t d = get_int(p, where, "state_dim");
      if (d < 1 || d > 16) fail(errc::config, where + ".state_dim must be in [1, 16]");
      rp.state_dim = static_cast<int>(d);
    }
    if (p.contains("num_modes")) {
      const std::int64_t m = get_int(p, where, "num_modes");
      if (m < 2 || m > 16) fail(errc::config, where + ".num_modes must be in [2, 16]");
      rp.num_modes = static_cast<int>(m);
    }
    if (p.contains("cost")) {
      rp.cost_kind = get_string(p, where, "cost");
      if (rp.cost_kind != "weighted" && rp.cost_kind != "sigma")
        fail(errc::config, where + ".cost must be 'weighted' or 'sigma'");
    }
    if (p.contains("contractive")) rp.contractive = get_bool(p, where, "contractive");
    return make_random_affine(rp).system;
  }
  fail(errc::config, "unknown system '" + cfg.system_name + "'");
}

}  // namespace minplan
