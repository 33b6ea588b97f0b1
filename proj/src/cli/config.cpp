#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "wopt/cli.hpp"
#include "wopt/io.hpp"

namespace wopt::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!keys.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

const json& object_at(const json& parent, const char* key, const std::string& where) {
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(where + "." + key + ": expected an object");
  return v;
}

double number_at(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + "." + key + ": not finite");
  return v;
}

double number_or(const json& obj, const char* key, const std::string& where, double fallback) {
  return obj.contains(key) ? number_at(obj, key, where) : fallback;
}

// Either key (absolute) or key_fraction (times |Omega|), exactly one.
double absolute_or_fraction(const json& obj, const std::string& key,
                            const std::string& where, double measure) {
  const std::string frac = key + "_fraction";
  const bool has_abs = obj.contains(key), has_frac = obj.contains(frac);
  if (has_abs == has_frac)
    throw ConfigError(where + ": give exactly one of '" + key + "' and '" + frac + "'");
  return has_abs ? number_at(obj, key.c_str(), where)
                 : number_at(obj, frac.c_str(), where) * measure;
}

// --grid n: n cells across with the physical extent kept.  The Dirichlet
// lines sit one spacing outside the outermost cell centres, so a grid of nx
// cells spans (nx + 1) h.
json regrid(json domain, int n) {
  if (n < 3) throw ConfigError("--grid must be at least 3");
  const std::string shape = domain.value("shape", std::string());
  if (shape != "rectangle" && shape != "ellipse")
    throw ConfigError("--grid applies to rectangle and ellipse domains only");
  for (const char* key : {"nx", "ny"})
    if (!domain.contains(key) || !domain[key].is_number_integer())
      throw ConfigError(std::string("domain.") + key + ": expected an integer");
  if (!domain.contains("h") || !domain["h"].is_number())
    throw ConfigError("domain.h: expected a number");
  const double h = domain["h"].get<double>();
  const double x = (domain["nx"].get<int>() + 1) * h;
  const double y = (domain["ny"].get<int>() + 1) * h;
  const double h_new = x / (n + 1);
  domain["nx"] = n;
  domain["ny"] = static_cast<int>(std::lround(y / h_new)) - 1;
  domain["h"] = h_new;
  return domain;
}

WeightSpec parse_weight(const json& w, const std::filesystem::path& base_dir) {
  const std::string where = "weight";
  if (!w.is_object()) throw ConfigError("weight: expected an object");
  WeightSpec s;
  s.kind = w.value("kind", std::string("constant"));
  if (s.kind == "constant") {
    reject_unknown(w, where, {"kind", "value"});
    s.value = number_or(w, "value", where, 1.0);
  } else if (s.kind == "csv") {
    reject_unknown(w, where, {"kind", "path"});
    if (!w.contains("path") || !w["path"].is_string())
      throw ConfigError("weight.path: expected a string");
    s.path = w["path"].get<std::string>();
    if (s.path.is_relative()) s.path = base_dir / s.path;
  } else if (s.kind == "indicator_disk") {
    reject_unknown(w, where, {"kind", "radius", "inside", "outside"});
    s.radius = number_at(w, "radius", where);
    s.inside = number_or(w, "inside", where, 1.0);
    s.outside = number_or(w, "outside", where, -1.0);
  } else if (s.kind == "random") {
    reject_unknown(w, where, {"kind", "low", "high"});
    s.low = number_or(w, "low", where, -1.0);
    s.high = number_or(w, "high", where, 1.0);
    if (!(s.low < s.high)) throw ConfigError("weight: need low < high");
  } else {
    throw ConfigError("weight.kind: unknown kind '" + s.kind + "'");
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& task,
                       const std::filesystem::path& base_dir,
                       const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

  try {
    reject_unknown(doc, "config",
                   {"task", "domain", "weight", "class", "classes", "seeds", "rng_seed",
                    "max_iterations", "threads", "tolerances", "output", "verify"});

    RunConfig c;
    c.task = task;
    bool known = false;
    for (const char* t : kTasks) known = known || task == t;
    if (!known) throw ConfigError("unknown task '" + task + "'");
    if (doc.contains("task") && doc["task"] != task)
      throw ConfigError("config is for task '" + doc["task"].get<std::string>() +
                        "' but task '" + task + "' was requested");

    if (!doc.contains("domain")) throw ConfigError("config.domain: missing");
    json domain_spec = object_at(doc, "domain", "config");
    if (overrides.grid) domain_spec = regrid(domain_spec, *overrides.grid);
    try {
      c.domain = domain_from_json(domain_spec, base_dir);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const double measure = c.domain->measure();

    if (doc.contains("weight")) c.weight = parse_weight(doc["weight"], base_dir);

    if (doc.contains("class")) {
      const json& k = object_at(doc, "class", "config");
      reject_unknown(k, "class", {"m1", "m2", "m3", "m3_fraction"});
      c.single = SingleClass{number_at(k, "m1", "class"), number_at(k, "m2", "class"),
                             absolute_or_fraction(k, "m3", "class", measure)};
      if (!(c.single->m1 > 0.0)) throw Infeasible("class: need m1 > 0");
      // Same inequalities as the resource class (p, q, l) = (m2, m1, m3).
      ResourceClass(c.single->m2, c.single->m1, c.single->m3, measure);
    }
    if (doc.contains("classes")) {
      const json& ks = doc["classes"];
      if (!ks.is_array() || ks.size() != 2)
        throw ConfigError("classes: expected an array of two objects");
      auto one = [&](std::size_t i) {
        const std::string where = "classes[" + std::to_string(i) + "]";
        if (!ks[i].is_object()) throw ConfigError(where + ": expected an object");
        reject_unknown(ks[i], where, {"p", "q", "l", "l_fraction"});
        return ResourceClass(number_at(ks[i], "p", where), number_at(ks[i], "q", where),
                             absolute_or_fraction(ks[i], "l", where, measure), measure);
      };
      c.classes.emplace(one(0), one(1));
      if (!(c.classes->first.q + c.classes->second.q > 0.0))
        throw Infeasible("classes: need q1 + q2 > 0");
    }

    if (doc.contains("seeds")) {
      if (!doc["seeds"].is_number_integer() || doc["seeds"].get<int>() < 1)
        throw ConfigError("config.seeds: expected a positive integer");
      c.optimize.seeds = doc["seeds"].get<int>();
    }
    if (doc.contains("rng_seed")) {
      if (!doc["rng_seed"].is_number_unsigned())
        throw ConfigError("config.rng_seed: expected a non-negative integer");
      c.optimize.rng_seed = doc["rng_seed"].get<std::uint64_t>();
    }
    if (doc.contains("max_iterations")) {
      if (!doc["max_iterations"].is_number_integer() || doc["max_iterations"].get<int>() < 1)
        throw ConfigError("config.max_iterations: expected a positive integer");
      c.optimize.max_iterations = doc["max_iterations"].get<int>();
    }
    if (doc.contains("threads")) {
      if (!doc["threads"].is_number_unsigned())
        throw ConfigError("config.threads: expected a non-negative integer");
      c.optimize.threads = doc["threads"].get<unsigned>();
    }
    if (doc.contains("tolerances")) {
      const json& t = object_at(doc, "tolerances", "config");
      reject_unknown(t, "tolerances", {"eig_residual", "integral", "symmetry_defect"});
      c.tolerances.eig_residual = number_or(t, "eig_residual", "tolerances", 1e-8);
      c.tolerances.integral = number_or(t, "integral", "tolerances", 1e-12);
      c.tolerances.symmetry_defect = number_or(t, "symmetry_defect", "tolerances", 0.02);
      if (!(c.tolerances.eig_residual > 0.0) || !(c.tolerances.integral > 0.0) ||
          !(c.tolerances.symmetry_defect > 0.0))
        throw ConfigError("tolerances: must be positive");
    }
    c.optimize.eigen.residual_tolerance = c.tolerances.eig_residual;

    if (doc.contains("output")) {
      const json& o = object_at(doc, "output", "config");
      reject_unknown(o, "output", {"dir", "heatmap"});
      if (o.contains("dir")) {
        if (!o["dir"].is_string()) throw ConfigError("output.dir: expected a string");
        c.out_dir = o["dir"].get<std::string>();
        if (c.out_dir.is_relative()) c.out_dir = base_dir / c.out_dir;
      }
      if (o.contains("heatmap")) {
        if (!o["heatmap"].is_boolean()) throw ConfigError("output.heatmap: expected a boolean");
        c.heatmap = o["heatmap"].get<bool>();
      }
    }
    if (doc.contains("verify")) {
      const json& v = object_at(doc, "verify", "config");
      reject_unknown(v, "verify", {"trials"});
      if (v.contains("trials")) {
        if (!v["trials"].is_number_integer() || v["trials"].get<int>() < 1)
          throw ConfigError("verify.trials: expected a positive integer");
        c.verify_trials = v["trials"].get<int>();
      }
    }

    if ((task == "optimize") && !c.single)
      throw ConfigError("task optimize needs a 'class' block");
    if ((task == "optimize2") && !c.classes)
      throw ConfigError("task optimize2 needs a 'classes' block");

    if (overrides.out) c.out_dir = *overrides.out;
    if (overrides.seed) c.optimize.rng_seed = *overrides.seed;
    c.inject_broken_tie_rule = overrides.inject_broken_tie_rule;
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path, const std::string& task,
                      const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), task, path.parent_path(), overrides);
}

ScalarField build_weight(const RunConfig& config) {
  const DomainPtr& d = config.domain;
  const WeightSpec& w = config.weight;
  if (w.kind == "constant") return ScalarField::constant(d, w.value);
  if (w.kind == "csv") {
    try {
      return read_field_csv(w.path, d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("weight: ") + e.what());
    } catch (const DomainMismatch& e) {
      throw ConfigError(std::string("weight: ") + e.what());
    }
  }
  std::vector<double> values(d->size());
  if (w.kind == "indicator_disk") {
    const double cx = 0.5 * d->width() * d->spacing(), cy = 0.5 * d->height() * d->spacing();
    for (std::size_t i = 0; i < d->size(); ++i) {
      const double x = (d->column(i) + 0.5) * d->spacing() - cx;
      const double y = (d->row(i) + 0.5) * d->spacing() - cy;
      values[i] = std::hypot(x, y) < w.radius ? w.inside : w.outside;
    }
  } else {  // random
    std::mt19937_64 rng(config.optimize.rng_seed);
    std::uniform_real_distribution<double> dist(w.low, w.high);
    for (double& v : values) v = dist(rng);
  }
  return ScalarField(d, std::move(values));
}

}  // namespace wopt::cli
