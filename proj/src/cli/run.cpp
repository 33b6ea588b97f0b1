#include <fstream>
#include <ostream>

#include "wopt/cli.hpp"
#include "wopt/eig.hpp"
#include "wopt/io.hpp"
#include "wopt/steiner.hpp"

namespace wopt::cli {

namespace {

using nlohmann::json;

json domain_json(const GridDomain& d) {
  return {{"nx", d.width()},       {"ny", d.height()},       {"h", d.spacing()},
          {"cells", d.size()},     {"measure", d.measure()},
          {"vertical_axis", d.axis().has_value()},
          {"horizontal_axis", d.row_axis().has_value()}};
}

json eigen_json(const EigenPair& p) {
  return {{"lambda1", p.lambda1},
          {"residual", p.residual},
          {"iterations", p.iterations},
          {"u_min", p.u.min()}};
}

json report_json(const OptimizeReport& r) {
  return {{"lambda1", r.final.lambda1},
          {"lambda_history", r.lambda_history},
          {"iterations", r.iterations},
          {"eigen_iterations", r.final.iterations},
          {"residual", r.final.residual},
          {"stabilized", r.stabilized},
          {"cycled", r.cycled},
          {"restarts_used", r.restarts_used},
          {"best_seed", r.best_seed},
          {"seed_lambdas", r.seed_lambdas},
          {"comonotone", comonotone(r.weight, r.final.u)}};
}

double defect_or_nan(const ScalarField& f, bool rows) {
  try {
    return rows ? row_symmetry_defect(f) : symmetry_defect(f);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct Artifacts {
  std::filesystem::path dir;
  bool heatmap;

  void field(const std::string& name, const ScalarField& f) const {
    write_field_csv(dir / (name + ".csv"), f);
  }
  void image(const ScalarField& f) const {
    if (heatmap) write_heatmap_pgm(dir / "heatmap.pgm", f);
  }
};

json run_eig(const RunConfig& c, const DirichletLaplacian& lap, const Artifacts& out) {
  const ScalarField m = build_weight(c);
  const EigenPair p = principal_positive_eigenvalue(lap, m, c.optimize.eigen);
  out.field("weight", m);
  out.field("eigenfunction", p.u);
  out.image(p.u);
  json r = eigen_json(p);
  r["energy"] = lap.stiffness().bilinear(p.u.values(), p.u.values());
  r["weight_integral"] = m.integral();
  return r;
}

json run_optimize(const RunConfig& c, const DirichletLaplacian& lap, const Artifacts& out) {
  const SingleClass k = *c.single;
  const OptimizeReport rep = optimize_single(lap, k, c.optimize);
  const GridDomain& d = lap.domain();
  out.field("weight", rep.weight);
  out.field("eigenfunction", rep.final.u);
  out.image(rep.weight);

  json r = report_json(rep);
  const std::size_t cells = single_level_cells(d, k);
  r["class"] = {{"m1", k.m1}, {"m2", k.m2}, {"m3", k.m3}};
  r["target_level_measure"] = (k.m2 * d.measure() + k.m3) / (k.m1 + k.m2);
  r["level_cells"] = cells;
  r["level_measure"] = static_cast<double>(cells) * d.cell_area();
  r["realized_integral"] = rep.weight.integral();
  r["symmetry_defects"] = defects_json(rep.weight);
  return r;
}

json run_optimize2(const RunConfig& c, const DirichletLaplacian& lap, const Artifacts& out) {
  const auto& [c1, c2] = *c.classes;
  const TwoLevelPlan plan = plan_two_resource(lap.domain(), c1, c2);
  const TwoResourceResult res = optimize_two(lap, c1, c2, c.optimize);
  const auto [f1, f2] = decompose(res.weight, c1, c2);
  const GridDomain& d = lap.domain();
  out.field("weight", res.report.weight);
  out.field("eigenfunction", res.report.final.u);
  out.field("component1", f1);
  out.field("component2", f2);
  out.image(res.report.weight);

  bool nested = true;
  for (std::size_t k = 0; k < res.weight.e.size(); ++k)
    nested = nested && (!res.weight.e[k] || res.weight.g[k]);

  json r = report_json(res.report);
  r["plan"] = {{"e1", plan.e1},         {"e2", plan.e2},       {"gamma", plan.gamma},
               {"delta", plan.delta},   {"top", plan.top},     {"mid", plan.mid},
               {"bottom", plan.bottom}, {"top_cells", plan.top_cells},
               {"upper_cells", plan.upper_cells}};
  r["E_measure"] = measure(d, res.weight.e);
  r["G_measure"] = measure(d, res.weight.g);
  r["E_subset_of_G"] = nested;
  r["prescribed_integrals"] = {c1.l, c2.l};
  r["realized_integrals"] = {res.weight.realized_integrals.first,
                             res.weight.realized_integrals.second};
  r["symmetry_defects"] = {
      {"weight", defects_json(res.report.weight)},
      {"E", defects_json(indicator(lap.domain_ptr(), res.weight.e))},
      {"G", defects_json(indicator(lap.domain_ptr(), res.weight.g))}};
  return r;
}

json run_symmetrize(const RunConfig& c, const DirichletLaplacian& lap, const Artifacts& out) {
  const ScalarField m = build_weight(c);
  ScalarField ms = m;
  try {
    ms = symmetrize_function(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("symmetrize: ") + e.what());
  }
  out.field("weight", ms);
  json r = {{"defect_before", symmetry_defect(m)},
            {"defect_after", symmetry_defect(ms)},
            {"equimeasurable", equimeasurable(m, ms)}};
  if (m.max() > 0.0) {
    const EigenPair p = principal_positive_eigenvalue(lap, m, c.optimize.eigen);
    const EigenPair ps = principal_positive_eigenvalue(lap, ms, c.optimize.eigen);
    out.field("eigenfunction", ps.u);
    out.image(ms);
    const SteinerCheck chk = check_ps_hl(p.u, m, lap.stiffness());
    r["lambda1"] = p.lambda1;
    r["lambda1_symmetrized"] = ps.lambda1;
    r["checks"] = {{"energy", chk.energy},
                   {"energy_symmetrized", chk.energy_sym},
                   {"weighted_mass", chk.weighted_mass},
                   {"weighted_mass_symmetrized", chk.weighted_mass_sym},
                   {"transform_error", chk.transform_error},
                   {"polya_szego_ok", chk.ps_ok},
                   {"hardy_littlewood_ok", chk.hl_ok},
                   {"transform_ok", chk.transform_ok}};
  } else {
    out.image(ms);
  }
  return r;
}

json run_remark(const RunConfig& c, const DirichletLaplacian& lap, const Artifacts& out) {
  const ClassComparison cmp = compare_remark(lap, c.optimize);
  out.field("weight", cmp.single.weight);
  out.field("eigenfunction", cmp.single.final.u);
  out.field("weight_two_resource", cmp.two.report.weight);
  out.image(cmp.single.weight);
  const double residual = std::max(cmp.single.final.residual, cmp.two.report.final.residual);
  return {{"lambda_two_resource", cmp.lambda_two_resource},
          {"lambda_single", cmp.lambda_single},
          {"margin", cmp.lambda_two_resource - cmp.lambda_single},
          {"single_is_smaller", cmp.lambda_single < cmp.lambda_two_resource},
          {"max_residual", residual},
          {"single", report_json(cmp.single)},
          {"two_resource", report_json(cmp.two.report)}};
}

}  // namespace

json defects_json(const ScalarField& f) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return {{"vertical", num(defect_or_nan(f, false))},
          {"horizontal", num(defect_or_nan(f, true))}};
}

json run_task(const RunConfig& c) {
  std::filesystem::create_directories(c.out_dir);
  const Artifacts out{c.out_dir, c.heatmap};

  json results = {{"task", c.task},
                  {"domain", domain_json(*c.domain)},
                  {"rng_seed", c.optimize.rng_seed},
                  {"seeds", c.optimize.seeds}};
  if (c.task == "verify") {
    json v = verify_suites(c);
    results.update(v);
  } else {
    const DirichletLaplacian lap(c.domain);
    json r;
    if (c.task == "eig") r = run_eig(c, lap, out);
    else if (c.task == "optimize") r = run_optimize(c, lap, out);
    else if (c.task == "optimize2") r = run_optimize2(c, lap, out);
    else if (c.task == "symmetrize") r = run_symmetrize(c, lap, out);
    else r = run_remark(c, lap, out);
    results.update(r);
  }
  std::ofstream(c.out_dir / "results.json") << results.dump(2) << '\n';
  return results;
}

int run_command(const std::string& task, const std::filesystem::path& config_path,
                const Overrides& overrides, std::ostream& err) {
  try {
    const RunConfig config = load_config(config_path, task, overrides);
    const json results = run_task(config);
    if (task == "verify" && !results.value("passed", false)) {
      for (const auto& s : results["suites"])
        if (!s["passed"].get<bool>())
          err << "verify: suite '" << s["name"].get<std::string>() << "' failed: "
              << s.value("detail", std::string()) << '\n';
      return kVerifyFailed;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << config_path.string() << ": " << e.what() << '\n';
    return kMalformedConfig;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const WeightNotPositiveAnywhere& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NoConvergence& e) {
    err << "no convergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kMalformedConfig;
  }
}

}  // namespace wopt::cli
