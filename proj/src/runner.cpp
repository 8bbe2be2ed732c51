#include "hardylab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "hardylab/elliptic.hpp"
#include "hardylab/evolution.hpp"
#include "hardylab/hum.hpp"
#include "hardylab/linalg.hpp"
#include "hardylab/operator.hpp"
#include "hardylab/semilinear.hpp"
#include "hardylab/spectral.hpp"

namespace hardylab {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// CSV text with a provenance comment and a header row.
class Csv {
 public:
  Csv(const RunConfig& c, std::initializer_list<const char*> columns) {
    os_ << "# " << kToolVersion << " config=" << hex(c.hash()) << " seed=" << c.seed << '\n';
    bool first = true;
    for (const char* col : columns) {
      os_ << (first ? "" : ",") << col;
      first = false;
    }
    os_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      os_ << (first ? "" : ",") << num(v);
      first = false;
    }
    os_ << '\n';
  }
  [[nodiscard]] std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

class Output {
 public:
  explicit Output(const RunConfig& c) : config_(c) {
    out_.summary = {{"tool", kToolVersion},
                    {"config_hash", hex(c.hash())},
                    {"command", c.command},
                    {"domain", std::string(to_string(c.domain))},
                    {"seed", c.seed},
                    {"checks", json::array()},
                    {"values", json::object()}};
  }
  void check(const std::string& name, double lhs, double rhs, double residual, bool pass) {
    out_.summary["checks"].push_back(
        {{"check", name}, {"lhs", lhs}, {"rhs", rhs}, {"residual", residual}, {"pass", pass}});
    out_.pass = out_.pass && pass;
  }
  void identity(const IdentityReport& r, double tol) {
    check(r.check, r.lhs, r.rhs, r.rel_residual, r.rel_residual <= tol);
  }
  json& values() { return out_.summary["values"]; }
  void file(const std::string& name, const Csv& csv) { out_.files.push_back({name, csv.str()}); }
  RunOutput finish() {
    out_.summary["pass"] = out_.pass;
    out_.files.push_back({"summary.json", out_.summary.dump(2) + "\n"});
    return std::move(out_);
  }

 private:
  const RunConfig& config_;
  RunOutput out_;
};

AssemblyOptions assembly(const RunConfig& c) {
  AssemblyOptions a;
  a.quad_order = c.quad_order;
  return a;
}

Mesh make_mesh(const RunConfig& c, double h) {
  MeshOptions mo;
  mo.grading = c.grading;
  return generate_mesh(build_domain(c.domain, c.size), h, mo);
}

OperatorSet make_ops(const RunConfig& c, double h) { return assemble(make_mesh(c, h), assembly(c)); }

ScalarField make_load(const RunConfig& c) {
  const auto loads = battery_loads(build_domain(c.domain, c.size));
  if (c.load == "xN") return loads[1];
  if (c.load == "sin") return loads[2];
  return loads[0];
}

double dt_for(const RunConfig& c, double h) { return c.dt > 0.0 ? c.dt : c.dt_ratio * h; }

CgOptions cg_options() {
  CgOptions o;
  o.tol = 1e-12;
  return o;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

bool non_increasing(const std::vector<double>& v, double slack = 0.0) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + slack * std::abs(v[i - 1])) return false;
  }
  return true;
}

double max_growth(const std::vector<double>& v) {
  double g = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) g = std::max(g, v[i] / v[i - 1]);
  return g;
}

double max_relative_change(const std::vector<double>& v) {
  double g = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) g = std::max(g, std::abs(v[i] - v[i - 1]) / std::abs(v[i - 1]));
  return g;
}

// hardy ---------------------------------------------------------------------

void constant_rows(const RunConfig& c, const std::vector<LevelRow>& rows, const std::string& id, Output& out) {
  Csv csv(c, {"level", "h", "value", "residual", "iterations"});
  std::vector<double> values;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.row({static_cast<double>(i), rows[i].h, rows[i].value, rows[i].residual,
             static_cast<double>(rows[i].iterations)});
    values.push_back(rows[i].value);
  }
  out.file("constants.csv", csv);
  out.values()["id"] = id;
  out.values()["series"] = values;
  const double lN = c.dim() * c.dim() / 4.0;
  double lo = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (double v : values) {
    lo = std::min(lo, v);
    finite = finite && std::isfinite(v);
  }
  if (c.constant == "hardy" || c.check == "hardy") {
    out.check("above_lambda_N", lo, lN, lo - lN, lo > lN);
    out.check("strictly_decreasing", values.front(), values.back(), values.back() - values.front(),
              strictly_decreasing(values));
  } else if (c.constant == "improved" || c.check == "improved") {
    out.check("remainder_lower_bound", lo, 0.25, lo - 0.25, lo >= 0.25 - 1e-8);
  } else {
    const double change = max_relative_change(values);
    out.check("stable_within_20pct", change, 0.2, change, finite && change <= 0.2);
  }
}

RunOutput run_hardy(const RunConfig& c) {
  Output out(c);
  const Mesh coarse = make_mesh(c, c.h);
  std::vector<LevelRow> rows;
  std::string id = c.constant;
  if (c.constant == "hardy") {
    const HardyReport r = hardy_study(coarse, c.levels, assembly(c));
    rows = r.refinement_series;
  } else if (c.constant == "improved") {
    const ConstantReport r = improved_hardy_study(coarse, c.levels, assembly(c));
    rows = r.refinement_series;
    id = r.id;
    out.values()["clamped_points"] = r.clamped_points;
  } else {
    const std::optional<double> eps = c.constant == "tuu8" ? std::optional<double>(c.eps) : std::nullopt;
    const ConstantReport r = tu8_study(coarse, c.levels, eps, assembly(c));
    rows = r.refinement_series;
    id = r.id;
  }
  constant_rows(c, rows, id, out);
  return out.finish();
}

// elliptic ------------------------------------------------------------------

RunOutput run_elliptic(const RunConfig& c) {
  Output out(c);
  const OperatorSet ops = make_ops(c, c.h);
  if (c.task == "pohozaev") {
    const EllipticSolution sol = solve(ops, c.lambda, make_load(c), cg_options());
    const IdentityReport r = pohozaev_check(ops, sol);
    Csv csv(c, {"h", "lambda", "dofs", "lhs", "rhs", "abs_residual", "rel_residual", "trace_ratio", "iterations"});
    csv.row({ops.mesh().h, c.lambda, static_cast<double>(ops.dofs()), r.lhs, r.rhs, r.abs_residual, r.rel_residual,
             trace_ratio(ops, sol), static_cast<double>(sol.iterations)});
    out.file("elliptic.csv", csv);
    out.identity(r, 0.05);
  } else if (c.task == "trace") {
    Csv csv(c, {"lambda", "load", "ratio"});
    const auto loads = battery_loads(ops.mesh().domain);
    for (double lambda : c.lambda_list) {
      for (std::size_t k = 0; k < loads.size(); ++k) {
        const EllipticSolution sol = solve(ops, lambda, loads[k], cg_options());
        csv.row({lambda, static_cast<double>(k), trace_ratio(ops, sol)});
      }
    }
    out.file("trace.csv", csv);
  } else {
    const ContinuationTable t = lambda_continuation(ops, make_load(c), c.eps_list, cg_options());
    Csv csv(c, {"eps", "lambda", "distance", "weighted", "iterations"});
    for (const auto& r : t.rows) csv.row({r.eps, r.lambda, r.distance, r.weighted, static_cast<double>(r.iterations)});
    out.file("continuation.csv", csv);
    const auto& f = t.rows.front();
    const auto& b = t.rows.back();
    out.check("distance_decreasing", f.distance, b.distance, b.distance - f.distance, t.distance_decreasing);
    out.check("weighted_decreasing", f.weighted, b.weighted, b.weighted - f.weighted, t.weighted_decreasing);
    out.values()["warnings"] = t.warnings;
  }
  return out.finish();
}

// wave ----------------------------------------------------------------------

struct WaveLevel {
  double h = 0.0, dt = 0.0;
  int dofs = 0;
  double drift = 0.0;
  IdentityReport multiplier, equipartition;
  double hidden = 0.0;
};

WaveLevel wave_level(const RunConfig& c, const OperatorSet& ops, double dt, Csv* trace) {
  const auto [v0, v1] = smooth_random_data(ops, c.seed);
  const WaveTrajectory traj = wave_solve(ops, c.lambda, v0, v1, c.T, dt);
  WaveLevel l;
  l.h = ops.mesh().h;
  l.dt = dt;
  l.dofs = ops.dofs();
  const auto& e = traj.energy;
  for (double E : e.E_lambda) l.drift = std::max(l.drift, std::abs(E - e.E_lambda.front()) / e.E_lambda.front());
  l.multiplier = multiplier_check(ops, traj);
  l.equipartition = equipartition_check(ops, traj);
  l.hidden = hidden_regularity_ratio(traj);
  if (trace) {
    for (std::size_t k = 0; k < e.times.size(); ++k) {
      trace->row({e.times[k], e.E_lambda[k], e.boundary_flux_integral[k], e.r2_flux_integral[k]});
    }
  }
  return l;
}

void wave_checks(const WaveLevel& l, Output& out) {
  out.check("energy_drift", l.drift, 0.0, l.drift, l.drift <= 1e-10);
  out.identity(l.multiplier, 0.05);
  out.identity(l.equipartition, 0.05);
  out.values()["hidden_regularity_ratio"] = l.hidden;
}

RunOutput run_wave(const RunConfig& c) {
  Output out(c);
  const OperatorSet ops = make_ops(c, c.h);
  Csv csv(c, {"time", "energy", "xnu_flux_integral", "r2_flux_integral"});
  const WaveLevel l = wave_level(c, ops, c.dt, &csv);
  out.file("wave.csv", csv);
  wave_checks(l, out);
  return out.finish();
}

CVec complex_data(const OperatorSet& ops, std::uint64_t seed) {
  const auto [a, b] = smooth_random_data(ops, seed);
  return a.cast<Complex>() + Complex(0.0, 1.0) * b.cast<Complex>();
}

RunOutput run_schrodinger(const RunConfig& c) {
  Output out(c);
  const OperatorSet ops = make_ops(c, c.h);
  const SchrodingerTrajectory traj = schrodinger_solve(ops, c.lambda, complex_data(ops, c.seed), c.T, c.dt);
  Csv csv(c, {"time", "mass", "energy", "xnu_flux_integral"});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv.row({traj.times[k], traj.mass[k], traj.energy[k], traj.boundary_flux_integral[k]});
  }
  out.file("schrodinger.csv", csv);
  const auto [mass, energy] = schrodinger_drift(traj);
  out.check("mass_drift", mass, 0.0, mass, mass <= 1e-12);
  out.check("energy_drift", energy, 0.0, energy, energy <= 1e-12);
  out.identity(smult_check(ops, traj), 0.05);
  out.values()["steps"] = traj.steps;
  return out.finish();
}

// hum -----------------------------------------------------------------------

void cg_file(const RunConfig& c, const HumResult& r, Output& out) {
  Csv csv(c, {"iteration", "relative_residual", "functional"});
  for (std::size_t k = 0; k < r.cg_history.size(); ++k) {
    csv.row({static_cast<double>(k), r.cg_history[k], k < r.functional.size() ? r.functional[k] : 0.0});
  }
  out.file("cg.csv", csv);
  out.values()["iterations"] = r.iterations;
  out.values()["modes"] = r.modes;
  out.values()["smallest_ritz"] = r.smallest_ritz;
  out.values()["residual_monotone"] = non_increasing(r.cg_history);
  out.check("cg_residual", r.relative_residual, c.tol, r.relative_residual,
            r.relative_residual <= c.tol && r.iterations <= c.max_iter);
  const double first = r.functional.empty() ? 0.0 : r.functional.front();
  const double last = r.functional.empty() ? 0.0 : r.functional.back();
  out.check("functional_nonincreasing", first, last, last - first, non_increasing(r.functional, 1e-12));
}

HumProblem hum_problem(const RunConfig& c, const OperatorSet& ops) {
  HumProblem p;
  p.ops = &ops;
  p.lambda = c.lambda;
  p.T = c.T;
  p.dt = c.dt;
  p.rho = c.rho;
  p.cg_tol = c.tol;
  p.cg_max_iter = c.max_iter;
  return p;
}

RunOutput run_wave_control(const RunConfig& c, const OperatorSet& ops) {
  Output out(c);
  const WaveHum hum(ops, c.lambda, c.T, c.dt, c.rho);
  HumProblem p = hum_problem(c, ops);
  // Filtered HUM steers the span of the retained modes; the target is projected there.
  const auto [a, b] = smooth_random_data(ops, c.seed);
  const DenseMat& Phi = hum.basis();
  p.u0 = Phi * (Phi.transpose() * (ops.M * a));
  p.u1 = Phi * (Phi.transpose() * (ops.M * b));
  const HumResult r = hum_solve(p, hum);
  cg_file(c, r, out);
  Csv control(c, {"time", "control_l2"});
  Csv trace(c, {"time", "facet", "value"});
  const Mesh& m = ops.mesh();
  for (std::size_t k = 0; k < r.control.size(); ++k) {
    double s = 0.0;
    for (std::size_t f = 0; f < m.facets.size(); ++f) {
      s += m.facets[f].measure * r.control[k][f] * r.control[k][f];
      if (m.facets[f].gamma0) trace.row({r.control_times[k], static_cast<double>(f), r.control[k][f]});
    }
    control.row({r.control_times[k], std::sqrt(s)});
  }
  out.file("control.csv", control);
  out.file("control_trace.csv", trace);
  const double ratio = r.final_energy / r.uncontrolled_energy;
  out.check("energy_reduction", r.final_energy, r.uncontrolled_energy, ratio, ratio <= 1e-4);
  std::mt19937_64 rng(c.seed + 1);
  std::normal_distribution<double> normal;
  Vec coeff(2 * hum.modes());
  for (auto& x : coeff) x = normal(rng);
  const auto [v0, v1] = hum.expand(coeff);
  out.identity(duality_check(hum, p.u0, p.u1, r, v0, v1), 1e-8);
  out.values()["final_l2"] = r.final_l2;
  out.values()["final_hprime"] = r.final_hprime;
  out.values()["uncontrolled_l2"] = r.uncontrolled_l2;
  out.values()["uncontrolled_hprime"] = r.uncontrolled_hprime;
  return out.finish();
}

RunOutput run_schrodinger_control(const RunConfig& c, const OperatorSet& ops) {
  Output out(c);
  const SchrodingerHum hum(ops, c.lambda, c.T, c.dt, c.rho);
  HumProblem p = hum_problem(c, ops);
  const DenseMat& Phi = hum.basis();
  const CVec data = complex_data(ops, c.seed);
  p.su0 = Phi.cast<Complex>() * (Phi.transpose().cast<Complex>() * (ops.M.cast<Complex>() * data));
  const HumResult r = schrodinger_hum(p, hum);
  cg_file(c, r, out);
  const double ratio = std::sqrt(r.final_energy / r.uncontrolled_energy);
  out.check("norm_reduction", std::sqrt(r.final_energy), std::sqrt(r.uncontrolled_energy), ratio, ratio <= 1e-4);
  return out.finish();
}

RunOutput run_scan(const RunConfig& c, const OperatorSet& ops) {
  Output out(c);
  const auto rows = observability_scan(ops, c.lambda, c.T_list, c.samples, c.dt, c.rho, c.seed);
  Csv csv(c, {"T", "min_quotient", "max_quotient"});
  std::vector<double> mins;
  for (const auto& r : rows) {
    csv.row({r.T, r.min_quotient, r.max_quotient});
    mins.push_back(r.min_quotient);
  }
  out.file("scan.csv", csv);
  bool nondecreasing = true;
  for (std::size_t i = 1; i < mins.size(); ++i) nondecreasing = nondecreasing && mins[i] >= mins[i - 1];
  out.check("min_quotient_nondecreasing", mins.front(), mins.back(), mins.back() - mins.front(), nondecreasing);
  out.check("positive_at_final_T", mins.back(), 0.0, mins.back(), mins.back() > 0.0);
  out.values()["threshold_2R"] = 2.0 * ops.mesh().domain.R_Omega;
  return out.finish();
}

RunOutput run_gramian(const RunConfig& c, const OperatorSet& ops) {
  Output out(c);
  const WaveHum hum(ops, c.lambda, c.T, c.dt, c.rho);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  const auto draw = [&] {
    Vec v(2 * hum.modes());
    for (auto& x : v) x = normal(rng);
    return v;
  };
  Csv csv(c, {"pair", "symmetry", "positivity_a", "positivity_b", "linearity"});
  double sym = 0.0, lin = 0.0, pos = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 16; ++k) {
    const Vec a = draw(), b = draw();
    const double s = normal(rng), t = normal(rng);
    const Vec La = hum.apply_coefficients(a), Lb = hum.apply_coefficients(b);
    const double aLa = a.dot(La), bLb = b.dot(Lb);
    const double es = std::abs(La.dot(b) - a.dot(Lb)) / std::sqrt(std::abs(aLa * bLb));
    const double pa = aLa / (La.norm() * a.norm());
    const double pb = bLb / (Lb.norm() * b.norm());
    const Vec Lc = hum.apply_coefficients(s * a + t * b);
    const double el = (Lc - s * La - t * Lb).norm() / (std::abs(s) * La.norm() + std::abs(t) * Lb.norm());
    csv.row({static_cast<double>(k), es, pa, pb, el});
    sym = std::max(sym, es);
    lin = std::max(lin, el);
    pos = std::min({pos, pa, pb});
  }
  out.file("gramian.csv", csv);
  out.check("symmetry", sym, 0.0, sym, sym <= 1e-8);
  out.check("positivity", pos, 0.0, pos, pos > 1e-8);
  out.check("linearity", lin, 0.0, lin, lin <= 1e-8);
  out.values()["modes"] = hum.modes();
  return out.finish();
}

RunOutput run_hum(const RunConfig& c) {
  const OperatorSet ops = make_ops(c, c.h);
  if (c.task == "scan") return run_scan(c, ops);
  if (c.task == "gramian") return run_gramian(c, ops);
  if (c.system == "schrodinger") return run_schrodinger_control(c, ops);
  return run_wave_control(c, ops);
}

// semilinear ----------------------------------------------------------------

RunOutput run_semilinear(const RunConfig& c) {
  Output out(c);
  const OperatorSet ops = make_ops(c, c.h);
  const SemilinearResult r = minimize_I(ops, c.lambda, c.alpha);
  Csv csv(c, {"iteration", "quotient"});
  for (std::size_t k = 0; k < r.quotient_history.size(); ++k) csv.row({static_cast<double>(k), r.quotient_history[k]});
  out.file("semilinear.csv", csv);
  out.check("euler_lagrange", r.euler_lagrange_residual, 0.0, r.euler_lagrange_residual,
            r.euler_lagrange_residual <= 1e-6);
  out.check("energy_identity", r.energy_identity_residual, 0.0, r.energy_identity_residual,
            r.energy_identity_residual <= 1e-6);
  out.identity(r.pohozaev_defect, 0.05);
  out.values()["I_value"] = r.I_value;
  out.values()["iterations"] = r.iterations;
  out.values()["seeds_used"] = r.seeds_used;
  out.values()["criticality_coefficient"] = criticality_coefficient(ops.dim(), c.alpha);
  return out.finish();
}

// study ---------------------------------------------------------------------

RunOutput run_study(const RunConfig& c) {
  Output out(c);
  if (c.check == "pohozaev") {
    Csv csv(c, {"h_param", "h", "dofs", "lhs", "rhs", "rel_residual"});
    std::vector<double> res;
    for (double h : c.h_list) {
      const OperatorSet ops = make_ops(c, h);
      const IdentityReport r = pohozaev_check(ops, solve(ops, c.lambda, make_load(c), cg_options()));
      csv.row({h, r.h, static_cast<double>(ops.dofs()), r.lhs, r.rhs, r.rel_residual});
      res.push_back(r.rel_residual);
    }
    out.file("convergence.csv", csv);
    out.check("residual_decreasing", res.front(), res.back(), res.back() - res.front(), strictly_decreasing(res));
    out.check("finest_residual", res.back(), 0.05, res.back(), res.back() <= 0.05);
  } else if (c.check == "trace") {
    Csv csv(c, {"h_param", "h", "dofs", "lambda", "max_ratio"});
    std::vector<std::vector<double>> ratios(c.lambda_list.size());
    for (double h : c.h_list) {
      const OperatorSet ops = make_ops(c, h);
      for (std::size_t j = 0; j < c.lambda_list.size(); ++j) {
        const double r = trace_battery(ops, c.lambda_list[j], cg_options());
        csv.row({h, ops.mesh().h, static_cast<double>(ops.dofs()), c.lambda_list[j], r});
        ratios[j].push_back(r);
      }
    }
    out.file("convergence.csv", csv);
    double g = 0.0;
    for (const auto& r : ratios) g = std::max(g, max_growth(r));
    out.check("max_growth", g, 1.5, g, g <= 1.5);
  } else if (c.check == "multiplier") {
    Csv csv(c, {"h_param", "h", "dt", "dofs", "energy_drift", "lhs", "rhs", "rel_residual", "equipartition",
                "hidden_ratio"});
    std::vector<double> res;
    WaveLevel last;
    for (double h : c.h_list) {
      const OperatorSet ops = make_ops(c, h);
      last = wave_level(c, ops, dt_for(c, h), nullptr);
      csv.row({h, last.h, last.dt, static_cast<double>(last.dofs), last.drift, last.multiplier.lhs,
               last.multiplier.rhs, last.multiplier.rel_residual, last.equipartition.rel_residual, last.hidden});
      res.push_back(last.multiplier.rel_residual);
    }
    out.file("convergence.csv", csv);
    wave_checks(last, out);
    out.check("residual_decreasing", res.front(), res.back(), res.back() - res.front(), strictly_decreasing(res));
  } else if (c.check == "semilinear") {
    Csv csv(c, {"h_param", "h", "dofs", "I_value", "euler_lagrange", "energy_identity", "lhs", "rhs",
                "rel_residual"});
    std::vector<double> res;
    for (double h : c.h_list) {
      const OperatorSet ops = make_ops(c, h);
      const SemilinearResult r = minimize_I(ops, c.lambda, c.alpha);
      const auto& d = r.pohozaev_defect;
      csv.row({h, d.h, static_cast<double>(ops.dofs()), r.I_value, r.euler_lagrange_residual,
               r.energy_identity_residual, d.lhs, d.rhs, d.rel_residual});
      res.push_back(d.rel_residual);
    }
    out.file("convergence.csv", csv);
    out.check("residual_decreasing", res.front(), res.back(), res.back() - res.front(), strictly_decreasing(res));
  } else {
    std::vector<LevelRow> rows;
    for (double h : c.h_list) {
      const OperatorSet ops = make_ops(c, h);
      if (c.check == "hardy") {
        const HardyReport r = hardy_constant(ops);
        rows.push_back({ops.mesh().h, r.mu_h, r.residual, r.iterations});
      } else if (c.check == "improved") {
        const ConstantReport r = improved_hardy_check(ops);
        rows.push_back({ops.mesh().h, r.value, r.residual, r.iterations});
      } else {
        const std::optional<double> eps = c.constant == "tuu8" ? std::optional<double>(c.eps) : std::nullopt;
        const ConstantReport r = tu8_constant(ops, eps);
        rows.push_back({ops.mesh().h, r.value, r.residual, r.iterations});
      }
    }
    constant_rows(c, rows, c.check, out);
  }
  return out.finish();
}

}  // namespace

RunOutput execute(const RunConfig& c) {
  if (c.command == "hardy") return run_hardy(c);
  if (c.command == "elliptic") return run_elliptic(c);
  if (c.command == "wave") return run_wave(c);
  if (c.command == "schrodinger") return run_schrodinger(c);
  if (c.command == "hum") return run_hum(c);
  if (c.command == "semilinear") return run_semilinear(c);
  if (c.command == "study") return run_study(c);
  throw std::invalid_argument("execute: unknown command '" + c.command + "'");
}

void write_artifacts(const RunOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : output.files) {
    std::ofstream f(dir / a.name, std::ios::binary);
    f << a.content;
    if (!f) throw std::runtime_error("write_artifacts: cannot write " + (dir / a.name).string());
  }
}

int run(const RunConfig& config, std::ostream& log) {
  try {
    const RunOutput out = execute(config);
    write_artifacts(out, config.output);
    for (const auto& chk : out.summary["checks"]) {
      log << (chk["pass"].get<bool>() ? "PASS " : "FAIL ") << chk["check"].get<std::string>()
          << " residual=" << num(chk["residual"].get<double>()) << '\n';
    }
    return out.pass ? exit_ok : exit_check_failed;
  } catch (const ConvergenceError& e) {
    log << "error: " << e.what() << '\n';
    return exit_not_converged;
  } catch (const MeshQualityError& e) {
    log << "error: " << e.what() << '\n';
    return exit_mesh_quality;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return exit_precondition;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_internal;
  }
}

int run_text(const std::string& text, std::ostream& log, const std::string* output_override) {
  RunConfig config;
  try {
    config = parse_config(text);
  } catch (const ConfigError& e) {
    log << "invalid config:\n" << e.what() << '\n';
    return exit_bad_config;
  }
  if (output_override) config.output = *output_override;
  return run(config, log);
}

}  // namespace hardylab
