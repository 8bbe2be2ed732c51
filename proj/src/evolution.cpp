#include "hardylab/evolution.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hardylab {

namespace {

int step_count(double T, double dt) {
  if (!(T >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("time stepping: need T >= 0 and dt > 0");
  const double r = T / dt;
  const int n = static_cast<int>(std::llround(r));
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream os;
    os << "time stepping: T = " << T << " is not a multiple of dt = " << dt;
    throw std::invalid_argument(os.str());
  }
  return n;
}

void check_finite(const Vec& v, int step) {
  if (!v.allFinite()) throw std::runtime_error("time stepping: non-finite state at step " + std::to_string(step));
}

void check_lambda(const OperatorSet& ops, double lambda) {
  if (lambda > ops.lambda_N * (1.0 + 1e-14)) throw std::invalid_argument("lambda exceeds lambda(N)");
}

}  // namespace

SpMat multiplier_matrix(const OperatorSet& ops) {
  const Mesh& m = ops.mesh();
  const auto& rule = ops.rule();
  const int nloc = m.dim + 1;
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto v = m.cell(c);
    const auto grad = p1_gradients(m, c);
    const double vol = m.cell_measure(c);
    std::array<double, 9> a{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = m.map(c, rule.bary[q]);
      const double wq = rule.weights[q] * vol;
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          a[i * 3 + j] += wq * rule.bary[q][i] * (x[0] * grad[j][0] + x[1] * grad[j][1]);
    }
    for (int i = 0; i < nloc; ++i) {
      const int di = m.dof[v[i]];
      if (di < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int dj = m.dof[v[j]];
        if (dj >= 0) trip.emplace_back(di, dj, a[i * 3 + j]);
      }
    }
  }
  SpMat X(m.num_dofs(), m.num_dofs());
  X.setFromTriplets(trip.begin(), trip.end());
  X.makeCompressed();
  return X;
}

WaveStepper::WaveStepper(const OperatorSet& ops, double lambda, double dt)
    : M_(&ops.M), A_(ops.hardy_matrix(lambda)), dt_(dt), exec_(ops.exec()) {
  check_lambda(ops, lambda);
  if (!(dt > 0.0)) throw std::invalid_argument("WaveStepper: dt must be positive");
  lhs_ = *M_ + (0.25 * dt * dt) * A_;
  lhs_.makeCompressed();
  factor_ = SpdFactor(lhs_);
  if (!factor_.positive_definite()) throw std::runtime_error("WaveStepper: M + dt^2/4 A is not positive definite");
}

void WaveStepper::step(Vec& v, Vec& w, double dt, const Vec* load) const {
  if (std::abs(std::abs(dt) - dt_) > 1e-14 * dt_) throw std::invalid_argument("WaveStepper: step size mismatch");
  Vec mv, av, mw;
  symv(*M_, v, mv, exec_);
  symv(A_, v, av, exec_);
  symv(*M_, w, mw, exec_);
  Vec rhs = mv - (0.25 * dt * dt) * av + dt * mw;
  if (load) rhs += (0.5 * dt * dt) * *load;
  Vec vn = factor_.solve(rhs);
  w = (2.0 / dt) * (vn - v) - w;
  v = std::move(vn);
}

double WaveStepper::energy(const Vec& v, const Vec& w) const {
  return 0.5 * (quad_form(*M_, w, exec_) + quad_form(A_, v, exec_));
}

Vec control_load(const OperatorSet& ops, const Vec& h, const DenseMat* basis) {
  const Mesh& m = ops.mesh();
  Vec scaled(h.size());
  for (Eigen::Index f = 0; f < h.size(); ++f) scaled[f] = m.facets[static_cast<std::size_t>(f)].measure * h[f];
  Vec load = -(ops.flux_map.transpose() * scaled);
  if (basis) load = ops.M * (*basis * (basis->transpose() * load));
  return load;
}

WaveTrajectory wave_solve(const OperatorSet& ops, double lambda, const Vec& v0, const Vec& v1, double T, double dt,
                          const BoundaryControl* control, const WaveOptions& options) {
  const WaveStepper stepper(ops, lambda, dt);
  return wave_solve(ops, stepper, lambda, v0, v1, T, control, options);
}

WaveTrajectory wave_solve(const OperatorSet& ops, const WaveStepper& stepper, double lambda, const Vec& v0,
                          const Vec& v1, double T, const BoundaryControl* control, const WaveOptions& options) {
  check_lambda(ops, lambda);
  const double dt = stepper.dt();
  const int steps = step_count(T, dt);
  if (v0.size() != ops.dofs() || v1.size() != ops.dofs()) throw std::invalid_argument("wave_solve: data size mismatch");
  if (control && static_cast<int>(control->h.size()) != steps) {
    throw std::invalid_argument("wave_solve: boundary data needs one facet vector per step");
  }
  const Mesh& mesh = ops.mesh();
  const Exec ex = ops.exec();
  const SpMat X = multiplier_matrix(ops);
  const double half_n1 = 0.5 * (ops.dim() - 1);

  auto cross = [&](const Vec& v, const Vec& w) {
    Vec xv = X * v;
    Vec mv;
    symv(ops.M, v, mv, ex);
    return dot(w, xv, ex) + half_n1 * dot(w, mv, ex);
  };

  WaveTrajectory tr;
  tr.lambda = lambda;
  tr.dt = dt;
  tr.T = T;
  tr.steps = steps;
  Vec v = v0, w = v1;
  EnergyTrace& et = tr.energy;

  auto record = [&](int n, const Vec& fl_prev, const Vec& fl) {
    et.times.push_back(n * dt);
    et.E_lambda.push_back(stepper.energy(v, w));
    if (n == 0) {
      et.boundary_flux_integral.push_back(0.0);
      et.r2_flux_integral.push_back(0.0);
    } else {
      et.boundary_flux_integral.push_back(et.boundary_flux_integral.back() +
                                          0.5 * dt * (xnu_flux_energy(mesh, fl_prev) + xnu_flux_energy(mesh, fl)));
      et.r2_flux_integral.push_back(et.r2_flux_integral.back() +
                                    0.5 * dt * (r2_flux_energy(mesh, fl_prev) + r2_flux_energy(mesh, fl)));
    }
  };

  Vec flux = boundary_flux(ops, v);
  record(0, flux, flux);
  et.cross_term_0 = cross(v, w);
  et.vw_0 = dot(v, ops.M * w, ex);
  tr.times.push_back(0.0);
  tr.v.push_back(v);
  tr.w.push_back(w);

  for (int n = 0; n < steps; ++n) {
    const Vec v_old = v, w_old = w;
    Vec load;
    if (control) load = control_load(ops, control->h[static_cast<std::size_t>(n)], control->basis);
    stepper.step(v, w, dt, control ? &load : nullptr);
    check_finite(v, n + 1);
    const Vec vm = 0.5 * (v + v_old), wm = 0.5 * (w + w_old);
    et.equipartition_integral += dt * (quad_form(ops.M, wm, ex) - quad_form(stepper.A(), vm, ex));
    const Vec flux_new = boundary_flux(ops, v);
    record(n + 1, flux, flux_new);
    flux = flux_new;
    if (options.store_states) {
      tr.times.push_back((n + 1) * dt);
      tr.v.push_back(v);
      tr.w.push_back(w);
    }
  }
  et.cross_term_T = cross(v, w);
  et.vw_T = dot(v, ops.M * w, ex);
  if (!options.store_states) {
    tr.times.push_back(steps * dt);
    tr.v.push_back(v);
    tr.w.push_back(w);
  }
  tr.v_final = v;
  tr.w_final = w;
  return tr;
}

IdentityReport multiplier_check(const OperatorSet& ops, const WaveTrajectory& traj) {
  const EnergyTrace& et = traj.energy;
  const double lhs = 0.5 * et.boundary_flux_integral.back();
  const double rhs = traj.T * et.E_lambda.front() + (et.cross_term_T - et.cross_term_0);
  return make_report("multiplier", lhs, rhs, ops.mesh().h);
}

IdentityReport equipartition_check(const OperatorSet& ops, const WaveTrajectory& traj) {
  const EnergyTrace& et = traj.energy;
  const double lhs = et.vw_T - et.vw_0;
  const double rhs = et.equipartition_integral;
  IdentityReport r = make_report("equipartition", lhs, rhs, ops.mesh().h);
  // both sides can vanish up to round-off, so scale by the energy budget instead
  const double scale = 2.0 * traj.T * et.E_lambda.front();
  r.rel_residual = r.abs_residual / std::max(scale, 1e-30);
  return r;
}

double hidden_regularity_ratio(const WaveTrajectory& traj) {
  const double e2 = 2.0 * traj.energy.E_lambda.front();
  if (e2 == 0.0) return 0.0;
  return traj.energy.r2_flux_integral.back() / e2;
}

std::pair<Vec, Vec> smooth_random_data(const OperatorSet& ops, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const DomainSpec& d = ops.mesh().domain;
  auto field = [&]() {
    std::array<double, 6> c{};
    for (auto& x : c) x = nd(gen);
    const double R = d.R_Omega;
    return [c, d, R](const Point& x) {
      const double a = x[0] / R, b = x[1] / R;
      return d.bubble(x) * (c[0] + c[1] * a + c[2] * b + c[3] * a * a + c[4] * a * b + c[5] * b * b);
    };
  };
  const auto f0 = field();
  const auto f1 = field();
  return {ops.interpolate(f0), ops.interpolate(f1)};
}

SchrodingerStepper::SchrodingerStepper(const OperatorSet& ops, double lambda, double dt)
    : M_(&ops.M), A_(ops.hardy_matrix(lambda)), dt_(dt) {
  check_lambda(ops, lambda);
  if (!(dt > 0.0)) throw std::invalid_argument("SchrodingerStepper: dt must be positive");
  const CSpMat Mc = M_->cast<Complex>();
  const CSpMat Ac = A_.cast<Complex>();
  const Complex half_idt(0.0, 0.5 * dt);
  CSpMat plus = Mc + half_idt * Ac;
  CSpMat minus = Mc - half_idt * Ac;
  plus.makeCompressed();
  minus.makeCompressed();
  forward_ = std::make_shared<Solver>();
  forward_->compute(plus);
  backward_ = std::make_shared<Solver>();
  backward_->compute(minus);
  if (forward_->info() != Eigen::Success || backward_->info() != Eigen::Success) {
    throw std::runtime_error("SchrodingerStepper: complex factorization failed");
  }
  rhs_forward_ = minus;
  rhs_backward_ = plus;
}

void SchrodingerStepper::step(CVec& v, double dt, const CVec* load) const {
  if (std::abs(std::abs(dt) - dt_) > 1e-14 * dt_) throw std::invalid_argument("SchrodingerStepper: step size mismatch");
  const bool fwd = dt > 0.0;
  CVec rhs = (fwd ? rhs_forward_ : rhs_backward_) * v;
  // i M (v+ - v)/dt = A v_mid + L  =>  (M + i dt/2 A) v+ = (M - i dt/2 A) v - i dt L
  if (load) rhs -= Complex(0.0, dt) * *load;
  const Solver& solver = fwd ? *forward_ : *backward_;
  const CSpMat& lhs = fwd ? rhs_backward_ : rhs_forward_;
  v = solver.solve(rhs);
  // one round of iterative refinement keeps the quadratic invariants at round-off
  const CVec r = rhs - lhs * v;
  v += solver.solve(r);
}

SchrodingerTrajectory schrodinger_solve(const OperatorSet& ops, double lambda, const CVec& v0, double T, double dt,
                                        const WaveOptions& options) {
  const int steps = step_count(T, dt);
  if (v0.size() != ops.dofs()) throw std::invalid_argument("schrodinger_solve: data size mismatch");
  const SchrodingerStepper stepper(ops, lambda, dt);
  const Mesh& mesh = ops.mesh();
  const SpMat X = multiplier_matrix(ops);
  const SpMat& A = stepper.A();

  auto mass = [&](const CVec& v) { return (v.adjoint() * (ops.M * v)).value().real(); };
  auto energy = [&](const CVec& v) { return (v.adjoint() * (A * v)).value().real(); };
  auto moment = [&](const CVec& v) { return (v.transpose() * (X * v.conjugate())).value().imag(); };
  auto flux_energy = [&](const CVec& v) {
    const Vec re = ops.flux_map * v.real();
    const Vec im = ops.flux_map * v.imag();
    return xnu_flux_energy(mesh, re) + xnu_flux_energy(mesh, im);
  };

  SchrodingerTrajectory tr;
  tr.lambda = lambda;
  tr.dt = dt;
  tr.T = T;
  tr.steps = steps;
  CVec v = v0;
  double fe = flux_energy(v);
  tr.times.push_back(0.0);
  tr.mass.push_back(mass(v));
  tr.energy.push_back(energy(v));
  tr.boundary_flux_integral.push_back(0.0);
  tr.im_moment_0 = moment(v);
  tr.v.push_back(v);
  for (int n = 0; n < steps; ++n) {
    stepper.step(v, dt);
    if (!v.allFinite()) throw std::runtime_error("schrodinger_solve: non-finite state at step " + std::to_string(n + 1));
    const double fe_new = flux_energy(v);
    tr.times.push_back((n + 1) * dt);
    tr.mass.push_back(mass(v));
    tr.energy.push_back(energy(v));
    tr.boundary_flux_integral.push_back(tr.boundary_flux_integral.back() + 0.5 * dt * (fe + fe_new));
    fe = fe_new;
    if (options.store_states) tr.v.push_back(v);
  }
  if (!options.store_states) tr.v.push_back(v);
  tr.im_moment_T = moment(v);
  tr.v_final = v;
  return tr;
}

IdentityReport smult_check(const OperatorSet& ops, const SchrodingerTrajectory& traj) {
  const double lhs = 0.5 * traj.boundary_flux_integral.back();
  const double rhs = traj.T * traj.energy.front() + 0.5 * (traj.im_moment_T - traj.im_moment_0);
  return make_report("smult", lhs, rhs, ops.mesh().h);
}

std::pair<double, double> schrodinger_drift(const SchrodingerTrajectory& traj) {
  double dm = 0.0, de = 0.0;
  const double m0 = traj.mass.front(), e0 = traj.energy.front();
  for (std::size_t n = 0; n < traj.mass.size(); ++n) {
    if (m0 > 0.0) dm = std::max(dm, std::abs(traj.mass[n] - m0) / m0);
    if (e0 > 0.0) de = std::max(de, std::abs(traj.energy[n] - e0) / e0);
  }
  return {dm, de};
}

}  // namespace hardylab
