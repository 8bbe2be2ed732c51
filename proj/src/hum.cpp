#include "hardylab/hum.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hardylab {

namespace {

constexpr int max_dense_filter = 4000;

int checked_steps(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("HUM: need T > 0 and dt > 0");
  const double r = T / dt;
  const int n = static_cast<int>(std::llround(r));
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) throw std::invalid_argument("HUM: T must be a multiple of dt");
  return n;
}

Modes filter_modes(const OperatorSet& ops, const SpMat& A, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("HUM: filter fraction must lie in (0, 1]");
  const int n = ops.dofs();
  if (n > max_dense_filter) {
    throw std::invalid_argument("HUM: the modal filter uses a dense eigensolve; mesh has " + std::to_string(n) +
                                " dofs, limit " + std::to_string(max_dense_filter));
  }
  const int m = std::max(1, static_cast<int>(std::floor(rho * n)));
  return lowest_modes(A, ops.M, m);
}

Vec gamma0_weight(const Mesh& mesh) {
  Vec w(static_cast<Eigen::Index>(mesh.facets.size()));
  for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
    w[static_cast<Eigen::Index>(f)] = mesh.facets[f].gamma0 ? mesh.facets[f].x_dot_nu : 0.0;
  }
  return w;
}

double conj_dot(const Vec& a, const Vec& b) { return a.dot(b); }
Complex conj_dot(const CVec& a, const CVec& b) { return a.dot(b); }  // a^H b

struct CgTrace {
  std::vector<double> history;
  std::vector<double> functional;
  std::vector<double> alpha, beta;
  int iterations = 0;
  double relative = 0.0;
  bool converged = false;
};

/// Plain CG on a Hermitian positive semidefinite operator.
template <class V, class Op>
V plain_cg(const Op& G, const V& b, double tol, int max_iter, CgTrace& trace) {
  V x = V::Zero(b.size());
  const double bn = b.norm();
  trace.history.push_back(bn == 0.0 ? 0.0 : 1.0);
  trace.functional.push_back(0.0);
  if (bn == 0.0) {
    trace.converged = true;
    return x;
  }
  V r = b, p = b;
  double rr = r.squaredNorm();
  while (true) {
    trace.relative = std::sqrt(rr) / bn;
    if (trace.relative <= tol) {
      trace.converged = true;
      break;
    }
    if (trace.iterations >= max_iter) break;
    const V gp = G(p);
    const double pgp = std::real(conj_dot(p, gp));
    if (!(pgp > 0.0)) break;
    const double a = rr / pgp;
    x += a * p;
    r -= a * gp;
    const double rr_new = r.squaredNorm();
    const double bt = rr_new / rr;
    trace.alpha.push_back(a);
    trace.beta.push_back(bt);
    rr = rr_new;
    p = r + bt * p;
    ++trace.iterations;
    trace.history.push_back(std::sqrt(rr) / bn);
    // J(x) = 1/2 <Gx, x> - Re <b, x> = -1/2 Re (<b, x> + <r, x>) with r = b - Gx
    trace.functional.push_back(-0.5 * std::real(conj_dot(b, x) + conj_dot(r, x)));
  }
  return x;
}

/// Smallest eigenvalue of the Lanczos tridiagonal recovered from CG coefficients.
double smallest_ritz(const CgTrace& t) {
  const int k = static_cast<int>(t.alpha.size());
  if (k == 0) return 0.0;
  DenseMat T = DenseMat::Zero(k, k);
  for (int j = 0; j < k; ++j) {
    T(j, j) = 1.0 / t.alpha[j] + (j > 0 ? t.beta[j - 1] / t.alpha[j - 1] : 0.0);
    if (j + 1 < k) T(j, j + 1) = T(j + 1, j) = std::sqrt(t.beta[j]) / t.alpha[j];
  }
  Eigen::SelfAdjointEigenSolver<DenseMat> es(T, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

void diagnose(const CgTrace& trace, double ritz, const HumProblem& p) {
  if (trace.iterations > 0 && ritz < p.gram_floor) {
    std::ostringstream os;
    os << "HUM: filtered subspace unobservable at T = " << p.T << ", dt = " << p.dt << ", rho = " << p.rho
       << " (smallest Gramian quotient " << ritz << " < gram_floor " << p.gram_floor << ")";
    throw ConvergenceError(os.str(), trace.history);
  }
  if (!trace.converged) {
    std::ostringstream os;
    os << "HUM: CG stopped after " << trace.iterations << " iterations at relative residual " << trace.relative
       << "; smallest Gramian quotient " << ritz;
    throw ConvergenceError(os.str(), trace.history);
  }
}

}  // namespace

WaveHum::WaveHum(const OperatorSet& ops, double lambda, double T, double dt, double rho, bool allow_short_time)
    : ops_(&ops),
      lambda_(lambda),
      T_(T),
      dt_(dt),
      steps_(checked_steps(T, dt)),
      stepper_(ops, lambda, dt),
      weight_(gamma0_weight(ops.mesh())) {
  if (!allow_short_time && !(T > 2.0 * ops.mesh().domain.R_Omega)) {
    throw std::invalid_argument("HUM: wave control needs T > 2 R_Omega");
  }
  Modes modes = filter_modes(ops, stepper_.A(), rho);
  basis_ = std::move(modes.vectors);
  values_ = std::move(modes.values);
}

std::vector<Vec> WaveHum::control_trace(const Vec& v0, const Vec& v1) const {
  std::vector<Vec> h;
  h.reserve(static_cast<std::size_t>(steps_));
  Vec v = v0, w = v1;
  for (int n = 0; n < steps_; ++n) {
    const Vec v_old = v;
    stepper_.step(v, w, dt_);
    const Vec flux = ops_->flux_map * (0.5 * (v + v_old));
    h.push_back(weight_.cwiseProduct(flux));
  }
  return h;
}

std::vector<double> WaveHum::observation_series(const Vec& v0, const Vec& v1) const {
  const Mesh& mesh = ops_->mesh();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps_));
  double s = 0.0;
  Vec v = v0, w = v1;
  for (int n = 0; n < steps_; ++n) {
    const Vec v_old = v;
    stepper_.step(v, w, dt_);
    const Vec flux = ops_->flux_map * (0.5 * (v + v_old));
    double step_sum = 0.0;
    for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
      const auto i = static_cast<Eigen::Index>(f);
      step_sum += mesh.facets[f].measure * weight_[i] * flux[i] * flux[i];
    }
    s += dt_ * step_sum;
    out.push_back(s);
  }
  return out;
}

std::pair<Vec, Vec> WaveHum::backward(const std::vector<Vec>& h) const {
  Vec u = Vec::Zero(ops_->dofs()), p = Vec::Zero(ops_->dofs());
  for (int n = steps_ - 1; n >= 0; --n) {
    const Vec load = control_load(*ops_, h[static_cast<std::size_t>(n)], &basis_);
    stepper_.step(u, p, -dt_, &load);
  }
  return {u, p};
}

std::pair<Vec, Vec> WaveHum::forward(const Vec& u0, const Vec& u1, const std::vector<Vec>* h) const {
  Vec u = u0, p = u1;
  for (int n = 0; n < steps_; ++n) {
    if (h) {
      const Vec load = control_load(*ops_, (*h)[static_cast<std::size_t>(n)], &basis_);
      stepper_.step(u, p, dt_, &load);
    } else {
      stepper_.step(u, p, dt_);
    }
  }
  return {u, p};
}

std::pair<Vec, Vec> WaveHum::apply(const Vec& v0, const Vec& v1) const {
  const auto [u, p] = backward(control_trace(v0, v1));
  return {ops_->M * p, -(ops_->M * u)};
}

std::pair<Vec, Vec> WaveHum::expand(const Vec& ab) const {
  const int m = modes();
  return {basis_ * ab.head(m), basis_ * ab.tail(m)};
}

Vec WaveHum::apply_coefficients(const Vec& ab) const {
  const auto [v0, v1] = expand(ab);
  const auto [g0, g1] = apply(v0, v1);
  Vec out(2 * modes());
  out.head(modes()) = basis_.transpose() * g0;
  out.tail(modes()) = basis_.transpose() * g1;
  return out;
}

std::pair<Vec, Vec> gramian_apply(const HumProblem& problem, const Vec& v0, const Vec& v1) {
  const WaveHum hum(*problem.ops, problem.lambda, problem.T, problem.dt, problem.rho, problem.allow_short_time);
  return hum.apply(v0, v1);
}

HumResult hum_solve(const HumProblem& problem) {
  if (!problem.ops) throw std::invalid_argument("hum_solve: problem has no operators");
  const WaveHum hum(*problem.ops, problem.lambda, problem.T, problem.dt, problem.rho, problem.allow_short_time);
  return hum_solve(problem, hum);
}

HumResult hum_solve(const HumProblem& problem, const WaveHum& hum) {
  const OperatorSet& ops = *problem.ops;
  const int n = ops.dofs();
  const Vec u0 = problem.u0.size() ? problem.u0 : Vec::Zero(n);
  const Vec u1 = problem.u1.size() ? problem.u1 : Vec::Zero(n);
  if (u0.size() != n || u1.size() != n) throw std::invalid_argument("hum_solve: target data size mismatch");
  const int m = hum.modes();
  const DenseMat& Phi = hum.basis();

  Vec rhs(2 * m);
  rhs.head(m) = Phi.transpose() * (ops.M * u1);
  rhs.tail(m) = -(Phi.transpose() * (ops.M * u0));

  CgTrace trace;
  const Vec ab = plain_cg<Vec>([&](const Vec& x) { return hum.apply_coefficients(x); }, rhs, problem.cg_tol,
                               problem.cg_max_iter, trace);
  HumResult res;
  res.modes = m;
  res.smallest_ritz = smallest_ritz(trace);
  diagnose(trace, res.smallest_ritz, problem);

  res.coefficients = ab;
  std::tie(res.v0, res.v1) = hum.expand(ab);
  res.control = hum.control_trace(res.v0, res.v1);
  for (int k = 0; k < hum.steps(); ++k) res.control_times.push_back((k + 0.5) * problem.dt);
  res.cg_history = trace.history;
  res.functional = trace.functional;
  res.iterations = trace.iterations;
  res.relative_residual = trace.relative;

  const auto [uT, pT] = hum.forward(u0, u1, &res.control);
  const auto [vT, wT] = hum.forward(u0, u1, nullptr);
  res.final_energy = hum.energy(uT, pT);
  res.uncontrolled_energy = hum.energy(vT, wT);
  const SpdFactor Af(hum.stepper().A());
  auto hprime = [&](const Vec& p) {
    const Vec mp = ops.M * p;
    return std::sqrt(std::max(0.0, mp.dot(Af.solve(mp))));
  };
  res.final_l2 = std::sqrt(quad_form(ops.M, uT, ops.exec()));
  res.final_hprime = hprime(pT);
  res.uncontrolled_l2 = std::sqrt(quad_form(ops.M, vT, ops.exec()));
  res.uncontrolled_hprime = hprime(wT);
  return res;
}

IdentityReport duality_check(const WaveHum& hum, const Vec& u0, const Vec& u1, const HumResult& result,
                             const Vec& v0, const Vec& v1) {
  const WaveStepper& st = hum.stepper();
  const SpMat& M = st.M();
  const double dt = st.dt();
  Vec u = u0, p = u1, v = v0, w = v1;
  auto D = [&]() { return p.dot(M * v) - u.dot(M * w); };
  const double d0 = D();
  double rhs = 0.0;
  // the load is rebuilt from the stored control exactly as in the controlled run
  for (int n = 0; n < hum.steps(); ++n) {
    const Vec v_old = v;
    st.step(v, w, dt);
    const Vec load = control_load(hum.ops(), result.control[static_cast<std::size_t>(n)], &hum.basis());
    st.step(u, p, dt, &load);
    rhs += dt * load.dot(0.5 * (v + v_old));
  }
  return make_report("duality", D() - d0, rhs, 0.0);
}

std::vector<ScanRow> observability_scan(const OperatorSet& ops, double lambda, const std::vector<double>& T_list,
                                        int samples, double dt, double rho, std::uint64_t seed) {
  if (T_list.empty() || samples < 1) throw std::invalid_argument("observability_scan: empty scan");
  double T_max = 0.0;
  for (double T : T_list) T_max = std::max(T_max, T);
  const WaveHum hum(ops, lambda, T_max, dt, rho, true);
  const int m = hum.modes();
  std::vector<int> idx;
  for (double T : T_list) idx.push_back(checked_steps(T, dt) - 1);

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<ScanRow> rows(T_list.size());
  for (std::size_t k = 0; k < T_list.size(); ++k) {
    rows[k].T = T_list[k];
    rows[k].min_quotient = std::numeric_limits<double>::infinity();
  }
  for (int s = 0; s < samples; ++s) {
    Vec ab(2 * m);
    for (int i = 0; i < 2 * m; ++i) ab[i] = nd(gen);
    // E(0) = 1/2 (sum mu_k a_k^2 + sum b_k^2) in modal coordinates
    const double e = 0.5 * (hum.eigenvalues().cwiseProduct(ab.head(m).cwiseAbs2()).sum() + ab.tail(m).squaredNorm());
    ab /= std::sqrt(e);
    const auto [v0, v1] = hum.expand(ab);
    const auto series = hum.observation_series(v0, v1);
    for (std::size_t k = 0; k < T_list.size(); ++k) {
      const double q = series[static_cast<std::size_t>(idx[k])];
      rows[k].min_quotient = std::min(rows[k].min_quotient, q);
      rows[k].max_quotient = std::max(rows[k].max_quotient, q);
    }
  }
  return rows;
}

SchrodingerHum::SchrodingerHum(const OperatorSet& ops, double lambda, double T, double dt, double rho)
    : ops_(&ops),
      T_(T),
      dt_(dt),
      steps_(checked_steps(T, dt)),
      stepper_(ops, lambda, dt),
      weight_(gamma0_weight(ops.mesh())) {
  Modes modes = filter_modes(ops, stepper_.A(), rho);
  basis_ = std::move(modes.vectors);
}

CVec SchrodingerHum::load(const CVec& h) const {
  const Vec re = control_load(*ops_, h.real(), &basis_);
  const Vec im = control_load(*ops_, h.imag(), &basis_);
  // control_load carries the sign of the wave lift; the Schrodinger system takes +B h
  CVec out(re.size());
  out.real() = -re;
  out.imag() = -im;
  return out;
}

std::vector<CVec> SchrodingerHum::control_trace(const CVec& v0) const {
  std::vector<CVec> h;
  h.reserve(static_cast<std::size_t>(steps_));
  CVec v = v0;
  for (int n = 0; n < steps_; ++n) {
    const CVec v_old = v;
    stepper_.step(v, dt_);
    const CVec mid = 0.5 * (v + v_old);
    CVec flux(ops_->flux_map.rows());
    flux.real() = ops_->flux_map * mid.real();
    flux.imag() = ops_->flux_map * mid.imag();
    h.push_back(weight_.cast<Complex>().cwiseProduct(flux));
  }
  return h;
}

double SchrodingerHum::observation(const CVec& v0) const {
  const Mesh& mesh = ops_->mesh();
  double s = 0.0;
  CVec v = v0;
  for (int n = 0; n < steps_; ++n) {
    const CVec v_old = v;
    stepper_.step(v, dt_);
    const CVec mid = 0.5 * (v + v_old);
    const Vec fr = ops_->flux_map * mid.real();
    const Vec fi = ops_->flux_map * mid.imag();
    for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
      const auto i = static_cast<Eigen::Index>(f);
      s += dt_ * mesh.facets[f].measure * weight_[i] * (fr[i] * fr[i] + fi[i] * fi[i]);
    }
  }
  return s;
}

CVec SchrodingerHum::backward(const std::vector<CVec>& h) const {
  CVec u = CVec::Zero(ops_->dofs());
  for (int n = steps_ - 1; n >= 0; --n) {
    const CVec L = load(h[static_cast<std::size_t>(n)]);
    stepper_.step(u, -dt_, &L);
  }
  return u;
}

CVec SchrodingerHum::forward(const CVec& u0, const std::vector<CVec>* h) const {
  CVec u = u0;
  for (int n = 0; n < steps_; ++n) {
    if (h) {
      const CVec L = load((*h)[static_cast<std::size_t>(n)]);
      stepper_.step(u, dt_, &L);
    } else {
      stepper_.step(u, dt_);
    }
  }
  return u;
}

CVec SchrodingerHum::apply(const CVec& v0) const {
  const CVec u = backward(control_trace(v0));
  return Complex(0.0, -1.0) * (ops_->M * u);
}

CVec SchrodingerHum::apply_coefficients(const CVec& a) const {
  const CVec g = apply(basis_ * a);
  return basis_.transpose() * g;
}

HumResult schrodinger_hum(const HumProblem& problem) {
  if (!problem.ops) throw std::invalid_argument("schrodinger_hum: problem has no operators");
  const SchrodingerHum hum(*problem.ops, problem.lambda, problem.T, problem.dt, problem.rho);
  return schrodinger_hum(problem, hum);
}

HumResult schrodinger_hum(const HumProblem& problem, const SchrodingerHum& hum) {
  const OperatorSet& ops = *problem.ops;
  const int n = ops.dofs();
  const CVec u0 = problem.su0.size() ? problem.su0 : CVec::Zero(n);
  if (u0.size() != n) throw std::invalid_argument("schrodinger_hum: target data size mismatch");
  const DenseMat& Phi = hum.basis();
  const CVec rhs = Complex(0.0, -1.0) * (Phi.transpose() * (ops.M * u0));

  CgTrace trace;
  const CVec a = plain_cg<CVec>([&](const CVec& x) { return hum.apply_coefficients(x); }, rhs, problem.cg_tol,
                                problem.cg_max_iter, trace);
  HumResult res;
  res.modes = hum.modes();
  res.smallest_ritz = smallest_ritz(trace);
  diagnose(trace, res.smallest_ritz, problem);

  res.scoefficients = a;
  res.sv0 = Phi * a;
  res.scontrol = hum.control_trace(res.sv0);
  for (int k = 0; k < static_cast<int>(res.scontrol.size()); ++k) res.control_times.push_back((k + 0.5) * problem.dt);
  res.cg_history = trace.history;
  res.functional = trace.functional;
  res.iterations = trace.iterations;
  res.relative_residual = trace.relative;

  auto mnorm2 = [&](const CVec& u) { return (u.adjoint() * (ops.M * u)).value().real(); };
  const CVec uT = hum.forward(u0, &res.scontrol);
  const CVec vT = hum.forward(u0, nullptr);
  res.final_energy = mnorm2(uT);
  res.uncontrolled_energy = mnorm2(vT);
  res.final_l2 = std::sqrt(res.final_energy);
  res.uncontrolled_l2 = std::sqrt(res.uncontrolled_energy);
  return res;
}

}  // namespace hardylab
