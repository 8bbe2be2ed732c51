#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hardylab/evolution.hpp"
#include "hardylab/linalg.hpp"
#include "hardylab/operator.hpp"
#include "hardylab/report.hpp"

namespace hardylab {

/// Control problem for the wave (u0, u1) or Schrodinger (su0) system.
struct HumProblem {
  const OperatorSet* ops = nullptr;
  double lambda = 0.0;
  double T = 0.0;
  double dt = 0.0;
  Vec u0, u1;  ///< wave target data
  CVec su0;    ///< Schrodinger target data
  double rho = 0.3;  ///< fraction of the lowest (K - lambda W, M) modes retained
  double cg_tol = 1e-6;
  int cg_max_iter = 200;
  double gram_floor = 1e-10;
  bool allow_short_time = false;  ///< lift the T > 2 R_Omega requirement (wave only)
};

struct HumResult {
  Vec v0, v1;  ///< wave minimizer
  CVec sv0;    ///< Schrodinger minimizer
  Vec coefficients;    ///< wave minimizer in modal coordinates (a, b)
  CVec scoefficients;  ///< Schrodinger minimizer in modal coordinates
  std::vector<double> control_times;  ///< half-step times
  std::vector<Vec> control;    ///< facet values of h = (x.nu) dv/dnu on Gamma_0, zero elsewhere
  std::vector<CVec> scontrol;
  std::vector<double> cg_history;  ///< relative residual per iteration
  std::vector<double> functional;  ///< HUM functional J per iteration
  int iterations = 0;
  double relative_residual = 0.0;
  double smallest_ritz = 0.0;  ///< Lanczos estimate of the smallest Gramian eigenvalue
  int modes = 0;
  double final_energy = 0.0;        ///< controlled run at T (wave: energy; Schrodinger: |u|_M^2)
  double uncontrolled_energy = 0.0;  ///< same quantity without control
  double final_l2 = 0.0;      ///< |u(T)|_{L^2}
  double final_hprime = 0.0;  ///< |u_t(T)|_{H'_lambda} (wave)
  double uncontrolled_l2 = 0.0;
  double uncontrolled_hprime = 0.0;
};

/// Filtered HUM operator for the wave system. Works in modal coordinates
/// (a, b) with v0 = Phi a, v1 = Phi b, Phi the M-orthonormal lowest modes.
/// Observation uses half-step averages, which makes the discrete duality exact.
class WaveHum {
 public:
  WaveHum(const OperatorSet& ops, double lambda, double T, double dt, double rho, bool allow_short_time = false);

  [[nodiscard]] const OperatorSet& ops() const { return *ops_; }
  [[nodiscard]] int modes() const { return static_cast<int>(basis_.cols()); }
  [[nodiscard]] const DenseMat& basis() const { return basis_; }
  [[nodiscard]] const Vec& eigenvalues() const { return values_; }
  [[nodiscard]] const WaveStepper& stepper() const { return stepper_; }
  [[nodiscard]] int steps() const { return steps_; }

  /// Control trace of the adjoint started at (v0, v1).
  [[nodiscard]] std::vector<Vec> control_trace(const Vec& v0, const Vec& v1) const;
  /// Running sum dt int_{Gamma_0} (x.nu)(dv/dnu)^2 at every step.
  [[nodiscard]] std::vector<double> observation_series(const Vec& v0, const Vec& v1) const;
  /// State at t = 0 of the controlled system steered to zero at T by h.
  [[nodiscard]] std::pair<Vec, Vec> backward(const std::vector<Vec>& h) const;
  /// Controlled run from (u0, u1) to T.
  [[nodiscard]] std::pair<Vec, Vec> forward(const Vec& u0, const Vec& u1, const std::vector<Vec>* h) const;

  /// Gramian on dof vectors: (M p(0), -M u(0)).
  [[nodiscard]] std::pair<Vec, Vec> apply(const Vec& v0, const Vec& v1) const;
  /// Gramian in modal coordinates.
  [[nodiscard]] Vec apply_coefficients(const Vec& ab) const;
  [[nodiscard]] std::pair<Vec, Vec> expand(const Vec& ab) const;

  /// 1/2 (|w|_M^2 + |v|_A^2).
  [[nodiscard]] double energy(const Vec& v, const Vec& w) const { return stepper_.energy(v, w); }

 private:
  const OperatorSet* ops_;
  double lambda_, T_, dt_;
  int steps_;
  DenseMat basis_;
  Vec values_;
  WaveStepper stepper_;
  Vec weight_;  ///< x.nu on Gamma_0 facets, 0 elsewhere
};

/// Gramian application of the HUM problem on dof data (v0, v1).
std::pair<Vec, Vec> gramian_apply(const HumProblem& problem, const Vec& v0, const Vec& v1);

HumResult hum_solve(const HumProblem& problem);
HumResult hum_solve(const HumProblem& problem, const WaveHum& hum);

/// D(T) - D(0) with D = (M p, v) - (M u, w) for the controlled state (u, p) and an
/// independent adjoint (v, w), against sum dt (L, v_mid).
IdentityReport duality_check(const WaveHum& hum, const Vec& u0, const Vec& u1, const HumResult& result,
                             const Vec& v0, const Vec& v1);

struct ScanRow {
  double T = 0.0;
  double min_quotient = 0.0;
  double max_quotient = 0.0;
};

/// Minimal sampled observability quotient int_0^T int_{Gamma_0}(x.nu)(dv/dnu)^2 / E(0)
/// over `samples` random filtered data normalized to E(0) = 1.
std::vector<ScanRow> observability_scan(const OperatorSet& ops, double lambda, const std::vector<double>& T_list,
                                        int samples, double dt, double rho, std::uint64_t seed);

/// Filtered HUM operator for i M v' = A v.
class SchrodingerHum {
 public:
  SchrodingerHum(const OperatorSet& ops, double lambda, double T, double dt, double rho);

  [[nodiscard]] int modes() const { return static_cast<int>(basis_.cols()); }
  [[nodiscard]] const DenseMat& basis() const { return basis_; }
  [[nodiscard]] std::vector<CVec> control_trace(const CVec& v0) const;
  [[nodiscard]] double observation(const CVec& v0) const;
  [[nodiscard]] CVec backward(const std::vector<CVec>& h) const;
  [[nodiscard]] CVec forward(const CVec& u0, const std::vector<CVec>* h) const;
  /// Gramian on dof vectors: -i M u(0).
  [[nodiscard]] CVec apply(const CVec& v0) const;
  [[nodiscard]] CVec apply_coefficients(const CVec& a) const;

 private:
  CVec load(const CVec& h) const;
  const OperatorSet* ops_;
  double T_, dt_;
  int steps_;
  DenseMat basis_;
  SchrodingerStepper stepper_;
  Vec weight_;
};

HumResult schrodinger_hum(const HumProblem& problem);
HumResult schrodinger_hum(const HumProblem& problem, const SchrodingerHum& hum);

}  // namespace hardylab
