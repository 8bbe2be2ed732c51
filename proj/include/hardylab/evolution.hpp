#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SparseLU>

#include "hardylab/linalg.hpp"
#include "hardylab/operator.hpp"
#include "hardylab/report.hpp"

namespace hardylab {

/// X_ij = int phi_i (x . grad phi_j), the multiplier x . grad as a matrix.
SpMat multiplier_matrix(const OperatorSet& ops);

/// Implicit midpoint for M v'' + A v = L on the first-order pair (v, w = v'),
/// A = K - lambda W:
///   (M + dt^2/4 A) v+ = (M - dt^2/4 A) v + dt M w + dt^2/2 L
///   w+ = 2 (v+ - v)/dt - w
/// The factorization depends on dt^2 only, so one stepper runs both ways.
class WaveStepper {
 public:
  WaveStepper(const OperatorSet& ops, double lambda, double dt);

  /// One step of signed size `dt` (|dt| must equal the construction value).
  /// `load` is the half-step load L^{n+1/2}; null means zero.
  void step(Vec& v, Vec& w, double dt, const Vec* load = nullptr) const;

  [[nodiscard]] const SpMat& A() const { return A_; }
  [[nodiscard]] const SpMat& M() const { return *M_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] double energy(const Vec& v, const Vec& w) const;

 private:
  const SpMat* M_;
  SpMat A_;
  SpMat lhs_;
  SpdFactor factor_;
  double dt_;
  Exec exec_;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> E_lambda;  ///< 1/2 (w^T M w + v^T A v)
  std::vector<double> boundary_flux_integral;  ///< running int_0^t int_Gamma (x.nu)(dv/dnu)^2, trapezoid
  std::vector<double> r2_flux_integral;        ///< running int_0^t int_Gamma |x|^2 (dv/dnu)^2, trapezoid
  double cross_term_0 = 0.0;  ///< int v_t (x . grad v + (N-1)/2 v) at t = 0
  double cross_term_T = 0.0;
  double vw_0 = 0.0;  ///< int v v_t at t = 0
  double vw_T = 0.0;
  double equipartition_integral = 0.0;  ///< sum dt (|w_mid|_M^2 - |v_mid|_A^2)
};

/// Boundary data for the non-homogeneous problem: one facet vector per step,
/// evaluated at the half step. The load is -B h with B = flux_map^T diag(|facet|),
/// projected onto span(basis) through M basis basis^T when a basis is given.
struct BoundaryControl {
  std::vector<Vec> h;
  const DenseMat* basis = nullptr;
};

struct WaveTrajectory {
  double lambda = 0.0;
  double dt = 0.0;
  double T = 0.0;
  int steps = 0;
  std::vector<double> times;
  std::vector<Vec> v, w;  ///< per step when store_states, else initial and final only
  Vec v_final, w_final;
  EnergyTrace energy;
};

struct WaveOptions {
  bool store_states = false;
};

/// Load -B h for facet data h, optionally projected onto span(basis).
Vec control_load(const OperatorSet& ops, const Vec& h, const DenseMat* basis);

WaveTrajectory wave_solve(const OperatorSet& ops, double lambda, const Vec& v0, const Vec& v1, double T, double dt,
                          const BoundaryControl* control = nullptr, const WaveOptions& options = {});
/// Same, reusing a stepper built for (lambda, dt).
WaveTrajectory wave_solve(const OperatorSet& ops, const WaveStepper& stepper, double lambda, const Vec& v0,
                          const Vec& v1, double T, const BoundaryControl* control = nullptr,
                          const WaveOptions& options = {});

/// Multiplier identity
///   1/2 int_0^T int_Gamma (x.nu)(dv/dnu)^2 = T E(0) + [int v_t (x.grad v + (N-1)/2 v)]_0^T.
IdentityReport multiplier_check(const OperatorSet& ops, const WaveTrajectory& traj);

/// Equipartition: [int v v_t]_0^T against int_0^T (|v_t|^2 - |v|_{H_lambda}^2),
/// residual normalized by 2 T E(0).
IdentityReport equipartition_check(const OperatorSet& ops, const WaveTrajectory& traj);

/// int_0^T int_Gamma |x|^2 (dv/dnu)^2 / (|v0|_H^2 + |v1|^2).
double hidden_regularity_ratio(const WaveTrajectory& traj);

/// Interpolants of bubble(x) times random quadratics; deterministic in `seed`.
std::pair<Vec, Vec> smooth_random_data(const OperatorSet& ops, std::uint64_t seed);

/// Crank-Nicolson for i M v' = A v, A = K - lambda W.
class SchrodingerStepper {
 public:
  SchrodingerStepper(const OperatorSet& ops, double lambda, double dt);
  /// `load` is the half-step load; sign of dt selects the direction.
  void step(CVec& v, double dt, const CVec* load = nullptr) const;
  [[nodiscard]] const SpMat& A() const { return A_; }
  [[nodiscard]] const SpMat& M() const { return *M_; }
  [[nodiscard]] double dt() const { return dt_; }

 private:
  using CSpMat = Eigen::SparseMatrix<Complex>;
  using Solver = Eigen::SparseLU<CSpMat, Eigen::COLAMDOrdering<int>>;
  const SpMat* M_;
  SpMat A_;
  double dt_;
  std::shared_ptr<Solver> forward_, backward_;
  CSpMat rhs_forward_, rhs_backward_;
};

struct SchrodingerTrajectory {
  double lambda = 0.0;
  double dt = 0.0;
  double T = 0.0;
  int steps = 0;
  std::vector<double> times;
  std::vector<double> mass;    ///< v^H M v
  std::vector<double> energy;  ///< v^H A v
  std::vector<double> boundary_flux_integral;  ///< running int int (x.nu)|dv/dnu|^2, trapezoid
  std::vector<CVec> v;  ///< per step when store_states, else initial and final only
  CVec v_final;
  double im_moment_0 = 0.0;  ///< Im int v x.grad conj(v) at t = 0
  double im_moment_T = 0.0;
};

SchrodingerTrajectory schrodinger_solve(const OperatorSet& ops, double lambda, const CVec& v0, double T, double dt,
                                        const WaveOptions& options = {});

/// 1/2 int_0^T int_Gamma (x.nu)|dv/dnu|^2 = T |v0|_H^2 + 1/2 [Im int v x.grad conj(v)]_0^T.
IdentityReport smult_check(const OperatorSet& ops, const SchrodingerTrajectory& traj);

/// Largest relative drift of mass and H_lambda energy over the trajectory.
std::pair<double, double> schrodinger_drift(const SchrodingerTrajectory& traj);

}  // namespace hardylab
