#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "hardylab/spectral.hpp"

using namespace hardylab;

namespace {

double dense_min(const SpMat& A, const SpMat& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat> es(DenseMat(A), DenseMat(B), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace

TEST_CASE("interval Hardy constant matches a dense solve and decreases toward 1/4") {
  const Mesh coarse = generate_mesh(build_domain(DomainKind::interval, 1.0), 0.01);
  const OperatorSet ops = assemble(coarse);
  const HardyReport r = hardy_constant(ops);
  CHECK(r.mu_h == doctest::Approx(dense_min(ops.K, ops.W)).epsilon(1e-9));
  CHECK(r.target == 0.25);
  const HardyReport s = hardy_study(coarse, 3);
  REQUIRE(s.refinement_series.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.refinement_series[i].value > 0.25);
    if (i) CHECK(s.refinement_series[i].value < s.refinement_series[i - 1].value);
  }
}

TEST_CASE("nested disk refinement is monotone and stays above 1") {
  const Mesh coarse = generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.2);
  const HardyReport s = hardy_study(coarse, 2);
  CHECK(s.refinement_series[0].value > s.refinement_series[1].value);
  CHECK(s.refinement_series[1].value > 1.0);
  CHECK(s.refinement_series[0].value == doctest::Approx(dense_min(assemble(coarse).K, assemble(coarse).W)));
}

TEST_CASE("log remainder constant is at least 1/4") {
  for (auto kind : {DomainKind::interval, DomainKind::tangent_disk}) {
    const double h = kind == DomainKind::interval ? 0.01 : 0.1;
    const OperatorSet ops = assemble(generate_mesh(build_domain(kind, 1.0), h));
    const ConstantReport r = improved_hardy_check(ops);
    CHECK(r.id == "oeq3");
    CHECK(r.value >= 0.25 - 1e-8);
    CHECK(r.value == doctest::Approx(dense_min(ops.hardy_matrix(ops.lambda_N), ops.W_log)).epsilon(1e-8));
  }
}

TEST_CASE("weighted constants are finite and stable") {
  const Mesh coarse = generate_mesh(build_domain(DomainKind::interval, 1.0), 0.02);
  const ConstantReport a = tu8_study(coarse, 2, std::nullopt);
  CHECK(a.id == "tu8");
  const ConstantReport b = tu8_study(coarse, 2, 1.0);
  CHECK(b.id == "tuu8(1)");
  for (const auto* r : {&a, &b}) {
    const double v0 = r->refinement_series[0].value, v1 = r->refinement_series[1].value;
    CHECK(std::isfinite(v0));
    CHECK(std::abs(v1 - v0) <= 0.2 * std::abs(v0));
  }
}
