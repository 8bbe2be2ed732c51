#include <benchmark/benchmark.h>

#include "hardylab/kernels.hpp"
#include "hardylab/operator.hpp"

using namespace hardylab;

namespace {

const Mesh& disk_mesh() {
  static const Mesh m = generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.02);
  return m;
}

const OperatorSet& disk_ops() {
  static const OperatorSet ops = assemble(disk_mesh());
  return ops;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

const FormKernel kSingularMass{FormKernel::Kind::weighted_mass,
                               [](const Point& x) { return 1.0 / (x[0] * x[0] + x[1] * x[1]); },
                               {}};

void BM_element_matrices(benchmark::State& state) {
  const QuadRule rule = simplex_rule(2, 4);
  const Mesh& m = disk_mesh();
  for (auto _ : state) benchmark::DoNotOptimize(element_matrices(m, rule, kSingularMass, exec_of(state)));
  label(state);
}

void BM_assemble_form(benchmark::State& state) {
  const QuadRule rule = simplex_rule(2, 4);
  const Mesh& m = disk_mesh();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_form(m, rule, kSingularMass, exec_of(state)));
  label(state);
}

void BM_symv(benchmark::State& state) {
  const SpMat& K = disk_ops().K;
  const Vec x = Vec::LinSpaced(K.rows(), 0.0, 1.0);
  Vec y(K.rows());
  for (auto _ : state) {
    symv(K, x, y, exec_of(state));
    benchmark::ClobberMemory();
  }
  label(state);
}

void BM_dot(benchmark::State& state) {
  const Vec x = Vec::LinSpaced(1 << 20, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(dot(x, x, exec_of(state)));
  label(state);
}

void BM_load_vector(benchmark::State& state) {
  const QuadRule rule = simplex_rule(2, 4);
  const ScalarField f = [](const Point& x) { return 1.0 + x[0] * x[1]; };
  const Mesh& m = disk_mesh();
  for (auto _ : state) benchmark::DoNotOptimize(load_vector(m, rule, f, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_element_matrices)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_form)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_symv)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dot)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_load_vector)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
