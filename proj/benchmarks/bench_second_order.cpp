#include <benchmark/benchmark.h>

#include <random>

#include "momentmap/moment_maps.hpp"
#include "momentmap/op_count.hpp"

using namespace momentmap;

namespace {

struct Inputs {
  Matrix<double> root;
  HessianStack<double> g2;
  Matrix<double> factors;  // unit columns standing in for CPD vectors
  Vector<double> betas;
};

Inputs make_inputs(Index n, Index m, Index rank) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  Inputs in{Matrix<double>(n, n), HessianStack<double>(m, n), Matrix<double>(n, rank),
            Vector<double>::Constant(rank, 1.5)};
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) in.root(i, j) = i >= j ? normal(rng) : 0.0;
  for (Index i = 0; i < m; ++i) {
    Matrix<double> a(n, n);
    for (Index k = 0; k < n * n; ++k) a.data()[k] = normal(rng);
    in.g2.slice(i) = a + a.transpose();
  }
  for (Index r = 0; r < rank; ++r) {
    for (Index i = 0; i < n; ++i) in.factors(i, r) = normal(rng);
    in.factors.col(r).normalize();
  }
  return in;
}

// The p_r columns of the square-root map, with m = n.
void BM_SqrtTerm(benchmark::State& state) {
  const Index n = state.range(0);
  const Index rank = Index(cpd_rank_lower_bound(std::uint64_t(n)));
  const Inputs in = make_inputs(n, n, rank);
  Matrix<double> block(n, rank);
  for (auto _ : state) {
    for (Index r = 0; r < rank; ++r) {
      const Vector<double> u = in.root * in.factors.col(r);
      block.col(r) = (0.5 * in.betas(r)) * contract_hessian_quadratic<double>(in.g2, u);
    }
    benchmark::DoNotOptimize(block.data());
  }
  const double flops = double(sqrt_term_flops(std::uint64_t(n), std::uint64_t(n), std::uint64_t(rank)));
  state.counters["flops"] = flops;
  state.counters["flop_rate"] = benchmark::Counter(flops, benchmark::Counter::kIsIterationInvariantRate);
}

// The Isserlis fourth-moment contraction of the full-covariance map, with m = n.
void BM_DenseTerm(benchmark::State& state) {
  const Index n = state.range(0);
  const Inputs in = make_inputs(n, n, 1);
  const Matrix<double> p = in.root * in.root.transpose();
  Matrix<double> cov(n, n);
  for (auto _ : state) {
    const Tensor4<double> moment = isserlis_moment<double>(p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        double acc = 0.0;
        for (Index k = 0; k < n; ++k)
          for (Index l = 0; l < n; ++l)
            for (Index a = 0; a < n; ++a)
              for (Index b = 0; b < n; ++b) acc += in.g2(i, k, l) * in.g2(j, a, b) * moment(k, l, a, b);
        cov(i, j) = 0.25 * acc;
      }
    benchmark::DoNotOptimize(cov.data());
  }
  const double flops = double(dense_term_flops(std::uint64_t(n), std::uint64_t(n)));
  state.counters["flops"] = flops;
  state.counters["flop_rate"] = benchmark::Counter(flops, benchmark::Counter::kIsIterationInvariantRate);
}

// End-to-end maps on an exact CPD.
void BM_SecondOrderSqrtMap(benchmark::State& state) {
  const Index n = state.range(0);
  const Inputs in = make_inputs(n, n, 1);
  const SecondOrderModel<double> model(Vector<double>::Zero(n), in.root, in.g2);
  const CpdFactors cpd = cpd_analytic(n);
  const NoiseSqrt<double> noise = NoiseSqrt<double>::none(n);
  for (auto _ : state) {
    auto out = map_second_order_sqrt<double>({Vector<double>::Zero(n), in.root}, model, noise, cpd);
    benchmark::DoNotOptimize(out.chol.matrix().data());
  }
}

void BM_SecondOrderFullMap(benchmark::State& state) {
  const Index n = state.range(0);
  const Inputs in = make_inputs(n, n, 1);
  const SecondOrderModel<double> model(Vector<double>::Zero(n), in.root, in.g2);
  const Matrix<double> p = in.root * in.root.transpose();
  const NoiseCov<double> noise = NoiseCov<double>::none(n);
  for (auto _ : state) {
    auto out = map_second_order_full<double>({Vector<double>::Zero(n), p}, model, noise);
    auto chol = cholesky<double>(out.cov);
    benchmark::DoNotOptimize(chol.matrix().data());
  }
}

}  // namespace

BENCHMARK(BM_SqrtTerm)->DenseRange(2, 12);
BENCHMARK(BM_DenseTerm)->DenseRange(2, 12);
BENCHMARK(BM_SecondOrderSqrtMap)->DenseRange(1, 3);
BENCHMARK(BM_SecondOrderFullMap)->DenseRange(1, 3);
BENCHMARK_MAIN();
