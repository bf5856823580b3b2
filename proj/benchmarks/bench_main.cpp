#include <benchmark/benchmark.h>

#include <random>

#include "gndirac/functionals.hpp"
#include "gndirac/solver.hpp"

using namespace gndirac;

namespace {

std::vector<double> random_profile(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> f(n);
    for (auto& v : f) v = U(g);
    return f;
}

std::vector<double> grid(std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = double(i) / double(n - 1);
    return xs;
}

// exact cell-pair sum, the O(N^2) reference the suffix sum replaces
double ordered_pairs_quadratic(const std::vector<double>& xs, const std::vector<double>& f,
                               const std::vector<double>& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        double w = xs[i + 1] - xs[i];
        acc += w * w * (f[i] * g[i] / 8.0 + f[i + 1] * g[i] / 24.0 + 5.0 * f[i] * g[i + 1] / 24.0 +
                        f[i + 1] * g[i + 1] / 8.0);
        double fi = 0.5 * w * (f[i] + f[i + 1]);
        for (std::size_t j = i + 1; j + 1 < xs.size(); ++j)
            acc += fi * 0.5 * (xs[j + 1] - xs[j]) * (g[j] + g[j + 1]);
    }
    return acc;
}

void BM_Q0_suffix_sum(benchmark::State& st) {
    std::size_t n = static_cast<std::size_t>(st.range(0));
    auto xs = grid(n);
    auto f = random_profile(n, 1), g = random_profile(n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(ordered_pair_integral(xs, f, g));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Q0_suffix_sum)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_Q0_pairwise(benchmark::State& st) {
    std::size_t n = static_cast<std::size_t>(st.range(0));
    auto xs = grid(n);
    auto f = random_profile(n, 1), g = random_profile(n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(ordered_pairs_quadratic(xs, f, g));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Q0_pairwise)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_step(benchmark::State& st) {
    const double h = 1.0 / static_cast<double>(st.range(0));
    SolverConfig c;
    c.params = NonlinearityParams::gross_neveu(1.0);
    c.curve = BoundaryCurve::collapsing(4.0, 1.0).with_equality_lambda();
    c.grid = make_window(2.5, h, 1.0, c.curve.z(1.0));
    InitialData d = make_initial_data(Profile::bump(1.0, 1.0, 0.6), Profile::bump(1.0, 1.5, 0.6));
    SpinorField s = sample_initial_data(d.u, d.v, c.grid);
    for (auto _ : st) benchmark::DoNotOptimize(step(s, c));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * s.size()));
}
BENCHMARK(BM_step)->Arg(128)->Arg(512)->Arg(1024);

void BM_run_gn(benchmark::State& st) {
    SolverConfig c;
    c.params = NonlinearityParams::gross_neveu(1.0);
    c.grid = make_window(2.5, 1.0 / 128, 2.0, 0.0);
    c.snapshot_stride = 0;
    InitialData d = make_initial_data(Profile::bump(1.0, 1.0, 0.6), Profile::bump(1.0, 1.5, 0.6));
    for (auto _ : st) benchmark::DoNotOptimize(run(c, d));
}
BENCHMARK(BM_run_gn)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
