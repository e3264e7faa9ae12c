#include <benchmark/benchmark.h>

#include <soficlab/entropy.hpp>
#include <soficlab/microstates.hpp>
#include <soficlab/parallel.hpp>

using namespace sofic;

namespace {

APQuery bit_query(std::int64_t d, Rational delta) {
    auto sys = ShiftSystem::iid(Group::integers(), Alphabet::numeric(2),
                                {Rational(1, 2), Rational(1, 2)});
    return APQuery::make(sys, Observable::coordinate(sys),
                         {GroupElement::integer(-1), GroupElement::integer(0),
                          GroupElement::integer(1)},
                         delta, SoficApprox::cyclic(d));
}

void BM_ap_count_exact(benchmark::State& state) {
    set_max_threads(1);
    auto q = bit_query(state.range(0), Rational(1, 4));
    for (auto _ : state) benchmark::DoNotOptimize(ap_count_exact(q));
}
BENCHMARK(BM_ap_count_exact)->Arg(12)->Arg(16)->Arg(20);

void BM_ap_sample_estimate(benchmark::State& state) {
    set_max_threads(1);
    auto q = bit_query(64, Rational(1, 4));
    for (auto _ : state)
        benchmark::DoNotOptimize(ap_sample_estimate(q, static_cast<std::uint64_t>(state.range(0)), 7));
}
BENCHMARK(BM_ap_sample_estimate)->Arg(1000)->Arg(10000);

void BM_xi_count(benchmark::State& state) {
    JointLaw j;
    j.p = {{Rational(4, 10), Rational(1, 10)}, {Rational(2, 10), Rational(3, 10)}};
    std::int64_t n = state.range(0);
    TypeVector psi{{(n * 3) / 5, n - (n * 3) / 5}};
    for (auto _ : state) benchmark::DoNotOptimize(xi_count(j, Rational(1, 20), n, psi));
}
BENCHMARK(BM_xi_count)->Arg(128)->Arg(512);

void BM_law_exact(benchmark::State& state) {
    auto sys = ShiftSystem::markov(Alphabet::numeric(2), {{Rational(9, 10), Rational(1, 10)},
                                                          {Rational(2, 10), Rational(8, 10)}});
    auto alpha = Observable::coordinate(sys);
    std::vector<GroupElement> F;
    for (std::int64_t h = 0; h < state.range(0); ++h) F.push_back(GroupElement::integer(h));
    for (auto _ : state) benchmark::DoNotOptimize(law(sys, alpha, F));
}
BENCHMARK(BM_law_exact)->Arg(6)->Arg(10);

} // namespace

BENCHMARK_MAIN();
