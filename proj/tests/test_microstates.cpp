#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <soficlab/microstates.hpp>
#include <soficlab/parallel.hpp>
#include <soficlab/rng.hpp>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace sofic;

namespace {

ShiftSystem fair_bit() {
    return ShiftSystem::iid(Group::integers(), Alphabet::numeric(2),
                            {Rational(1, 2), Rational(1, 2)});
}

GroupElement z(std::int64_t n) { return GroupElement::integer(n); }

APQuery bit_query(std::int64_t d, std::vector<GroupElement> F, Rational delta) {
    auto sys = fair_bit();
    return APQuery::make(sys, Observable::coordinate(sys), std::move(F), delta,
                         SoficApprox::cyclic(d));
}

} // namespace

TEST_CASE("empirical law: constant and alternating labelings") {
    auto sigma = SoficApprox::cyclic(4);
    Microstate constant = Microstate::constant(2, 4, 1);
    auto point = empirical_F_law(constant, sigma, {z(0), z(1)});
    REQUIRE(point.entries.size() == 1);
    CHECK(*point.entries.begin()->second.exact == Rational(1));

    // F = {e}: the letter histogram.
    Microstate phi{2, {0, 0, 1, 0}};
    auto hist = empirical_F_law(phi, sigma, {z(0)});
    CHECK(*hist.entries.at({0}).exact == Rational(3, 4));
    CHECK(*hist.entries.at({1}).exact == Rational(1, 4));

    // Alternating labeling, F = {0, 1}: uniform on (0,1) and (1,0).
    Microstate alt{2, {0, 1, 0, 1}};
    auto law = empirical_F_law(alt, sigma, {z(0), z(1)});
    REQUIRE(law.entries.size() == 2);
    CHECK(*law.entries.at({0, 1}).exact == Rational(1, 2));
    CHECK(*law.entries.at({1, 0}).exact == Rational(1, 2));
}

TEST_CASE("empirical law under a random free model matches manual composition") {
    const std::int64_t d = 30;
    auto sigma = SoficApprox::random_free(2, d, 17);
    Rng rng(4);
    Microstate phi;
    phi.alphabet_size = 2;
    phi.values.resize(d);
    for (auto& v : phi.values) v = static_cast<std::uint8_t>(rng.below(2));

    std::vector<GroupElement> F = {sigma.group().identity(), GroupElement::word({1}),
                                   GroupElement::word({-2, 1})};
    auto law = empirical_F_law(phi, sigma, F);

    // Manual tally through explicitly composed permutations.
    std::map<std::vector<std::uint8_t>, int> tally;
    std::vector<Permutation> inv;
    for (const auto& g : F) inv.push_back(inverse_permutation(sigma.image(g)));
    for (std::int64_t j = 0; j < d; ++j) {
        std::vector<std::uint8_t> pat;
        for (const auto& m : inv) pat.push_back(phi.values[m[j]]);
        ++tally[pat];
    }
    CHECK(law.entries.size() == tally.size());
    for (const auto& [pat, count] : tally)
        CHECK(*law.entries.at(pat).exact == Rational(count, d));
}

TEST_CASE("membership distances") {
    auto q = bit_query(4, {z(0)}, Rational(2));
    // Everything is within the diameter bound.
    Microstate any{2, {0, 0, 0, 1}};
    auto m = ap_member(any, q);
    CHECK(m.member);
    CHECK(m.distance_exact == Rational(1, 2));  // |3/4-1/2| + |1/4-1/2|

    // A labeling matching the target law exactly.
    Microstate balanced{2, {0, 1, 0, 1}};
    auto q_small = bit_query(4, {z(0)}, Rational(1, 1000000));
    auto mb = ap_member(balanced, q_small);
    CHECK(mb.member);
    CHECK(mb.distance_exact == Rational(0));
}

TEST_CASE("count: diameter delta counts everything, empty ball counts nothing") {
    auto q = bit_query(6, {z(0), z(1)}, Rational(2));
    CHECK(ap_count_exact(q) == 64);

    // d = 5 cannot realize the half/half histogram, so a tiny ball is empty.
    auto impossible = bit_query(5, {z(0)}, Rational(1, 1000000));
    CHECK(ap_count_exact(impossible) == 0);
}

TEST_CASE("count agrees with the raw brute force on the bit system") {
    auto q = bit_query(6, {z(0), z(1)}, Rational(1, 2));
    oracle::Instance raw;
    raw.d = 6;
    raw.base_size = 2;
    raw.base_probs = {Rational(1, 2), Rational(1, 2)};
    raw.window = {0};
    raw.table = {0, 1};
    raw.codomain = 2;
    raw.F = {0, 1};
    raw.delta = Rational(1, 2);
    CHECK(ap_count_exact(q) == oracle::ap_count(raw));
}

TEST_CASE("monotonicity in delta and F on random instances") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto inst = testing_support::make_random_instance(seed);
        const auto& q = inst.gamma_query;
        std::uint64_t base = ap_count_exact(q);

        APQuery wider = q;
        wider.delta = q.delta + Rational(1, 4);
        CHECK(ap_count_exact(wider) >= base);

        if (q.F.size() > 1) {
            APQuery smaller_f = q;
            std::vector<GroupElement> F0 = {q.F[0]};
            smaller_f.F = F0;
            smaller_f.target = law(inst.sys, inst.gamma, F0);
            CHECK(ap_count_exact(smaller_f) >= base);
        }
    }
}

TEST_CASE("permutation equivariance: conjugated models have equal counts") {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        auto inst = testing_support::make_random_instance(seed);
        Rng rng(seed * 977 + 5);
        Permutation p = random_permutation(static_cast<std::size_t>(inst.gamma_query.sigma.size()), rng);
        APQuery conj = inst.gamma_query;
        conj.sigma = inst.gamma_query.sigma.conjugated(p);
        CHECK(ap_count_exact(conj) == ap_count_exact(inst.gamma_query));
    }
}

TEST_CASE("thread count does not change results") {
    auto inst = testing_support::make_random_instance(42);
    set_max_threads(1);
    std::uint64_t ones = ap_count_exact(inst.gamma_query);
    auto est1 = ap_sample_estimate(inst.gamma_query, 20000, 99);
    set_max_threads(4);
    std::uint64_t fours = ap_count_exact(inst.gamma_query);
    auto est4 = ap_sample_estimate(inst.gamma_query, 20000, 99);
    set_max_threads(0);
    CHECK(ones == fours);
    CHECK(est1.members == est4.members);
    CHECK(est1.estimate == est4.estimate);
}

TEST_CASE("sampling: degenerate cases and coverage") {
    auto q_all = bit_query(6, {z(0), z(1)}, Rational(2));
    auto est = ap_sample_estimate(q_all, 5000, 1);
    CHECK(est.all_members);
    CHECK(est.estimate == 64.0);
    CHECK(est.ci_low == est.ci_high);

    auto q_none = bit_query(5, {z(0)}, Rational(1, 1000000));
    auto none = ap_sample_estimate(q_none, 5000, 1);
    CHECK(none.none_member);
    CHECK(none.estimate == 0.0);
    CHECK(none.ci_high > 0.0);

    // CI covers the exact count on a nondegenerate query.
    auto q = bit_query(6, {z(0), z(1)}, Rational(1, 2));
    double exact = static_cast<double>(ap_count_exact(q));
    auto mid = ap_sample_estimate(q, 50000, 7);
    CHECK(mid.ci_low <= exact);
    CHECK(exact <= mid.ci_high);
}

TEST_CASE("sampling is unbiased across seeds") {
    auto q = bit_query(6, {z(0), z(1)}, Rational(1, 2));
    double exact = static_cast<double>(ap_count_exact(q));
    const int runs = 100;
    const std::uint64_t n = 2000;
    double mean = 0.0;
    std::vector<double> estimates;
    for (int s = 0; s < runs; ++s) {
        estimates.push_back(ap_sample_estimate(q, n, 1000 + s).estimate);
        mean += estimates.back();
    }
    mean /= runs;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= (runs - 1);
    double se = std::sqrt(var / runs);
    CHECK(std::fabs(mean - exact) <= 3.0 * se + 1e-9);
}

TEST_CASE("relative counts against the oracle on random instances") {
    for (std::uint64_t seed = 20; seed < 26; ++seed) {
        auto inst = testing_support::make_random_instance(seed);
        auto data = oracle::rel_data(inst.raw, inst.rho_alpha.map, inst.rho_beta.map);
        auto sup = rel_ap_sup(inst.gamma_query, inst.rho_alpha, inst.rho_beta);
        if (data.fibers.empty()) {
            CHECK(!sup.has_value());
            continue;
        }
        REQUIRE(sup.has_value());
        CHECK(sup->sup == data.sup);
        CHECK(sup->base_count == data.fibers.size());
        for (const auto& [psi, projections] : data.fibers) {
            Microstate m{inst.beta_size, psi};
            CHECK(rel_ap_count(inst.gamma_query, inst.rho_alpha, inst.rho_beta, m) ==
                  projections.size());
        }
        // A psi outside the base space has an empty fiber.
        Microstate stranger{inst.beta_size,
                            std::vector<std::uint8_t>(static_cast<std::size_t>(inst.raw.d), 0)};
        if (!data.fibers.count(stranger.values))
            CHECK(rel_ap_count(inst.gamma_query, inst.rho_alpha, inst.rho_beta, stranger) == 0);
    }
}

TEST_CASE("self-fiber: identity projections give sup 1") {
    auto sys = fair_bit();
    auto alpha = Observable::coordinate(sys);
    auto q = APQuery::make(sys, alpha, {z(0), z(1)}, Rational(1, 2), SoficApprox::cyclic(6));
    Refinement id{{0, 1}};
    auto sup = rel_ap_sup(q, id, id);
    REQUIRE(sup.has_value());
    CHECK(sup->sup == 1);
    CHECK(sup->base_count == ap_count_exact(q));
}

TEST_CASE("constant projection collapses fibers to one point") {
    auto inst = testing_support::make_random_instance(33);
    Refinement constant{std::vector<std::uint8_t>(inst.gamma_query.codomain_size, 0)};
    auto sup = rel_ap_sup(inst.gamma_query, constant, inst.rho_beta);
    if (sup) CHECK(sup->sup == 1);
}

TEST_CASE("budget violations raise") {
    auto q = bit_query(20, {z(0)}, Rational(2));
    q.budget = 1000;
    CHECK_THROWS_AS(ap_count_exact(q), BudgetExceeded);
}
