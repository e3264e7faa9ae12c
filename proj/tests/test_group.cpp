#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <soficlab/group.hpp>
#include <soficlab/rng.hpp>

using namespace sofic;

TEST_CASE("cyclic model is an exact homomorphism") {
    auto sigma = SoficApprox::cyclic(10);
    CHECK(sigma.image(GroupElement::integer(0)) == identity_permutation(10));
    CHECK(hom_defect(sigma, GroupElement::integer(3), GroupElement::integer(4)) == 0.0);
    CHECK(hom_defect(sigma, GroupElement::integer(0), GroupElement::integer(7)) == 0.0);
    CHECK(hom_defect(sigma, GroupElement::integer(-5), GroupElement::integer(12)) == 0.0);
}

TEST_CASE("cyclic fixed points: free below the period, full at the period") {
    auto sigma = SoficApprox::cyclic(10);
    CHECK(fix_defect(sigma, GroupElement::integer(1)) == 0.0);
    CHECK(fix_defect(sigma, GroupElement::integer(9)) == 0.0);
    CHECK(fix_defect(sigma, GroupElement::integer(10)) == 1.0);
    CHECK(fix_defect(sigma, GroupElement::integer(-10)) == 1.0);
    CHECK_THROWS_AS(fix_defect(sigma, GroupElement::integer(0)), std::invalid_argument);
}

TEST_CASE("torus rotations") {
    auto sigma = SoficApprox::torus({2, 2});
    // One step in each axis is the double swap: order 2 and fixed-point free.
    Permutation p = sigma.image(GroupElement::vec({1, 1}));
    for (std::int32_t j = 0; j < 4; ++j) CHECK(p[j] != j);
    Permutation p2(4);
    for (std::int32_t j = 0; j < 4; ++j) p2[j] = p[p[j]];
    CHECK(p2 == identity_permutation(4));

    for (std::int64_t a = 0; a < 2; ++a)
        for (std::int64_t b = 0; b < 2; ++b)
            CHECK(hom_defect(sigma, GroupElement::vec({a, b}), GroupElement::vec({1 - a, b})) == 0.0);

    auto big = SoficApprox::torus({4, 6});
    CHECK(fix_defect(big, GroupElement::vec({2, 3})) == 0.0);
    CHECK(fix_defect(big, GroupElement::vec({4, 0})) == 1.0);
    CHECK(fix_defect(big, GroupElement::vec({4, 6})) == 1.0);
}

TEST_CASE("random free models extend multiplicatively") {
    auto sigma = SoficApprox::random_free(2, 50, 7);
    GroupElement w1 = GroupElement::word({1, 2, -1});
    GroupElement w2 = GroupElement::word({1, 1, 2});
    CHECK(hom_defect(sigma, w1, w2) == 0.0);
    CHECK(hom_defect(sigma, w2, w1) == 0.0);
    // x x^-1: inverse permutation convention.
    CHECK(hom_defect(sigma, GroupElement::word({1}), GroupElement::word({-1})) == 0.0);

    // Determinism per (k, d, seed).
    auto again = SoficApprox::random_free(2, 50, 7);
    CHECK(sigma.generator_perms() == again.generator_perms());
    auto other = SoficApprox::random_free(2, 50, 8);
    CHECK(sigma.generator_perms() != other.generator_perms());
}

TEST_CASE("free model fixed points are rare, S_1 degenerate") {
    // d = 1: everything is the identity.
    auto tiny = SoficApprox::random_free(3, 1, 0);
    CHECK(fix_defect(tiny, GroupElement::word({1})) == 1.0);

    // Expected fixed points of a uniform permutation is 1, so the average
    // fraction over many seeds is close to 1/d.
    const std::int64_t d = 1000;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        total += fix_defect(SoficApprox::random_free(1, d, seed), GroupElement::word({1}));
    double mean = total / 100.0;
    // Var of the fixed-point count is 1; 100 seeds give SE 0.1 counts.
    CHECK(mean == doctest::Approx(1.0 / d).epsilon(0.5));
}

TEST_CASE("inverse images are inverse permutations") {
    auto check_inverses = [](const SoficApprox& sigma, const GroupElement& g) {
        Permutation p = sigma.image(g);
        Permutation q = sigma.image(sigma.group().inv(g));
        CHECK(q == inverse_permutation(p));
    };
    check_inverses(SoficApprox::cyclic(12), GroupElement::integer(5));
    check_inverses(SoficApprox::torus({3, 4}), GroupElement::vec({2, 3}));
    check_inverses(SoficApprox::random_free(2, 40, 3), GroupElement::word({1, -2, 1}));
}

TEST_CASE("conjugated models stay exact homomorphisms with equal defect structure") {
    auto sigma = SoficApprox::cyclic(9);
    Rng rng(11);
    Permutation p = random_permutation(9, rng);
    auto conj = sigma.conjugated(p);
    CHECK(hom_defect(conj, GroupElement::integer(4), GroupElement::integer(7)) == 0.0);
    CHECK(fix_defect(conj, GroupElement::integer(9)) == 1.0);
    CHECK(fix_defect(conj, GroupElement::integer(2)) == fix_defect(sigma, GroupElement::integer(2)));
}

TEST_CASE("free group word arithmetic") {
    Group f2 = Group::free_group(2);
    GroupElement w = GroupElement::word({1, 2, -2, -1, 2});
    CHECK(w.data == std::vector<std::int64_t>{2});
    CHECK(f2.is_identity(f2.mul(w, f2.inv(w))));
    CHECK_THROWS_AS(f2.validate(GroupElement::vec({1, 2, 3})), GroupMismatch);
    Group z2 = Group::lattice(2);
    CHECK_THROWS_AS(z2.validate(GroupElement::integer(1)), GroupMismatch);
}

TEST_CASE("regular models of finite abelian groups") {
    auto sigma = SoficApprox::regular_abelian({3, 4});
    CHECK(sigma.size() == 12);
    CHECK(hom_defect(sigma, GroupElement::vec({2, 3}), GroupElement::vec({2, 2})) == 0.0);
    CHECK(fix_defect(sigma, GroupElement::vec({1, 2})) == 0.0);
}
