#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <soficlab/json_io.hpp>

using namespace sofic;

TEST_CASE("group descriptors") {
    CHECK(parse_group(R"({"group":"Z"})").kind() == GroupKind::Integers);
    CHECK(parse_group(R"({"group":"Z^k","k":3})").rank() == 3);
    CHECK(parse_group(R"({"group":"F_k","k":2})").kind() == GroupKind::Free);
    auto fin = parse_group(R"({"group":"Z/m","moduli":[4,6]})");
    CHECK(fin.moduli() == std::vector<std::int64_t>{4, 6});
    CHECK_THROWS_AS(parse_group(R"({"group":"E8"})"), JsonError);
    CHECK_THROWS_AS(parse_group("not json"), JsonError);
}

TEST_CASE("model descriptors round-trip the generator permutations") {
    auto sigma = parse_sofic_approx(R"({"model":"cyclic","d":5})");
    CHECK(sigma.size() == 5);
    // Group-style descriptors pick the standard model.
    auto by_group = parse_sofic_approx(R"({"group":"Z","d":5})");
    CHECK(by_group.generator_perms() == sigma.generator_perms());
    CHECK(parse_sofic_approx(R"({"group":"F_k","k":2,"d":9,"seed":4})").size() == 9);
    CHECK(parse_sofic_approx(R"({"group":"Z/m","moduli":[3,5]})").size() == 15);
    auto text = sofic_approx_json(sigma);
    // 0-based arrays: the rotation sends 0 to 1.
    CHECK(text.find("[1,2,3,4,0]") != std::string::npos);
    auto free = parse_sofic_approx(R"({"model":"free_random","k":2,"d":6,"seed":1})");
    CHECK(free.generator_perms().size() == 2);
    auto again = parse_sofic_approx(R"({"model":"free_random","k":2,"d":6,"seed":1})");
    CHECK(sofic_approx_json(free) == sofic_approx_json(again));
}

TEST_CASE("system and observable descriptors") {
    auto sys = parse_system(R"({
        "group": "Z",
        "alphabet": ["a", "b"],
        "law": {"iid": [0.5, "1/2"]}
    })");
    CHECK(sys.alphabet().letters[0] == "a");
    CHECK(sys.iid_probs()[1] == Rational(1, 2));

    auto obs = parse_observable(R"({
        "window": [0, 1],
        "codomain": ["same", "diff"],
        "table": {"a,a": "same", "b,b": "same", "a,b": "diff", "b,a": "diff"}
    })",
                                sys);
    CHECK(obs.window.size() == 2);
    CHECK(obs.eval({0, 0}) == 0);
    CHECK(obs.eval({0, 1}) == 1);

    CHECK_THROWS_AS(parse_observable(R"({
        "window": [0],
        "codomain": ["x", "y"],
        "table": {"a": "x"}
    })",
                                     sys),
                    JsonError);

    auto markov = parse_system(R"({
        "group": "Z",
        "alphabet": ["0", "1"],
        "law": {"markov": {"P": [["9/10", "1/10"], ["2/10", "8/10"]]}}
    })");
    CHECK(markov.letter_law()[0] == Rational(2, 3));
}

TEST_CASE("ring descriptors") {
    auto f = parse_group_ring(R"({
        "group": {"group": "Z"},
        "n": 1,
        "entries": [{"l": 0, "s": 0, "support": [{"x": 0, "c": 5}, {"x": 1, "c": -1}]}]
    })");
    CHECK(l1_condition(f).dominant);
}

TEST_CASE("canonical json and hashing are stable") {
    auto a = canonical_json(R"({"b": 1, "a": [1, 2]})");
    auto b = canonical_json(R"({ "a":[1,2],"b": 1 })");
    CHECK(a == b);
    CHECK(fnv1a64(a) == fnv1a64(b));
    CHECK(fnv1a64(a) != fnv1a64(a + " "));
}
