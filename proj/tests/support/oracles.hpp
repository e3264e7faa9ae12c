// From-scratch oracles for the counting operations. Everything here works on
// raw data (letters, offsets, tables, rotation formulas) and reimplements the
// definitions directly: no calls into the library's enumeration, law, or
// membership code. Exact rational arithmetic throughout.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <soficlab/bigint.hpp>
#include <soficlab/rational.hpp>

namespace oracle {

// A shift system over Z with an iid base, one local observable, a cyclic
// model of size d, and an AP query (F, delta).
struct Instance {
    std::int64_t d = 0;
    std::size_t base_size = 0;
    std::vector<sofic::Rational> base_probs;
    std::vector<std::int64_t> window;       // offsets
    std::vector<std::uint8_t> table;        // B^window -> codomain, window[0] fastest
    std::size_t codomain = 0;
    std::vector<std::int64_t> F;            // slots (contains 0)
    sofic::Rational delta;
};

using Pattern = std::vector<std::uint8_t>;
using Law = std::map<Pattern, sofic::Rational>;

// (alpha^F)_* mu by exhaustive summation of the base product measure over the
// coordinates read by the F-translates of the window.
Law target_law(const Instance& inst);

// The empirical F-law of a labeling under the cyclic rotation model.
Law empirical_law(const Instance& inst, const std::vector<std::uint8_t>& phi);

sofic::Rational l1(const Law& a, const Law& b);

bool member(const Instance& inst, const std::vector<std::uint8_t>& phi, const Law& target);

// |AP| by enumerating every labeling in codomain^d.
std::uint64_t ap_count(const Instance& inst);

struct RelData {
    // psi -> set of distinct alpha-projections of member fibers.
    std::map<std::vector<std::uint8_t>, std::set<std::vector<std::uint8_t>>> fibers;
    std::uint64_t sup = 0;
    std::vector<std::uint8_t> argmax;
};

// Full relative data for a gamma instance and two letter maps.
RelData rel_data(const Instance& gamma_inst, const std::vector<std::uint8_t>& rho_A,
                 const std::vector<std::uint8_t>& rho_B);

// |Xi(alpha | psi, delta, n)| by enumerating A^n against a concrete psi.
sofic::BigUint xi_brute(const std::vector<std::vector<sofic::Rational>>& joint,
                        const sofic::Rational& delta, std::int64_t n,
                        const std::vector<std::uint8_t>& psi);

// |Xi(alpha v beta, delta, n)| by enumerating joint types.
sofic::BigUint xi_joint_total(const std::vector<std::vector<sofic::Rational>>& joint,
                              const sofic::Rational& delta, std::int64_t n);

} // namespace oracle
