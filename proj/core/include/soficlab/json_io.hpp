// JSON descriptors for groups, permutation models, systems, observables, and
// group-ring elements. String-level API so the core's public headers stay
// free of the vendored json implementation.
//
// Probabilities are JSON numbers (read as decimals with nine digits) or
// strings "num/den". Group elements are integers (Z), integer arrays
// (Z^k, finite abelian residues), or reduced words as arrays of signed
// generator indices (F_k). Permutations serialize as 0-based arrays.

#pragma once

#include <string>

#include "soficlab/group.hpp"
#include "soficlab/group_ring.hpp"
#include "soficlab/permutation_lab.hpp"
#include "soficlab/systems.hpp"

namespace sofic {

class JsonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {"group": "Z" | "Z^k" | "F_k" | "Z/m", "k": ..., "moduli": [...]}
Group parse_group(const std::string& json);

// {"model": "cyclic"|"torus"|"regular"|"free_random", "d": ..., "dims": [...],
//  "moduli": [...], "k": ..., "seed": ...}
SoficApprox parse_sofic_approx(const std::string& json);
std::string sofic_approx_json(const SoficApprox& sigma);

// {"group": ..., "alphabet": ["0","1"],
//  "law": {"iid": [...]} | {"markov": {"P": [[...]], "pi": [...]?}}}
ShiftSystem parse_system(const std::string& json);

// {"window": [elements], "codomain": ["a","b"], "table": {"b0,b1": "a", ...}}
Observable parse_observable(const std::string& json, const ShiftSystem& sys);

// Slot elements for F lists etc.: an array of group elements.
std::vector<GroupElement> parse_element_list(const std::string& json, const Group& g);

// {"group": ..., "n": ..., "entries": [{"l":..., "s":..., "support":
//   [{"x": int|[ints], "c": int}, ...]}, ...]}
GroupRingElement parse_group_ring(const std::string& json);

std::string conjugation_report_json(const ConjugationReport& report);

// Canonical dump (sorted keys, no whitespace) used for config hashing.
std::string canonical_json(const std::string& json);
std::uint64_t fnv1a64(const std::string& data);

} // namespace sofic
