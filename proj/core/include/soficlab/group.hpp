// Supported groups (Z, Z^k, finite abelian products, free groups F_k) and
// permutation models of them: a model stores one permutation of {1..d} per
// generator and extends multiplicatively, so evaluation is an exact
// homomorphism and only the freeness axiom is asymptotic in d.
//
// Indices are 0-based in code and in serialized arrays; the mathematical
// convention {1..d} appears only in documentation.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sofic {

class GroupMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class GroupKind { Integers, Lattice, FiniteAbelian, Free };

// Element payload:
//   Integers      -- one entry n
//   Lattice       -- k entries
//   FiniteAbelian -- k residues (reduced mod the group's moduli)
//   Free          -- reduced word; letter +i / -i is generator i (1-based) / its inverse
struct GroupElement {
    std::vector<std::int64_t> data;

    static GroupElement integer(std::int64_t n) { return {{n}}; }
    static GroupElement vec(std::vector<std::int64_t> v) { return {std::move(v)}; }
    // Reduces the word (cancels adjacent x x^-1).
    static GroupElement word(const std::vector<std::int64_t>& letters);

    bool operator==(const GroupElement&) const = default;
    bool operator<(const GroupElement& o) const { return data < o.data; }
};

class Group {
public:
    static Group integers();
    static Group lattice(int k);
    static Group finite_abelian(std::vector<std::int64_t> moduli);
    static Group free_group(int rank);

    GroupKind kind() const { return kind_; }
    int rank() const { return rank_; }
    const std::vector<std::int64_t>& moduli() const { return moduli_; }

    GroupElement identity() const;
    GroupElement mul(const GroupElement& a, const GroupElement& b) const;
    GroupElement inv(const GroupElement& a) const;
    bool is_identity(const GroupElement& a) const;
    // Throws GroupMismatch when the payload does not fit this group.
    void validate(const GroupElement& a) const;
    GroupElement normalized(const GroupElement& a) const;

    std::string name() const;
    bool operator==(const Group&) const = default;

private:
    GroupKind kind_ = GroupKind::Integers;
    int rank_ = 1;
    std::vector<std::int64_t> moduli_;
};

// A permutation of {0..d-1}: perm[j] = image of j.
using Permutation = std::vector<std::int32_t>;

Permutation identity_permutation(std::int64_t d);
Permutation inverse_permutation(const Permutation& p);
bool is_permutation(const Permutation& p);

class SoficApprox {
public:
    // Trivial model of Z at d = 1.
    SoficApprox() : SoficApprox(cyclic(1)) {}

    static SoficApprox cyclic(std::int64_t d);
    static SoficApprox torus(const std::vector<std::int64_t>& dims);
    static SoficApprox regular_abelian(const std::vector<std::int64_t>& moduli);
    static SoficApprox random_free(int rank, std::int64_t d, std::uint64_t seed);

    std::int64_t size() const { return d_; }
    const Group& group() const { return group_; }

    // sigma(g), extended multiplicatively from the generator assignments.
    Permutation image(const GroupElement& g) const;

    // Model with every generator conjugated by p (hence sigma conjugated by p).
    SoficApprox conjugated(const Permutation& p) const;

    const std::vector<Permutation>& generator_perms() const { return gen_perms_; }
    const std::string& extension_rule() const { return extension_rule_; }

private:
    SoficApprox(Group g, std::int64_t d, std::vector<Permutation> gens);

    Group group_;
    std::int64_t d_ = 1;
    std::vector<Permutation> gen_perms_;  // one per generator
    std::string extension_rule_ = "multiplicative";
    // Abelian kinds evaluate by coordinate rotation instead of composing
    // generator powers; the two agree, rotation is O(d).
    bool rotational_ = false;
    std::vector<std::int64_t> dims_;
};

// u_d of { j : sigma(g)sigma(h)(j) != sigma(gh)(j) }.
double hom_defect(const SoficApprox& sigma, const GroupElement& g, const GroupElement& h);

// u_d of { j : sigma(g)(j) == j }; rejects g == e.
double fix_defect(const SoficApprox& sigma, const GroupElement& g);

} // namespace sofic
