// Shift systems B^G with exactly computable base laws (iid over any supported
// group, stationary Markov over Z), local observables with finite windows,
// refinements between observables, and empirical/pushforward laws over
// pattern spaces A^F.
//
// Conventions. The shift acts so that the F-readout of a configuration x is
//   (alpha^F x)(h) = alpha(h^{-1} x),
// which for the coordinate observable over Z reads x(-h) at slot h. Window
// coordinates of translated observables transform as w -> w * g^{-1}.
// Laws are computed in exact rational arithmetic (mode Exact) or in doubles;
// pattern spaces index by position in the ordered slot list F.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/rational.hpp"

namespace sofic {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Alphabet {
    std::vector<std::string> letters;

    std::size_t size() const { return letters.size(); }
    static Alphabet numeric(std::size_t n);
    bool operator==(const Alphabet&) const = default;
};

class ShiftSystem {
public:
    // iid base law over the alphabet; probabilities are renormalized to sum to 1.
    static ShiftSystem iid(Group g, Alphabet b, std::vector<Rational> probs);
    // Stationary Markov chain over Z; pi is computed exactly from P.
    static ShiftSystem markov(Alphabet b, std::vector<std::vector<Rational>> P);
    // As above with a caller-supplied initial vector, checked stationary within 1e-10.
    static ShiftSystem markov(Alphabet b, std::vector<std::vector<Rational>> P,
                              std::vector<Rational> pi);

    const Group& group() const { return group_; }
    const Alphabet& alphabet() const { return alphabet_; }
    bool is_markov() const { return markov_; }
    const std::vector<Rational>& iid_probs() const { return single_; }
    // Single-letter marginal: iid probabilities, or the stationary vector.
    const std::vector<Rational>& letter_law() const { return single_; }
    const std::vector<std::vector<Rational>>& transition() const { return P_; }

    static std::vector<Rational> stationary_vector(const std::vector<std::vector<Rational>>& P);

private:
    ShiftSystem() = default;
    Group group_ = Group::integers();
    Alphabet alphabet_;
    bool markov_ = false;
    std::vector<Rational> single_;            // iid law or stationary vector
    std::vector<std::vector<Rational>> P_;    // Markov transitions
};

// A local function of a configuration: letters of B on the window determine
// a letter of the codomain via a total table.
struct Observable {
    Alphabet codomain;
    std::vector<GroupElement> window;   // ordered, distinct
    std::size_t base_size = 0;          // |B| of the system it reads
    // Mixed-radix table over B^window, window[0] fastest.
    std::vector<std::uint8_t> table;
    bool allow_unreachable = false;

    std::size_t table_size() const { return table.size(); }
    std::uint8_t eval(const std::vector<std::uint8_t>& window_pattern) const;

    // Identity-style observable reading the single coordinate at e.
    static Observable coordinate(const ShiftSystem& sys);
    void validate() const;
};

// rho with rho(source(x)) = target(x); checked exhaustively over patterns.
struct Refinement {
    std::vector<std::uint8_t> map;   // source letter -> target letter

    std::uint8_t operator()(std::uint8_t c) const { return map.at(c); }
};

// Verifies rho(source(.)) == target(.) over all of B^{W_source}; the target
// window must be contained in the source window.
bool refinement_valid(const Observable& source, const Observable& target, const Refinement& rho);

struct LawWeight {
    double value = 0.0;
    std::optional<Rational> exact;
};

// A finitely supported probability vector over patterns A^F.
struct EmpiricalLaw {
    std::vector<GroupElement> slots;   // the ordered F list
    std::size_t codomain_size = 0;
    std::map<std::vector<std::uint8_t>, LawWeight> entries;

    bool has_exact() const;
    double total() const;
    // Marginal law of one slot, as a dense vector over the codomain.
    std::vector<LawWeight> marginal(std::size_t slot_index) const;
    // Pattern-wise pushforward through a refinement map.
    EmpiricalLaw pushforward(const Refinement& rho, std::size_t target_codomain) const;
};

// l1 distance between two laws on the same pattern space (diameter 2).
double l1_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);
std::optional<Rational> l1_distance_exact(const EmpiricalLaw& a, const EmpiricalLaw& b);

enum class LawMode { Double, Exact };

struct LawOptions {
    LawMode mode = LawMode::Exact;
    // Enumeration budget: assignments visited (iid) / interval patterns (Markov).
    std::uint64_t budget = 10'000'000;
    // Exact mode refuses wider coordinate sets (denominator growth).
    std::size_t exact_coordinate_cap = 12;
};

// The law (alpha^F)_* mu, computed exactly by summing the base measure over
// all assignments of the coordinates read by the F-translates of the window.
EmpiricalLaw law(const ShiftSystem& sys, const Observable& alpha,
                 const std::vector<GroupElement>& F, const LawOptions& opts = {});

struct JoinResult {
    Observable joint;
    Refinement to_left;
    Refinement to_right;
};

// alpha v beta on the union window; unreachable letter pairs are dropped
// unless keep_unreachable. The two refinements are the coordinate projections.
JoinResult join(const ShiftSystem& sys, const Observable& left, const Observable& right,
                bool keep_unreachable = false);

// g alpha, reading x at w * g^{-1} for each original window coordinate w.
Observable translate(const ShiftSystem& sys, const Observable& alpha, const GroupElement& g);

} // namespace sofic
