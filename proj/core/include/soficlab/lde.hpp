// Computable necessary-condition checks for local and doubly empirical
// convergence of measures on B^d toward a shift system's law: the three
// vanishing functionals of the functional-analytic reformulation, applied
// to a measure and to its square via the doubled alphabet.
//
// Site reads. A labeling y in B^d induces at site j the window readout
// w -> y(sigma(w)^{-1}(j)). The translated readout (functional 3) transports
// each window coordinate by sigma(g), and is compared against the plain
// readout at the site sigma(g)(j); the two coincide identically for exact
// abelian models and differ by commutators otherwise.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/systems.hpp"

namespace sofic {

struct TestFunction {
    std::vector<GroupElement> window;  // ordered, distinct
    std::size_t base_size = 0;
    std::vector<double> table;         // over B^window, window[0] fastest

    void validate() const;
    double eval(const std::vector<std::uint8_t>& pattern) const;
    // Cylinder indicator of one letter at one coordinate.
    static TestFunction letter_indicator(const ShiftSystem& sys, const GroupElement& at,
                                         std::uint8_t letter);
};

struct AtomicMeasure {
    bool product_tag = false;          // base-law product over the d sites
    std::int64_t d = 0;
    // Atoms: labelings with positive weights summing to 1 (within 1e-12).
    std::vector<std::vector<std::uint8_t>> atoms;
    std::vector<double> weights;

    static AtomicMeasure product(std::int64_t d);
    static AtomicMeasure point_mass(std::vector<std::uint8_t> labeling);
    static AtomicMeasure empirical(const ShiftSystem& sys, std::int64_t d, std::uint64_t n_samples,
                                   std::uint64_t seed);
    void validate() const;
};

struct LdeOptions {
    std::uint64_t atom_pair_budget = 1'000'000;
};

// (1/d) sum_j | m(iota_j f) - mu(f) |^2.
double le_functional_1(const AtomicMeasure& m, const ShiftSystem& sys, const TestFunction& f,
                       const SoficApprox& sigma);

// m (x) m ( | mu(f1) mu(f2) - (1/d) sum_j iota_j(f1) (x) iota_j(f2) |^2 ).
double le_functional_2(const AtomicMeasure& m, const ShiftSystem& sys, const TestFunction& f1,
                       const TestFunction& f2, const SoficApprox& sigma,
                       const LdeOptions& opts = {});

// (1/d) sum_j m( | translated readout - readout at sigma(g)(j) |^2 ).
double le_functional_3(const AtomicMeasure& m, const ShiftSystem& sys, const TestFunction& f,
                       const GroupElement& g, const SoficApprox& sigma);

// Doubled-data variants used by the lde report: the same functionals for the
// product measure m (x) m over the doubled alphabet, evaluated without
// materializing atom pairs.
double le_functional_1_doubled(const AtomicMeasure& m, const ShiftSystem& sys,
                               const TestFunction& f1, const TestFunction& f2,
                               const SoficApprox& sigma);
double le_functional_3_doubled(const AtomicMeasure& m, const ShiftSystem& sys,
                               const TestFunction& f1, const TestFunction& f2,
                               const GroupElement& g, const SoficApprox& sigma);

struct LdeRecipe {
    enum class Kind { Product, Empirical, Custom };
    Kind kind = Kind::Product;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::optional<AtomicMeasure> custom;
};

struct LdeCell {
    std::int64_t d = 0;
    int functional = 0;        // 1, 2, 3; 4 = doubled-1, 5 = doubled-3
    std::size_t test_index = 0;
    double value = 0.0;
};

struct LdeColumn {
    int functional = 0;
    std::vector<std::pair<std::int64_t, double>> max_by_d;
    bool pass = false;
};

struct LdeReport {
    std::vector<LdeCell> cells;
    std::vector<LdeColumn> columns;
    bool pass = false;
};

// Default cylinder test set: all letter indicators on coordinates of span <= 2.
std::vector<TestFunction> default_test_functions(const ShiftSystem& sys);

// Evaluates every functional over increasing model sizes and flags the trend:
// each column must decay like 1/d within a factor of 2 across the top half.
LdeReport lde_report(const ShiftSystem& sys, const std::vector<SoficApprox>& sigmas,
                     const LdeRecipe& recipe, const std::vector<TestFunction>& tests,
                     const std::vector<GroupElement>& elements, const LdeOptions& opts = {});

} // namespace sofic
