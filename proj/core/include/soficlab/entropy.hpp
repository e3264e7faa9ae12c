// Shannon entropies, exact conditional type counting, and finite-level
// relative entropy rates. Type counts Xi(alpha | psi, delta, n) are exact
// big integers: sums over nonnegative integer matrices with prescribed
// column sums inside a strict l1 ball around the joint law. All rates are
// in nats; zero counts propagate as an explicit -inf marker, never ln(0).

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soficlab/bigint.hpp"
#include "soficlab/microstates.hpp"
#include "soficlab/rational.hpp"
#include "soficlab/systems.hpp"

namespace sofic {

struct JointLaw {
    // p[a][b] >= 0, total mass exactly 1.
    std::vector<std::vector<Rational>> p;

    std::size_t rows() const { return p.size(); }
    std::size_t cols() const { return p.empty() ? 0 : p[0].size(); }
    Rational row_sum(std::size_t a) const;
    Rational col_sum(std::size_t b) const;
    void validate() const;
};

struct TypeVector {
    std::vector<std::int64_t> counts;

    std::int64_t total() const;
    void validate(std::int64_t n) const;
};

// -sum p_i ln p_i with 0 ln 0 = 0.
double shannon(const std::vector<double>& p);
double shannon(const std::vector<Rational>& p);

// H(alpha | beta) of a joint law, in nats; zero-mass columns contribute 0.
double cond_shannon(const JointLaw& joint);

// |Xi(alpha | psi, delta, n)|: the number of phi in A^n whose joint empirical
// law with a fixed psi of the given type lies strictly within delta (l1) of
// the joint law. Depends on psi only through its type.
BigUint xi_count(const JointLaw& joint, const Rational& delta, std::int64_t n,
                 const TypeVector& psi_type);

struct RateValue {
    double value = 0.0;
    bool neg_inf = false;

    static RateValue of_log_count(double log_count, std::int64_t scale);
    static RateValue minus_infinity();
};

struct StirlingRow {
    std::int64_t n = 0;
    Rational delta;
    RateValue sup_rate;              // sup over admissible psi types
    std::uint64_t admissible_types = 0;
    std::vector<std::int64_t> argmax_type;
};

struct StirlingReport {
    std::vector<StirlingRow> rows;
    // Running inf over the delta schedule of the largest-n rates.
    std::vector<std::pair<Rational, RateValue>> inf_over_delta;
};

// Rates (1/n) ln sup_psi |Xi(alpha|psi,delta,n)| over the (n, delta) grid;
// admissible psi types are the column projections of joint types within delta.
StirlingReport stirling_curve(const JointLaw& joint, const std::vector<std::int64_t>& n_list,
                              const std::vector<Rational>& delta_list);

// Default geometric schedule delta_k = 2 * 2^-k, k = 0..6.
std::vector<Rational> default_delta_schedule();

struct FiniteLevelResult {
    RateValue rate;                 // (1/d) ln sup_psi |AP(alpha | psi : gamma, F, delta, sigma)|
    std::uint64_t sup_count = 0;
    std::uint64_t base_count = 0;   // |AP(beta : gamma, ...)|
    std::optional<Microstate> argmax;
};

// The pre-limit relative entropy rate at one model: gamma >= alpha v beta via
// the two refinements.
FiniteLevelResult h_finite_level(const ShiftSystem& sys, const Observable& gamma,
                                 const Refinement& rho_alpha, const Refinement& rho_beta,
                                 const std::vector<GroupElement>& F, const Rational& delta,
                                 const SoficApprox& sigma, const LawOptions& law_opts = {},
                                 std::uint64_t budget = 100'000'000);

struct LevelRatesRow {
    std::int64_t d = 0;
    std::uint64_t count = 0;
    RateValue rate;
};

struct LevelRates {
    std::vector<LevelRatesRow> rows;
    RateValue tail_min;   // liminf proxy over the tail half of the size list
    RateValue tail_max;   // limsup proxy
};

// Per-size rates (1/d) ln |AP(alpha : gamma, F, delta, sigma_d)| where the
// presence count takes distinct rho-projections of gamma-microstates.
LevelRates h_liminf_level(const ShiftSystem& sys, const Observable& gamma,
                          const Refinement& rho_alpha, const std::vector<GroupElement>& F,
                          const Rational& delta, const std::vector<SoficApprox>& sigmas,
                          const LawOptions& law_opts = {}, std::uint64_t budget = 100'000'000);

} // namespace sofic
