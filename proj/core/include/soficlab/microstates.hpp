// Microstate spaces AP(alpha, F, delta, sigma): labelings of {0..d-1} whose
// sigma-pulled-back empirical pattern law is within delta (l1, strict) of a
// target law. Exact enumeration uses depth-first search over A^d with
// partial-histogram feasibility pruning; membership arithmetic is exact
// rational. Relative spaces count distinct projections of fibers.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/systems.hpp"

namespace sofic {

struct Microstate {
    std::size_t alphabet_size = 0;
    std::vector<std::uint8_t> values;

    std::size_t size() const { return values.size(); }
    static Microstate constant(std::size_t alphabet, std::size_t d, std::uint8_t letter);
};

struct APQuery {
    std::size_t codomain_size = 0;
    std::vector<GroupElement> F;        // normalized: contains the identity
    Rational delta;                     // membership is strict: distance < delta
    SoficApprox sigma;
    EmpiricalLaw target;                // exact law over codomain^F
    std::uint64_t budget = 100'000'000; // DFS node visits

    // Computes the target law with systems::law (exact mode) after
    // normalizing F to contain the identity.
    static APQuery make(const ShiftSystem& sys, const Observable& alpha,
                        std::vector<GroupElement> F, const Rational& delta,
                        SoficApprox sigma, const LawOptions& law_opts = {});

    void validate() const;
};

// The law (phi_sigma^F)_* u_d: pattern at site j reads phi(sigma(g)^{-1}(j)).
EmpiricalLaw empirical_F_law(const Microstate& phi, const SoficApprox& sigma,
                             const std::vector<GroupElement>& F);

struct ApMembership {
    bool member = false;
    double distance = 0.0;
    Rational distance_exact;
};

ApMembership ap_member(const Microstate& phi, const APQuery& q);

// |AP(alpha, F, delta, sigma)|, exact. Throws BudgetExceeded when the pruned
// search would visit more nodes than q.budget; use ap_sample_estimate then.
std::uint64_t ap_count_exact(const APQuery& q);

struct SampleEstimate {
    double estimate = 0.0;        // |A|^d * member fraction
    double log_estimate = 0.0;    // d ln|A| + ln(fraction), -inf when zero
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t members = 0;
    std::uint64_t samples = 0;
    bool none_member = false;     // point estimate 0; ci_high is the one-sided bound
    bool all_members = false;
};

// Uniform sampling over A^d in fixed-size chunks; chunk c draws from a stream
// seeded by (seed, c), so results do not depend on thread count.
SampleEstimate ap_sample_estimate(const APQuery& q, std::uint64_t n_samples, std::uint64_t seed);

// |{rho_A o phi : phi in AP(gamma,...), rho_B o phi = psi}| -- the size of the
// fiber over psi, counting distinct projections.
std::uint64_t rel_ap_count(const APQuery& gamma_query, const Refinement& rho_A,
                           const Refinement& rho_B, const Microstate& psi);

struct RelSupResult {
    std::uint64_t sup = 0;
    Microstate argmax;            // one maximizing psi (lexicographically first)
    std::uint64_t base_count = 0; // |AP(beta:gamma,...)| = number of distinct psi
};

// sup over psi in AP(beta:gamma,...) of the fiber size; nullopt when
// AP(gamma,...) is empty (downstream rates treat log sup as -inf).
std::optional<RelSupResult> rel_ap_sup(const APQuery& gamma_query, const Refinement& rho_A,
                                       const Refinement& rho_B);

// |{rho o phi : phi in AP(gamma,...)}| -- microstates of a factor in the
// presence of gamma.
std::uint64_t presence_count(const APQuery& gamma_query, const Refinement& rho);

} // namespace sofic
