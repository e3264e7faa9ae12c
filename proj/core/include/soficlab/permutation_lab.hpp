// Constructive permutation patching: assemble a genuine bijection of
// {0..d-1} from a family of partial injections, discarding collisions
// (first index wins on sorted indices), and conjugate microstates of
// cyclic models by matching interval tiles with equal window patterns.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/microstates.hpp"

namespace sofic {

struct PartialInjection {
    std::vector<std::int32_t> domain;  // B_k, sorted ascending
    std::vector<std::int32_t> range;   // C_k, sorted ascending
    std::vector<std::int32_t> image;   // image[i] = p_k(domain[i]), inside range
};

struct PartialInjectionFamily {
    std::int64_t d = 0;
    std::vector<PartialInjection> parts;

    void validate() const;
};

struct FamilyDiagnostics {
    double max_domain_overlap = 0.0;  // max over k != l of u_d(B_k cap B_l)
    double max_range_overlap = 0.0;
    double max_size_gap = 0.0;        // max |u_d(B_k) - u_d(C_k)|
    double max_range_deficit = 0.0;   // max u_d(C_k) - u_d(p_k(B_k))

    double worst() const;
    // The concrete hypothesis constant: kappa = eps / (4 |K|^2).
    static double kappa(double eps, std::size_t family_size);
    bool satisfies(double kappa_bound) const { return worst() < kappa_bound; }
};

FamilyDiagnostics family_diagnostics(const PartialInjectionFamily& fam);

struct AlmostPermutationResult {
    Permutation p;
    // u_d of the union over k of { j in B_k : p(j) != p_k(j) }.
    double achieved_bound = 0.0;
    std::int64_t mismatched_points = 0;
    FamilyDiagnostics diagnostics;
};

// Always returns a bijection together with the achieved discard fraction;
// callers compare the bound against their epsilon.
AlmostPermutationResult almost_permutation(const PartialInjectionFamily& fam);

struct IntervalTiling {
    std::vector<std::int64_t> starts;  // full tiles [s, s+T), 0-based
    std::int64_t tile_length = 0;
    std::int64_t remainder_start = 0;  // the short final tile, length d mod T
    std::int64_t remainder_length = 0;
};

IntervalTiling interval_tiling(std::int64_t d, std::int64_t T);

struct ConjugationReport {
    Permutation p;
    double mismatch_fraction = 0.0;   // u_d { j : psi(p(j)) != phi(j) }
    // Per element g of E: u_d { j : p(sigma(g)(j)) != sigma(g)(p(j)) }.
    std::vector<std::pair<std::int64_t, double>> commutation_defects;
    std::int64_t matched_tiles = 0;
    std::int64_t total_tiles = 0;
    double patch_fraction = 0.0;      // points not covered by adopted rigid tile maps
    double achieved_patch_bound = 0.0;
    bool membership_checked = false;
    bool phi_member = false, psi_member = false;
    double phi_distance = 0.0, psi_distance = 0.0;
};

// Tile-rigid conjugation for cyclic models: anchors of phi on the tile grid
// are matched to positions of psi carrying the same length-T window pattern
// (self first, then in sorted order), each match is extended rigidly across
// its tile, and the result is patched to a bijection.
ConjugationReport conjugate_microstates_z(const Microstate& phi, const Microstate& psi,
                                          const std::vector<std::int64_t>& E, double eps,
                                          const SoficApprox& sigma, std::int64_t T,
                                          const APQuery* membership_check = nullptr);

// Default tile length ceil(2 * max(E span, window span) / eps).
std::int64_t default_tile_length(const std::vector<std::int64_t>& E, std::int64_t window_span,
                                 double eps);

} // namespace sofic
