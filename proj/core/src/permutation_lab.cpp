#include "soficlab/permutation_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace sofic {

void PartialInjectionFamily::validate() const {
    if (d < 1) throw std::invalid_argument("family needs d >= 1");
    for (const auto& part : parts) {
        if (part.image.size() != part.domain.size())
            throw std::invalid_argument("image size does not match domain");
        if (!std::is_sorted(part.domain.begin(), part.domain.end()) ||
            std::adjacent_find(part.domain.begin(), part.domain.end()) != part.domain.end())
            throw std::invalid_argument("domain must be sorted and distinct");
        if (!std::is_sorted(part.range.begin(), part.range.end()) ||
            std::adjacent_find(part.range.begin(), part.range.end()) != part.range.end())
            throw std::invalid_argument("range must be sorted and distinct");
        std::set<std::int32_t> seen;
        for (auto v : part.image) {
            if (v < 0 || v >= d) throw std::invalid_argument("image point out of range");
            if (!std::binary_search(part.range.begin(), part.range.end(), v))
                throw std::invalid_argument("image point outside the declared range");
            if (!seen.insert(v).second) throw std::invalid_argument("partial map is not injective");
        }
        for (auto v : part.domain)
            if (v < 0 || v >= d) throw std::invalid_argument("domain point out of range");
    }
}

namespace {

double overlap_fraction(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b,
                        std::int64_t d) {
    std::size_t i = 0, j = 0, common = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(d);
}

} // namespace

double FamilyDiagnostics::worst() const {
    return std::max(std::max(max_domain_overlap, max_range_overlap),
                    std::max(max_size_gap, max_range_deficit));
}

double FamilyDiagnostics::kappa(double eps, std::size_t family_size) {
    if (family_size == 0) return eps;
    return eps / (4.0 * static_cast<double>(family_size) * static_cast<double>(family_size));
}

FamilyDiagnostics family_diagnostics(const PartialInjectionFamily& fam) {
    fam.validate();
    FamilyDiagnostics diag;
    std::int64_t d = fam.d;
    for (std::size_t k = 0; k < fam.parts.size(); ++k) {
        const auto& pk = fam.parts[k];
        diag.max_size_gap = std::max(
            diag.max_size_gap,
            std::fabs(static_cast<double>(pk.domain.size()) - static_cast<double>(pk.range.size())) /
                static_cast<double>(d));
        std::set<std::int32_t> image_set(pk.image.begin(), pk.image.end());
        diag.max_range_deficit =
            std::max(diag.max_range_deficit,
                     (static_cast<double>(pk.range.size()) - static_cast<double>(image_set.size())) /
                         static_cast<double>(d));
        for (std::size_t l = k + 1; l < fam.parts.size(); ++l) {
            diag.max_domain_overlap = std::max(
                diag.max_domain_overlap, overlap_fraction(pk.domain, fam.parts[l].domain, d));
            diag.max_range_overlap = std::max(
                diag.max_range_overlap, overlap_fraction(pk.range, fam.parts[l].range, d));
        }
    }
    return diag;
}

AlmostPermutationResult almost_permutation(const PartialInjectionFamily& fam) {
    AlmostPermutationResult out;
    out.diagnostics = family_diagnostics(fam);
    std::int64_t d = fam.d;

    std::vector<std::int32_t> assigned(d, -1);
    std::vector<bool> targeted(d, false);

    // Adopt the p_k assignments in family order, first index wins; a point
    // whose domain or target slot is already taken is discarded and later
    // completed arbitrarily.
    for (const auto& part : fam.parts) {
        for (std::size_t i = 0; i < part.domain.size(); ++i) {
            std::int32_t j = part.domain[i];
            std::int32_t t = part.image[i];
            if (assigned[j] == -1 && !targeted[t]) {
                assigned[j] = t;
                targeted[t] = true;
            }
        }
    }

    // Complete to a bijection: leftover domain points to leftover range
    // points in sorted order.
    std::vector<std::int32_t> free_targets;
    for (std::int32_t t = 0; t < d; ++t)
        if (!targeted[t]) free_targets.push_back(t);
    std::size_t next_free = 0;
    for (std::int32_t j = 0; j < d; ++j) {
        if (assigned[j] == -1) assigned[j] = free_targets[next_free++];
    }
    out.p = std::move(assigned);

    // Achieved bound, by recount over the family.
    std::vector<bool> mismatched(d, false);
    for (const auto& part : fam.parts) {
        for (std::size_t i = 0; i < part.domain.size(); ++i) {
            std::int32_t j = part.domain[i];
            if (out.p[j] != part.image[i]) mismatched[j] = true;
        }
    }
    for (std::int32_t j = 0; j < d; ++j)
        if (mismatched[j]) ++out.mismatched_points;
    out.achieved_bound = static_cast<double>(out.mismatched_points) / static_cast<double>(d);
    return out;
}

IntervalTiling interval_tiling(std::int64_t d, std::int64_t T) {
    if (d < 1 || T < 1 || T > d) throw std::invalid_argument("need 1 <= T <= d");
    IntervalTiling out;
    out.tile_length = T;
    std::int64_t full = d / T;
    for (std::int64_t i = 0; i < full; ++i) out.starts.push_back(i * T);
    out.remainder_start = full * T;
    out.remainder_length = d % T;
    return out;
}

std::int64_t default_tile_length(const std::vector<std::int64_t>& E, std::int64_t window_span,
                                 double eps) {
    std::int64_t espan = 0;
    for (auto g : E) espan = std::max<std::int64_t>(espan, std::llabs(g));
    std::int64_t span = std::max(espan, window_span);
    if (span < 1) span = 1;
    return static_cast<std::int64_t>(std::ceil(2.0 * static_cast<double>(span) / eps));
}

ConjugationReport conjugate_microstates_z(const Microstate& phi, const Microstate& psi,
                                          const std::vector<std::int64_t>& E, double eps,
                                          const SoficApprox& sigma, std::int64_t T,
                                          const APQuery* membership_check) {
    if (sigma.group().kind() != GroupKind::Integers)
        throw std::invalid_argument("conjugation is implemented for cyclic models of Z");
    std::int64_t d = sigma.size();
    if (static_cast<std::int64_t>(phi.size()) != d || static_cast<std::int64_t>(psi.size()) != d)
        throw std::invalid_argument("microstate lengths do not match the model");
    if (phi.alphabet_size != psi.alphabet_size)
        throw std::invalid_argument("microstates over different alphabets");
    (void)eps;

    ConjugationReport report;
    if (membership_check) {
        report.membership_checked = true;
        auto mp = ap_member(phi, *membership_check);
        auto mq = ap_member(psi, *membership_check);
        report.phi_member = mp.member;
        report.psi_member = mq.member;
        report.phi_distance = mp.distance;
        report.psi_distance = mq.distance;
    }

    IntervalTiling tiling = interval_tiling(d, T);
    report.total_tiles = static_cast<std::int64_t>(tiling.starts.size());

    auto window_at = [&](const Microstate& m, std::int64_t pos) {
        std::vector<std::uint8_t> w(static_cast<std::size_t>(T));
        for (std::int64_t t = 0; t < T; ++t) w[t] = m.values[(pos + t) % d];
        return w;
    };

    // psi positions by window pattern (all positions, wrap-around windows);
    // phi anchors are the tile grid only.
    std::map<std::vector<std::uint8_t>, std::vector<std::int64_t>> psi_positions;
    for (std::int64_t pos = 0; pos < d; ++pos) psi_positions[window_at(psi, pos)].push_back(pos);

    // Match each anchor to a position of psi carrying the same pattern, with
    // the whole image tile [pos, pos+T) still free, so matched tiles stay
    // pairwise disjoint (the target classes play the role of a tiling of
    // psi). Self-matches are claimed first, so identical microstates get the
    // identity; the rest is first-fit in sorted order.
    std::vector<bool> reserved(static_cast<std::size_t>(d), false);
    auto tile_free = [&](std::int64_t pos) {
        for (std::int64_t t = 0; t < T; ++t)
            if (reserved[(pos + t) % d]) return false;
        return true;
    };
    auto reserve_tile = [&](std::int64_t pos) {
        for (std::int64_t t = 0; t < T; ++t) reserved[(pos + t) % d] = true;
    };

    std::vector<std::pair<std::int64_t, std::int64_t>> matches;  // (anchor, image position)
    std::vector<std::int64_t> pending;
    for (auto s : tiling.starts) {
        if (window_at(phi, s) == window_at(psi, s) && tile_free(s)) {
            matches.emplace_back(s, s);
            reserve_tile(s);
        } else {
            pending.push_back(s);
        }
    }
    for (auto s : pending) {
        auto it = psi_positions.find(window_at(phi, s));
        if (it == psi_positions.end()) continue;
        for (auto pos : it->second) {
            if (!tile_free(pos)) continue;
            matches.emplace_back(s, pos);
            reserve_tile(pos);
            break;
        }
    }
    std::sort(matches.begin(), matches.end());
    report.matched_tiles = static_cast<std::int64_t>(matches.size());

    // One partial injection per matched tile: p(anchor + t) = image + t (mod d).
    PartialInjectionFamily fam;
    fam.d = d;
    for (auto [anchor, image] : matches) {
        PartialInjection part;
        for (std::int64_t t = 0; t < T; ++t) {
            part.domain.push_back(static_cast<std::int32_t>(anchor + t));
            part.image.push_back(static_cast<std::int32_t>((image + t) % d));
        }
        part.range = part.image;
        std::sort(part.range.begin(), part.range.end());
        fam.parts.push_back(std::move(part));
    }
    AlmostPermutationResult patched = almost_permutation(fam);
    report.p = std::move(patched.p);
    report.achieved_patch_bound = patched.achieved_bound;
    std::int64_t covered = report.matched_tiles * T - patched.mismatched_points;
    report.patch_fraction = 1.0 - static_cast<double>(covered) / static_cast<double>(d);

    std::int64_t mism = 0;
    for (std::int64_t j = 0; j < d; ++j)
        if (psi.values[report.p[j]] != phi.values[j]) ++mism;
    report.mismatch_fraction = static_cast<double>(mism) / static_cast<double>(d);

    for (auto g : E) {
        Permutation sg = sigma.image(GroupElement::integer(g));
        std::int64_t bad = 0;
        for (std::int64_t j = 0; j < d; ++j)
            if (report.p[sg[j]] != sg[report.p[j]]) ++bad;
        report.commutation_defects.emplace_back(g, static_cast<double>(bad) / static_cast<double>(d));
    }
    return report;
}

} // namespace sofic
