#include "soficlab/microstates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "soficlab/parallel.hpp"
#include "soficlab/rng.hpp"

namespace sofic {

namespace {

using i128 = __int128;

i128 iabs(i128 v) { return v < 0 ? -v : v; }

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    std::int64_t g = std::gcd(a, b);
    i128 l = i128(a) / g * b;
    if (l > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("target law denominators too large for exact counting");
    return static_cast<std::int64_t>(l);
}

} // namespace

Microstate Microstate::constant(std::size_t alphabet, std::size_t d, std::uint8_t letter) {
    Microstate m;
    m.alphabet_size = alphabet;
    m.values.assign(d, letter);
    return m;
}

APQuery APQuery::make(const ShiftSystem& sys, const Observable& alpha,
                      std::vector<GroupElement> F, const Rational& delta,
                      SoficApprox sigma, const LawOptions& law_opts) {
    const Group& G = sys.group();
    if (!(G == sigma.group()))
        throw GroupMismatch("observable system and sofic approximation act for different groups");
    bool has_e = false;
    for (const auto& h : F)
        if (G.is_identity(h)) has_e = true;
    if (!has_e) F.insert(F.begin(), G.identity());

    APQuery q;
    q.codomain_size = alpha.codomain.size();
    q.F = F;
    q.delta = delta;
    q.sigma = std::move(sigma);
    q.target = law(sys, alpha, F, law_opts);
    q.validate();
    return q;
}

void APQuery::validate() const {
    if (!(delta > Rational(0))) throw std::invalid_argument("delta must be positive");
    if (codomain_size == 0) throw std::invalid_argument("empty codomain");
    if (F.empty()) throw std::invalid_argument("empty F");
    if (target.slots.size() != F.size()) throw std::invalid_argument("target law has wrong slot count");
    if (!target.has_exact())
        throw std::invalid_argument("AP queries need an exact target law (LawMode::Exact)");
}

EmpiricalLaw empirical_F_law(const Microstate& phi, const SoficApprox& sigma,
                             const std::vector<GroupElement>& F) {
    std::int64_t d = sigma.size();
    if (static_cast<std::int64_t>(phi.size()) != d)
        throw std::invalid_argument("microstate length does not match the model size");
    std::vector<Permutation> reads;
    reads.reserve(F.size());
    for (const auto& g : F) reads.push_back(inverse_permutation(sigma.image(g)));

    std::map<std::vector<std::uint8_t>, std::int64_t> tally;
    std::vector<std::uint8_t> pat(F.size());
    for (std::int64_t j = 0; j < d; ++j) {
        for (std::size_t fi = 0; fi < F.size(); ++fi) pat[fi] = phi.values[reads[fi][j]];
        ++tally[pat];
    }
    EmpiricalLaw out;
    out.slots = F;
    out.codomain_size = phi.alphabet_size;
    for (const auto& [p, c] : tally) {
        LawWeight w;
        w.exact = Rational(c, d);
        w.value = w.exact->to_double();
        out.entries.emplace(p, w);
    }
    return out;
}

ApMembership ap_member(const Microstate& phi, const APQuery& q) {
    EmpiricalLaw emp = empirical_F_law(phi, q.sigma, q.F);
    auto exact = l1_distance_exact(emp, q.target);
    ApMembership r;
    r.distance_exact = *exact;
    r.distance = r.distance_exact.to_double();
    r.member = r.distance_exact < q.delta;
    return r;
}

namespace {

// Shared immutable data for one enumeration problem.
struct Problem {
    std::int64_t d = 0;
    std::size_t a = 0;                          // letters
    std::vector<std::vector<std::int32_t>> read_pos;  // [slot][site] -> position read
    std::vector<std::vector<std::int32_t>> ready_sites; // [position] -> sites finalized there
    std::vector<std::size_t> strides;           // pattern id strides per slot
    std::vector<std::int64_t> scaled_target;    // N_p over common denominator D
    std::int64_t scale = 1;                     // D
    std::int64_t delta_num = 0, delta_den = 1;
    std::vector<std::vector<std::uint8_t>> allowed;   // letters per position
    std::uint64_t budget = 0;

    i128 threshold() const { return i128(delta_num) * d * scale; }
};

Problem build_problem(const APQuery& q, const std::vector<std::vector<std::uint8_t>>& allowed) {
    Problem pb;
    pb.d = q.sigma.size();
    pb.a = q.codomain_size;
    pb.budget = q.budget;
    pb.delta_num = q.delta.num;
    pb.delta_den = q.delta.den;
    pb.allowed = allowed;

    pb.read_pos.resize(q.F.size());
    for (std::size_t fi = 0; fi < q.F.size(); ++fi) {
        Permutation inv = inverse_permutation(q.sigma.image(q.F[fi]));
        pb.read_pos[fi].assign(inv.begin(), inv.end());
    }
    pb.ready_sites.resize(pb.d);
    for (std::int64_t s = 0; s < pb.d; ++s) {
        std::int32_t readiness = 0;
        for (std::size_t fi = 0; fi < q.F.size(); ++fi)
            readiness = std::max(readiness, pb.read_pos[fi][s]);
        pb.ready_sites[readiness].push_back(static_cast<std::int32_t>(s));
    }
    pb.strides.resize(q.F.size());
    std::size_t stride = 1;
    for (std::size_t fi = 0; fi < q.F.size(); ++fi) {
        pb.strides[fi] = stride;
        stride *= pb.a;
    }
    if (stride > (std::size_t(1) << 22))
        throw BudgetExceeded("pattern space A^F too large for dense counting");

    pb.scale = 1;
    for (const auto& [pat, w] : q.target.entries) pb.scale = lcm_checked(pb.scale, w.exact->den);
    pb.scale = lcm_checked(pb.scale, q.delta.den);
    pb.scaled_target.assign(stride, 0);
    for (const auto& [pat, w] : q.target.entries) {
        std::size_t pid = 0;
        for (std::size_t fi = 0; fi < pat.size(); ++fi) pid += pat[fi] * pb.strides[fi];
        pb.scaled_target[pid] = w.exact->num * (pb.scale / w.exact->den);
    }
    return pb;
}

// Per-chunk mutable search state with incremental l1 feasibility bounds.
struct SearchState {
    const Problem* pb;
    std::vector<std::uint8_t> values;
    std::vector<std::int32_t> counts;  // per pattern id
    i128 surplus = 0;   // sum over p of max(0, c_p D - N_p d)
    i128 deficit = 0;   // sum over p of max(0, N_p d - c_p D)
    std::int64_t undetermined = 0;

    explicit SearchState(const Problem& p) : pb(&p) {
        values.assign(p.d, 0);
        counts.assign(p.scaled_target.size(), 0);
        undetermined = p.d;
        for (auto n : p.scaled_target) deficit += i128(n) * p.d;
    }

    std::size_t pattern_id(std::int32_t site) const {
        std::size_t pid = 0;
        for (std::size_t fi = 0; fi < pb->read_pos.size(); ++fi)
            pid += values[pb->read_pos[fi][site]] * pb->strides[fi];
        return pid;
    }

    void bump(std::size_t pid, int delta_count) {
        i128 nd = i128(pb->scaled_target[pid]) * pb->d;
        i128 before = i128(counts[pid]) * pb->scale;
        counts[pid] += delta_count;
        i128 after = i128(counts[pid]) * pb->scale;
        surplus += std::max<i128>(0, after - nd) - std::max<i128>(0, before - nd);
        deficit += std::max<i128>(0, nd - after) - std::max<i128>(0, nd - before);
    }

    // Finalize the sites whose last read is position t (values[t] already set).
    void settle(std::int64_t t) {
        for (auto site : pb->ready_sites[t]) bump(pattern_id(site), +1);
        undetermined -= static_cast<std::int64_t>(pb->ready_sites[t].size());
    }

    void unsettle(std::int64_t t) {
        for (auto site : pb->ready_sites[t]) bump(pattern_id(site), -1);
        undetermined += static_cast<std::int64_t>(pb->ready_sites[t].size());
    }

    // Every completion has l1 distance >= these bounds (in units of 1/(d D)).
    bool infeasible() const {
        i128 lb = 2 * surplus;
        i128 lb2 = 2 * (deficit - i128(undetermined) * pb->scale);
        if (lb2 > lb) lb = lb2;
        return i128(pb->delta_den) * lb >= pb->threshold();
    }

    bool is_member() const {
        // undetermined == 0: distance * d * D == surplus + deficit.
        return i128(pb->delta_den) * (surplus + deficit) < pb->threshold();
    }
};

// Depth-first enumeration of members; the member callback may be empty
// (count only). Chunk layout is fixed by the problem alone, so per-chunk
// results merge deterministically for any thread count.
class Enumeration {
public:
    explicit Enumeration(const Problem& p) : pb_(p) {
        prefix_len_ = 0;
        n_chunks_ = 1;
        while (prefix_len_ < static_cast<std::size_t>(pb_.d) && n_chunks_ < 32) {
            std::size_t branch = pb_.allowed[prefix_len_].size();
            if (branch == 0) {
                empty_branch_ = true;
                break;
            }
            n_chunks_ *= branch;
            ++prefix_len_;
        }
    }

    std::size_t chunk_count() const { return empty_branch_ ? 0 : n_chunks_; }

    // on_member(chunk, phi): called for every member; chunk < chunk_count().
    std::function<void(std::size_t, const std::vector<std::uint8_t>&)> on_member;

    std::uint64_t run() {
        if (empty_branch_) return 0;
        chunk_counts_.assign(n_chunks_, 0);
        parallel_chunks(n_chunks_, [&](std::size_t chunk) {
            SearchState st(pb_);
            std::uint64_t visits = 0;
            std::uint64_t rest = chunk;
            bool dead = false;
            for (std::size_t t = 0; t < prefix_len_; ++t) {
                std::size_t branch = pb_.allowed[t].size();
                st.values[t] = pb_.allowed[t][rest % branch];
                rest /= branch;
                ++visits;
                st.settle(static_cast<std::int64_t>(t));
                if (st.infeasible()) {
                    dead = true;
                    break;
                }
            }
            if (!dead) dfs(st, static_cast<std::int64_t>(prefix_len_), chunk, visits);
            total_visits_.fetch_add(visits);
            if (total_visits_.load() > pb_.budget) exceeded_.store(true, std::memory_order_relaxed);
        });
        if (exceeded_.load())
            throw BudgetExceeded(
                "enumeration budget exceeded; consider ap_sample_estimate for this query");
        std::uint64_t total = 0;
        for (auto c : chunk_counts_) total += c;
        return total;
    }

private:
    void dfs(SearchState& st, std::int64_t t, std::size_t chunk, std::uint64_t& visits) {
        if (t == pb_.d) {
            if (st.is_member()) {
                ++chunk_counts_[chunk];
                if (on_member) on_member(chunk, st.values);
            }
            return;
        }
        for (std::uint8_t letter : pb_.allowed[t]) {
            // A single chunk overrunning the whole budget aborts on its own;
            // the cross-chunk total is checked after the run. Both decisions
            // are independent of thread scheduling.
            if (++visits > pb_.budget) {
                exceeded_.store(true, std::memory_order_relaxed);
                return;
            }
            st.values[t] = letter;
            st.settle(t);
            if (!st.infeasible()) dfs(st, t + 1, chunk, visits);
            st.unsettle(t);
        }
    }

    const Problem& pb_;
    std::size_t prefix_len_ = 0;
    std::size_t n_chunks_ = 1;
    bool empty_branch_ = false;
    std::vector<std::uint64_t> chunk_counts_;
    std::atomic<std::uint64_t> total_visits_{0};
    std::atomic<bool> exceeded_{false};
};

std::vector<std::vector<std::uint8_t>> all_letters(std::size_t a, std::int64_t d) {
    std::vector<std::uint8_t> letters(a);
    for (std::size_t i = 0; i < a; ++i) letters[i] = static_cast<std::uint8_t>(i);
    return std::vector<std::vector<std::uint8_t>>(d, letters);
}

} // namespace

std::uint64_t ap_count_exact(const APQuery& q) {
    q.validate();
    Problem pb = build_problem(q, all_letters(q.codomain_size, q.sigma.size()));
    Enumeration e(pb);
    return e.run();
}

SampleEstimate ap_sample_estimate(const APQuery& q, std::uint64_t n_samples, std::uint64_t seed) {
    q.validate();
    if (n_samples == 0) throw std::invalid_argument("need at least one sample");
    Problem pb = build_problem(q, {});
    const std::uint64_t chunk_size = 4096;
    std::size_t n_chunks = static_cast<std::size_t>((n_samples + chunk_size - 1) / chunk_size);
    std::vector<std::uint64_t> hits(n_chunks, 0);

    parallel_chunks(n_chunks, [&](std::size_t chunk) {
        Rng rng(derive_seed(seed, chunk));
        std::uint64_t begin = chunk * chunk_size;
        std::uint64_t end = std::min<std::uint64_t>(n_samples, begin + chunk_size);
        std::vector<std::int32_t> counts(pb.scaled_target.size(), 0);
        std::vector<std::size_t> touched;
        std::vector<std::uint8_t> phi(pb.d);
        for (std::uint64_t s = begin; s < end; ++s) {
            for (std::int64_t j = 0; j < pb.d; ++j)
                phi[j] = static_cast<std::uint8_t>(rng.below(pb.a));
            for (std::int64_t site = 0; site < pb.d; ++site) {
                std::size_t pid = 0;
                for (std::size_t fi = 0; fi < pb.read_pos.size(); ++fi)
                    pid += phi[pb.read_pos[fi][site]] * pb.strides[fi];
                if (counts[pid]++ == 0) touched.push_back(pid);
            }
            i128 dist = 0;
            for (auto pid : touched)
                dist += iabs(i128(counts[pid]) * pb.scale - i128(pb.scaled_target[pid]) * pb.d);
            // Patterns with target mass but no empirical mass.
            i128 full_target = i128(pb.scale) * pb.d;
            i128 seen_target = 0;
            for (auto pid : touched) seen_target += i128(pb.scaled_target[pid]) * pb.d;
            dist += full_target - seen_target;
            if (i128(pb.delta_den) * dist < pb.threshold()) ++hits[chunk];
            for (auto pid : touched) counts[pid] = 0;
            touched.clear();
        }
    });

    SampleEstimate out;
    out.samples = n_samples;
    for (auto h : hits) out.members += h;
    double n = static_cast<double>(n_samples);
    double p = static_cast<double>(out.members) / n;
    long double total = 1.0L;
    for (std::int64_t i = 0; i < pb.d; ++i) total *= static_cast<long double>(pb.a);
    double space = static_cast<double>(total);

    out.estimate = space * p;
    out.log_estimate = out.members == 0
                           ? -std::numeric_limits<double>::infinity()
                           : pb.d * std::log(static_cast<double>(pb.a)) + std::log(p);
    if (out.members == 0) {
        out.none_member = true;
        out.ci_low = 0.0;
        out.ci_high = space * (1.0 - std::pow(0.05, 1.0 / n));
    } else if (out.members == n_samples) {
        out.all_members = true;
        out.ci_low = out.ci_high = out.estimate;
    } else {
        const double z = 1.959963984540054;
        double denom = 1.0 + z * z / n;
        double center = p + z * z / (2.0 * n);
        double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
        out.ci_low = space * std::max(0.0, (center - half) / denom);
        out.ci_high = space * std::min(1.0, (center + half) / denom);
    }
    return out;
}

namespace {

std::vector<std::vector<std::uint8_t>> fiber_letters(const APQuery& q, const Refinement& rho_B,
                                                     const Microstate& psi) {
    if (static_cast<std::int64_t>(psi.size()) != q.sigma.size())
        throw std::invalid_argument("psi length does not match the model size");
    std::vector<std::vector<std::uint8_t>> classes(256);
    for (std::size_t c = 0; c < q.codomain_size; ++c)
        classes[rho_B.map[c]].push_back(static_cast<std::uint8_t>(c));
    std::vector<std::vector<std::uint8_t>> allowed(q.sigma.size());
    for (std::size_t j = 0; j < psi.size(); ++j) allowed[j] = classes[psi.values[j]];
    return allowed;
}

std::vector<std::uint8_t> projected(const std::vector<std::uint8_t>& phi, const Refinement& rho) {
    std::vector<std::uint8_t> out(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) out[j] = rho.map[phi[j]];
    return out;
}

} // namespace

std::uint64_t rel_ap_count(const APQuery& gamma_query, const Refinement& rho_A,
                           const Refinement& rho_B, const Microstate& psi) {
    gamma_query.validate();
    if (rho_A.map.size() != gamma_query.codomain_size || rho_B.map.size() != gamma_query.codomain_size)
        throw std::invalid_argument("refinement maps do not match the gamma codomain");
    auto allowed = fiber_letters(gamma_query, rho_B, psi);
    for (const auto& set : allowed)
        if (set.empty()) return 0;
    Problem pb = build_problem(gamma_query, allowed);
    Enumeration e(pb);
    std::vector<std::set<std::vector<std::uint8_t>>> found(e.chunk_count());
    e.on_member = [&](std::size_t chunk, const std::vector<std::uint8_t>& phi) {
        found[chunk].insert(projected(phi, rho_A));
    };
    e.run();
    std::set<std::vector<std::uint8_t>> all;
    for (auto& s : found) all.merge(s);
    return all.size();
}

std::optional<RelSupResult> rel_ap_sup(const APQuery& gamma_query, const Refinement& rho_A,
                                       const Refinement& rho_B) {
    gamma_query.validate();
    if (rho_A.map.size() != gamma_query.codomain_size || rho_B.map.size() != gamma_query.codomain_size)
        throw std::invalid_argument("refinement maps do not match the gamma codomain");
    Problem pb = build_problem(gamma_query, all_letters(gamma_query.codomain_size, gamma_query.sigma.size()));
    Enumeration e(pb);
    using FiberMap = std::map<std::vector<std::uint8_t>, std::set<std::vector<std::uint8_t>>>;
    std::vector<FiberMap> fibers(e.chunk_count());
    e.on_member = [&](std::size_t chunk, const std::vector<std::uint8_t>& phi) {
        fibers[chunk][projected(phi, rho_B)].insert(projected(phi, rho_A));
    };
    e.run();
    FiberMap all;
    for (auto& f : fibers)
        for (auto& [psi, projections] : f) all[psi].merge(projections);
    if (all.empty()) return std::nullopt;

    RelSupResult out;
    out.base_count = all.size();
    for (const auto& [psi, projections] : all) {
        if (projections.size() > out.sup) {
            out.sup = projections.size();
            out.argmax.values = psi;
        }
    }
    out.argmax.alphabet_size = rho_B.map.empty()
                                   ? 0
                                   : 1 + *std::max_element(rho_B.map.begin(), rho_B.map.end());
    return out;
}

std::uint64_t presence_count(const APQuery& gamma_query, const Refinement& rho) {
    gamma_query.validate();
    if (rho.map.size() != gamma_query.codomain_size)
        throw std::invalid_argument("refinement map does not match the gamma codomain");
    Problem pb = build_problem(gamma_query, all_letters(gamma_query.codomain_size, gamma_query.sigma.size()));
    Enumeration e(pb);
    std::vector<std::set<std::vector<std::uint8_t>>> found(e.chunk_count());
    e.on_member = [&](std::size_t chunk, const std::vector<std::uint8_t>& phi) {
        found[chunk].insert(projected(phi, rho));
    };
    e.run();
    std::set<std::vector<std::uint8_t>> all;
    for (auto& s : found) all.merge(s);
    return all.size();
}

} // namespace sofic
