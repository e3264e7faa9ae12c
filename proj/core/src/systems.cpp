#include "soficlab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "soficlab/parallel.hpp"

namespace sofic {

namespace {

constexpr double kProbTolerance = 1e-12;
constexpr double kStationaryTolerance = 1e-10;

std::vector<Rational> renormalized(std::vector<Rational> v, const char* what) {
    Rational sum(0);
    for (const auto& p : v) {
        if (p.is_negative()) throw std::invalid_argument(std::string(what) + ": negative probability");
        sum += p;
    }
    if (sum.is_zero()) throw std::invalid_argument(std::string(what) + ": zero mass");
    if (std::fabs(sum.to_double() - 1.0) > kProbTolerance)
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
    if (sum != Rational(1))
        for (auto& p : v) p /= sum;
    return v;
}

} // namespace

Alphabet Alphabet::numeric(std::size_t n) {
    Alphabet a;
    a.letters.reserve(n);
    for (std::size_t i = 0; i < n; ++i) a.letters.push_back(std::to_string(i));
    return a;
}

ShiftSystem ShiftSystem::iid(Group g, Alphabet b, std::vector<Rational> probs) {
    if (b.size() == 0 || b.size() > 255) throw std::invalid_argument("alphabet size out of range");
    if (probs.size() != b.size()) throw std::invalid_argument("law size does not match alphabet");
    ShiftSystem s;
    s.group_ = std::move(g);
    s.alphabet_ = std::move(b);
    s.single_ = renormalized(std::move(probs), "iid law");
    return s;
}

ShiftSystem ShiftSystem::markov(Alphabet b, std::vector<std::vector<Rational>> P) {
    auto pi = stationary_vector(P);
    return markov(std::move(b), std::move(P), std::move(pi));
}

ShiftSystem ShiftSystem::markov(Alphabet b, std::vector<std::vector<Rational>> P,
                                std::vector<Rational> pi) {
    std::size_t n = b.size();
    if (n == 0 || n > 255) throw std::invalid_argument("alphabet size out of range");
    if (P.size() != n || pi.size() != n) throw std::invalid_argument("Markov data size mismatch");
    for (auto& row : P) {
        if (row.size() != n) throw std::invalid_argument("Markov row size mismatch");
        row = renormalized(std::move(row), "Markov row");
    }
    pi = renormalized(std::move(pi), "Markov initial vector");
    // pi P = pi, within 1e-10 (decimal-entered vectors are allowed).
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += pi[i].to_double() * P[i][j].to_double();
        if (std::fabs(s - pi[j].to_double()) > kStationaryTolerance)
            throw std::invalid_argument("Markov initial vector is not stationary");
    }
    ShiftSystem s;
    s.group_ = Group::integers();
    s.alphabet_ = std::move(b);
    s.markov_ = true;
    s.single_ = std::move(pi);
    s.P_ = std::move(P);
    return s;
}

std::vector<Rational> ShiftSystem::stationary_vector(const std::vector<std::vector<Rational>>& P) {
    std::size_t n = P.size();
    if (n == 0) throw std::invalid_argument("empty transition matrix");
    // Solve pi (P - I) = 0 with sum(pi) = 1 by rational Gaussian elimination
    // on the transposed system; the last equation is the normalization.
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n + 1, Rational(0)));
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            A[j][i] = P[i][j] - (i == j ? Rational(1) : Rational(0));
        }
    }
    for (std::size_t i = 0; i < n; ++i) A[n - 1][i] = Rational(1);
    A[n - 1][n] = Rational(1);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && A[pivot][col].is_zero()) ++pivot;
        if (pivot == n) throw std::invalid_argument("transition matrix has no unique stationary law");
        std::swap(A[col], A[pivot]);
        Rational inv = Rational(1) / A[col][col];
        for (auto& v : A[col]) v *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            Rational f = A[r][col];
            for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<Rational> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n];
    return pi;
}

std::uint8_t Observable::eval(const std::vector<std::uint8_t>& window_pattern) const {
    std::size_t idx = 0, stride = 1;
    for (std::size_t i = 0; i < window.size(); ++i) {
        idx += window_pattern[i] * stride;
        stride *= base_size;
    }
    return table[idx];
}

Observable Observable::coordinate(const ShiftSystem& sys) {
    Observable o;
    o.codomain = sys.alphabet();
    o.window = {sys.group().identity()};
    o.base_size = sys.alphabet().size();
    o.table.resize(sys.alphabet().size());
    for (std::size_t i = 0; i < o.table.size(); ++i) o.table[i] = static_cast<std::uint8_t>(i);
    return o;
}

void Observable::validate() const {
    if (codomain.size() == 0 || codomain.size() > 255)
        throw std::invalid_argument("codomain size out of range");
    if (base_size == 0 || base_size > 255) throw std::invalid_argument("base alphabet out of range");
    std::size_t expect = 1;
    for (std::size_t i = 0; i < window.size(); ++i) expect *= base_size;
    if (table.size() != expect) throw std::invalid_argument("observable table is not total");
    std::set<GroupElement> distinct(window.begin(), window.end());
    if (distinct.size() != window.size()) throw std::invalid_argument("window has repeated coordinates");
    std::vector<bool> reached(codomain.size(), false);
    for (auto v : table) {
        if (v >= codomain.size()) throw std::invalid_argument("table letter out of codomain");
        reached[v] = true;
    }
    if (!allow_unreachable)
        for (std::size_t a = 0; a < reached.size(); ++a)
            if (!reached[a])
                throw std::invalid_argument("codomain letter " + codomain.letters[a] +
                                            " unreachable (set allow_unreachable to keep it)");
}

bool refinement_valid(const Observable& source, const Observable& target, const Refinement& rho) {
    if (rho.map.size() != source.codomain.size()) return false;
    // Positions of the target window inside the source window.
    std::vector<std::size_t> pos;
    for (const auto& w : target.window) {
        auto it = std::find(source.window.begin(), source.window.end(), w);
        if (it == source.window.end()) return false;
        pos.push_back(static_cast<std::size_t>(it - source.window.begin()));
    }
    std::size_t b = source.base_size;
    std::vector<std::uint8_t> pat(source.window.size(), 0);
    std::vector<std::uint8_t> sub(target.window.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < pos.size(); ++i) sub[i] = pat[pos[i]];
        if (rho(source.eval(pat)) != target.eval(sub)) return false;
        std::size_t i = 0;
        while (i < pat.size() && ++pat[i] == b) pat[i++] = 0;
        if (i == pat.size()) break;
    }
    return true;
}

bool EmpiricalLaw::has_exact() const {
    for (const auto& [k, w] : entries)
        if (!w.exact) return false;
    return true;
}

double EmpiricalLaw::total() const {
    double t = 0.0;
    for (const auto& [k, w] : entries) t += w.value;
    return t;
}

std::vector<LawWeight> EmpiricalLaw::marginal(std::size_t slot_index) const {
    std::vector<LawWeight> out(codomain_size);
    bool exact = has_exact();
    for (auto& w : out)
        if (exact) w.exact = Rational(0);
    for (const auto& [pat, w] : entries) {
        auto& slot = out[pat[slot_index]];
        slot.value += w.value;
        if (exact) slot.exact = *slot.exact + *w.exact;
    }
    return out;
}

EmpiricalLaw EmpiricalLaw::pushforward(const Refinement& rho, std::size_t target_codomain) const {
    EmpiricalLaw out;
    out.slots = slots;
    out.codomain_size = target_codomain;
    for (const auto& [pat, w] : entries) {
        std::vector<std::uint8_t> mapped(pat.size());
        for (std::size_t i = 0; i < pat.size(); ++i) mapped[i] = rho(pat[i]);
        auto& slot = out.entries[mapped];
        slot.value += w.value;
        if (w.exact) {
            if (!slot.exact) slot.exact = Rational(0);
            slot.exact = *slot.exact + *w.exact;
        }
    }
    return out;
}

double l1_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    double dist = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() || ib != b.entries.end()) {
        if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
            dist += std::fabs(ia->second.value);
            ++ia;
        } else if (ia == a.entries.end() || ib->first < ia->first) {
            dist += std::fabs(ib->second.value);
            ++ib;
        } else {
            dist += std::fabs(ia->second.value - ib->second.value);
            ++ia;
            ++ib;
        }
    }
    return dist;
}

std::optional<Rational> l1_distance_exact(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    if (!a.has_exact() || !b.has_exact()) return std::nullopt;
    Rational dist(0);
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() || ib != b.entries.end()) {
        if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
            dist += ia->second.exact->abs();
            ++ia;
        } else if (ia == a.entries.end() || ib->first < ia->first) {
            dist += ib->second.exact->abs();
            ++ib;
        } else {
            dist += (*ia->second.exact - *ib->second.exact).abs();
            ++ia;
            ++ib;
        }
    }
    return dist;
}

namespace {

struct CoordinatePlan {
    std::vector<GroupElement> coords;              // distinct, canonical order
    // reads[f][w] = index into coords of the coordinate read by slot f, window position w.
    std::vector<std::vector<std::size_t>> reads;
};

CoordinatePlan plan_coordinates(const ShiftSystem& sys, const Observable& alpha,
                                const std::vector<GroupElement>& F) {
    const Group& G = sys.group();
    CoordinatePlan plan;
    std::map<GroupElement, std::size_t> index;
    plan.reads.resize(F.size());
    for (std::size_t fi = 0; fi < F.size(); ++fi) {
        G.validate(F[fi]);
        GroupElement hinv = G.inv(F[fi]);
        for (const auto& w : alpha.window) {
            GroupElement c = G.mul(w, hinv);
            auto [it, inserted] = index.try_emplace(c, plan.coords.size());
            if (inserted) plan.coords.push_back(c);
            plan.reads[fi].push_back(it->second);
        }
    }
    return plan;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (v > cap / base) return cap + 1;
        v *= base;
    }
    return v;
}

// One accumulated law per enumeration chunk, merged in chunk order so the
// result is independent of thread count.
using LawMap = std::map<std::vector<std::uint8_t>, LawWeight>;

void merge_into(LawMap& into, const LawMap& from) {
    for (const auto& [pat, w] : from) {
        auto& slot = into[pat];
        slot.value += w.value;
        if (w.exact) {
            if (!slot.exact) slot.exact = Rational(0);
            slot.exact = *slot.exact + *w.exact;
        }
    }
}

} // namespace

EmpiricalLaw law(const ShiftSystem& sys, const Observable& alpha,
                 const std::vector<GroupElement>& F, const LawOptions& opts) {
    alpha.validate();
    if (alpha.base_size != sys.alphabet().size())
        throw std::invalid_argument("observable reads a different base alphabet");
    if (F.empty()) throw std::invalid_argument("empty slot list F");

    CoordinatePlan plan = plan_coordinates(sys, alpha, F);
    std::size_t b = sys.alphabet().size();
    bool exact = opts.mode == LawMode::Exact;

    // Markov laws integrate over the full spanned interval.
    std::vector<std::size_t> coord_of_cell;  // enumeration cell -> coords index (or npos)
    std::size_t cells;
    std::int64_t lo = 0;
    if (sys.is_markov()) {
        if (sys.group().kind() != GroupKind::Integers)
            throw std::invalid_argument("Markov base laws require group Z");
        std::int64_t hi = plan.coords[0].data[0];
        lo = hi;
        for (const auto& c : plan.coords) {
            lo = std::min(lo, c.data[0]);
            hi = std::max(hi, c.data[0]);
        }
        cells = static_cast<std::size_t>(hi - lo + 1);
        coord_of_cell.assign(cells, static_cast<std::size_t>(-1));
        for (std::size_t ci = 0; ci < plan.coords.size(); ++ci)
            coord_of_cell[static_cast<std::size_t>(plan.coords[ci].data[0] - lo)] = ci;
    } else {
        cells = plan.coords.size();
        coord_of_cell.resize(cells);
        for (std::size_t ci = 0; ci < cells; ++ci) coord_of_cell[ci] = ci;
    }

    if (exact && cells > opts.exact_coordinate_cap)
        throw BudgetExceeded("exact law: coordinate set exceeds the exact-mode cap (" +
                             std::to_string(cells) + " > " +
                             std::to_string(opts.exact_coordinate_cap) + ")");
    std::uint64_t total = checked_pow(b, cells, opts.budget);
    if (total > opts.budget)
        throw BudgetExceeded("law enumeration budget exceeded: |B|^" + std::to_string(cells));

    std::size_t n_chunks = 1;
    std::uint64_t chunk_size = total;
    if (total >= 128) {
        n_chunks = 64;
        chunk_size = (total + n_chunks - 1) / n_chunks;
    }

    std::vector<LawMap> partial(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t chunk) {
        std::uint64_t begin = chunk * chunk_size;
        std::uint64_t end = std::min(total, begin + chunk_size);
        if (begin >= end) return;
        std::vector<std::uint8_t> assign(cells, 0);
        {
            std::uint64_t rest = begin;
            for (std::size_t i = 0; i < cells; ++i) {
                assign[i] = static_cast<std::uint8_t>(rest % b);
                rest /= b;
            }
        }
        LawMap& local = partial[chunk];
        std::vector<std::uint8_t> coord_val(plan.coords.size(), 0);
        std::vector<std::uint8_t> window_pat;
        std::vector<std::uint8_t> pattern(F.size(), 0);
        for (std::uint64_t n = begin; n < end; ++n) {
            for (std::size_t i = 0; i < cells; ++i)
                if (coord_of_cell[i] != static_cast<std::size_t>(-1))
                    coord_val[coord_of_cell[i]] = assign[i];

            Rational wr(1);
            double wd = 1.0;
            if (sys.is_markov()) {
                if (exact) {
                    wr = sys.letter_law()[assign[0]];
                    for (std::size_t i = 0; i + 1 < cells; ++i)
                        wr *= sys.transition()[assign[i]][assign[i + 1]];
                } else {
                    wd = sys.letter_law()[assign[0]].to_double();
                    for (std::size_t i = 0; i + 1 < cells; ++i)
                        wd *= sys.transition()[assign[i]][assign[i + 1]].to_double();
                }
            } else {
                if (exact) {
                    for (std::size_t i = 0; i < cells; ++i) wr *= sys.iid_probs()[assign[i]];
                } else {
                    for (std::size_t i = 0; i < cells; ++i) wd *= sys.iid_probs()[assign[i]].to_double();
                }
            }

            for (std::size_t fi = 0; fi < F.size(); ++fi) {
                window_pat.clear();
                for (std::size_t wi : plan.reads[fi]) window_pat.push_back(coord_val[wi]);
                pattern[fi] = alpha.eval(window_pat);
            }
            auto& slot = local[pattern];
            if (exact) {
                if (!slot.exact) slot.exact = Rational(0);
                slot.exact = *slot.exact + wr;
                slot.value = slot.exact->to_double();
            } else {
                slot.value += wd;
            }

            std::size_t i = 0;
            while (i < cells && ++assign[i] == b) assign[i++] = 0;
        }
    });

    EmpiricalLaw out;
    out.slots = F;
    out.codomain_size = alpha.codomain.size();
    for (auto& p : partial) merge_into(out.entries, p);
    if (exact)
        for (auto& [pat, w] : out.entries) w.value = w.exact->to_double();
    return out;
}

JoinResult join(const ShiftSystem& sys, const Observable& left, const Observable& right,
                bool keep_unreachable) {
    left.validate();
    right.validate();
    if (left.base_size != right.base_size || left.base_size != sys.alphabet().size())
        throw std::invalid_argument("join of observables over different base alphabets");

    std::vector<GroupElement> window = left.window;
    for (const auto& w : right.window)
        if (std::find(window.begin(), window.end(), w) == window.end()) window.push_back(w);
    std::sort(window.begin(), window.end());

    std::vector<std::size_t> pos_left, pos_right;
    for (const auto& w : left.window)
        pos_left.push_back(static_cast<std::size_t>(
            std::find(window.begin(), window.end(), w) - window.begin()));
    for (const auto& w : right.window)
        pos_right.push_back(static_cast<std::size_t>(
            std::find(window.begin(), window.end(), w) - window.begin()));

    std::size_t b = left.base_size;
    std::size_t table_size = 1;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (table_size > (std::size_t(1) << 24))
            throw BudgetExceeded("join window too large");
        table_size *= b;
    }

    std::size_t na = left.codomain.size(), nb = right.codomain.size();
    std::vector<std::pair<std::uint8_t, std::uint8_t>> raw(table_size);
    std::vector<bool> pair_seen(na * nb, false);
    std::vector<std::uint8_t> pat(window.size(), 0), pl(left.window.size()), pr(right.window.size());
    for (std::size_t idx = 0;; ++idx) {
        for (std::size_t i = 0; i < pos_left.size(); ++i) pl[i] = pat[pos_left[i]];
        for (std::size_t i = 0; i < pos_right.size(); ++i) pr[i] = pat[pos_right[i]];
        std::uint8_t a = left.eval(pl), c = right.eval(pr);
        raw[idx] = {a, c};
        pair_seen[a * nb + c] = true;
        std::size_t i = 0;
        while (i < pat.size() && ++pat[i] == b) pat[i++] = 0;
        if (i == pat.size()) break;
    }

    // Codomain: pairs in lexicographic order, dropped to the reachable set by default.
    std::vector<std::int32_t> pair_index(na * nb, -1);
    JoinResult out;
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t c = 0; c < nb; ++c) {
            if (!keep_unreachable && !pair_seen[a * nb + c]) continue;
            pair_index[a * nb + c] = static_cast<std::int32_t>(out.joint.codomain.letters.size());
            out.joint.codomain.letters.push_back("(" + left.codomain.letters[a] + "," +
                                                 right.codomain.letters[c] + ")");
            out.to_left.map.push_back(static_cast<std::uint8_t>(a));
            out.to_right.map.push_back(static_cast<std::uint8_t>(c));
        }
    }
    if (out.joint.codomain.size() > 255) throw std::invalid_argument("join codomain too large");

    out.joint.window = window;
    out.joint.base_size = b;
    out.joint.allow_unreachable = keep_unreachable;
    out.joint.table.resize(table_size);
    for (std::size_t idx = 0; idx < table_size; ++idx) {
        auto [a, c] = raw[idx];
        out.joint.table[idx] = static_cast<std::uint8_t>(pair_index[a * nb + c]);
    }
    out.joint.validate();
    return out;
}

Observable translate(const ShiftSystem& sys, const Observable& alpha, const GroupElement& g) {
    alpha.validate();
    const Group& G = sys.group();
    G.validate(g);
    GroupElement ginv = G.inv(g);
    Observable out = alpha;
    for (auto& w : out.window) w = G.mul(w, ginv);
    return out;
}

} // namespace sofic
