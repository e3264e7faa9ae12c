#include "support/oracles.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace oracle {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Odometer over letters^cells; returns false after the last pattern.
bool advance(std::vector<std::uint8_t>& v, std::size_t letters) {
    std::size_t i = 0;
    while (i < v.size() && ++v[i] == letters) v[i++] = 0;
    return i < v.size();
}

std::uint8_t table_eval(const Instance& inst, const std::vector<std::uint8_t>& window_pattern) {
    std::size_t idx = 0, stride = 1;
    for (std::size_t i = 0; i < inst.window.size(); ++i) {
        idx += window_pattern[i] * stride;
        stride *= inst.base_size;
    }
    return inst.table[idx];
}

} // namespace

Law target_law(const Instance& inst) {
    // Coordinates read by slot h at window offset w: w - h.
    std::vector<std::int64_t> coords;
    for (auto h : inst.F)
        for (auto w : inst.window)
            if (std::find(coords.begin(), coords.end(), w - h) == coords.end())
                coords.push_back(w - h);

    Law law;
    std::vector<std::uint8_t> assign(coords.size(), 0);
    do {
        sofic::Rational weight(1);
        for (auto v : assign) weight *= inst.base_probs[v];
        Pattern pat(inst.F.size());
        std::vector<std::uint8_t> wp(inst.window.size());
        for (std::size_t fi = 0; fi < inst.F.size(); ++fi) {
            for (std::size_t wi = 0; wi < inst.window.size(); ++wi) {
                std::int64_t coord = inst.window[wi] - inst.F[fi];
                std::size_t ci = static_cast<std::size_t>(
                    std::find(coords.begin(), coords.end(), coord) - coords.begin());
                wp[wi] = assign[ci];
            }
            pat[fi] = table_eval(inst, wp);
        }
        auto [it, fresh] = law.try_emplace(pat, weight);
        if (!fresh) it->second += weight;
    } while (advance(assign, inst.base_size));
    return law;
}

Law empirical_law(const Instance& inst, const std::vector<std::uint8_t>& phi) {
    Law law;
    sofic::Rational unit(1, inst.d);
    for (std::int64_t j = 0; j < inst.d; ++j) {
        Pattern pat(inst.F.size());
        // sigma(g)^{-1}(j) = j - g mod d for the cyclic rotation model.
        for (std::size_t fi = 0; fi < inst.F.size(); ++fi)
            pat[fi] = phi[mod(j - inst.F[fi], inst.d)];
        auto [it, fresh] = law.try_emplace(pat, unit);
        if (!fresh) it->second += unit;
    }
    return law;
}

sofic::Rational l1(const Law& a, const Law& b) {
    sofic::Rational dist(0);
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            dist += ia->second.abs();
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            dist += ib->second.abs();
            ++ib;
        } else {
            dist += (ia->second - ib->second).abs();
            ++ia;
            ++ib;
        }
    }
    return dist;
}

bool member(const Instance& inst, const std::vector<std::uint8_t>& phi, const Law& target) {
    // Membership goes through the codomain-valued empirical pattern law of
    // phi itself (phi is already a labeling by the observable's codomain).
    Law emp;
    sofic::Rational unit(1, inst.d);
    for (std::int64_t j = 0; j < inst.d; ++j) {
        Pattern pat(inst.F.size());
        for (std::size_t fi = 0; fi < inst.F.size(); ++fi)
            pat[fi] = phi[mod(j - inst.F[fi], inst.d)];
        auto [it, fresh] = emp.try_emplace(pat, unit);
        if (!fresh) it->second += unit;
    }
    return l1(emp, target) < inst.delta;
}

std::uint64_t ap_count(const Instance& inst) {
    Law target = target_law(inst);
    std::vector<std::uint8_t> phi(inst.d, 0);
    std::uint64_t count = 0;
    do {
        if (member(inst, phi, target)) ++count;
    } while (advance(phi, inst.codomain));
    return count;
}

RelData rel_data(const Instance& gamma_inst, const std::vector<std::uint8_t>& rho_A,
                 const std::vector<std::uint8_t>& rho_B) {
    Law target = target_law(gamma_inst);
    RelData out;
    std::vector<std::uint8_t> phi(gamma_inst.d, 0);
    do {
        if (!member(gamma_inst, phi, target)) continue;
        std::vector<std::uint8_t> psi(phi.size()), proj(phi.size());
        for (std::size_t j = 0; j < phi.size(); ++j) {
            psi[j] = rho_B[phi[j]];
            proj[j] = rho_A[phi[j]];
        }
        out.fibers[psi].insert(proj);
    } while (advance(phi, gamma_inst.codomain));
    for (const auto& [psi, projections] : out.fibers) {
        if (projections.size() > out.sup) {
            out.sup = projections.size();
            out.argmax = psi;
        }
    }
    return out;
}

sofic::BigUint xi_brute(const std::vector<std::vector<sofic::Rational>>& joint,
                        const sofic::Rational& delta, std::int64_t n,
                        const std::vector<std::uint8_t>& psi) {
    std::size_t A = joint.size();
    if (static_cast<std::int64_t>(psi.size()) != n) throw std::invalid_argument("psi length");
    sofic::BigUint count;
    std::vector<std::uint8_t> phi(n, 0);
    do {
        // Joint empirical law of (phi, psi) against the joint law, l1.
        std::map<std::pair<std::uint8_t, std::uint8_t>, std::int64_t> tally;
        for (std::int64_t i = 0; i < n; ++i) ++tally[{phi[i], psi[i]}];
        sofic::Rational dist(0);
        for (std::size_t a = 0; a < A; ++a)
            for (std::size_t b = 0; b < joint[a].size(); ++b) {
                auto it = tally.find({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)});
                sofic::Rational emp =
                    it == tally.end() ? sofic::Rational(0) : sofic::Rational(it->second, n);
                dist += (emp - joint[a][b]).abs();
            }
        if (dist < delta) count += sofic::BigUint(1);
    } while (advance(phi, A));
    return count;
}

sofic::BigUint xi_joint_total(const std::vector<std::vector<sofic::Rational>>& joint,
                              const sofic::Rational& delta, std::int64_t n) {
    std::size_t A = joint.size(), B = joint[0].size();
    std::size_t cells = A * B;
    sofic::BigUint total;
    // Enumerate occupation matrices M with sum n.
    std::vector<std::int64_t> m(cells, 0);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t at, std::int64_t left) {
        if (at + 1 == cells) {
            m[at] = left;
            sofic::Rational dist(0);
            for (std::size_t a = 0; a < A; ++a)
                for (std::size_t b = 0; b < B; ++b)
                    dist += (sofic::Rational(m[a * B + b], n) - joint[a][b]).abs();
            if (dist < delta) {
                std::vector<unsigned> parts;
                for (auto v : m) parts.push_back(static_cast<unsigned>(v));
                total += sofic::BigUint::multinomial(static_cast<unsigned>(n), parts);
            }
            return;
        }
        for (std::int64_t v = 0; v <= left; ++v) {
            m[at] = v;
            rec(at + 1, left - v);
        }
    };
    rec(0, n);
    return total;
}

} // namespace oracle
