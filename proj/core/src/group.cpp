#include "soficlab/group.hpp"

#include <algorithm>
#include <numeric>

#include "soficlab/rng.hpp"

namespace sofic {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::vector<std::int64_t> reduce_word(const std::vector<std::int64_t>& letters) {
    std::vector<std::int64_t> out;
    for (auto l : letters) {
        if (l == 0) throw std::invalid_argument("word letter 0 is not a generator");
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

} // namespace

GroupElement GroupElement::word(const std::vector<std::int64_t>& letters) {
    return {reduce_word(letters)};
}

Group Group::integers() {
    Group g;
    g.kind_ = GroupKind::Integers;
    g.rank_ = 1;
    return g;
}

Group Group::lattice(int k) {
    if (k < 1) throw std::invalid_argument("lattice rank must be >= 1");
    Group g;
    g.kind_ = GroupKind::Lattice;
    g.rank_ = k;
    return g;
}

Group Group::finite_abelian(std::vector<std::int64_t> moduli) {
    if (moduli.empty()) throw std::invalid_argument("finite abelian group needs moduli");
    for (auto m : moduli)
        if (m < 1) throw std::invalid_argument("moduli must be positive");
    Group g;
    g.kind_ = GroupKind::FiniteAbelian;
    g.rank_ = static_cast<int>(moduli.size());
    g.moduli_ = std::move(moduli);
    return g;
}

Group Group::free_group(int rank) {
    if (rank < 1) throw std::invalid_argument("free group rank must be >= 1");
    Group g;
    g.kind_ = GroupKind::Free;
    g.rank_ = rank;
    return g;
}

GroupElement Group::identity() const {
    switch (kind_) {
        case GroupKind::Integers: return GroupElement::integer(0);
        case GroupKind::Lattice:
        case GroupKind::FiniteAbelian:
            return GroupElement::vec(std::vector<std::int64_t>(rank_, 0));
        case GroupKind::Free: return GroupElement{{}};
    }
    throw std::logic_error("unreachable");
}

void Group::validate(const GroupElement& a) const {
    switch (kind_) {
        case GroupKind::Integers:
            if (a.data.size() != 1) throw GroupMismatch("expected a single integer for Z");
            return;
        case GroupKind::Lattice:
        case GroupKind::FiniteAbelian:
            if (static_cast<int>(a.data.size()) != rank_)
                throw GroupMismatch("vector arity does not match the group rank");
            return;
        case GroupKind::Free:
            for (std::size_t i = 0; i < a.data.size(); ++i) {
                auto l = a.data[i];
                if (l == 0 || std::llabs(l) > rank_)
                    throw GroupMismatch("word letter outside generator range");
                if (i + 1 < a.data.size() && a.data[i + 1] == -l)
                    throw GroupMismatch("word is not reduced");
            }
            return;
    }
}

GroupElement Group::normalized(const GroupElement& a) const {
    if (kind_ == GroupKind::FiniteAbelian) {
        GroupElement r = a;
        for (int i = 0; i < rank_; ++i) r.data[i] = floor_mod(r.data[i], moduli_[i]);
        return r;
    }
    return a;
}

GroupElement Group::mul(const GroupElement& a, const GroupElement& b) const {
    validate(a);
    validate(b);
    switch (kind_) {
        case GroupKind::Integers:
            return GroupElement::integer(a.data[0] + b.data[0]);
        case GroupKind::Lattice:
        case GroupKind::FiniteAbelian: {
            GroupElement r = a;
            for (int i = 0; i < rank_; ++i) r.data[i] += b.data[i];
            return normalized(r);
        }
        case GroupKind::Free: {
            std::vector<std::int64_t> w = a.data;
            w.insert(w.end(), b.data.begin(), b.data.end());
            return GroupElement::word(w);
        }
    }
    throw std::logic_error("unreachable");
}

GroupElement Group::inv(const GroupElement& a) const {
    validate(a);
    switch (kind_) {
        case GroupKind::Integers: return GroupElement::integer(-a.data[0]);
        case GroupKind::Lattice:
        case GroupKind::FiniteAbelian: {
            GroupElement r = a;
            for (auto& v : r.data) v = -v;
            return normalized(r);
        }
        case GroupKind::Free: {
            GroupElement r;
            r.data.reserve(a.data.size());
            for (auto it = a.data.rbegin(); it != a.data.rend(); ++it) r.data.push_back(-*it);
            return r;
        }
    }
    throw std::logic_error("unreachable");
}

bool Group::is_identity(const GroupElement& a) const {
    GroupElement n = normalized(a);
    if (kind_ == GroupKind::Free) return n.data.empty();
    return std::all_of(n.data.begin(), n.data.end(), [](std::int64_t v) { return v == 0; });
}

std::string Group::name() const {
    switch (kind_) {
        case GroupKind::Integers: return "Z";
        case GroupKind::Lattice: return "Z^" + std::to_string(rank_);
        case GroupKind::FiniteAbelian: {
            std::string s;
            for (std::size_t i = 0; i < moduli_.size(); ++i) {
                if (i) s += "x";
                s += "Z/" + std::to_string(moduli_[i]);
            }
            return s;
        }
        case GroupKind::Free: return "F_" + std::to_string(rank_);
    }
    return "?";
}

Permutation identity_permutation(std::int64_t d) {
    Permutation p(d);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

Permutation inverse_permutation(const Permutation& p) {
    Permutation q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) q[p[j]] = static_cast<std::int32_t>(j);
    return q;
}

bool is_permutation(const Permutation& p) {
    std::vector<bool> seen(p.size(), false);
    for (auto v : p) {
        if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<std::int32_t> random_permutation(std::size_t n, Rng& rng) {
    Permutation p = identity_permutation(static_cast<std::int64_t>(n));
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

SoficApprox::SoficApprox(Group g, std::int64_t d, std::vector<Permutation> gens)
    : group_(std::move(g)), d_(d), gen_perms_(std::move(gens)) {}

SoficApprox SoficApprox::cyclic(std::int64_t d) {
    if (d < 1) throw std::invalid_argument("model size must be >= 1");
    Permutation step(d);
    for (std::int64_t j = 0; j < d; ++j) step[j] = static_cast<std::int32_t>((j + 1) % d);
    SoficApprox s(Group::integers(), d, {std::move(step)});
    s.rotational_ = true;
    s.dims_ = {d};
    return s;
}

SoficApprox SoficApprox::torus(const std::vector<std::int64_t>& dims) {
    if (dims.empty()) throw std::invalid_argument("torus needs at least one dimension");
    std::int64_t d = 1;
    for (auto m : dims) {
        if (m < 1) throw std::invalid_argument("torus dimensions must be >= 1");
        d *= m;
    }
    // Mixed-radix layout: site j <-> tuple with coordinate 0 fastest.
    std::vector<Permutation> gens;
    for (std::size_t axis = 0; axis < dims.size(); ++axis) {
        Permutation p(d);
        std::int64_t stride = 1;
        for (std::size_t a = 0; a < axis; ++a) stride *= dims[a];
        for (std::int64_t j = 0; j < d; ++j) {
            std::int64_t coord = (j / stride) % dims[axis];
            std::int64_t bumped = (coord + 1) % dims[axis];
            p[j] = static_cast<std::int32_t>(j + (bumped - coord) * stride);
        }
        gens.push_back(std::move(p));
    }
    SoficApprox s(Group::lattice(static_cast<int>(dims.size())), d, std::move(gens));
    s.rotational_ = true;
    s.dims_ = dims;
    return s;
}

SoficApprox SoficApprox::regular_abelian(const std::vector<std::int64_t>& moduli) {
    SoficApprox s = torus(moduli);
    s.group_ = Group::finite_abelian(moduli);
    return s;
}

SoficApprox SoficApprox::random_free(int rank, std::int64_t d, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("model size must be >= 1");
    Group g = Group::free_group(rank);
    std::vector<Permutation> gens;
    gens.reserve(rank);
    for (int i = 0; i < rank; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        gens.push_back(random_permutation(static_cast<std::size_t>(d), rng));
    }
    return SoficApprox(std::move(g), d, std::move(gens));
}

Permutation SoficApprox::image(const GroupElement& g) const {
    group_.validate(g);
    if (rotational_) {
        // sigma(n) rotates each coordinate; exact homomorphism by construction.
        GroupElement n = group_.normalized(g);
        Permutation p(d_);
        std::vector<std::int64_t> shift(dims_.size());
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            std::int64_t v = n.data[a] % dims_[a];
            shift[a] = v < 0 ? v + dims_[a] : v;
        }
        for (std::int64_t j = 0; j < d_; ++j) {
            std::int64_t out = 0, stride = 1, rest = j;
            for (std::size_t a = 0; a < dims_.size(); ++a) {
                std::int64_t coord = rest % dims_[a];
                rest /= dims_[a];
                out += ((coord + shift[a]) % dims_[a]) * stride;
                stride *= dims_[a];
            }
            p[j] = static_cast<std::int32_t>(out);
        }
        return p;
    }
    if (group_.kind() == GroupKind::Free) {
        // Compose generator images along the reduced word,
        // sigma(l1 l2 ... lm) = sigma(l1) o sigma(l2) o ... o sigma(lm).
        Permutation p = identity_permutation(d_);
        for (auto it = g.data.rbegin(); it != g.data.rend(); ++it) {
            std::int64_t l = *it;
            const Permutation& gen = gen_perms_[static_cast<std::size_t>(std::llabs(l)) - 1];
            Permutation next(d_);
            if (l > 0) {
                for (std::int64_t j = 0; j < d_; ++j) next[j] = gen[p[j]];
            } else {
                Permutation gi = inverse_permutation(gen);
                for (std::int64_t j = 0; j < d_; ++j) next[j] = gi[p[j]];
            }
            p = std::move(next);
        }
        return p;
    }
    // Abelian model without the rotation shortcut (e.g. after conjugation):
    // compose generator powers.
    GroupElement n = group_.normalized(g);
    Permutation p = identity_permutation(d_);
    for (std::size_t a = 0; a < n.data.size(); ++a) {
        std::int64_t pw = n.data[a];
        if (pw == 0) continue;
        if (group_.kind() == GroupKind::FiniteAbelian) pw %= group_.moduli()[a];
        Permutation gen = gen_perms_[a];
        if (pw < 0) {
            gen = inverse_permutation(gen);
            pw = -pw;
        }
        for (std::int64_t t = 0; t < pw; ++t) {
            Permutation next(d_);
            for (std::int64_t j = 0; j < d_; ++j) next[j] = gen[p[j]];
            p = std::move(next);
        }
    }
    return p;
}

SoficApprox SoficApprox::conjugated(const Permutation& p) const {
    if (static_cast<std::int64_t>(p.size()) != d_ || !is_permutation(p))
        throw std::invalid_argument("conjugator must be a permutation of the model");
    Permutation pinv = inverse_permutation(p);
    std::vector<Permutation> gens;
    gens.reserve(gen_perms_.size());
    for (const auto& g : gen_perms_) {
        Permutation c(d_);
        for (std::int64_t j = 0; j < d_; ++j) c[j] = p[g[pinv[j]]];
        gens.push_back(std::move(c));
    }
    SoficApprox s(group_, d_, std::move(gens));
    return s;
}

double hom_defect(const SoficApprox& sigma, const GroupElement& g, const GroupElement& h) {
    const Group& G = sigma.group();
    Permutation pg = sigma.image(g);
    Permutation ph = sigma.image(h);
    Permutation pgh = sigma.image(G.mul(g, h));
    std::int64_t bad = 0;
    for (std::size_t j = 0; j < pg.size(); ++j)
        if (pg[ph[j]] != pgh[j]) ++bad;
    return static_cast<double>(bad) / static_cast<double>(pg.size());
}

double fix_defect(const SoficApprox& sigma, const GroupElement& g) {
    if (sigma.group().is_identity(g))
        throw std::invalid_argument("fix_defect is not defined at the identity");
    Permutation p = sigma.image(g);
    std::int64_t fixed = 0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] == static_cast<std::int32_t>(j)) ++fixed;
    return static_cast<double>(fixed) / static_cast<double>(p.size());
}

} // namespace sofic
