#include "soficlab/group_ring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "soficlab/parallel.hpp"
#include "soficlab/systems.hpp"

namespace sofic {

GroupRingElement GroupRingElement::scalar(Group g, std::size_t n) {
    if (n == 0) throw std::invalid_argument("matrix size must be >= 1");
    GroupRingElement f;
    f.group = std::move(g);
    f.n = n;
    f.entries.assign(n, std::vector<std::map<GroupElement, std::int64_t>>(n));
    return f;
}

GroupRingElement& GroupRingElement::add_term(std::size_t l, std::size_t s, const GroupElement& x,
                                             std::int64_t coeff) {
    group.validate(x);
    auto key = group.normalized(x);
    auto& cell = entries.at(l).at(s);
    cell[key] += coeff;
    if (cell[key] == 0) cell.erase(key);
    return *this;
}

void GroupRingElement::validate() const {
    if (entries.size() != n) throw std::invalid_argument("ragged group-ring matrix");
    for (const auto& row : entries) {
        if (row.size() != n) throw std::invalid_argument("ragged group-ring matrix");
        for (const auto& cell : row)
            for (const auto& [x, c] : cell) group.validate(x);
    }
}

GroupRingElement GroupRingElement::operator*(const GroupRingElement& other) const {
    if (!(group == other.group) || n != other.n)
        throw std::invalid_argument("group-ring product shape mismatch");
    if (group.kind() == GroupKind::Free)
        throw std::invalid_argument("ring product implemented for abelian supports");
    GroupRingElement out = scalar(group, n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t mid = 0; mid < n; ++mid)
                for (const auto& [x, cx] : entries[l][mid])
                    for (const auto& [y, cy] : other.entries[mid][s])
                        out.add_term(l, s, group.mul(x, y), cx * cy);
    return out;
}

L1Report l1_condition(const GroupRingElement& f) {
    f.validate();
    const GroupElement e = f.group.identity();
    L1Report report;
    report.dominant = true;
    bool first = true;
    for (std::size_t l = 0; l < f.n; ++l) {
        double diag = 0.0, tail = 0.0;
        for (std::size_t s = 0; s < f.n; ++s) {
            for (const auto& [x, c] : f.entries[l][s]) {
                if (s == l && f.group.normalized(x) == e)
                    diag = std::fabs(static_cast<double>(c));
                else
                    tail += std::fabs(static_cast<double>(c));
            }
        }
        if (first || diag < report.identity_coeff) report.identity_coeff = diag;
        if (first || tail > report.tail_sum) report.tail_sum = tail;
        first = false;
        if (!(tail < diag)) report.dominant = false;
    }
    return report;
}

QuotientOperator quotient_matrix(const GroupRingElement& f,
                                 const std::vector<std::int64_t>& moduli) {
    f.validate();
    GroupKind kind = f.group.kind();
    if (kind == GroupKind::Free)
        throw std::invalid_argument("quotient evidence is implemented for abelian groups only");
    std::size_t rank = static_cast<std::size_t>(f.group.rank());
    if (moduli.size() != rank) throw std::invalid_argument("quotient arity does not match the group");
    std::int64_t N = 1;
    for (auto m : moduli) {
        if (m < 1) throw std::invalid_argument("moduli must be positive");
        N *= m;
    }

    auto reduce_index = [&](const GroupElement& x) {
        std::int64_t idx = 0, stride = 1;
        for (std::size_t a = 0; a < rank; ++a) {
            std::int64_t r = x.data[a] % moduli[a];
            if (r < 0) r += moduli[a];
            idx += r * stride;
            stride *= moduli[a];
        }
        return idx;
    };
    auto index_of = [&](std::int64_t g, std::size_t l) {
        return static_cast<std::size_t>(g) + static_cast<std::size_t>(N) * l;
    };

    QuotientOperator op;
    op.moduli = moduli;
    op.dim = static_cast<std::size_t>(N) * f.n;
    op.matrix.assign(op.dim * op.dim, 0.0);

    // (lambda(f) xi)(l)(g) = sum_s sum_x fhat_ls(x) xi(s)(x^{-1} g):
    // column (s, g'), row (l, g) receive the sum of fhat_ls over {x : x^{-1}g = g'}.
    for (std::size_t l = 0; l < f.n; ++l) {
        for (std::size_t s = 0; s < f.n; ++s) {
            for (const auto& [x, c] : f.entries[l][s]) {
                std::int64_t xi = reduce_index(x);
                for (std::int64_t g = 0; g < N; ++g) {
                    // g' = x^{-1} g in mixed-radix coordinates.
                    std::int64_t gp = 0, stride = 1, rest = g, xrest = xi;
                    for (std::size_t a = 0; a < rank; ++a) {
                        std::int64_t gc = rest % moduli[a];
                        std::int64_t xc = xrest % moduli[a];
                        rest /= moduli[a];
                        xrest /= moduli[a];
                        std::int64_t diff = (gc - xc) % moduli[a];
                        if (diff < 0) diff += moduli[a];
                        gp += diff * stride;
                        stride *= moduli[a];
                    }
                    op.matrix[index_of(g, l) * op.dim + index_of(gp, s)] +=
                        static_cast<double>(c);
                }
            }
        }
    }
    return op;
}

double min_singular_value(const QuotientOperator& op) {
    using Matrix = Eigen::MatrixXd;
    std::size_t n = op.dim;
    Eigen::Map<const Matrix> a(op.matrix.data(), n, n);
    // Smallest eigenvalue of A^T A; entries are integers, so the Gram matrix
    // is exact and the eigensolver error is O(n eps ||A||^2).
    Matrix gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    double lam = solver.eigenvalues().minCoeff();
    return std::sqrt(std::max(0.0, lam));
}

SpectralReport spectral_evidence(const GroupRingElement& f,
                                 const std::vector<std::vector<std::int64_t>>& quotients,
                                 const SpectralOptions& opts) {
    if (quotients.empty()) throw std::invalid_argument("need at least one quotient");
    SpectralReport report;
    report.rows.resize(quotients.size());
    parallel_chunks(quotients.size(), [&](std::size_t i) {
        QuotientOperator op = quotient_matrix(f, quotients[i]);
        if (op.dim > opts.dim_budget)
            throw BudgetExceeded("quotient dimension " + std::to_string(op.dim) +
                                 " exceeds the SVD budget " + std::to_string(opts.dim_budget));
        report.rows[i] = {quotients[i], op.dim, min_singular_value(op)};
    });

    report.final_value = report.rows.back().min_sv;
    report.min_value = report.rows.front().min_sv;
    // Slack at the eigensolver noise floor: exact zeros come back as O(1e-6)
    // values that drift upward with dimension.
    constexpr double kNoise = 1e-5;
    bool weakly_decreasing = true;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        report.min_value = std::min(report.min_value, report.rows[i].min_sv);
        if (i + 1 < report.rows.size() &&
            report.rows[i + 1].min_sv > report.rows[i].min_sv + kNoise)
            weakly_decreasing = false;
    }
    if (weakly_decreasing && report.final_value < 0.05)
        report.trend = "decaying";
    else if (report.min_value >= 0.05)
        report.trend = "bounded";
    else
        report.trend = "mixed";
    return report;
}

} // namespace sofic
