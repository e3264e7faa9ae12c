// Integer group-ring elements f in M_n(Z(G)) for abelian G, their convolution
// operators on finite quotients, and finite-quotient spectral evidence for
// invertibility of lambda(f): per-quotient minimum singular values with a
// bounded-below / decaying-to-zero trend summary. The l1 dominance test
// sum |a_x| < |b| is a sufficient condition for invertibility.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "soficlab/group.hpp"

namespace sofic {

struct GroupRingElement {
    Group group = Group::integers();
    std::size_t n = 1;  // matrix size over the group ring
    // entries[l][s] = finitely supported map G -> Z for row l, column s.
    std::vector<std::vector<std::map<GroupElement, std::int64_t>>> entries;

    static GroupRingElement scalar(Group g, std::size_t n);
    GroupRingElement& add_term(std::size_t l, std::size_t s, const GroupElement& x,
                               std::int64_t coeff);
    void validate() const;

    // Ring product (abelian support convolution), n x n times n x n.
    GroupRingElement operator*(const GroupRingElement& other) const;
};

struct L1Report {
    bool dominant = false;       // strict inequality holds
    double identity_coeff = 0.0; // |b| (min over rows for n > 1)
    double tail_sum = 0.0;       // sum |a_x| (max over rows for n > 1)
};

// Scalar presentation f = b e - sum a_x x (n = 1), or row-wise diagonal
// dominance for n > 1: every row needs |f_ll(e)| > sum of all other
// coefficient magnitudes in the row. True implies lambda(f) invertible.
L1Report l1_condition(const GroupRingElement& f);

struct QuotientOperator {
    std::vector<std::int64_t> moduli;
    std::size_t dim = 0;              // n * prod(moduli)
    std::vector<double> matrix;       // row-major, integer entries
};

// The convolution matrix of lambda(f) on C[G_k]^n for the finite abelian
// quotient; supports reduce mod the moduli, collisions are summed.
QuotientOperator quotient_matrix(const GroupRingElement& f,
                                 const std::vector<std::int64_t>& moduli);

struct SpectralOptions {
    std::size_t dim_budget = 2048;
};

double min_singular_value(const QuotientOperator& op);

struct SpectralRow {
    std::vector<std::int64_t> moduli;
    std::size_t dim = 0;
    double min_sv = 0.0;
};

struct SpectralReport {
    std::vector<SpectralRow> rows;
    // Weakly decreasing along the list and small at the end => "decaying";
    // min over the list well above zero => "bounded".
    std::string trend;  // "bounded" | "decaying" | "mixed"
    double final_value = 0.0;
    double min_value = 0.0;
};

SpectralReport spectral_evidence(const GroupRingElement& f,
                                 const std::vector<std::vector<std::int64_t>>& quotients,
                                 const SpectralOptions& opts = {});

} // namespace sofic
