#include "soficlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "soficlab/parallel.hpp"

namespace sofic {

namespace {

using i128 = __int128;

i128 iabs(i128 v) { return v < 0 ? -v : v; }

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    std::int64_t g = std::gcd(a, b);
    i128 l = i128(a) / g * b;
    if (l > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("joint law denominators too large for exact counting");
    return static_cast<std::int64_t>(l);
}

} // namespace

Rational JointLaw::row_sum(std::size_t a) const {
    Rational s(0);
    for (const auto& v : p[a]) s += v;
    return s;
}

Rational JointLaw::col_sum(std::size_t b) const {
    Rational s(0);
    for (const auto& row : p) s += row[b];
    return s;
}

void JointLaw::validate() const {
    if (p.empty() || p[0].empty()) throw std::invalid_argument("empty joint law");
    Rational total(0);
    for (const auto& row : p) {
        if (row.size() != p[0].size()) throw std::invalid_argument("ragged joint law");
        for (const auto& v : row) {
            if (v.is_negative()) throw std::invalid_argument("negative joint mass");
            total += v;
        }
    }
    if (total != Rational(1)) throw std::invalid_argument("joint law mass is not 1");
}

std::int64_t TypeVector::total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

void TypeVector::validate(std::int64_t n) const {
    for (auto c : counts)
        if (c < 0) throw std::invalid_argument("negative type count");
    if (total() != n) throw std::invalid_argument("type does not sum to n");
}

double shannon(const std::vector<double>& p) {
    double sum = 0.0, h = 0.0;
    for (double v : p) {
        if (v < 0.0) throw std::invalid_argument("negative probability");
        sum += v;
        if (v > 0.0) h -= v * std::log(v);
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");
    return h;
}

double shannon(const std::vector<Rational>& p) {
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) d[i] = p[i].to_double();
    return shannon(d);
}

double cond_shannon(const JointLaw& joint) {
    joint.validate();
    double h = 0.0;
    for (std::size_t b = 0; b < joint.cols(); ++b) {
        double col = joint.col_sum(b).to_double();
        if (col <= 0.0) continue;
        for (std::size_t a = 0; a < joint.rows(); ++a) {
            double v = joint.p[a][b].to_double();
            if (v > 0.0) h -= v * std::log(v / col);
        }
    }
    return h;
}

namespace {

// Scaled integer view of a joint law: N[a][b] over common denominator D,
// with delta = dn/dd. The l1 ball |M/n - P| < delta becomes
//   dd * sum |M_ab D - N_ab n| < dn * n * D.
struct ScaledBall {
    std::vector<std::vector<std::int64_t>> N;
    std::int64_t D = 1;
    std::int64_t dn = 0, dd = 1;
    std::int64_t n = 0;

    i128 threshold() const { return i128(dn) * n * D; }
    bool inside(i128 scaled_l1) const { return i128(dd) * scaled_l1 < threshold(); }
};

ScaledBall scale_ball(const JointLaw& joint, const Rational& delta, std::int64_t n) {
    ScaledBall s;
    s.n = n;
    s.dn = delta.num;
    s.dd = delta.den;
    for (const auto& row : joint.p)
        for (const auto& v : row) s.D = lcm_checked(s.D, v.den);
    s.N.resize(joint.rows(), std::vector<std::int64_t>(joint.cols()));
    for (std::size_t a = 0; a < joint.rows(); ++a)
        for (std::size_t b = 0; b < joint.cols(); ++b)
            s.N[a][b] = joint.p[a][b].num * (s.D / joint.p[a][b].den);
    return s;
}

// Sum over column-b fillings (m_0..m_{A-1} >= 0, sum = psi_b) of
// multinomial(psi_b; m) subject to the running l1 budget; recursion carries
// the product of the earlier columns.
struct XiEnumerator {
    const ScaledBall& ball;
    const std::vector<std::int64_t>& psi;
    std::size_t A, B;
    // Lower bound on the l1 contribution of untouched columns:
    // |psi_b D - n * colsum_b| by the triangle inequality.
    std::vector<i128> col_lb_suffix;

    XiEnumerator(const ScaledBall& s, const std::vector<std::int64_t>& psi_counts)
        : ball(s), psi(psi_counts), A(s.N.size()), B(s.N[0].size()) {
        std::vector<i128> col_lb(B, 0);
        for (std::size_t b = 0; b < B; ++b) {
            i128 colsum = 0;
            for (std::size_t a = 0; a < A; ++a) colsum += s.N[a][b];
            col_lb[b] = iabs(i128(psi[b]) * s.D - colsum * s.n);
        }
        col_lb_suffix.assign(B + 1, 0);
        for (std::size_t b = B; b-- > 0;) col_lb_suffix[b] = col_lb_suffix[b + 1] + col_lb[b];
    }

    // DFS over rows a of column b; `left` letters remain to place.
    BigUint column_fill(std::size_t b, std::size_t a, std::int64_t left, i128 partial,
                        const BigUint& factor) {
        if (a + 1 == A) {
            i128 contrib = partial + iabs(i128(left) * ball.D - i128(ball.N[a][b]) * ball.n);
            if (!ball.inside(contrib + col_lb_suffix[b + 1])) return BigUint();
            return columns(b + 1, contrib, factor);
        }
        BigUint sum;
        BigUint choose(1); // C(left, m), built incrementally over m
        i128 rest_target = 0;
        for (std::size_t r = a + 1; r < A; ++r) rest_target += ball.N[r][b];
        for (std::int64_t m = 0; m <= left; ++m) {
            if (m > 0) {
                choose *= static_cast<std::uint64_t>(left - m + 1);
                choose.divexact(static_cast<std::uint64_t>(m));
            }
            i128 here = partial + iabs(i128(m) * ball.D - i128(ball.N[a][b]) * ball.n);
            // The later rows of this column cannot beat the triangle bound on
            // their leftover mass.
            i128 rest_lb = iabs(i128(left - m) * ball.D - rest_target * ball.n);
            if (ball.inside(here + rest_lb + col_lb_suffix[b + 1]))
                sum += column_fill(b, a + 1, left - m, here, factor * choose);
        }
        return sum;
    }

    BigUint columns(std::size_t b, i128 partial, const BigUint& factor) {
        if (b == B) return factor;
        return column_fill(b, 0, psi[b], partial, factor);
    }

    BigUint total() { return columns(0, 0, BigUint(1)); }
};

} // namespace

BigUint xi_count(const JointLaw& joint, const Rational& delta, std::int64_t n,
                 const TypeVector& psi_type) {
    joint.validate();
    if (!(delta > Rational(0))) throw std::invalid_argument("delta must be positive");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (psi_type.counts.size() != joint.cols())
        throw std::invalid_argument("psi type arity does not match the joint law");
    psi_type.validate(n);

    ScaledBall ball = scale_ball(joint, delta, n);

    // Parallelize over the first column's top-row count; merge by addition in
    // index order.
    std::int64_t first = psi_type.counts[0];
    if (joint.rows() == 1) {
        XiEnumerator e(ball, psi_type.counts);
        return e.total();
    }
    std::size_t n_chunks = static_cast<std::size_t>(first) + 1;
    std::vector<BigUint> parts(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t chunk) {
        XiEnumerator e(ball, psi_type.counts);
        std::int64_t m = static_cast<std::int64_t>(chunk);
        BigUint choose = BigUint::binomial(static_cast<unsigned>(first), static_cast<unsigned>(m));
        i128 here = iabs(i128(m) * ball.D - i128(ball.N[0][0]) * ball.n);
        i128 rest_target = 0;
        for (std::size_t r = 1; r < e.A; ++r) rest_target += ball.N[r][0];
        i128 rest_lb = iabs(i128(first - m) * ball.D - rest_target * ball.n);
        if (!ball.inside(here + rest_lb + e.col_lb_suffix[1])) return;
        parts[chunk] = e.column_fill(0, 1, first - m, here, choose);
    });
    BigUint sum;
    for (auto& p : parts) sum += p;
    return sum;
}

RateValue RateValue::of_log_count(double log_count, std::int64_t scale) {
    RateValue r;
    if (std::isinf(log_count) && log_count < 0) {
        r.neg_inf = true;
        r.value = -std::numeric_limits<double>::infinity();
    } else {
        r.value = log_count / static_cast<double>(scale);
    }
    return r;
}

RateValue RateValue::minus_infinity() {
    RateValue r;
    r.neg_inf = true;
    r.value = -std::numeric_limits<double>::infinity();
    return r;
}

std::vector<Rational> default_delta_schedule() {
    std::vector<Rational> out;
    for (int k = 0; k <= 6; ++k) out.push_back(Rational(2, std::int64_t(1) << k));
    return out;
}

namespace {

void enumerate_types(std::int64_t n, std::size_t parts, std::vector<std::int64_t>& scratch,
                     std::size_t at, std::int64_t left,
                     const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    if (at + 1 == parts) {
        scratch[at] = left;
        fn(scratch);
        return;
    }
    for (std::int64_t c = 0; c <= left; ++c) {
        scratch[at] = c;
        enumerate_types(n, parts, scratch, at + 1, left - c, fn);
    }
}

} // namespace

StirlingReport stirling_curve(const JointLaw& joint, const std::vector<std::int64_t>& n_list,
                              const std::vector<Rational>& delta_list) {
    joint.validate();
    StirlingReport report;
    std::int64_t largest_n = 0;
    for (auto n : n_list) largest_n = std::max(largest_n, n);

    for (auto n : n_list) {
        for (const auto& delta : delta_list) {
            ScaledBall ball = scale_ball(joint, delta, n);
            StirlingRow row;
            row.n = n;
            row.delta = delta;
            row.sup_rate = RateValue::minus_infinity();

            std::vector<std::int64_t> scratch(joint.cols(), 0);
            enumerate_types(n, joint.cols(), scratch, 0, n, [&](const std::vector<std::int64_t>& c) {
                // Necessary marginal bound: the column marginal of any matrix in
                // the ball is within delta of the law's column marginal.
                i128 marg = 0;
                for (std::size_t b = 0; b < joint.cols(); ++b) {
                    i128 colsum = 0;
                    for (std::size_t a = 0; a < joint.rows(); ++a) colsum += ball.N[a][b];
                    marg += iabs(i128(c[b]) * ball.D - colsum * n);
                }
                if (!ball.inside(marg)) return;
                TypeVector psi{c};
                BigUint count = xi_count(joint, delta, n, psi);
                if (count.is_zero()) return;
                ++row.admissible_types;
                double rate = count.log() / static_cast<double>(n);
                if (row.sup_rate.neg_inf || rate > row.sup_rate.value) {
                    row.sup_rate = RateValue{rate, false};
                    row.argmax_type = c;
                }
            });
            report.rows.push_back(std::move(row));
        }
    }

    RateValue running = RateValue{std::numeric_limits<double>::infinity(), false};
    bool have = false;
    for (const auto& delta : delta_list) {
        for (const auto& row : report.rows) {
            if (row.n != largest_n || !(row.delta == delta)) continue;
            if (row.sup_rate.neg_inf) {
                running = RateValue::minus_infinity();
            } else if (!have || row.sup_rate.value < running.value) {
                running = row.sup_rate;
            }
            have = true;
            report.inf_over_delta.emplace_back(delta, running);
        }
    }
    return report;
}

FiniteLevelResult h_finite_level(const ShiftSystem& sys, const Observable& gamma,
                                 const Refinement& rho_alpha, const Refinement& rho_beta,
                                 const std::vector<GroupElement>& F, const Rational& delta,
                                 const SoficApprox& sigma, const LawOptions& law_opts,
                                 std::uint64_t budget) {
    APQuery q = APQuery::make(sys, gamma, F, delta, sigma, law_opts);
    q.budget = budget;
    auto sup = rel_ap_sup(q, rho_alpha, rho_beta);
    FiniteLevelResult out;
    if (!sup || sup->sup == 0) {
        out.rate = RateValue::minus_infinity();
        return out;
    }
    out.sup_count = sup->sup;
    out.base_count = sup->base_count;
    out.argmax = sup->argmax;
    out.rate = RateValue{std::log(static_cast<double>(sup->sup)) / static_cast<double>(sigma.size()),
                         false};
    return out;
}

LevelRates h_liminf_level(const ShiftSystem& sys, const Observable& gamma,
                          const Refinement& rho_alpha, const std::vector<GroupElement>& F,
                          const Rational& delta, const std::vector<SoficApprox>& sigmas,
                          const LawOptions& law_opts, std::uint64_t budget) {
    if (sigmas.empty()) throw std::invalid_argument("need at least one model size");
    LevelRates out;
    for (const auto& sigma : sigmas) {
        APQuery q = APQuery::make(sys, gamma, F, delta, sigma, law_opts);
        q.budget = budget;
        std::uint64_t count = presence_count(q, rho_alpha);
        LevelRatesRow row;
        row.d = sigma.size();
        row.count = count;
        row.rate = count == 0 ? RateValue::minus_infinity()
                              : RateValue{std::log(static_cast<double>(count)) /
                                              static_cast<double>(sigma.size()),
                                          false};
        out.rows.push_back(row);
    }
    // liminf/limsup proxies over the tail half of the size list.
    std::size_t tail_begin = out.rows.size() / 2;
    if (tail_begin == out.rows.size()) tail_begin = out.rows.size() - 1;
    out.tail_min = RateValue{std::numeric_limits<double>::infinity(), false};
    out.tail_max = RateValue::minus_infinity();
    for (std::size_t i = tail_begin; i < out.rows.size(); ++i) {
        const auto& r = out.rows[i].rate;
        if (r.neg_inf) {
            out.tail_min = RateValue::minus_infinity();
        } else {
            if (!out.tail_min.neg_inf) out.tail_min.value = std::min(out.tail_min.value, r.value);
            if (out.tail_max.neg_inf || r.value > out.tail_max.value) out.tail_max = r;
        }
    }
    return out;
}

} // namespace sofic
