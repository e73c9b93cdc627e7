#include "quadrature.hpp"

#include "cbc/constants.hpp"
#include "cbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace cbc {

namespace {

constexpr double kLn10 = 2.302585092994046;

/// Significant digits a DickmanTable value is reported with.
constexpr int kTableDigits = 16;

/// Relative stability target below which an inversion is considered converged.
constexpr double kStabilityTarget = 1e-10;

void check_precision(int precision) {
    if (precision < 30) throw DomainError("precision must be at least 30 digits");
}

/// Non-decreasing tuples k_1 <= ... <= k_n in [kmin, kmax] with sum 1/k_i = 1
/// and nmin <= n <= nmax (exact rational arithmetic).
std::vector<std::vector<long>> unit_fraction_sets(long kmin, long kmax, int nmin, int nmax) {
    std::vector<std::vector<long>> out;
    std::vector<long> cur;
    // Remaining fraction num/den to be written as a sum of unit fractions.
    auto rec = [&](auto&& self, long num, long den, long from) -> void {
        if (num == 0) {
            if (static_cast<int>(cur.size()) >= nmin) out.push_back(cur);
            return;
        }
        const int left = nmax - static_cast<int>(cur.size());
        if (left <= 0) return;
        // Need 1/k <= num/den (k >= den/num) and left/k >= num/den (k <= left*den/num).
        const long lo = std::max(from, (den + num - 1) / num);
        const long hi = std::min(kmax, left * den / num);
        for (long k = lo; k <= hi; ++k) {
            long n2 = num * k - den;  // num/den - 1/k = (num k - den) / (den k)
            long d2 = den * k;
            const long g = std::gcd(n2, d2);
            if (g > 1) {
                n2 /= g;
                d2 /= g;
            }
            cur.push_back(k);
            self(self, n2, d2, k);
            cur.pop_back();
        }
    };
    rec(rec, 1, 1, kmin);
    return out;
}

/**
 * Evaluates S(s) = sum_k w_k Ein(s/k) over k = k_lo..k_hi, plus Ein(s/k) for a
 * set of tracked k.  Arguments with |s/k| <= R share one power series in s
 * through the moments M_j(k0) = sum_{k >= k0} w_k k^{-j}; the few k with
 * |s/k| > R go through the E1 continued fraction individually.
 */
class WeightedEinSum {
public:
    WeightedEinSum(long k_lo, std::vector<BigReal> w, const std::vector<long>& tracked, double radius)
        : k_lo_(k_lo), k_hi_(k_lo + static_cast<long>(w.size()) - 1), w_(std::move(w)),
          radius_(radius), gamma_(const_euler()) {
        target_ = WorkingPrecision::digits() * kLn10 + 5.0;
        j_max_ = terms_needed(radius_, target_);
        // Moment rows for every possible series start k0 = k_lo..k_hi (suffix sums).
        moments_.assign(static_cast<std::size_t>(k_hi_ - k_lo_ + 2), std::vector<BigReal>());
        moments_.back().assign(static_cast<std::size_t>(j_max_), BigReal(0));
        for (long k = k_hi_; k >= k_lo_; --k) {
            auto& row = moments_[static_cast<std::size_t>(k - k_lo_)];
            const auto& next = moments_[static_cast<std::size_t>(k - k_lo_ + 1)];
            row.resize(static_cast<std::size_t>(j_max_));
            const BigReal inv = BigReal(1) / BigReal(k);
            BigReal p = w_[static_cast<std::size_t>(k - k_lo_)] * inv;
            for (int j = 0; j < j_max_; ++j) {
                row[j] = next[j] + p;
                p *= inv;
            }
        }
        tracked_ = tracked;
    }

    const std::vector<long>& tracked() const { return tracked_; }

    /// S(s) and Ein(s/k) for each tracked k (same order as tracked()).
    void eval(const BigComplex& s, BigComplex& S, std::vector<BigComplex>& tracked_ein) const {
        const double abs_s = abs(s).to_double();
        long k0 = std::max(k_lo_, static_cast<long>(std::ceil(abs_s / radius_)));
        while (abs_s / static_cast<double>(k0) > radius_) ++k0;
        tracked_ein.assign(tracked_.size(), BigComplex(0.0));
        S = BigComplex(0.0);

        if (k0 <= k_hi_) {
            const double q = abs_s / static_cast<double>(k0);
            const int J = std::min(j_max_, terms_needed(q, target_));
            // c_j = (-1)^{j+1} s^j / (j j!)
            std::vector<BigComplex> c(static_cast<std::size_t>(J));
            BigComplex p = s;
            c[0] = p;
            const BigComplex minus_s = -s;
            for (int j = 2; j <= J; ++j) {
                p = p * minus_s / static_cast<long>(j);
                c[j - 1] = p / static_cast<long>(j);
            }
            const auto& row = moments_[static_cast<std::size_t>(k0 - k_lo_)];
            BigReal re(0), im(0);
            for (int j = 0; j < J; ++j) {
                re += c[j].re * row[j];
                im += c[j].im * row[j];
            }
            S = BigComplex(std::move(re), std::move(im));
            for (std::size_t t = 0; t < tracked_.size(); ++t) {
                const long k = tracked_[t];
                if (k < k0) continue;
                // Ein(s/k) = sum_j c_j k^{-j} by Horner in 1/k, truncated for this k.
                const int Jk = std::min(J, terms_needed(abs_s / static_cast<double>(k), target_));
                BigComplex acc(0.0);
                for (int j = Jk - 1; j >= 0; --j) acc = (acc + c[j]) / k;
                tracked_ein[t] = std::move(acc);
            }
        }
        for (long k = k_lo_; k < std::min(k0, k_hi_ + 1); ++k) {
            const BigComplex z = s / BigReal(k);
            BigComplex e = detail::e1_continued_fraction(z, WorkingPrecision::digits());
            e += log(z);
            e += BigComplex(gamma_);
            S += e * w_[static_cast<std::size_t>(k - k_lo_)];
            for (std::size_t t = 0; t < tracked_.size(); ++t)
                if (tracked_[t] == k) tracked_ein[t] = e;
        }
    }

private:
    /// Series terms needed for |z| <= q so that q^j / j! < e^{-target}.
    static int terms_needed(double q, double target) {
        double logterm = 0.0;
        int j = 1;
        for (;; ++j) {
            logterm = j * std::log(std::max(q, 1e-300)) - std::lgamma(j + 1.0);
            if (j > q && logterm < -target) break;
        }
        return j + 1;
    }

    long k_lo_, k_hi_;
    std::vector<BigReal> w_;
    double radius_;
    BigReal gamma_;
    double target_ = 0.0;  ///< log of the relative series tolerance
    int j_max_ = 0;
    std::vector<std::vector<BigReal>> moments_;
    std::vector<long> tracked_;
};

/// One closed-form subtraction term: coef * prod_k (w_k E1(s/k))^m.
struct ProductTerm {
    std::vector<std::pair<std::size_t, int>> parts;  ///< (index into tracked list, multiplicity)
    BigReal coef;
};

/// Builds the subtraction terms for sets of order nmin..nmax with the given sign convention.
std::vector<ProductTerm> product_terms(const std::vector<std::vector<long>>& sets,
                                       const std::vector<long>& tracked, bool alternating) {
    std::vector<ProductTerm> terms;
    for (const auto& set : sets) {
        ProductTerm term;
        BigReal coef((alternating && set.size() % 2) ? -1 : 1);
        for (std::size_t i = 0; i < set.size();) {
            std::size_t j = i;
            while (j < set.size() && set[j] == set[i]) ++j;
            const int m = static_cast<int>(j - i);
            for (int f = 2; f <= m; ++f) coef /= static_cast<long>(f);
            const auto idx = static_cast<std::size_t>(
                std::find(tracked.begin(), tracked.end(), set[i]) - tracked.begin());
            term.parts.emplace_back(idx, m);
            i = j;
        }
        term.coef = coef;
        terms.push_back(std::move(term));
    }
    return terms;
}

std::vector<long> distinct_members(const std::vector<std::vector<long>>& sets) {
    std::vector<long> ks;
    for (const auto& s : sets) ks.insert(ks.end(), s.begin(), s.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

/// Sum of the subtraction terms given Ein(s/k) of the tracked k.
BigComplex product_sum(const std::vector<ProductTerm>& terms, const std::vector<long>& tracked,
                       const std::vector<BigReal>& tracked_w, const std::vector<BigComplex>& ein,
                       const BigComplex& s, const BigReal& gamma) {
    BigComplex total(0.0);
    if (terms.empty()) return total;
    std::vector<BigComplex> x(tracked.size());
    for (std::size_t t = 0; t < tracked.size(); ++t) {
        // w_k E1(s/k) = w_k (Ein(s/k) - gamma - log(s/k))
        x[t] = (ein[t] - BigComplex(gamma) - log(s / BigReal(tracked[t]))) * tracked_w[t];
    }
    for (const auto& term : terms) {
        BigComplex prod(term.coef);
        for (const auto& [idx, m] : term.parts)
            for (int i = 0; i < m; ++i) prod = prod * x[idx];
        total += prod;
    }
    return total;
}

/// Integrand values on the line grid (2N nodes), then the N and 2N windowed sums.
template <class Integrand>
std::pair<BigReal, BigReal> line_integral(const LineSettings& settings, long nodes, Integrand&& f) {
    const detail::LineGrid grid = detail::build_line_grid(settings, 2 * nodes);
    std::vector<BigReal> values;
    values.reserve(grid.tau.size());
    const double T2 = grid.cutoff(2 * nodes);
    for (const BigReal& tau : grid.tau) {
        if (tau.to_double() >= T2) break;
        BigReal v = f(BigComplex(BigReal(settings.sigma), tau));
        if (!v.is_finite())
            throw PropagationError("line integrand is not finite at tau = " + tau.str(12));
        values.push_back(std::move(v));
    }
    return {detail::windowed_sum(grid, values, nodes), detail::windowed_sum(grid, values, 2 * nodes)};
}

double weight_double(long k, long ell) {
    return std::exp((1 - k) * std::log(2.0) + std::lgamma(k - 1.0) - std::lgamma(static_cast<double>(ell)) -
                    std::lgamma(static_cast<double>(k - ell)));
}

/// Real saddle point x > 0 of e^{-x} F_l(-x): sum_k a_k (e^{x/k} - 1) / x = 1.
double cl_saddle(long ell) {
    const long K = truncation_bound(ell, 1e-30);
    auto f = [&](double x) {
        double s = 0.0;
        for (long k = ell + 1; k <= K; ++k) s += weight_double(k, ell) * std::expm1(x / k);
        return s / x - 1.0;
    };
    double lo = 1e-6, hi = 1.0;
    while (f(hi) < 0.0) hi *= 2.0;
    if (f(lo) > 0.0) return 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BigReal rounded(BigReal x, int precision) {
    x.round_to_bits(digits_to_bits(precision));
    return x;
}

/// Radius |s/k| up to which WeightedEinSum uses the shared power series.  The
/// series loses about radius / ln 10 digits to cancellation but costs the same
/// for every k, while the continued fraction is slow just above the radius.
double line_series_radius(int precision) { return std::max(e1_series_radius(precision), 1.0 * precision); }

/// Working digits for line inversions: the series guard plus a cushion for cancellation.
int line_digits(int precision) {
    return precision + static_cast<int>(std::ceil(line_series_radius(precision) / kLn10)) + 15;
}

} // namespace

std::string to_string(Target t) {
    switch (t) {
    case Target::c_ell: return "c_ell";
    case Target::coprime_c: return "coprime_c";
    case Target::rho_of_ustar: return "rho_of_ustar";
    }
    return "unknown";
}

BigComplex F_cl(const BigComplex& s, long ell, long k_max, int precision) {
    if (s.re.is_zero() && s.im.is_zero()) throw SingularityError("F_cl is singular at s = 0");
    if (ell < 1) throw DomainError("F_cl: ell must be at least 1");
    if (k_max <= ell) throw DomainError("F_cl: k_max must exceed ell");
    WorkingPrecision wp(precision + 10);
    BigComplex sum(0.0);
    for (long k = ell + 1; k <= k_max; ++k)
        sum += e1(s / BigReal(k), precision + 10) * weight(k, ell, precision + 10);
    BigComplex r = exp(-sum) / s;
    r.re.round_to_bits(digits_to_bits(precision));
    r.im.round_to_bits(digits_to_bits(precision));
    return r;
}

LineSettings cl_line_settings(long ell) {
    LineSettings st;
    if (ell <= 2) {
        st.sigma = 1.0;
        st.subtract_order = 4;
    } else {
        st.sigma = -std::round(2.0 / 3.0 * cl_saddle(ell));
        st.subtract_order = 0;
    }
    return st;
}

DensityEstimate compute_cl(long ell, int precision, long nodes, double tol) {
    if (ell < 1 || ell > 30) throw DomainError("compute_cl: ell must lie in 1..30");
    return compute_cl(ell, cl_line_settings(ell), precision, nodes, tol);
}

DensityEstimate compute_cl(long ell, const LineSettings& st, int precision, long nodes, double tol) {
    if (ell < 1 || ell > 30) throw DomainError("compute_cl: ell must lie in 1..30");
    check_precision(precision);
    if (nodes == 0) nodes = kDefaultLineNodes;
    if (nodes < 16) throw DomainError("compute_cl: need at least 16 nodes");
    if (st.sigma == 0.0) throw DomainError("compute_cl: the line must avoid the origin");
    if (st.subtract_order >= 2 && st.sigma < 0.0)
        throw DomainError("compute_cl: product subtraction needs a line with sigma > 0");
    if (!(tol > 0.0 && tol < 1.0)) throw DomainError("compute_cl: tol must lie in (0, 1)");
    const long K = truncation_bound(ell, tol);

    WorkingPrecision wp(line_digits(precision));
    std::vector<BigReal> a;
    BigReal L(0);
    for (long k = ell + 1; k <= K; ++k) {
        a.push_back(weight(k, ell, WorkingPrecision::digits()));
        L += a.back() * log(BigReal(k));
    }
    const BigReal gamma = const_euler();

    const auto sets = st.subtract_order >= 2 ? unit_fraction_sets(ell + 1, K, 2, st.subtract_order)
                                             : std::vector<std::vector<long>>{};
    const std::vector<long> tracked = distinct_members(sets);
    std::vector<BigReal> tracked_w;
    for (long k : tracked) tracked_w.push_back(a[static_cast<std::size_t>(k - ell - 1)]);
    const auto terms = product_terms(sets, tracked, /*alternating=*/true);
    const WeightedEinSum ein_sum(ell + 1, a, tracked, line_series_radius(precision));

    const BigReal gamma_minus_L = gamma - L;
    auto integrand = [&](const BigComplex& s) {
        BigComplex S;
        std::vector<BigComplex> ein;
        ein_sum.eval(s, S, ein);
        const BigComplex log_s = log(s);
        // X = sum a_k E1(s/k) = S - gamma - log s + L;  F = e^{-X}/s = exp(gamma - L - S).
        const BigComplex X = S - log_s - BigComplex(gamma_minus_L);
        const BigComplex F = exp(BigComplex(gamma_minus_L) - S);
        // Subtract the pieces with closed-form inverses: F - (1 - X + products) / s.
        const BigComplex head = BigComplex(1.0) - X + product_sum(terms, tracked, tracked_w, ein, s, gamma);
        const BigComplex G = F - head / s;
        return (exp(s) * G).re;
    };
    auto [vN, v2N] = line_integral(st, nodes, integrand);
    // Closed-form line integrals of the subtracted 1/s - X/s at t = 1.
    const BigReal offset = st.sigma > 0 ? BigReal(1) - L : e1(BigReal(-st.sigma), WorkingPrecision::digits());
    vN += offset;
    v2N += offset;

    DensityEstimate est;
    est.target = Target::c_ell;
    est.ell = ell;
    est.precision_digits = precision;
    est.nodes = nodes;
    est.k_max = K;
    est.stability_delta = rounded(abs(vN - v2N), precision);
    est.value = rounded(vN, precision);
    est.convergence_warning =
        est.stability_delta > abs(est.value) * BigReal(100.0 * std::max(tol, kStabilityTarget));
    est.method = "bromwich-line";
    return est;
}

BigComplex coprime_J(const BigComplex& s, long m_max, int precision) {
    if (m_max < 2) throw DomainError("coprime_J: m_max must be at least 2");
    WorkingPrecision wp(precision + 10);
    BigComplex sum(0.0);
    for (long m = m_max; m >= 2; --m) sum += e1(s / BigReal(m), precision + 10) * ldexp(BigReal(1), 1 - m);
    sum.re.round_to_bits(digits_to_bits(precision));
    sum.im.round_to_bits(digits_to_bits(precision));
    return sum;
}

long coprime_m_max(int precision) {
    // Tail sum_{m > M} 2^{1-m} = 2^{1-M} < 10^-(precision+5).
    return 1 + static_cast<long>(std::ceil((precision + 5) * std::log2(10.0)));
}

BigReal coprime_log_sum(int precision) {
    WorkingPrecision wp(precision + 10);
    const long M = coprime_m_max(precision);
    BigReal sum(0);
    for (long m = M; m >= 2; --m)
        sum += ldexp(log1p(BigReal(1) / BigReal(m - 1)), 1 - m);  // log(m/(m-1)) = log1p(1/(m-1))
    return rounded(sum, precision);
}

DensityEstimate compute_coprime_c(int precision, long nodes) {
    check_precision(precision);
    if (nodes == 0) nodes = kDefaultLineNodes;
    if (nodes < 16) throw DomainError("compute_coprime_c: need at least 16 nodes");
    LineSettings st;
    st.sigma = 1.0;
    st.subtract_order = 4;

    WorkingPrecision wp(line_digits(precision));
    const long M = coprime_m_max(precision);
    std::vector<BigReal> w;
    BigReal L(0);
    for (long m = 2; m <= M; ++m) {
        w.push_back(ldexp(BigReal(1), 1 - m));
        L += w.back() * log(BigReal(m));
    }
    const BigReal gamma = const_euler();
    const auto sets = unit_fraction_sets(2, M, 3, st.subtract_order);
    const std::vector<long> tracked = distinct_members(sets);
    std::vector<BigReal> tracked_w;
    for (long k : tracked) tracked_w.push_back(w[static_cast<std::size_t>(k - 2)]);
    const auto terms = product_terms(sets, tracked, /*alternating=*/false);
    const WeightedEinSum ein_sum(2, w, tracked, line_series_radius(precision));

    auto integrand = [&](const BigComplex& s) {
        BigComplex S;
        std::vector<BigComplex> ein;
        ein_sum.eval(s, S, ein);
        const BigComplex J = S - log(s) - BigComplex(gamma - L);
        // e^J - 1 - J - J^2/2, minus the order >= 3 products that vanish at t = 1.
        BigComplex G = exp(J) - BigComplex(1.0) - J - J * J / 2L;
        G -= product_sum(terms, tracked, tracked_w, ein, s, gamma);
        return (exp(s) * G).re;
    };
    auto [fN, f2N] = line_integral(st, nodes, integrand);
    const BigReal base = BigReal(1) + coprime_log_sum(WorkingPrecision::digits());

    DensityEstimate est;
    est.target = Target::coprime_c;
    est.precision_digits = precision;
    est.nodes = nodes;
    est.k_max = M;
    est.value = rounded(base + fN, precision);
    est.stability_delta = rounded(abs(fN - f2N), precision);
    est.convergence_warning = est.stability_delta > abs(est.value) * BigReal(100.0 * kStabilityTarget);
    est.method = "bromwich-line";
    return est;
}

BigReal ustar(long ell, int precision) {
    if (ell < 2) throw DomainError("ustar: ell must be at least 2");
    WorkingPrecision wp(precision + 10);
    const BigReal two_l(2L * ell);
    const BigReal lg = log(two_l);
    return rounded(BigReal(2L * ell + 1) - log(two_l * lg) - log(lg) / lg, precision);
}

DensityEstimate asymptotic_cl(long ell, const DickmanTable& table, int precision) {
    check_precision(precision);
    const BigReal u = ustar(ell, precision);
    if (u > BigReal(table.u_max()))
        throw DomainError("asymptotic_cl: u* = " + u.str(8) + " exceeds the table's u_max");
    WorkingPrecision wp(precision);
    DensityEstimate est;
    est.target = Target::rho_of_ustar;
    est.ell = ell;
    // The table, not the working precision, limits the accuracy.
    est.precision_digits = std::min(precision, kTableDigits);
    est.value = table.rho(u);
    est.stability_delta = BigReal(0);
    est.method = "dickman-table";
    return est;
}

} // namespace cbc
