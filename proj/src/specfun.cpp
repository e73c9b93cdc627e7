#include "cbc/specfun.hpp"
#include "cbc/errors.hpp"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cbc {

namespace {

constexpr double kLn10 = 2.302585092994046;

/// 2^-bits at the current working precision: the relative step size.
BigReal epsilon() { return ldexp(BigReal(1), -static_cast<long>(WorkingPrecision::bits())); }

BigComplex rounded(BigComplex z, int precision) {
    const mpfr_prec_t bits = digits_to_bits(precision);
    z.re.round_to_bits(bits);
    z.im.round_to_bits(bits);
    return z;
}

BigReal rounded(BigReal x, int precision) {
    x.round_to_bits(digits_to_bits(precision));
    return x;
}

/// Guard digits that absorb the e^{|z|} cancellation of the alternating series.
int series_digits(int precision, double modulus) {
    return precision + static_cast<int>(std::ceil(modulus / kLn10)) + 10;
}

/// Ein(z) by its power series at the current working precision.
BigComplex ein_series(const BigComplex& z) {
    if (z.re.is_zero() && z.im.is_zero()) return BigComplex(0.0);
    const BigReal eps = epsilon();
    const double modulus = abs(z).to_double();
    BigComplex p = z;  // (-1)^{k+1} z^k / k!
    BigComplex sum = z;
    for (long k = 2;; ++k) {
        p = p * (-z);
        p = p / k;
        BigComplex term = p / k;
        sum += term;
        if (k > modulus && abs(term) <= eps * abs(sum)) break;
    }
    return sum;
}

void require_nonzero(const BigComplex& z) {
    if (z.re.is_zero() && z.im.is_zero()) throw SingularityError("E1 is singular at z = 0");
}

} // namespace

double e1_series_radius(int precision) { return std::max(4.0, precision / 3.0); }

namespace detail {

BigComplex e1_series(const BigComplex& z, int precision) {
    require_nonzero(z);
    // E1 ~ e^{-z}/z is much smaller than the O(log|z|) terms that cancel to give it.
    const double decay = std::max(0.0, z.re.to_double()) / kLn10;
    WorkingPrecision wp(series_digits(precision, abs(z).to_double()) + static_cast<int>(std::ceil(decay)));
    BigComplex r = ein_series(z) - log(z) - BigComplex(const_euler());
    return rounded(std::move(r), precision);
}

BigComplex e1_continued_fraction(const BigComplex& z, int precision) {
    require_nonzero(z);
    // The forward recurrences lose up to about ten digits to rounding noise.
    WorkingPrecision wp(precision + 20);
    // E1(z) = e^{-z} / (z+1 - 1^2/(z+3 - 2^2/(z+5 - ...))), evaluated with the
    // Wallis recurrences A_n = b_n A_{n-1} + a_n A_{n-2} (same for B), which
    // need no divisions; MPFR's exponent range makes rescaling unnecessary.
    // The convergent A_n/B_n is formed every few steps to test convergence.
    const mpfr_prec_t bits = WorkingPrecision::bits();
    const BigReal eps = pow(BigReal(10), -static_cast<long>(precision + 2));
    const BigReal& zr = z.re;
    const BigReal& zi = z.im;
    BigReal a0r(0), a0i(0), b0r(1), b0i(0);   // A_{n-2}, B_{n-2}
    BigReal a1r(1), a1i(0), b1r = zr + BigReal(1), b1i = zi;  // A_{n-1}, B_{n-1}
    BigReal br = BigReal::with_bits(bits), t = BigReal::with_bits(bits), u = BigReal::with_bits(bits);
    BigReal nar = BigReal::with_bits(bits), nai = BigReal::with_bits(bits);
    BigComplex prev(0.0);
    // n-th step: b_n = z + 2n - 1, a_n = -(n-1)^2.
    auto step = [&](BigReal& xr, BigReal& xi, BigReal& yr, BigReal& yi, long an) {
        // (new) = b_n x + a_n y, written into y; x becomes the older value.
        mpfr_fmms(nar.get(), br.get(), xr.get(), zi.get(), xi.get(), MPFR_RNDN);
        mpfr_fmma(nai.get(), br.get(), xi.get(), zi.get(), xr.get(), MPFR_RNDN);
        mpfr_mul_si(t.get(), yr.get(), an, MPFR_RNDN);
        mpfr_mul_si(u.get(), yi.get(), an, MPFR_RNDN);
        mpfr_add(yr.get(), nar.get(), t.get(), MPFR_RNDN);
        mpfr_add(yi.get(), nai.get(), u.get(), MPFR_RNDN);
        std::swap(xr, yr);
        std::swap(xi, yi);
    };
    for (long n = 2;; ++n) {
        if (n > 1000000) throw Error("E1 continued fraction did not converge");
        mpfr_add_si(br.get(), zr.get(), 2 * n - 1, MPFR_RNDN);
        const long an = -(n - 1) * (n - 1);
        step(a1r, a1i, a0r, a0i, an);
        step(b1r, b1i, b0r, b0i, an);
        if (n % 8 == 0) {
            BigComplex h = BigComplex(a1r, a1i) / BigComplex(b1r, b1i);
            const bool done = abs(h - prev) <= eps * abs(h);
            prev = std::move(h);
            if (done) break;
        }
    }
    return rounded(prev * exp(-z), precision);
}

} // namespace detail

BigComplex e1(const BigComplex& z, int precision) {
    require_nonzero(z);
    if (abs(z).to_double() <= e1_series_radius(precision)) return detail::e1_series(z, precision);
    return detail::e1_continued_fraction(z, precision);
}

BigReal e1(const BigReal& x, int precision) {
    if (x.sign() < 0) throw DomainError("real E1 requires x > 0 (negative axis is the branch cut)");
    return e1(BigComplex(x), precision).re;
}

BigComplex ein(const BigComplex& s, int precision) {
    WorkingPrecision wp(series_digits(precision, abs(s).to_double()));
    return rounded(ein_series(s), precision);
}

BigReal ein(const BigReal& s, int precision) { return ein(BigComplex(s), precision).re; }

BigReal xi(const BigReal& u_in, int precision) {
    WorkingPrecision wp(precision + 10);
    const BigReal u = u_in;
    const BigReal one(1);
    if (u < one) throw DomainError("xi(u) requires u >= 1");
    if (u == one) return rounded(BigReal(0), precision);

    const double ud = u.to_double();
    // Bracket for the positive root: f(lo) < 0 < f(hi) with f(x) = e^x - 1 - u x.
    BigReal lo(1e-9);
    BigReal hi(2.0 * std::log(ud * std::log(ud) + 2.0));
    auto f = [&](const BigReal& x) { return expm1(x) - u * x; };
    while (f(hi).sign() <= 0) hi = hi * 2L;
    if (f(lo).sign() >= 0) {
        // u so close to 1 that the root lies below 1e-9; xi ~ 2(u-1).
        lo = BigReal(0);
    }
    BigReal x = ud >= 3.0 ? log(u * log(u)) : BigReal(std::min(2.0 * (ud - 1.0), hi.to_double()));
    const BigReal eps = epsilon();
    for (int it = 0; it < 200; ++it) {
        const BigReal fx = f(x);
        if (fx.sign() < 0) lo = x; else hi = x;
        const BigReal step = fx / (exp(x) - u);
        BigReal next = x - step;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2L;  // bisection fallback
        const bool done = abs(next - x) <= eps * abs(next) * 4L;
        x = next;
        if (done) break;
    }
    return rounded(x, precision);
}

BigReal rho_saddle(const BigReal& u_in, int precision) {
    WorkingPrecision wp(precision + 10);
    const BigReal u = u_in;
    if (u < BigReal(2)) throw DomainError("rho_saddle requires u >= 2");
    const BigReal x = xi(u, precision + 10);
    const BigReal pre = sqrt(x / (2L * const_pi() * (u * (x - BigReal(1)) + BigReal(1))));
    const BigReal expo = const_euler() - u * x - ein(-x, precision + 10);
    return rounded(pre * exp(expo), precision);
}

BigReal weight(long k, long ell, int precision) {
    if (ell < 1) throw DomainError("weight: ell must be at least 1");
    if (k <= ell) throw DomainError("weight: requires k > ell");
    WorkingPrecision wp(precision);
    mpz_t binom;
    mpz_init(binom);
    mpz_bin_uiui(binom, static_cast<unsigned long>(k - 2), static_cast<unsigned long>(ell - 1));
    BigReal r;
    mpfr_set_z(r.get(), binom, MPFR_RNDN);
    mpz_clear(binom);
    return ldexp(r, 1 - k);
}

long truncation_bound(long ell, double tol) {
    if (ell < 1) throw DomainError("truncation_bound: ell must be at least 1");
    if (!(tol > 0.0 && tol < 1.0)) throw DomainError("truncation_bound: tol must lie in (0, 1)");
    // For k >= 2l, a_{k,l} = P(Bin(k-2, 1/2) = l-1)/2 <= exp(-(k-2l)^2 / (2(k-2)))/2 (Hoeffding).
    auto log_bound = [ell](long k) {
        const double n = static_cast<double>(k - 2);
        const double dev = static_cast<double>(k - 2 * ell);
        return n > 0 ? -dev * dev / (2.0 * n) - std::log(2.0) : -std::log(2.0);
    };
    const double log_tol = std::log(tol);
    // Tail sums of the bound, accumulated from far out inwards in log space.
    // Past k_far the bound decays geometrically, so the neglected remainder is far below tol.
    long k_far = 2 * ell + 10;
    while (log_bound(k_far) > log_tol - 50.0) k_far += 16;
    k_far += 64;
    std::vector<double> log_tail(static_cast<std::size_t>(k_far + 2), -INFINITY);
    double acc = -INFINITY;
    for (long k = k_far; k >= 2 * ell; --k) {
        const double lb = log_bound(k);
        acc = std::max(acc, lb) + std::log1p(std::exp(-std::abs(acc - lb)));
        log_tail[static_cast<std::size_t>(k - 1)] = acc;  // sum over k' > k-1
    }
    long kmax = 2 * ell;
    while (kmax < k_far && log_tail[static_cast<std::size_t>(kmax)] >= log_tol) ++kmax;
    if (tol <= 1e-50 && ell <= 6) kmax = std::max(kmax, 200L);
    return kmax;
}

} // namespace cbc
