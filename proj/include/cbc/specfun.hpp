#pragma once

/**
 * Special functions behind the density constants: the exponential integral
 * E1, the entire function Ein, the saddle parameter xi(u), the Dickman
 * function rho, its saddle-point approximation, and the binomial weights
 *
 *     a_{k,l} = 2^{1-k} C(k-2, l-1)      (k >= l+1),
 *
 * which form a probability distribution on k with mean 2l + 1.
 *
 * Every arbitrary-precision entry point takes `precision` in decimal digits;
 * results are rounded to that precision.
 */

#include "cbc/bigfloat.hpp"

#include <iosfwd>
#include <vector>

namespace cbc {

/// Default working precision (decimal digits) of the constants engine.
inline constexpr int kDefaultPrecision = 100;

/// Radius below which E1 uses its power series: max(4, precision/3).
double e1_series_radius(int precision);

/// Principal-branch E1(z) = int_z^inf e^{-t}/t dt.  Throws SingularityError for z = 0.
BigComplex e1(const BigComplex& z, int precision);
BigReal e1(const BigReal& x, int precision);

/// Ein(s) = sum_{k>=1} (-1)^{k+1} s^k / (k k!) = gamma + log s + E1(s); entire.
BigComplex ein(const BigComplex& s, int precision);
BigReal ein(const BigReal& s, int precision);

/// The positive root of e^xi = 1 + u xi (u > 1); xi(1) = 0.  Throws DomainError for u < 1.
BigReal xi(const BigReal& u, int precision);

/// Saddle-point approximation sqrt(xi / (2 pi (u(xi-1)+1))) exp(gamma - u xi - Ein(-xi)), u >= 2.
BigReal rho_saddle(const BigReal& u, int precision);

/// Exact weight a_{k,l} rendered at `precision`.  Throws DomainError unless l >= 1 and k > l.
BigReal weight(long k, long ell, int precision);

/// Smallest k_max >= 2l for which the Hoeffding tail bound guarantees
/// sum_{k > k_max} a_{k,l} < tol; at least 200 when tol <= 1e-50 and l <= 6.
long truncation_bound(long ell, double tol);

namespace detail {
/// The two E1 evaluation paths, exposed for the crossover consistency check.
BigComplex e1_series(const BigComplex& z, int precision);
BigComplex e1_continued_fraction(const BigComplex& z, int precision);
} // namespace detail

/**
 * Dickman rho on [0, u_max], tabulated by marching the delay equation.
 *
 * On (1, u_max] the table solves u rho(u) = int_{u-1}^{u} rho(t) dt by
 * Chebyshev collocation on half-unit pieces.  This integrated form of
 * -u rho'(u) = rho(u-1) fixes the integration constant, so rounding and
 * truncation errors stay relative to rho itself instead of accumulating
 * as an absolute offset (rho(64) is about 1e-128).
 */
class DickmanTable {
public:
    explicit DickmanTable(double u_max = 64.0, double tolerance = 1e-12, int degree = 16);

    double u_max() const { return u_max_; }
    double tolerance() const { return tolerance_; }
    int degree() const { return degree_; }

    /// rho(u) at the caller's working precision (accurate to the table tolerance).
    /// Throws DomainError for u < 0 or u > u_max.
    BigReal rho(const BigReal& u) const;
    double rho(double u) const;
    /// rho'(u) from the local polynomial (u > 1).
    BigReal derivative(const BigReal& u) const;

    /// Dumps "u,rho" rows on a uniform grid with the given step.
    void write_csv(std::ostream& out, double step) const;

private:
    struct Piece {
        double a = 0, b = 0;
        std::vector<BigReal> coef;       ///< Chebyshev coefficients of rho on [a, b]
        std::vector<BigReal> int_coef;   ///< coefficients of int_a^u rho
    };
    const Piece& piece_for(const BigReal& u) const;
    BigReal integral(const BigReal& c, const BigReal& d) const;  ///< int_c^d rho over built pieces

    double u_max_;
    double tolerance_;
    int degree_;
    int digits_;
    std::vector<Piece> pieces_;
};

/// Free-function form of DickmanTable::rho.
BigReal rho(const BigReal& u, const DickmanTable& table);

} // namespace cbc
