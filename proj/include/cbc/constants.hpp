#pragma once

/**
 * The limiting densities c_l, the coprime constant c, and the asymptotic
 * rho(u*) estimate.
 *
 * c_l is the value at t = 1 of the inverse Laplace transform of
 *
 *     F_l(s) = (1/s) exp( -sum_{k>l} a_{k,l} E1(s/k) ),
 *
 * and c = 1 + sum_{m>=2} 2^{1-m} log(m/(m-1)) + f(1), where f is the inverse
 * transform of e^J - 1 - J - J^2/2 with J(s) = sum_{m>=2} 2^{1-m} E1(s/m).
 *
 * Both transforms grow like exp(exp(|s|/k)) in the left half-plane, which
 * rules out contours that wrap around the negative axis (Talbot and
 * relatives).  They are inverted on a vertical Bromwich line instead:
 * see LineInversion below.  The generic invert_laplace() keeps the
 * fixed-Talbot method for transforms of moderate growth.
 */

#include "cbc/bigfloat.hpp"
#include "cbc/specfun.hpp"

#include <functional>
#include <string>

namespace cbc {

enum class Target { c_ell, coprime_c, rho_of_ustar };

std::string to_string(Target t);

struct DensityEstimate {
    Target target = Target::c_ell;
    long ell = 0;                  ///< 0 when not applicable
    BigReal value;
    int precision_digits = kDefaultPrecision;
    long nodes = 0;                ///< quadrature nodes (0 when not inversion-based)
    long k_max = 0;                ///< series truncation (0 when not applicable)
    BigReal stability_delta;       ///< |value(nodes) - value(2 nodes)|
    bool convergence_warning = false;
    std::string method;
};

using Transform = std::function<BigComplex(const BigComplex&)>;

struct InversionResult {
    BigReal value;       ///< estimate with `nodes` nodes
    BigReal doubled;     ///< estimate with 2 * nodes nodes
    BigReal delta;       ///< |value - doubled|
    long nodes = 0;
};

/// Node count used by invert_laplace when `nodes` is 0: the fixed-Talbot
/// error is about 10^(-0.6 nodes), so this is max(64, ceil(precision / 0.6)).
long default_talbot_nodes(int precision);

/// Fixed-Talbot inverse Laplace transform of F at t > 0 (and at doubled nodes).
/// Throws PropagationError naming the node if F returns a non-finite value.
InversionResult invert_laplace(const Transform& F, const BigReal& t, long nodes, int precision);

/// (1/s) exp(-sum_{k=l+1}^{k_max} a_{k,l} E1(s/k)).  Throws SingularityError at s = 0.
BigComplex F_cl(const BigComplex& s, long ell, long k_max, int precision);

/// Default quadrature node count of compute_cl / compute_coprime_c.
inline constexpr long kDefaultLineNodes = 1600;

/// Default weight-tail tolerance of compute_cl.
inline constexpr double kDefaultWeightTol = 1e-50;

/// c_l for 1 <= l <= 30.  `nodes` = 0 selects kDefaultLineNodes.
DensityEstimate compute_cl(long ell, int precision = kDefaultPrecision, long nodes = 0,
                           double tol = kDefaultWeightTol);

/// sum_{m=2}^{m_max} 2^{1-m} E1(s/m).
BigComplex coprime_J(const BigComplex& s, long m_max, int precision);

/// Smallest m_max whose dropped tail of 2^{1-m} weights is below 10^-(precision+5).
long coprime_m_max(int precision);

/// sum_{m>=2} 2^{1-m} log(m/(m-1)), summed until 2^{1-m} < 10^-(precision+5).
BigReal coprime_log_sum(int precision);

/// The coprime-density constant c.
DensityEstimate compute_coprime_c(int precision = kDefaultPrecision, long nodes = 0);

/// u* = 2l + 1 - log(2l log 2l) - log log(2l) / log(2l).
BigReal ustar(long ell, int precision);

/// rho(u*) from the table.  Throws DomainError for l < 2 or u* > table.u_max().
DensityEstimate asymptotic_cl(long ell, const DickmanTable& table, int precision = kDefaultPrecision);

/**
 * Windowed Bromwich-line inversion used for c_l and c.
 *
 * With s = sigma + i tau,
 *
 *   g(1) = (1/pi) int_0^inf Re[e^s G(s)] dtau,
 *
 * where G is the transform minus pieces whose inverse at t = 1 is known in
 * closed form (1/s, X/s with X = sum a_k E1(s/k), and products of E1 terms
 * whose reciprocal arguments sum to exactly 1, which vanish at t = 1).  The
 * remaining integrand decays like a power of 1/tau; the integral is taken
 * with Gauss-Legendre panels and a C-infinity cutoff window that equals 1
 * on [0, T/2] and falls smoothly to 0 at T.  Doubling the node count doubles
 * T; the difference is the reported stability_delta.
 */
struct LineSettings {
    double sigma = 1.0;          ///< abscissa of the line
    int subtract_order = 4;      ///< largest product order removed in closed form (0 = none)
    double panel_width = 8.0;    ///< Gauss-Legendre panel width away from the origin
    int panel_nodes = 16;
};

/// Line settings chosen for c_l: sigma > 0 with product subtraction for
/// l <= 2, sigma = -(2/3) x saddle point without it for l >= 3.
LineSettings cl_line_settings(long ell);

/// compute_cl on an explicit line, for cross-checks between lines.
/// Product subtraction requires sigma > 0 (the products' inverse vanishes at
/// t = 1 only for a line right of the origin); throws DomainError otherwise.
DensityEstimate compute_cl(long ell, const LineSettings& line, int precision, long nodes,
                           double tol = kDefaultWeightTol);

} // namespace cbc
