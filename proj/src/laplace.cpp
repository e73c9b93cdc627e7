#include "quadrature.hpp"

#include "cbc/constants.hpp"
#include "cbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cbc {

namespace detail {

void gauss_legendre(int n, std::vector<BigReal>& nodes, std::vector<BigReal>& weights) {
    nodes.assign(static_cast<std::size_t>(n), BigReal(0));
    weights.assign(static_cast<std::size_t>(n), BigReal(0));
    const BigReal eps = ldexp(BigReal(1), -static_cast<long>(WorkingPrecision::bits()) + 4);
    const double pi = 3.141592653589793;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        BigReal x(std::cos(pi * (i + 0.75) / (n + 0.5)));
        BigReal dp;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P_n'(x).
            BigReal p0(1), p1 = x;
            for (int k = 2; k <= n; ++k) {
                BigReal p2 = ((2L * k - 1) * x * p1 - (k - 1L) * p0) / static_cast<long>(k);
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            dp = static_cast<long>(n) * (x * p1 - p0) / (x * x - BigReal(1));
            const BigReal step = p1 / dp;
            x -= step;
            if (abs(step) <= eps) break;
        }
        const BigReal w = BigReal(2) / ((BigReal(1) - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

double LineGrid::cutoff(long nodes) const {
    const long panels = (nodes + panel_nodes - 1) / panel_nodes;
    return panel_end.at(static_cast<std::size_t>(std::max(1L, panels) - 1));
}

LineGrid build_line_grid(const LineSettings& settings, long nodes) {
    LineGrid grid;
    grid.panel_nodes = settings.panel_nodes;
    std::vector<BigReal> gx, gw;
    gauss_legendre(settings.panel_nodes, gx, gw);
    const double sigma = std::abs(settings.sigma);
    double a = 0.0;
    while (static_cast<long>(grid.tau.size()) < nodes) {
        // Resolve the logarithmic singularity at s = 0 with panels no wider than
        // half the distance from the panel start to the origin.
        const double dist = std::hypot(sigma, a);
        const double width = std::min(settings.panel_width, std::max(0.5 * dist, 1e-3));
        const double b = a + width;
        const BigReal mid((a + b) / 2), half((b - a) / 2);
        for (int i = 0; i < settings.panel_nodes; ++i) {
            grid.tau.push_back(mid + half * gx[i]);
            grid.weight.push_back(half * gw[i]);
        }
        grid.panel_end.push_back(b);
        a = b;
    }
    return grid;
}

BigReal window(const BigReal& x) {
    const BigReal half(0.5), one(1);
    if (x <= half) return one;
    if (x >= one) return BigReal(0);
    const BigReal y = (x - half) / half;
    const BigReal f1 = exp(-(one / (one - y)));
    const BigReal f2 = exp(-(one / y));
    return f1 / (f1 + f2);
}

BigReal windowed_sum(const LineGrid& grid, const std::vector<BigReal>& values, long nodes) {
    const BigReal T(grid.cutoff(nodes));
    BigReal sum(0);
    for (std::size_t i = 0; i < grid.tau.size() && i < values.size(); ++i) {
        const BigReal w = window(grid.tau[i] / T);
        if (w.is_zero()) break;
        sum += w * grid.weight[i] * values[i];
    }
    return sum / const_pi();
}

} // namespace detail

long default_talbot_nodes(int precision) {
    return std::max(64L, static_cast<long>(std::ceil(precision / 0.6)));
}

InversionResult invert_laplace(const Transform& F, const BigReal& t_in, long nodes, int precision) {
    if (nodes == 0) nodes = default_talbot_nodes(precision);
    if (nodes < 2) throw DomainError("invert_laplace: need at least 2 nodes");
    if (!(t_in.sign() > 0)) throw DomainError("invert_laplace: t must be positive");
    // The contour weights grow like e^{r t} = e^{2M/5}; carry enough guard digits.
    const int guard = static_cast<int>(std::ceil(0.4 * 2 * nodes / 2.302585092994046)) + 10;
    WorkingPrecision wp(precision + guard);
    const BigReal t = t_in;

    auto talbot = [&](long M) {
        const BigReal r = BigReal(2L * M) / (5L * t);
        const BigReal pi = const_pi();
        BigComplex Fr = F(BigComplex(r));
        if (!Fr.is_finite()) throw PropagationError("transform is not finite at Talbot node 0 (s = r)");
        BigReal sum = Fr.re * exp(r * t) / 2L;
        for (long k = 1; k < M; ++k) {
            const BigReal theta = pi * BigReal(k) / BigReal(M);
            const BigReal cot = cos(theta) / sin(theta);
            const BigComplex s(r * theta * cot, r * theta);
            const BigReal sig = theta + (theta * cot - BigReal(1)) * cot;
            const BigComplex Fs = F(s);
            if (!Fs.is_finite())
                throw PropagationError("transform is not finite at Talbot node " + std::to_string(k) +
                                       " (s = " + s.re.str(12) + " + " + s.im.str(12) + "i)");
            const BigComplex term = exp(s * t) * Fs * BigComplex(BigReal(1), sig);
            sum += term.re;
        }
        return r / BigReal(M) * sum;
    };

    InversionResult out;
    out.nodes = nodes;
    out.value = talbot(nodes);
    out.doubled = talbot(2 * nodes);
    out.delta = abs(out.value - out.doubled);
    const mpfr_prec_t bits = digits_to_bits(precision);
    out.value.round_to_bits(bits);
    out.doubled.round_to_bits(bits);
    out.delta.round_to_bits(bits);
    return out;
}

} // namespace cbc
