#include "cbc/errors.hpp"
#include "cbc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>
#include <vector>

namespace cbc {

namespace {

using Vec = std::vector<BigReal>;

/// Chebyshev points of the second kind, x_j = cos(pi j / D), j = 0..D.
Vec cheb_points(int D) {
    Vec x;
    const BigReal pi = const_pi();
    for (int j = 0; j <= D; ++j) x.push_back(cos(pi * BigReal(j) / BigReal(D)));
    return x;
}

/// Coefficients c_k of the interpolant sum c_k T_k through values at cheb_points(D).
Vec values_to_coefficients(const Vec& f) {
    const int D = static_cast<int>(f.size()) - 1;
    const BigReal pi = const_pi();
    Vec c(D + 1);
    for (int k = 0; k <= D; ++k) {
        BigReal s(0);
        for (int j = 0; j <= D; ++j) {
            BigReal t = f[j] * cos(pi * BigReal(static_cast<long>(j) * k) / BigReal(D));
            if (j == 0 || j == D) t /= 2L;
            s += t;
        }
        s = s * 2L / BigReal(D);
        if (k == 0 || k == D) s /= 2L;
        c[k] = s;
    }
    return c;
}

/// Clenshaw evaluation of sum c_k T_k(x).
BigReal clenshaw(const Vec& c, const BigReal& x) {
    BigReal b1(0), b2(0);
    const BigReal two_x = x * 2L;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
        BigReal b0 = two_x * b1 - b2 + c[k];
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    return x * b1 - b2 + c[0];
}

/// Coefficients of the antiderivative on [-1, 1] that vanishes at x = -1.
Vec antiderivative(const Vec& c) {
    const int n = static_cast<int>(c.size());
    Vec C(n + 1, BigReal(0));
    auto at = [&](int k) { return k < n ? c[k] : BigReal(0); };
    for (int k = 1; k <= n; ++k) {
        BigReal prev = k == 1 ? at(0) * 2L : at(k - 1);
        C[k] = (prev - at(k + 1)) / (2L * k);
    }
    // Fix C_0 so that the antiderivative is zero at x = -1, where T_k(-1) = (-1)^k.
    BigReal s(0);
    for (int k = 1; k <= n; ++k) s += (k % 2 ? -C[k] : C[k]);
    C[0] = -s;
    return C;
}

/// Coefficients of the derivative with respect to x.
Vec derivative_coefficients(const Vec& c) {
    const int n = static_cast<int>(c.size());
    Vec d(n, BigReal(0));
    for (int k = n - 1; k >= 1; --k) {
        BigReal next = k + 1 < n ? d[k + 1] : BigReal(0);
        d[k - 1] = next + c[k] * (2L * k);
    }
    if (n > 0) d[0] /= 2L;
    return d;
}

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
Vec solve(std::vector<Vec> A, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(A[r][col]) > abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const BigReal m = A[r][col] / A[col][col];
            for (std::size_t k = col; k < n; ++k) A[r][k] -= m * A[col][k];
            b[r] -= m * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        BigReal s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

constexpr double kPieceWidth = 0.5;

} // namespace

DickmanTable::DickmanTable(double u_max, double tolerance, int degree)
    : u_max_(u_max), tolerance_(tolerance), degree_(degree) {
    if (!(u_max >= 1.0)) throw DomainError("DickmanTable: u_max must be at least 1");
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("DickmanTable: tolerance must lie in (0, 1)");
    if (degree < 4) throw DomainError("DickmanTable: degree must be at least 4");
    // The integrated equation keeps errors relative, so modest precision suffices.
    digits_ = 40 + static_cast<int>(std::ceil(-std::log10(tolerance)));
    WorkingPrecision wp(digits_);

    const int D = degree_;
    const Vec x = cheb_points(D);
    // Q[i][j] = int_{-1}^{x_i} l_j(t) dt for the Lagrange basis l_j on [-1, 1].
    std::vector<Vec> Q(D + 1, Vec(D + 1));
    for (int j = 0; j <= D; ++j) {
        Vec e(D + 1, BigReal(0));
        e[j] = BigReal(1);
        const Vec C = antiderivative(values_to_coefficients(e));
        for (int i = 0; i <= D; ++i) Q[i][j] = clenshaw(C, x[i]);
    }

    for (double a = 1.0; a < u_max_; a += kPieceWidth) {
        const double b = a + kPieceWidth;
        const BigReal mid((a + b) / 2), half((b - a) / 2);
        // Collocation of u rho(u) - int_a^u rho = int_{u-1}^a rho at the nodes u_i.
        std::vector<Vec> A(D + 1, Vec(D + 1));
        Vec rhs(D + 1);
        for (int i = 0; i <= D; ++i) {
            const BigReal u = mid + half * x[i];
            for (int j = 0; j <= D; ++j) A[i][j] = -(half * Q[i][j]);
            A[i][i] += u;
            rhs[i] = integral(u - BigReal(1), BigReal(a));
        }
        Piece p;
        p.a = a;
        p.b = b;
        p.coef = values_to_coefficients(solve(std::move(A), std::move(rhs)));
        p.int_coef = antiderivative(p.coef);
        for (auto& c : p.int_coef) c *= half;
        pieces_.push_back(std::move(p));
    }
}

const DickmanTable::Piece& DickmanTable::piece_for(const BigReal& u) const {
    auto idx = static_cast<long>(std::floor((u.to_double() - 1.0) / kPieceWidth));
    idx = std::clamp<long>(idx, 0, static_cast<long>(pieces_.size()) - 1);
    // Guard against the double rounding of u near a piece boundary.
    while (idx > 0 && u < BigReal(pieces_[idx].a)) --idx;
    while (idx + 1 < static_cast<long>(pieces_.size()) && u > BigReal(pieces_[idx].b)) ++idx;
    return pieces_[static_cast<std::size_t>(idx)];
}

BigReal DickmanTable::integral(const BigReal& c, const BigReal& d) const {
    BigReal total(0);
    const BigReal one(1);
    if (c < one) total += (d < one ? d : one) - c;
    for (const Piece& p : pieces_) {
        const BigReal pa(p.a), pb(p.b);
        const BigReal lo = c > pa ? c : pa;
        const BigReal hi = d < pb ? d : pb;
        if (!(lo < hi)) continue;
        const BigReal mid((p.a + p.b) / 2), half((p.b - p.a) / 2);
        total += clenshaw(p.int_coef, (hi - mid) / half) - clenshaw(p.int_coef, (lo - mid) / half);
    }
    return total;
}

BigReal DickmanTable::rho(const BigReal& u) const {
    if (u.sign() < 0) throw DomainError("rho(u) requires u >= 0");
    if (u > BigReal(u_max_)) throw DomainError("rho(u): u beyond the table's u_max; rebuild the table");
    if (u <= BigReal(1)) return BigReal(1);
    const Piece& p = piece_for(u);
    const BigReal mid((p.a + p.b) / 2), half((p.b - p.a) / 2);
    return clenshaw(p.coef, (u - mid) / half);
}

double DickmanTable::rho(double u) const {
    WorkingPrecision wp(30);
    return rho(BigReal(u)).to_double();
}

BigReal DickmanTable::derivative(const BigReal& u) const {
    if (!(u > BigReal(1)) || u > BigReal(u_max_)) throw DomainError("rho'(u) tabulated only on (1, u_max]");
    const Piece& p = piece_for(u);
    const BigReal mid((p.a + p.b) / 2), half((p.b - p.a) / 2);
    return clenshaw(derivative_coefficients(p.coef), (u - mid) / half) / half;
}

void DickmanTable::write_csv(std::ostream& out, double step) const {
    if (!(step > 0.0)) throw DomainError("write_csv: step must be positive");
    WorkingPrecision wp(30);
    out << "u,rho\n";
    const long n = static_cast<long>(std::floor(u_max_ / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        const double u = std::min(u_max_, i * step);
        out << u << ',' << rho(BigReal(u)).str(17) << '\n';
    }
}

BigReal rho(const BigReal& u, const DickmanTable& table) { return table.rho(u); }

} // namespace cbc
