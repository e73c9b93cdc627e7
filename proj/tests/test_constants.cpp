#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbc/constants.hpp"
#include "cbc/errors.hpp"

#include <cmath>
#include <limits>

using namespace cbc;

namespace {

double rel(const BigReal& got, double want) { return std::abs(got.to_double() / want - 1.0); }

} // namespace

TEST_CASE("fixed-Talbot self-tests at 64 nodes") {
    for (int precision : {30, 50, 70}) {
        WorkingPrecision wp(precision + 10);
        const BigReal tol = pow(BigReal(10), -static_cast<long>(precision / 2));
        CAPTURE(precision);
        const auto one = invert_laplace([](const BigComplex& s) { return BigComplex(1.0) / s; }, BigReal(1), 64, precision);
        CHECK(abs(one.value - BigReal(1)) < tol);
        const auto ramp = invert_laplace([](const BigComplex& s) { return BigComplex(1.0) / (s * s); }, BigReal(3), 64,
                                         precision);
        CHECK(abs(ramp.value - BigReal(3)) < tol);
        const auto decay = invert_laplace([](const BigComplex& s) { return BigComplex(1.0) / (s + BigComplex(1.0)); },
                                          BigReal(2), 64, precision);
        CHECK(abs(decay.value - exp(BigReal(-2))) < tol);
        CHECK(decay.nodes == 64);
        CHECK(abs(decay.delta - abs(decay.value - decay.doubled)) < tol);
    }
}

TEST_CASE("fixed-Talbot default node count reaches 1e-40 at 100 digits") {
    WorkingPrecision wp(110);
    CHECK(default_talbot_nodes(100) >= 64);
    const auto r = invert_laplace([](const BigComplex& s) { return BigComplex(1.0) / (s + BigComplex(1.0)); },
                                  BigReal(2), 0, 100);
    CHECK(abs(r.value - exp(BigReal(-2))) < BigReal("1e-40"));
}

TEST_CASE("invert_laplace reports the failing node") {
    const Transform bad = [](const BigComplex& s) {
        return s.im > BigReal(5) ? BigComplex(std::numeric_limits<double>::quiet_NaN()) : BigComplex(1.0) / s;
    };
    CHECK_THROWS_AS(invert_laplace(bad, BigReal(1), 64, 30), PropagationError);
    try {
        invert_laplace(bad, BigReal(1), 64, 30);
    } catch (const PropagationError& e) {
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
    CHECK_THROWS_AS(invert_laplace(bad, BigReal(-1), 64, 30), DomainError);
}

TEST_CASE("F_cl") {
    WorkingPrecision wp(60);
    CHECK_THROWS_AS(F_cl(BigComplex(0.0), 1, 200, 50), SingularityError);
    // Direct evaluation of exp(-sum 2^{1-k} C(k-2, 0) E1(1/k)), summed in reverse order.
    BigReal expo(0);
    for (long k = 200; k >= 2; --k) expo -= ldexp(BigReal(1), 1 - k) * e1(BigReal(1) / BigReal(k), 55);
    CHECK(abs(F_cl(BigComplex(1.0), 1, 200, 50).re - exp(expo)) < BigReal("1e-48"));
    const BigReal first3 = ldexp(e1(BigReal("0.5"), 55), -1) + ldexp(e1(BigReal(1) / BigReal(3), 55), -2) +
                           ldexp(e1(BigReal("0.25"), 55), -3);
    CHECK(abs(F_cl(BigComplex(1.0), 1, 4, 50).re - exp(-first3)) < BigReal("1e-48"));
    const BigComplex far = F_cl(BigComplex(1e6), 2, 100, 30) * BigComplex(1e6);
    CHECK(abs(far.re - BigReal(1)) < BigReal("1e-25"));
}

TEST_CASE("c_6 at moderate cost") {
    const DensityEstimate e = compute_cl(6, 30, 800);
    CHECK(e.target == Target::c_ell);
    CHECK(e.ell == 6);
    CHECK(e.nodes == 800);
    CHECK(e.method == "bromwich-line");
    CHECK(rel(e.value, 3.403909048013e-13) < 1e-9);
    CHECK(e.stability_delta.to_double() / e.value.to_double() < 1e-8);
    CHECK_FALSE(e.convergence_warning);
}

TEST_CASE("c_1 does not depend on the line") {
    LineSettings a = cl_line_settings(1);
    LineSettings b = a;
    b.sigma = 2.0;
    const double va = compute_cl(1, a, 30, 1600).value.to_double();
    const double vb = compute_cl(1, b, 30, 1600).value.to_double();
    CHECK(std::abs(va / vb - 1.0) < 1e-9);
    CHECK(va == doctest::Approx(0.1142474302).epsilon(1e-8));
}

TEST_CASE("c_3 on two lines") {
    LineSettings right;
    right.sigma = 1.0;
    right.subtract_order = 4;
    const double va = compute_cl(3, 30, 800).value.to_double();
    const double vb = compute_cl(3, right, 30, 1600).value.to_double();
    CHECK(std::abs(va / 3.151177749010e-5 - 1.0) < 1e-8);
    CHECK(std::abs(vb / 3.151177749010e-5 - 1.0) < 1e-8);
}

TEST_CASE("too few nodes raises the convergence warning") {
    const DensityEstimate e = compute_cl(2, 30, 32);
    CHECK(e.convergence_warning);
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(compute_cl(0), DomainError);
    CHECK_THROWS_AS(compute_cl(31), DomainError);
    CHECK_THROWS_AS(compute_cl(2, 20), DomainError);
    CHECK_THROWS_AS(compute_cl(2, 30, 8), DomainError);
    LineSettings left;
    left.sigma = -5.0;
    left.subtract_order = 4;
    CHECK_THROWS_AS(compute_cl(1, left, 30, 800), DomainError);
    CHECK_THROWS_AS(compute_coprime_c(10), DomainError);
}

TEST_CASE("c_l decreases and stays below rho(l+1)") {
    const DickmanTable table;
    WorkingPrecision wp(40);
    double prev = 1.0;
    for (long ell = 1; ell <= 10; ++ell) {
        const double c = compute_cl(ell, 30, 800).value.to_double();
        CAPTURE(ell);
        CHECK(c < prev);
        CHECK(c <= table.rho(static_cast<double>(ell + 1)));
        prev = c;
    }
}

TEST_CASE("coprime pieces") {
    WorkingPrecision wp(60);
    CHECK(abs(coprime_J(BigComplex(1.0), 2, 50).re - ldexp(e1(BigReal("0.5"), 50), -1)) < BigReal("1e-48"));
    const long M = coprime_m_max(50);
    CHECK(std::ldexp(1.0, static_cast<int>(1 - M)) < 1e-55);
    CHECK(abs(coprime_J(BigComplex(1.0), M, 50).re - BigReal("0.787423145122223055923724488274894898293802765")) <
          BigReal("1e-45"));
    CHECK(abs(coprime_J(BigComplex(1e6), M, 30)) < BigReal("1e-100"));
    CHECK(abs(coprime_log_sum(50) - BigReal("0.507833922868438392189041840722076374246218433")) < BigReal("1e-45"));
}

TEST_CASE("coprime constant") {
    const DensityEstimate c = compute_coprime_c(30, 800);
    CHECK(c.target == Target::coprime_c);
    CHECK(std::abs(c.value.to_double() - 1.526453) < 1e-5);
    CHECK(c.stability_delta.to_double() < 1e-7);
}

TEST_CASE("u* and the asymptotic estimate") {
    WorkingPrecision wp(60);
    CHECK(abs(ustar(2, 50) - BigReal("3.05145456537427720588449168374754717282138157659799905450537")) < BigReal("1e-45"));
    const BigReal l4 = log(BigReal(4));
    CHECK(abs(ustar(2, 50) - (BigReal(5) - log(BigReal(4) * l4) - log(l4) / l4)) < BigReal("1e-45"));
    CHECK(abs(ustar(12, 50) - BigReal("20.3018478928394878073750532499499985815615969447345626387091")) < BigReal("1e-44"));
    CHECK_THROWS_AS(ustar(1, 50), DomainError);

    const DickmanTable table;
    const DensityEstimate a = asymptotic_cl(4, table, 30);
    CHECK(a.target == Target::rho_of_ustar);
    CHECK(rel(a.value, table.rho(ustar(4, 30).to_double())) < 1e-14);
    CHECK_THROWS_AS(asymptotic_cl(1, table, 30), DomainError);
    const DickmanTable short_table(5.0);
    CHECK_THROWS_AS(asymptotic_cl(4, short_table, 30), DomainError);
    CHECK(to_string(Target::c_ell) == "c_ell");
    CHECK(to_string(Target::coprime_c) == "coprime_c");
    CHECK(to_string(Target::rho_of_ustar) == "rho_of_ustar");
}
