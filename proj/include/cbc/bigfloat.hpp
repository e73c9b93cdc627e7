#pragma once

/**
 * Configurable-precision real and complex arithmetic on top of MPFR.
 *
 * Precision is explicit: every value carries its own MPFR precision, and
 * freshly created values (results of arithmetic, constants, conversions)
 * take the calling thread's current working precision, which is set with
 * the RAII guard WorkingPrecision.  Public numerical entry points of the
 * library take a `precision` argument in decimal digits and install the
 * guard themselves, so callers never depend on ambient state.
 *
 * Copies are exact (the destination adopts the source precision).  Every
 * arithmetic result, including that of a compound operator such as +=, is
 * produced at the current working precision.
 */

#include <mpfr.h>

#include <concepts>
#include <cstdint>
#include <string>
#include <utility>

namespace cbc {

/// Bits needed to carry `digits` significant decimal digits (plus a small cushion).
mpfr_prec_t digits_to_bits(int digits);

/// Thread-local working precision guard.
class WorkingPrecision {
public:
    explicit WorkingPrecision(int digits);
    ~WorkingPrecision();
    WorkingPrecision(const WorkingPrecision&) = delete;
    WorkingPrecision& operator=(const WorkingPrecision&) = delete;

    /// Current working precision of the calling thread, in decimal digits.
    static int digits();
    /// Current working precision of the calling thread, in bits.
    static mpfr_prec_t bits();

private:
    int saved_digits_;
};

class BigReal {
public:
    BigReal();
    BigReal(double x);
    template <std::integral I>
    BigReal(I x) : BigReal() {
        if constexpr (std::is_signed_v<I>)
            mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN);
        else
            mpfr_set_ui(v_, static_cast<unsigned long>(x), MPFR_RNDN);
    }
    /// Parses a decimal string such as "0.1142474302" or "3.4e-13"; throws DomainError on junk.
    explicit BigReal(const std::string& text);

    BigReal(const BigReal& other);
    BigReal(BigReal&& other) noexcept;
    BigReal& operator=(const BigReal& other);
    BigReal& operator=(BigReal&& other) noexcept;
    ~BigReal();

    /// A zero carrying an explicit precision in bits.
    static BigReal with_bits(mpfr_prec_t bits);

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    /// Rounds the value in place to `bits` of precision.
    void round_to_bits(mpfr_prec_t bits);

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDZ); }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    /// Scientific notation with `sig_digits` significant digits, e.g. "1.142474302e-01".
    std::string str(int sig_digits) const;

    BigReal& operator+=(const BigReal& b);
    BigReal& operator-=(const BigReal& b);
    BigReal& operator*=(const BigReal& b);
    BigReal& operator/=(const BigReal& b);
    BigReal& operator*=(long b);
    BigReal& operator/=(long b);

private:
    mpfr_t v_;
};

BigReal operator-(const BigReal& a);
BigReal operator+(const BigReal& a, const BigReal& b);
BigReal operator-(const BigReal& a, const BigReal& b);
BigReal operator*(const BigReal& a, const BigReal& b);
BigReal operator/(const BigReal& a, const BigReal& b);
BigReal operator*(const BigReal& a, long b);
BigReal operator*(long a, const BigReal& b);
BigReal operator/(const BigReal& a, long b);

bool operator<(const BigReal& a, const BigReal& b);
bool operator>(const BigReal& a, const BigReal& b);
bool operator<=(const BigReal& a, const BigReal& b);
bool operator>=(const BigReal& a, const BigReal& b);
bool operator==(const BigReal& a, const BigReal& b);
bool operator!=(const BigReal& a, const BigReal& b);

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal exp(const BigReal& x);
BigReal expm1(const BigReal& x);
BigReal log(const BigReal& x);
BigReal log1p(const BigReal& x);
BigReal sin(const BigReal& x);
BigReal cos(const BigReal& x);
BigReal atan2(const BigReal& y, const BigReal& x);
BigReal pow(const BigReal& x, const BigReal& y);
BigReal pow(const BigReal& x, long n);
BigReal floor(const BigReal& x);
/// x * 2^e, exact.
BigReal ldexp(const BigReal& x, long e);

BigReal const_pi();
BigReal const_euler();
BigReal const_log2();

/// Complex number as a pair of BigReal.
struct BigComplex {
    BigReal re;
    BigReal im;

    BigComplex() = default;
    BigComplex(BigReal r) : re(std::move(r)), im(0) {}
    BigComplex(BigReal r, BigReal i) : re(std::move(r)), im(std::move(i)) {}
    BigComplex(double r) : re(r), im(0) {}
    BigComplex(double r, double i) : re(r), im(i) {}

    BigComplex& operator+=(const BigComplex& b);
    BigComplex& operator-=(const BigComplex& b);
    BigComplex& operator*=(const BigComplex& b);
    BigComplex& operator/=(const BigComplex& b);
    bool is_finite() const { return re.is_finite() && im.is_finite(); }
};

BigComplex operator-(const BigComplex& a);
BigComplex operator+(const BigComplex& a, const BigComplex& b);
BigComplex operator-(const BigComplex& a, const BigComplex& b);
BigComplex operator*(const BigComplex& a, const BigComplex& b);
BigComplex operator/(const BigComplex& a, const BigComplex& b);
BigComplex operator*(const BigComplex& a, const BigReal& b);
BigComplex operator*(const BigReal& a, const BigComplex& b);
BigComplex operator/(const BigComplex& a, const BigReal& b);
BigComplex operator*(const BigComplex& a, long b);
BigComplex operator/(const BigComplex& a, long b);

BigComplex conj(const BigComplex& z);
BigReal norm(const BigComplex& z);  ///< |z|^2
BigReal abs(const BigComplex& z);
BigReal arg(const BigComplex& z);   ///< in (-pi, pi]
BigComplex exp(const BigComplex& z);
BigComplex log(const BigComplex& z); ///< principal branch

} // namespace cbc
