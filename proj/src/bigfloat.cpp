#include "cbc/bigfloat.hpp"
#include "cbc/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace cbc {

namespace {

thread_local int g_digits = 100;

} // namespace

mpfr_prec_t digits_to_bits(int digits) {
    if (digits < 1) throw DomainError("precision must be at least one decimal digit");
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362)) + 8;
}

WorkingPrecision::WorkingPrecision(int digits) : saved_digits_(g_digits) {
    if (digits < 1) throw DomainError("precision must be at least one decimal digit");
    g_digits = digits;
}

WorkingPrecision::~WorkingPrecision() { g_digits = saved_digits_; }

int WorkingPrecision::digits() { return g_digits; }

mpfr_prec_t WorkingPrecision::bits() { return digits_to_bits(g_digits); }

// ---------------------------------------------------------------- BigReal

BigReal::BigReal() {
    mpfr_init2(v_, WorkingPrecision::bits());
    mpfr_set_zero(v_, 1);
}

BigReal::BigReal(double x) : BigReal() { mpfr_set_d(v_, x, MPFR_RNDN); }

BigReal::BigReal(const std::string& text) : BigReal() {
    char* end = nullptr;
    mpfr_strtofr(v_, text.c_str(), &end, 10, MPFR_RNDN);
    if (text.empty() || end == text.c_str() || *end != '\0')
        throw DomainError("not a decimal number: '" + text + "'");
}

BigReal::BigReal(const BigReal& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
    // `other` is left holding a valid (NaN) value of its own precision.
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_swap(v_, other.v_);
}

BigReal& BigReal::operator=(const BigReal& other) {
    if (this != &other) {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
}

BigReal::~BigReal() { mpfr_clear(v_); }

BigReal BigReal::with_bits(mpfr_prec_t bits) {
    BigReal r;
    mpfr_set_prec(r.v_, bits);
    mpfr_set_zero(r.v_, 1);
    return r;
}

void BigReal::round_to_bits(mpfr_prec_t bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

std::string BigReal::str(int sig_digits) const {
    if (sig_digits < 1) sig_digits = 1;
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", sig_digits - 1, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

namespace {

/// Compound operators produce working-precision results like the binary ones;
/// widening is exact, narrowing rounds once.
inline mpfr_ptr at_working(mpfr_ptr v) {
    const mpfr_prec_t bits = WorkingPrecision::bits();
    if (mpfr_get_prec(v) != bits) mpfr_prec_round(v, bits, MPFR_RNDN);
    return v;
}

} // namespace

BigReal& BigReal::operator+=(const BigReal& b) { mpfr_add(at_working(v_), v_, b.v_, MPFR_RNDN); return *this; }
BigReal& BigReal::operator-=(const BigReal& b) { mpfr_sub(at_working(v_), v_, b.v_, MPFR_RNDN); return *this; }
BigReal& BigReal::operator*=(const BigReal& b) { mpfr_mul(at_working(v_), v_, b.v_, MPFR_RNDN); return *this; }
BigReal& BigReal::operator/=(const BigReal& b) { mpfr_div(at_working(v_), v_, b.v_, MPFR_RNDN); return *this; }
BigReal& BigReal::operator*=(long b) { mpfr_mul_si(at_working(v_), v_, b, MPFR_RNDN); return *this; }
BigReal& BigReal::operator/=(long b) { mpfr_div_si(at_working(v_), v_, b, MPFR_RNDN); return *this; }

BigReal operator-(const BigReal& a) { BigReal r; mpfr_neg(r.get(), a.get(), MPFR_RNDN); return r; }
BigReal operator+(const BigReal& a, const BigReal& b) { BigReal r; mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
BigReal operator-(const BigReal& a, const BigReal& b) { BigReal r; mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
BigReal operator*(const BigReal& a, const BigReal& b) { BigReal r; mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
BigReal operator/(const BigReal& a, const BigReal& b) { BigReal r; mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
BigReal operator*(const BigReal& a, long b) { BigReal r; mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN); return r; }
BigReal operator*(long a, const BigReal& b) { return b * a; }
BigReal operator/(const BigReal& a, long b) { BigReal r; mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN); return r; }

bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }
bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
bool operator!=(const BigReal& a, const BigReal& b) { return !(a == b); }

#define CBC_UNARY(name, fn)                                 \
    BigReal name(const BigReal& x) {                        \
        BigReal r;                                          \
        fn(r.get(), x.get(), MPFR_RNDN);                    \
        return r;                                           \
    }

CBC_UNARY(abs, mpfr_abs)
CBC_UNARY(sqrt, mpfr_sqrt)
CBC_UNARY(exp, mpfr_exp)
CBC_UNARY(expm1, mpfr_expm1)
CBC_UNARY(log, mpfr_log)
CBC_UNARY(log1p, mpfr_log1p)
CBC_UNARY(sin, mpfr_sin)
CBC_UNARY(cos, mpfr_cos)

#undef CBC_UNARY

BigReal floor(const BigReal& x) { BigReal r; mpfr_floor(r.get(), x.get()); return r; }

BigReal atan2(const BigReal& y, const BigReal& x) {
    BigReal r;
    mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
    return r;
}

BigReal pow(const BigReal& x, const BigReal& y) { BigReal r; mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN); return r; }
BigReal pow(const BigReal& x, long n) { BigReal r; mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN); return r; }
BigReal ldexp(const BigReal& x, long e) { BigReal r; mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN); return r; }

BigReal const_pi() { BigReal r; mpfr_const_pi(r.get(), MPFR_RNDN); return r; }
BigReal const_euler() { BigReal r; mpfr_const_euler(r.get(), MPFR_RNDN); return r; }
BigReal const_log2() { BigReal r; mpfr_const_log2(r.get(), MPFR_RNDN); return r; }

// ------------------------------------------------------------- BigComplex

BigComplex& BigComplex::operator+=(const BigComplex& b) { re += b.re; im += b.im; return *this; }
BigComplex& BigComplex::operator-=(const BigComplex& b) { re -= b.re; im -= b.im; return *this; }
BigComplex& BigComplex::operator*=(const BigComplex& b) { *this = *this * b; return *this; }
BigComplex& BigComplex::operator/=(const BigComplex& b) { *this = *this / b; return *this; }

BigComplex operator-(const BigComplex& a) { return {-a.re, -a.im}; }
BigComplex operator+(const BigComplex& a, const BigComplex& b) { return {a.re + b.re, a.im + b.im}; }
BigComplex operator-(const BigComplex& a, const BigComplex& b) { return {a.re - b.re, a.im - b.im}; }

BigComplex operator*(const BigComplex& a, const BigComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

BigComplex operator/(const BigComplex& a, const BigComplex& b) {
    // Smith's algorithm keeps intermediate magnitudes near those of the operands.
    if (abs(b.re) >= abs(b.im)) {
        BigReal r = b.im / b.re;
        BigReal d = b.re + b.im * r;
        return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    BigReal r = b.re / b.im;
    BigReal d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}

BigComplex operator*(const BigComplex& a, const BigReal& b) { return {a.re * b, a.im * b}; }
BigComplex operator*(const BigReal& a, const BigComplex& b) { return b * a; }
BigComplex operator/(const BigComplex& a, const BigReal& b) { return {a.re / b, a.im / b}; }
BigComplex operator*(const BigComplex& a, long b) { return {a.re * b, a.im * b}; }
BigComplex operator/(const BigComplex& a, long b) { return {a.re / b, a.im / b}; }

BigComplex conj(const BigComplex& z) { return {z.re, -z.im}; }
BigReal norm(const BigComplex& z) { return z.re * z.re + z.im * z.im; }

BigReal abs(const BigComplex& z) {
    BigReal r;
    mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
    return r;
}

BigReal arg(const BigComplex& z) { return atan2(z.im, z.re); }

BigComplex exp(const BigComplex& z) {
    BigReal m = exp(z.re);
    BigReal s, c;
    mpfr_sin_cos(s.get(), c.get(), z.im.get(), MPFR_RNDN);
    return {m * c, m * s};
}

BigComplex log(const BigComplex& z) { return {log(abs(z)), arg(z)}; }

} // namespace cbc
