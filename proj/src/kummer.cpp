#include "cbc/kummer.hpp"
#include "cbc/errors.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

namespace cbc {

namespace {

void check_n(u64 n) {
    if (n == 0) throw DomainError("n must be at least 1");
    if (n >= kMaxN) throw RangeError("n = " + std::to_string(n) + " exceeds the 2^62 engine limit");
}

/// Digit sum with 32-bit division when both operands fit (much cheaper on x86).
inline unsigned digit_sum_fast(u64 n, u64 p) noexcept {
    unsigned s = 0;
    while (n > std::numeric_limits<std::uint32_t>::max()) {
        s += static_cast<unsigned>(n % p);
        n /= p;
    }
    auto m = static_cast<std::uint32_t>(n);
    if (p > std::numeric_limits<std::uint32_t>::max()) return s + m;
    auto q = static_cast<std::uint32_t>(p);
    while (m != 0) {
        s += m % q;
        m /= q;
    }
    return s;
}

u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 pow_mod(u64 a, u64 e, u64 m) {
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace

unsigned digit_sum(u64 n, u64 p) {
    if (p < 2) throw DomainError("digit_sum: base must be at least 2");
    return digit_sum_fast(n, p);
}

unsigned carry_count(u64 n, u64 p) noexcept {
    if (p == 2) return static_cast<unsigned>(std::popcount(n));  // 2 S_2(n) - S_2(2n) = S_2(n)
    return (2 * digit_sum_fast(n, p) - digit_sum_fast(2 * n, p)) / static_cast<unsigned>(p - 1);
}

CarryReport carries(u64 n, u64 p) {
    check_n(n);
    if (p < 2) throw DomainError("carries: base must be at least 2");
    return {n, p, carry_count(n, p)};
}

unsigned max_power(u64 n, std::span<const PrimePower> factors, unsigned ell_cap) {
    unsigned best = ell_cap;
    if (!factors.empty()) {
        const u64 pmax = factors.back().p;
        if (static_cast<unsigned __int128>(pmax) * pmax > 2 * static_cast<unsigned __int128>(n)) return 0;
    }
    for (const auto& f : factors) {
        const unsigned c = carry_count(n, f.p);
        best = std::min(best, c / f.a);
        if (best == 0) break;
    }
    return best;
}

bool divides_power(const Factorization& f, unsigned ell) {
    if (ell == 0) return true;
    for (const auto& pp : f.factors) {
        if (carries(f.n, pp.p).carries < ell * pp.a) return false;
    }
    return true;
}

bool is_coprime_cbc(const Factorization& f) {
    for (const auto& pp : f.factors) {
        if (carries(f.n, pp.p).carries != 0) return false;
    }
    return true;
}

bool large_prime_filter(const Factorization& f) {
    if (f.factors.empty()) return false;
    const u64 p = f.factors.back().p;
    return static_cast<unsigned __int128>(p) * p > 2 * static_cast<unsigned __int128>(f.n);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // These bases are deterministic for all n < 2^64.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Factorization factorize(u64 n) {
    check_n(n);
    Factorization f{n, {}};
    u64 m = n;
    auto strip = [&](u64 p) {
        unsigned a = 0;
        while (m % p == 0) {
            m /= p;
            ++a;
        }
        if (a) f.factors.push_back({p, a});
    };
    strip(2);
    strip(3);
    for (u64 p = 5; p * p <= m; p += 6) {
        strip(p);
        strip(p + 2);
    }
    if (m > 1) f.factors.push_back({m, 1});
    return f;
}

bool is_valid(const Factorization& f) {
    if (f.n == 0) return false;
    unsigned __int128 prod = 1;
    u64 prev = 1;
    for (const auto& pp : f.factors) {
        if (pp.p <= prev || pp.a == 0 || !is_prime(pp.p)) return false;
        prev = pp.p;
        for (unsigned i = 0; i < pp.a; ++i) {
            prod *= pp.p;
            if (prod > f.n) return false;
        }
    }
    return prod == f.n;
}

} // namespace cbc
