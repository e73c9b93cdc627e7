#pragma once

/**
 * Exact divisibility predicates for the central binomial coefficient C(2n,n).
 *
 * By Kummer's theorem the exponent of a prime p in C(2n,n) is the number of
 * carries when n is added to itself in base p, which equals
 *
 *     (2 S_p(n) - S_p(2n)) / (p - 1),        S_p = base-p digit sum.
 *
 * All integers are native 64-bit; n must satisfy n < 2^62 so that 2n fits.
 */

#include <cstdint>
#include <span>
#include <vector>

namespace cbc {

using u64 = std::uint64_t;

/// Exclusive upper limit on n accepted by the carry engine.
inline constexpr u64 kMaxN = u64{1} << 62;

/// p^a exactly dividing n.
struct PrimePower {
    u64 p = 0;
    unsigned a = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization of n >= 1; factors ordered by strictly increasing p.
struct Factorization {
    u64 n = 1;
    std::vector<PrimePower> factors;

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Exponent of p in C(2n,n) for a given n.
struct CarryReport {
    u64 n = 0;
    u64 p = 0;
    unsigned carries = 0;
};

/// Sum of the base-p digits of n.  Throws DomainError if p < 2.
unsigned digit_sum(u64 n, u64 p);

/// Carries of n + n in base p (= exponent of p in C(2n,n)).
/// Throws DomainError for n = 0 or p < 2, RangeError for n >= 2^62.
CarryReport carries(u64 n, u64 p);

/// Unchecked hot-path variant of carries(): requires 1 <= n < 2^62, p >= 2.
unsigned carry_count(u64 n, u64 p) noexcept;

/// True iff n^ell divides C(2n,n), i.e. carries(n,p) >= ell*a for every p^a || n.
bool divides_power(const Factorization& f, unsigned ell);

/// True iff gcd(n, C(2n,n)) = 1, i.e. carries(n,p) = 0 for every p | n.
bool is_coprime_cbc(const Factorization& f);

/// True when the largest prime p of n has p^2 > 2n.  Then n = (d,0) in base p
/// with d < p/2, so n + n has no carry, p does not divide C(2n,n), and
/// n^ell | C(2n,n) is impossible for every ell.  False means "no conclusion".
bool large_prime_filter(const Factorization& f);

/// Largest ell (capped at ell_cap) with n^ell | C(2n,n); ell_cap for n = 1.
unsigned max_power(u64 n, std::span<const PrimePower> factors, unsigned ell_cap);

/// Trial-division factorization, for tests and one-off queries.
/// Throws DomainError for n = 0, RangeError for n >= 2^62.
Factorization factorize(u64 n);

/// Checks the Factorization invariants (primality, ordering, product).
bool is_valid(const Factorization& f);

/// Deterministic primality test for 64-bit integers (Miller-Rabin).
bool is_prime(u64 n);

} // namespace cbc
