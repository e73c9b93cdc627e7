#pragma once

// Independent reference computations used by the tests.  Nothing here calls
// into the library: central binomials are built with Boost's big integers and
// valuations come from Legendre's factorial formula.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace oracle {

using boost::multiprecision::cpp_int;

/// C(2n,n) for n = 0..n_max, via C(2n+2,n+1) = C(2n,n) (2n+1)(2n+2) / (n+1)^2.
inline std::vector<cpp_int> central_binomials(unsigned n_max) {
    std::vector<cpp_int> c(n_max + 1);
    c[0] = 1;
    for (unsigned n = 0; n < n_max; ++n) {
        cpp_int next = c[n] * (2 * n + 1) * (2 * n + 2);
        next /= cpp_int(n + 1) * (n + 1);
        c[n + 1] = next;
    }
    return c;
}

/// Exponent of p in C(2n,n) = (2n)!/(n!)^2 by Legendre's formula.
inline unsigned legendre_valuation(std::uint64_t n, std::uint64_t p) {
    unsigned v = 0;
    for (std::uint64_t q = p; q <= 2 * n; q *= p) {
        v += static_cast<unsigned>(2 * n / q - 2 * (n / q));
        if (q > 2 * n / p) break;
    }
    return v;
}

/// Primes up to `limit` by plain trial division.
inline std::vector<std::uint64_t> primes_upto(std::uint64_t limit) {
    std::vector<std::uint64_t> ps;
    for (std::uint64_t m = 2; m <= limit; ++m) {
        bool prime = true;
        for (std::uint64_t p : ps) {
            if (p * p > m) break;
            if (m % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) ps.push_back(m);
    }
    return ps;
}

/// Largest ell <= cap with n^ell | C, by repeated big-integer division.
inline unsigned max_power_bruteforce(std::uint64_t n, const cpp_int& c, unsigned cap) {
    if (n == 1) return cap;
    cpp_int q = c;
    unsigned ell = 0;
    while (ell < cap && q % n == 0) {
        q /= n;
        ++ell;
    }
    return ell;
}

/// gcd(n, C) == 1 by big-integer remainder.
inline bool coprime_bruteforce(std::uint64_t n, const cpp_int& c) {
    const auto r = static_cast<std::uint64_t>(c % n);
    std::uint64_t a = n, b = r;
    while (b != 0) {
        const std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a == 1;
}

} // namespace oracle
