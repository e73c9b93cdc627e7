#pragma once

/**
 * Exact counting of n in [lo, hi] with n^ell | C(2n,n) (ell = 1..ell_max)
 * and with gcd(n, C(2n,n)) = 1, over a segmented factorization sieve.
 *
 * Each segment is factored by striking multiples of the base primes
 * (all primes up to sqrt(hi)); a residual cofactor > 1 is a single large
 * prime.  Segments are independent and may be processed by any number of
 * workers; the merged result does not depend on segmentation or schedule.
 */

#include "cbc/kummer.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cbc {

/// Default number of integers per sieve segment.
inline constexpr u64 kDefaultSegmentSize = u64{1} << 20;

/// Default cap on memory for the base-prime sieve (bytes).
inline constexpr std::size_t kDefaultSieveBudget = std::size_t{1} << 30;

/// All primes <= limit, via a bit-packed odd-only sieve.
/// Throws ResourceError if the bit array would exceed `budget_bytes`.
std::vector<u64> base_primes(u64 limit, std::size_t budget_bytes = kDefaultSieveBudget);

/// floor(sqrt(n)), exact for every 64-bit n.
u64 isqrt(u64 n);

struct SegmentSpec {
    u64 lo = 1;
    u64 hi = 1;
    const std::vector<u64>* base_primes = nullptr;  ///< sorted, complete up to isqrt(hi)
};

/// Complete factorizations of every n in [seg.lo, seg.hi], in order.
/// Throws ConsistencyError if a residual cofactor is not prime (incomplete base primes).
std::vector<Factorization> factorize_segment(const SegmentSpec& seg);

struct CountTable {
    u64 range_lo = 1;
    u64 range_hi = 0;                 ///< range_hi = range_lo - 1 denotes the empty range
    unsigned ell_max = 1;
    bool include_coprime = true;
    std::vector<u64> counts_by_ell;   ///< counts_by_ell[ell-1] = #{n : n^ell | C(2n,n)}
    u64 coprime_count = 0;

    /// Empty table starting at `lo`; merging it is the identity.
    static CountTable empty(u64 lo, unsigned ell_max, bool include_coprime);

    u64 size() const { return range_hi + 1 - range_lo; }
    bool is_empty() const { return range_hi + 1 == range_lo; }
    /// Count for a given ell in 1..ell_max.
    u64 count(unsigned ell) const { return counts_by_ell.at(ell - 1); }

    friend bool operator==(const CountTable&, const CountTable&) = default;
};

/// Progress report: the contiguous completed prefix [lo, m] of the run.
using ProgressFn = std::function<void(const CountTable& prefix)>;

struct CountOptions {
    u64 segment_size = kDefaultSegmentSize;
    unsigned threads = 1;
    std::size_t sieve_budget = kDefaultSieveBudget;
    ProgressFn on_progress;                        ///< optional, called from the calling thread
    const std::atomic<bool>* cancel = nullptr;     ///< optional; stop early and return the prefix
};

/// Exact counts over [lo, hi].  Throws DomainError on bad arguments,
/// RangeError if hi >= 2^62, ResourceError if the base-prime sieve exceeds budget.
CountTable count_range(u64 lo, u64 hi, unsigned ell_max, bool include_coprime,
                       const CountOptions& options = {});

/// Convenience overload matching the (lo, hi, ell_max, coprime, segment_size) signature.
CountTable count_range(u64 lo, u64 hi, unsigned ell_max, bool include_coprime, u64 segment_size);

/// Counter-wise sum of tables over adjacent disjoint ranges (in either order).
/// Throws DomainError on overlap, gaps, or mismatched ell_max / coprime flag.
CountTable merge(const CountTable& a, const CountTable& b);

/// Checkpoint file format version written by checkpoint_write.
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes the table atomically (temporary file + rename).
void checkpoint_write(const CountTable& table, const std::string& path);

/// Reads a table; throws LoadError on a missing, corrupt or mismatched file.
CountTable checkpoint_read(const std::string& path);

/// CSV with header "range_lo,range_hi,ell,count"; ell = 0 is the coprime row.
void write_csv(std::ostream& out, const CountTable& table, bool header = true);

} // namespace cbc
