#include "cbc/counting.hpp"
#include "cbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace cbc {

u64 isqrt(u64 n) {
    auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<u64> base_primes(u64 limit, std::size_t budget_bytes) {
    std::vector<u64> primes;
    if (limit < 2) return primes;
    primes.push_back(2);
    // Bit i represents the odd number 2i + 1; bit 0 (the number 1) is unused.
    const u64 nbits = limit / 2 + 1;
    const u64 nwords = (nbits + 63) / 64;
    if (nwords * 8 > budget_bytes)
        throw ResourceError("base-prime sieve up to " + std::to_string(limit) + " needs " +
                            std::to_string(nwords * 8) + " bytes, over the configured budget");
    std::vector<std::uint64_t> composite(nwords, 0);
    auto is_set = [&](u64 i) { return (composite[i >> 6] >> (i & 63)) & 1; };
    for (u64 i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
        if (is_set(i)) continue;
        const u64 p = 2 * i + 1;
        for (u64 j = (p * p) / 2; j < nbits; j += p) composite[j >> 6] |= u64{1} << (j & 63);
    }
    for (u64 i = 1; i < nbits; ++i) {
        const u64 v = 2 * i + 1;
        if (v > limit) break;
        if (!is_set(i)) primes.push_back(v);
    }
    return primes;
}

namespace {

void check_range(u64 lo, u64 hi) {
    if (lo < 1) throw DomainError("range must start at 1 or above");
    if (lo > hi) throw DomainError("empty range: lo > hi");
    if (hi >= kMaxN) throw RangeError("range end exceeds the 2^62 engine limit");
}

/// Per-worker scratch buffers for one segment.
class SegmentCounter {
public:
    /// Counts [lo, hi] and returns a histogram of max_power values (0..ell_max)
    /// followed by the coprime count in the last slot.
    std::vector<u64> run(u64 lo, u64 hi, const std::vector<u64>& primes, unsigned ell_max,
                         bool include_coprime) {
        const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
        residual_.resize(len);
        dmin_.assign(len, static_cast<std::uint8_t>(ell_max));
        // When the coprime verdict is not wanted, treat it as already settled.
        carried_.assign(len, include_coprime ? 0 : 1);
        for (std::size_t i = 0; i < len; ++i) residual_[i] = lo + i;

        const u64 root = isqrt(hi);
        for (u64 p : primes) {
            if (p > root) break;
            u64 m = (lo + p - 1) / p * p;
            for (; m <= hi; m += p) {
                const std::size_t i = static_cast<std::size_t>(m - lo);
                u64 r = residual_[i] / p;
                unsigned a = 1;
                while (r % p == 0) {
                    r /= p;
                    ++a;
                }
                residual_[i] = r;
                if (dmin_[i] == 0 && carried_[i]) continue;  // both verdicts settled
                const unsigned c = carry_count(m, p);
                dmin_[i] = static_cast<std::uint8_t>(std::min<unsigned>(dmin_[i], c / a));
                carried_[i] |= static_cast<std::uint8_t>(c != 0);
            }
        }

        std::vector<u64> hist(ell_max + 2, 0);
        for (std::size_t i = 0; i < len; ++i) {
            const u64 n = lo + i;
            const u64 r = residual_[i];
            if (r > 1 && !(dmin_[i] == 0 && carried_[i])) {
                // r is a prime with r^2 > hi >= n, so it divides n exactly once.
                if (static_cast<unsigned __int128>(r) * r > 2 * static_cast<unsigned __int128>(n)) {
                    dmin_[i] = 0;  // large-prime filter; such r never carries
                } else {
                    const unsigned c = carry_count(n, r);
                    dmin_[i] = static_cast<std::uint8_t>(std::min<unsigned>(dmin_[i], c));
                    carried_[i] |= static_cast<std::uint8_t>(c != 0);
                }
            }
            ++hist[dmin_[i]];
            if (!carried_[i]) ++hist[ell_max + 1];
        }
        return hist;
    }

private:
    std::vector<u64> residual_;
    std::vector<std::uint8_t> dmin_;
    std::vector<std::uint8_t> carried_;
};

CountTable table_from_hist(u64 lo, u64 hi, unsigned ell_max, bool include_coprime,
                           const std::vector<u64>& hist) {
    CountTable t = CountTable::empty(lo, ell_max, include_coprime);
    t.range_hi = hi;
    u64 running = 0;
    for (unsigned ell = ell_max; ell >= 1; --ell) {
        running += hist[ell];
        t.counts_by_ell[ell - 1] = running;
    }
    t.coprime_count = include_coprime ? hist[ell_max + 1] : 0;
    return t;
}

} // namespace

CountTable CountTable::empty(u64 lo, unsigned ell_max, bool include_coprime) {
    CountTable t;
    t.range_lo = lo;
    t.range_hi = lo - 1;
    t.ell_max = ell_max;
    t.include_coprime = include_coprime;
    t.counts_by_ell.assign(ell_max, 0);
    t.coprime_count = 0;
    return t;
}

std::vector<Factorization> factorize_segment(const SegmentSpec& seg) {
    check_range(seg.lo, seg.hi);
    if (seg.base_primes == nullptr) throw DomainError("factorize_segment: missing base primes");
    const u64 root = isqrt(seg.hi);
    std::vector<Factorization> out(seg.hi - seg.lo + 1);
    std::vector<u64> residual(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].n = seg.lo + i;
        residual[i] = seg.lo + i;
    }
    for (u64 p : *seg.base_primes) {
        if (p > root) break;
        for (u64 m = (seg.lo + p - 1) / p * p; m <= seg.hi; m += p) {
            const std::size_t i = static_cast<std::size_t>(m - seg.lo);
            unsigned a = 0;
            while (residual[i] % p == 0) {
                residual[i] /= p;
                ++a;
            }
            out[i].factors.push_back({p, a});
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const u64 r = residual[i];
        if (r == 1) continue;
        if (!is_prime(r))
            throw ConsistencyError("composite cofactor " + std::to_string(r) + " of " +
                                   std::to_string(out[i].n) + ": base primes incomplete");
        out[i].factors.push_back({r, 1});
    }
    return out;
}

CountTable count_range(u64 lo, u64 hi, unsigned ell_max, bool include_coprime, u64 segment_size) {
    CountOptions opt;
    opt.segment_size = segment_size;
    return count_range(lo, hi, ell_max, include_coprime, opt);
}

CountTable count_range(u64 lo, u64 hi, unsigned ell_max, bool include_coprime,
                       const CountOptions& options) {
    check_range(lo, hi);
    if (ell_max < 1 || ell_max > 20) throw DomainError("ell_max must lie in 1..20");
    if (options.segment_size < 1) throw DomainError("segment_size must be at least 1");

    const std::vector<u64> primes = base_primes(isqrt(hi), options.sieve_budget);
    const u64 seg = options.segment_size;
    const u64 nseg = (hi - lo) / seg + 1;
    auto seg_lo = [&](u64 k) { return lo + k * seg; };
    auto seg_hi = [&](u64 k) { return std::min(hi, lo + k * seg + (seg - 1)); };
    auto cancelled = [&] { return options.cancel && options.cancel->load(std::memory_order_relaxed); };

    CountTable total = CountTable::empty(lo, ell_max, include_coprime);
    auto absorb = [&](u64 k, const std::vector<u64>& hist) {
        total = merge(total, table_from_hist(seg_lo(k), seg_hi(k), ell_max, include_coprime, hist));
        if (options.on_progress) options.on_progress(total);
    };

    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1 || nseg == 1) {
        SegmentCounter counter;
        for (u64 k = 0; k < nseg && !cancelled(); ++k)
            absorb(k, counter.run(seg_lo(k), seg_hi(k), primes, ell_max, include_coprime));
        return total;
    }

    // Workers claim segments in increasing order; the calling thread merges the
    // contiguous completed prefix so that progress reports are always a prefix.
    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::optional<std::vector<u64>>> done(nseg);
    u64 next = 0;
    unsigned live = threads;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            SegmentCounter counter;
            for (;;) {
                u64 k;
                {
                    std::lock_guard lock(mu);
                    if (next >= nseg || cancelled()) break;
                    k = next++;
                }
                auto hist = counter.run(seg_lo(k), seg_hi(k), primes, ell_max, include_coprime);
                std::lock_guard lock(mu);
                done[k] = std::move(hist);
                cv.notify_all();
            }
            std::lock_guard lock(mu);
            --live;
            cv.notify_all();
        });
    }
    for (u64 k = 0; k < nseg; ++k) {
        std::vector<u64> hist;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return done[k].has_value() || live == 0; });
            if (!done[k]) break;  // cancelled before this segment ran
            hist = std::move(*done[k]);
            done[k].reset();
        }
        absorb(k, hist);
    }
    for (auto& t : pool) t.join();
    return total;
}

CountTable merge(const CountTable& a, const CountTable& b) {
    if (a.ell_max != b.ell_max || a.include_coprime != b.include_coprime)
        throw DomainError("merge: tables differ in ell_max or coprime flag");
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    const CountTable& first = a.range_lo <= b.range_lo ? a : b;
    const CountTable& second = a.range_lo <= b.range_lo ? b : a;
    if (second.range_lo <= first.range_hi) throw DomainError("merge: overlapping ranges");
    if (second.range_lo != first.range_hi + 1) throw DomainError("merge: ranges are not adjacent");
    CountTable t = first;
    t.range_hi = second.range_hi;
    for (unsigned i = 0; i < t.ell_max; ++i) t.counts_by_ell[i] += second.counts_by_ell[i];
    t.coprime_count += second.coprime_count;
    return t;
}

// ------------------------------------------------------------ checkpoint

namespace {

constexpr char kMagic[8] = {'C', 'B', 'C', 'C', 'O', 'U', 'N', 'T'};

void put_le(std::string& buf, u64 v, int bytes) {
    for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

u64 get_le(const std::string& buf, std::size_t& pos, int bytes) {
    if (pos + bytes > buf.size()) throw LoadError("checkpoint truncated");
    u64 v = 0;
    for (int i = 0; i < bytes; ++i) v |= u64{static_cast<unsigned char>(buf[pos + i])} << (8 * i);
    pos += bytes;
    return v;
}

u64 fnv1a(const std::string& data, std::size_t len) {
    u64 h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

void checkpoint_write(const CountTable& table, const std::string& path) {
    std::string buf(kMagic, sizeof kMagic);
    put_le(buf, kCheckpointVersion, 4);
    put_le(buf, table.include_coprime ? 1 : 0, 4);
    put_le(buf, table.range_lo, 8);
    put_le(buf, table.range_hi, 8);
    put_le(buf, table.ell_max, 4);
    put_le(buf, 0, 4);
    for (u64 c : table.counts_by_ell) put_le(buf, c, 8);
    put_le(buf, table.coprime_count, 8);
    put_le(buf, fnv1a(buf, buf.size()), 8);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot open checkpoint file '" + tmp + "' for writing");
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out) throw ResourceError("failed writing checkpoint file '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ResourceError("cannot move checkpoint into place at '" + path + "': " + ec.message());
}

CountTable checkpoint_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open checkpoint file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    if (buf.size() < sizeof kMagic || buf.compare(0, sizeof kMagic, kMagic, sizeof kMagic) != 0)
        throw LoadError("'" + path + "' is not a count checkpoint");
    std::size_t pos = sizeof kMagic;
    const auto version = static_cast<std::uint32_t>(get_le(buf, pos, 4));
    if (version != kCheckpointVersion)
        throw LoadError("checkpoint format version " + std::to_string(version) + " is not supported");
    const u64 flags = get_le(buf, pos, 4);
    CountTable t;
    t.include_coprime = (flags & 1) != 0;
    t.range_lo = get_le(buf, pos, 8);
    t.range_hi = get_le(buf, pos, 8);
    t.ell_max = static_cast<unsigned>(get_le(buf, pos, 4));
    get_le(buf, pos, 4);
    if (t.ell_max < 1 || t.ell_max > 20 || (flags & ~u64{1}) != 0)
        throw LoadError("checkpoint header is corrupt");
    for (unsigned i = 0; i < t.ell_max; ++i) t.counts_by_ell.push_back(get_le(buf, pos, 8));
    t.coprime_count = get_le(buf, pos, 8);
    const std::size_t body = pos;
    const u64 sum = get_le(buf, pos, 8);
    if (pos != buf.size()) throw LoadError("checkpoint has trailing bytes");
    if (sum != fnv1a(buf, body)) throw LoadError("checkpoint checksum mismatch");
    if (t.range_lo < 1 || t.range_hi + 1 < t.range_lo) throw LoadError("checkpoint range is corrupt");
    return t;
}

void write_csv(std::ostream& out, const CountTable& table, bool header) {
    if (header) out << "range_lo,range_hi,ell,count\n";
    for (unsigned ell = 1; ell <= table.ell_max; ++ell)
        out << table.range_lo << ',' << table.range_hi << ',' << ell << ',' << table.count(ell) << '\n';
    if (table.include_coprime)
        out << table.range_lo << ',' << table.range_hi << ",0," << table.coprime_count << '\n';
}

} // namespace cbc
