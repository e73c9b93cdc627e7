#pragma once

/**
 * Monte Carlo estimation of c_l from the Poisson-Dirichlet representation
 *
 *     c_l = E prod_j g_l(Y_j),   Y_j = (1-U_1)...(1-U_{j-1}) U_j,
 *
 * with g_l(y) = 1 - 2^{1-m} sum_{h<l} C(m-1, h), m = floor(1/y), and
 * g_l(y) = 0 when m <= l.
 *
 * Uniforms come from a counter-based generator: the value at a given
 * (seed, stream, position) is a fixed hash, so every worker owns an
 * independent substream and results do not depend on scheduling.
 */

#include <cstdint>
#include <vector>

namespace cbc {

/// Counter-based source of uniform [0,1) doubles with 53 random bits.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index, std::uint64_t position = 0);

    /// Next uniform in [0,1); advances the position by one.
    double uniform();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }
    std::uint64_t position() const { return position_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t position_;
    std::uint64_t key_;
};

/// The SplitMix64 output function (a bijective 64-bit mixer).
std::uint64_t splitmix64(std::uint64_t x);

/// Y_1..Y_depth of one draw; consumes exactly `depth` uniforms.  Throws DomainError for depth < 1.
std::vector<double> pd_sample(RandomStream& rng, int depth);

/// g_l(y) for 0 < y <= 1.  Throws DomainError for y <= 0, y > 1 or l < 1.
double g_factor(double y, long ell);

/// Smallest m such that the factor at floor(1/y) = m is within `slack` of 1.
/// Every later Y_j is at most the remaining mass R, so once floor(1/R) reaches
/// this threshold the rest of the product can be dropped.
long tail_threshold(long ell, double slack);

struct MCResult {
    long ell = 0;
    std::uint64_t samples = 0;
    double mean = 0.0;
    double std_error = 0.0;   ///< sample standard deviation / sqrt(samples); 0 for one sample
    std::uint64_t seed = 0;
    int depth = 0;
    int workers = 1;
};

/// Default number of stick-breaking steps per draw.
inline constexpr int kDefaultDepth = 50;

/// Per-draw product with early exits; `full` disables the tail cut-off (for checks).
double sample_product(RandomStream& rng, long ell, int depth, long threshold, bool full = false);

/**
 * Mean of prod_j g_l(Y_j) over `samples` draws.  Worker w handles a
 * contiguous block of draws on substream w; per-worker compensated sums are
 * combined in worker order, so the result is bit-identical for fixed
 * (ell, samples, seed, depth, workers).  Throws DomainError for samples < 1,
 * ell < 1, workers < 1 or depth < 2 ell + 2.
 */
MCResult mc_estimate(long ell, std::uint64_t samples, std::uint64_t seed, int depth = kDefaultDepth,
                     int workers = 1);

} // namespace cbc
