#include "cbc/montecarlo.hpp"
#include "cbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace cbc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Neumaier's compensated summation.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct WorkerTotals {
    CompensatedSum sum;
    CompensatedSum sum_sq;
};

/// g_l at m = floor(1/y); no argument checks.
double g_of_floor(double m, long ell) {
    if (m <= static_cast<double>(ell)) return 0.0;
    if (m > 4000.0) return 1.0;  // 2^{1-m} m^l underflows long before this
    double term = 1.0;  // C(m-1, h)
    double tail = 0.0;
    for (long h = 0; h < ell; ++h) {
        tail += term;
        term = term * (m - 1.0 - static_cast<double>(h)) / static_cast<double>(h + 1);
    }
    const double g = 1.0 - std::ldexp(tail, 1 - static_cast<int>(m));
    return std::clamp(g, 0.0, 1.0);
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index, std::uint64_t position)
    : seed_(seed), stream_(stream_index), position_(position),
      key_(splitmix64(seed ^ splitmix64(stream_index * kGolden + 0x632BE59BD9B4E019ULL))) {}

double RandomStream::uniform() {
    // SplitMix64 is itself counter based: output = mix(key + position * golden).
    const std::uint64_t bits = splitmix64(key_ + position_ * kGolden);
    ++position_;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<double> pd_sample(RandomStream& rng, int depth) {
    if (depth < 1) throw DomainError("pd_sample: depth must be at least 1");
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(depth));
    double rest = 1.0;
    for (int j = 0; j < depth; ++j) {
        const double u = rng.uniform();
        y.push_back(rest * u);
        rest *= 1.0 - u;
    }
    return y;
}

double g_factor(double y, long ell) {
    if (ell < 1) throw DomainError("g_factor: ell must be at least 1");
    if (!(y > 0.0) || y > 1.0) throw DomainError("g_factor: y must lie in (0, 1]");
    return g_of_floor(std::floor(1.0 / y), ell);
}

long tail_threshold(long ell, double slack) {
    if (ell < 1) throw DomainError("tail_threshold: ell must be at least 1");
    long m = ell + 1;
    while (1.0 - g_of_floor(static_cast<double>(m), ell) > slack) ++m;
    return m;
}

double sample_product(RandomStream& rng, long ell, int depth, long threshold, bool full) {
    const double cutoff = 1.0 / static_cast<double>(threshold);
    double rest = 1.0;  // remaining mass (1-U_1)...(1-U_j)
    double product = 1.0;
    for (int j = 0; j < depth; ++j) {
        const double u = rng.uniform();
        const double y = rest * u;
        if (y > 0.0) {
            // y > 1/(l+1) makes the factor, hence the product, exactly 0.
            const double g = g_of_floor(std::floor(1.0 / y), ell);
            if (g == 0.0) return 0.0;
            product *= g;
        }
        rest *= 1.0 - u;
        if (!full && rest <= cutoff) break;
    }
    return product;
}

MCResult mc_estimate(long ell, std::uint64_t samples, std::uint64_t seed, int depth, int workers) {
    if (ell < 1) throw DomainError("mc_estimate: ell must be at least 1");
    if (samples < 1) throw DomainError("mc_estimate: samples must be at least 1");
    if (workers < 1) throw DomainError("mc_estimate: workers must be at least 1");
    if (depth < 2 * ell + 2)
        throw DomainError("mc_estimate: depth must be at least 2*ell+2 = " + std::to_string(2 * ell + 2));

    // Dropping a tail whose factors each exceed 1 - 1e-15/depth changes the
    // product by less than 1e-15.
    const long threshold = tail_threshold(ell, 1e-15 / depth);
    const auto W = static_cast<std::uint64_t>(workers);
    std::vector<WorkerTotals> totals(W);

    auto run = [&](std::uint64_t w) {
        const std::uint64_t count = samples / W + (w < samples % W ? 1 : 0);
        RandomStream rng(seed, w);
        WorkerTotals& t = totals[w];
        for (std::uint64_t i = 0; i < count; ++i) {
            const double x = sample_product(rng, ell, depth, threshold);
            t.sum.add(x);
            t.sum_sq.add(x * x);
        }
    };
    if (W == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(W);
        for (std::uint64_t w = 0; w < W; ++w) pool.emplace_back(run, w);
        for (auto& th : pool) th.join();
    }

    CompensatedSum sum, sum_sq;
    for (const auto& t : totals) {
        sum.add(t.sum.sum);
        sum.add(t.sum.comp);
        sum_sq.add(t.sum_sq.sum);
        sum_sq.add(t.sum_sq.comp);
    }
    const double n = static_cast<double>(samples);
    MCResult r;
    r.ell = ell;
    r.samples = samples;
    r.seed = seed;
    r.depth = depth;
    r.workers = workers;
    r.mean = std::clamp(sum.value() / n, 0.0, 1.0);
    if (samples > 1) {
        const double var = std::max(0.0, (sum_sq.value() - n * r.mean * r.mean) / (n - 1.0));
        r.std_error = std::sqrt(var / n);
    }
    return r;
}

} // namespace cbc
