// cbc: exact counts of n with n^l | C(2n,n) or gcd(n, C(2n,n)) = 1, and the
// limiting densities behind them.
//
// Exit codes: 0 success, 2 bad configuration, 3 resource failure or an
// interrupted count, 4 convergence warning under --strict.

#include "cbc/constants.hpp"
#include "cbc/counting.hpp"
#include "cbc/errors.hpp"
#include "cbc/montecarlo.hpp"
#include "cbc/records.hpp"
#include "cbc/specfun.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitStrict = 4;

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

/// Parses a non-negative integer written plainly ("100000") or in scientific
/// shorthand ("1e8", "2.5e6"); the value must be an exact integer.
cbc::u64 parse_count(const std::string& text) {
    const auto epos = text.find_first_of("eE");
    const std::string mant = text.substr(0, epos);
    long exp10 = 0;
    if (epos != std::string::npos) {
        const std::string e = text.substr(epos + 1);
        if (e.empty() || e.find_first_not_of("0123456789+") != std::string::npos)
            throw cbc::DomainError("bad exponent in '" + text + "'");
        exp10 = std::stol(e);
    }
    unsigned __int128 value = 0;
    bool seen_dot = false, any_digit = false;
    for (char c : mant) {
        if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            value = value * 10 + static_cast<unsigned>(c - '0');
            if (seen_dot) --exp10;
            any_digit = true;
            if (value > (static_cast<unsigned __int128>(1) << 100))
                throw cbc::RangeError("'" + text + "' is too large");
        } else {
            throw cbc::DomainError("'" + text + "' is not a number");
        }
    }
    if (!any_digit) throw cbc::DomainError("'" + text + "' is not a number");
    for (; exp10 > 0; --exp10) {
        value *= 10;
        if (value > (static_cast<unsigned __int128>(1) << 100)) throw cbc::RangeError("'" + text + "' is too large");
    }
    for (; exp10 < 0; ++exp10) {
        if (value % 10 != 0) throw cbc::DomainError("'" + text + "' is not an integer");
        value /= 10;
    }
    if (value > ~cbc::u64{0}) throw cbc::RangeError("'" + text + "' is too large");
    return static_cast<cbc::u64>(value);
}

/// "LO:HI", inclusive on both ends.
std::pair<cbc::u64, cbc::u64> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw cbc::DomainError("range must look like LO:HI, got '" + text + "'");
    return {parse_count(text.substr(0, colon)), parse_count(text.substr(colon + 1))};
}

/// --threads beats CBC_THREADS beats the hardware default.
unsigned resolve_threads(int flag) {
    if (flag > 0) return static_cast<unsigned>(flag);
    if (flag < 0) throw cbc::DomainError("--threads must be positive");
    if (const char* env = std::getenv("CBC_THREADS")) {
        const std::string s(env);
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || std::stoul(s) == 0)
            throw cbc::DomainError("CBC_THREADS must be a positive integer, got '" + s + "'");
        return static_cast<unsigned>(std::stoul(s));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void print(const cbc::Json& j) { std::cout << j.dump() << '\n'; }

struct CountArgs {
    std::string range;
    unsigned ell_max = 3;
    bool coprime = false;
    std::string segment_size = "1048576";
    std::string format = "csv";
    std::string checkpoint;
    int threads = 0;
};

int cmd_count(const CountArgs& a) {
    const auto [lo, hi] = parse_range(a.range);
    if (lo > hi) throw cbc::DomainError("empty range: lo > hi");
    if (lo == 0) throw cbc::DomainError("range must start at 1 or later");

    cbc::CountOptions opts;
    opts.segment_size = parse_count(a.segment_size);
    opts.threads = resolve_threads(a.threads);
    opts.cancel = &g_interrupted;

    cbc::CountTable done = cbc::CountTable::empty(lo, a.ell_max, a.coprime);
    if (!a.checkpoint.empty() && std::filesystem::exists(a.checkpoint)) {
        cbc::CountTable saved = cbc::checkpoint_read(a.checkpoint);
        if (saved.range_lo == lo && saved.ell_max == a.ell_max && saved.include_coprime == a.coprime &&
            saved.range_hi <= hi) {
            std::cerr << "resuming from " << a.checkpoint << " at n = " << saved.range_hi + 1 << '\n';
            done = std::move(saved);
        } else {
            std::cerr << "checkpoint " << a.checkpoint << " belongs to a different run; starting over\n";
        }
    }

    if (done.range_hi < hi) {
        auto last_write = std::chrono::steady_clock::now();
        if (!a.checkpoint.empty()) {
            opts.on_progress = [&](const cbc::CountTable& prefix) {
                const auto now = std::chrono::steady_clock::now();
                if (now - last_write < std::chrono::seconds(10)) return;
                last_write = now;
                cbc::checkpoint_write(cbc::merge(done, prefix), a.checkpoint);
            };
        }
        std::signal(SIGINT, on_interrupt);
        std::signal(SIGTERM, on_interrupt);
        cbc::CountTable rest = cbc::count_range(done.range_hi + 1, hi, a.ell_max, a.coprime, opts);
        done = cbc::merge(done, rest);
    }
    if (!a.checkpoint.empty()) cbc::checkpoint_write(done, a.checkpoint);
    if (done.range_hi < hi) {
        std::cerr << "interrupted after n = " << done.range_hi;
        if (!a.checkpoint.empty()) std::cerr << "; progress saved to " << a.checkpoint;
        std::cerr << '\n';
        return kExitResource;
    }

    if (a.format == "json")
        print(cbc::to_json(done));
    else
        cbc::write_csv(std::cout, done);
    return kExitOk;
}

int report(const cbc::DensityEstimate& est, bool strict, cbc::Json extra = {}) {
    cbc::Json j = cbc::to_json(est);
    for (auto& [k, v] : extra.items()) j[k] = v;
    print(j);
    if (est.convergence_warning) {
        std::cerr << "warning: stability_delta " << est.stability_delta.str(3) << " exceeds the tolerance\n";
        if (strict) return kExitStrict;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Divisibility of central binomial coefficients: exact counts and limiting densities"};
    app.require_subcommand(1);

    CountArgs count;
    auto* c = app.add_subcommand("count", "Count n in LO:HI with n^l | C(2n,n) (l = 1..ell-max)");
    c->add_option("--range", count.range, "Inclusive range LO:HI, e.g. 1:1e7")->required();
    c->add_option("--ell-max", count.ell_max, "Largest exponent l")->check(CLI::Range(1, 20));
    c->add_flag("--coprime", count.coprime, "Also count n with gcd(n, C(2n,n)) = 1 (row ell=0)");
    c->add_option("--segment-size", count.segment_size, "Integers per sieve segment");
    c->add_option("--threads", count.threads, "Worker threads (default: CBC_THREADS or all cores)");
    c->add_option("--format", count.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--checkpoint", count.checkpoint, "Resume from / save progress to this file");

    long ell = 1;
    int precision = cbc::kDefaultPrecision;
    long nodes = 0;
    double tol = cbc::kDefaultWeightTol;
    bool strict = false;
    int threads = 0;
    auto* d = app.add_subcommand("density", "Limiting density c_l by Laplace inversion");
    d->add_option("--ell", ell, "Exponent l (1..30)")->required();
    d->add_option("--precision", precision, "Working precision in decimal digits (>= 30)");
    d->add_option("--nodes", nodes, "Quadrature nodes (0 = default)");
    d->add_option("--tol", tol, "Weight-series truncation tolerance");
    d->add_flag("--strict", strict, "Exit 4 on a convergence warning");
    d->add_option("--threads", threads, "Accepted for uniformity; results never depend on it");

    auto* cc = app.add_subcommand("coprime-const", "The constant c in #{n <= x : gcd(n, C(2n,n)) = 1} ~ c x / log x");
    cc->add_option("--precision", precision, "Working precision in decimal digits (>= 30)");
    cc->add_option("--nodes", nodes, "Quadrature nodes (0 = default)");
    cc->add_flag("--strict", strict, "Exit 4 on a convergence warning");

    std::string samples = "1e7";
    std::uint64_t seed = 42;
    int depth = cbc::kDefaultDepth;
    auto* m = app.add_subcommand("montecarlo", "Monte Carlo estimate of c_l");
    m->add_option("--ell", ell, "Exponent l")->required();
    m->add_option("--samples", samples, "Number of draws (1e7 shorthand accepted)");
    m->add_option("--seed", seed, "64-bit seed");
    m->add_option("--depth", depth, "Stick-breaking steps per draw");
    m->add_option("--threads", threads, "Workers; worker w draws from substream w");

    double u_max = 64.0;
    auto* as = app.add_subcommand("asymptotic", "rho(u*), the large-l approximation of c_l");
    as->add_option("--ell", ell, "Exponent l (>= 2)")->required();
    as->add_option("--precision", precision, "Working precision in decimal digits (>= 30)");
    as->add_option("--u-max", u_max, "Extent of the Dickman table");

    std::string u_text;
    auto* r = app.add_subcommand("rho", "Dickman rho(u)");
    r->add_option("--u", u_text, "Argument u >= 0")->required();
    r->add_option("--u-max", u_max, "Extent of the Dickman table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (c->parsed()) return cmd_count(count);
        if (d->parsed()) {
            resolve_threads(threads);  // validated, but the result is thread-independent
            return report(cbc::compute_cl(ell, precision, nodes, tol), strict);
        }
        if (cc->parsed()) return report(cbc::compute_coprime_c(precision, nodes), strict);
        if (m->parsed()) {
            const unsigned workers = resolve_threads(threads);
            print(cbc::to_json(cbc::mc_estimate(ell, parse_count(samples), seed, depth, static_cast<int>(workers))));
            return kExitOk;
        }
        if (as->parsed()) {
            const cbc::DickmanTable table(u_max);
            const cbc::DensityEstimate est = cbc::asymptotic_cl(ell, table, precision);
            return report(est, false, {{"u_star", cbc::ustar(ell, precision).str(precision)}});
        }
        if (r->parsed()) {
            constexpr int digits = 16;
            cbc::WorkingPrecision wp(digits + 10);
            const cbc::BigReal u(u_text);
            const cbc::DickmanTable table(std::max(u_max, std::ceil(u.to_double())));
            print(cbc::rho_record(u, table.rho(u), digits));
            return kExitOk;
        }
    } catch (const cbc::ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const cbc::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const cbc::RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const cbc::SingularityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const cbc::LoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    }
    return kExitConfig;
}
