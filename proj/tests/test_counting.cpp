#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbc/counting.hpp"
#include "cbc/errors.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cbc;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cbc_test_" + name)).string();
}

} // namespace

TEST_CASE("base primes and integer square root") {
    const auto ps = base_primes(100);
    CHECK(ps.size() == 25);
    CHECK(ps.front() == 2);
    CHECK(ps.back() == 97);
    CHECK(base_primes(1).empty());
    CHECK(base_primes(1000000).size() == 78498);
    CHECK_THROWS_AS(base_primes(1000000, 16), ResourceError);
    CHECK(isqrt(0) == 0);
    CHECK(isqrt(99) == 9);
    CHECK(isqrt(100) == 10);
    CHECK(isqrt(~u64{0}) == 4294967295ULL);
    CHECK(isqrt((u64{1} << 62) - 1) == (u64{1} << 31) - 1);
}

TEST_CASE("segment factorization") {
    const auto ps = base_primes(10);
    const auto f = factorize_segment({2, 10, &ps});
    REQUIRE(f.size() == 9);
    CHECK(f[6].n == 8);
    CHECK(f[6].factors == std::vector<PrimePower>{{2, 3}});
    const auto g = factorize_segment({99, 101, &ps});
    CHECK(g[1].factors == std::vector<PrimePower>{{2, 2}, {5, 2}});
    CHECK(g[2].factors == std::vector<PrimePower>{{101, 1}});
    const auto big = base_primes(isqrt(2000000) + 1);
    for (const auto& h : factorize_segment({1000000, 1002000, &big})) {
        REQUIRE(is_valid(h));
        REQUIRE(h == factorize(h.n));
    }
    const auto few = base_primes(5);
    CHECK_THROWS_AS(factorize_segment({40, 60, &few}), ConsistencyError);
}

TEST_CASE("published small-range counts") {
    const CountTable t5 = count_range(1, 100000, 3, true);
    CHECK(t5.counts_by_ell == std::vector<u64>{11360, 193, 1});
    CHECK(t5.coprime_count == 13487);
    CHECK(count_range(1, 10000, 1, true).coprime_count == 1734);
    const CountTable t6 = count_range(1, 1000000, 3, true);
    CHECK(t6.counts_by_ell == std::vector<u64>{118094, 2095, 3});
    CHECK(t6.coprime_count == 111460);
    // Upper density at most 1 - log 2.
    CHECK(static_cast<double>(t6.count(1)) / 1e6 < 0.30685281944);
}

TEST_CASE("counts on [1, 5000] match the big-integer oracle") {
    const auto c = oracle::central_binomials(5000);
    std::vector<u64> expect(4, 0);
    u64 coprime = 0;
    for (u64 n = 1; n <= 5000; ++n) {
        const unsigned m = oracle::max_power_bruteforce(n, c[n], 4);
        for (unsigned ell = 1; ell <= 4; ++ell) expect[ell - 1] += m >= ell;
        coprime += oracle::coprime_bruteforce(n, c[n]);
    }
    const CountTable t = count_range(1, 5000, 4, true, u64{700});
    CHECK(t.counts_by_ell == expect);
    CHECK(t.coprime_count == coprime);
}

TEST_CASE("results do not depend on segment size or worker count") {
    const CountTable ref = count_range(1, 300000, 4, true);
    for (u64 seg : {u64{1000}, u64{4097}, u64{65536}}) {
        for (unsigned threads : {1u, 3u}) {
            CountOptions o;
            o.segment_size = seg;
            o.threads = threads;
            CHECK(count_range(1, 300000, 4, true, o) == ref);
        }
    }
    CHECK(ref.counts_by_ell[3] <= ref.counts_by_ell[2]);
    CHECK(ref.counts_by_ell[2] <= ref.counts_by_ell[1]);
}

TEST_CASE("merging adjacent ranges") {
    const CountTable whole = count_range(1, 1000000, 3, true);
    const CountTable a = count_range(1, 100000, 3, true);
    const CountTable b = count_range(100001, 1000000, 3, true);
    CHECK(merge(a, b) == whole);
    CHECK(merge(b, a) == whole);
    CHECK(merge(CountTable::empty(1, 3, true), a) == a);
    CHECK(merge(a, CountTable::empty(100001, 3, true)) == a);

    const CountTable x = count_range(1, 1000, 2, false);
    const CountTable y = count_range(1001, 5000, 2, false);
    const CountTable z = count_range(5001, 9000, 2, false);
    CHECK(merge(merge(x, y), z) == merge(x, merge(y, z)));
    CHECK(merge(z, merge(y, x)) == count_range(1, 9000, 2, false));
    CHECK_THROWS_AS(merge(z, x), DomainError);

    CHECK_THROWS_AS(merge(a, count_range(50000, 200000, 3, true)), DomainError);
    CHECK_THROWS_AS(merge(a, count_range(100002, 200000, 3, true)), DomainError);
    CHECK_THROWS_AS(merge(a, count_range(100001, 200000, 2, true)), DomainError);
    CHECK_THROWS_AS(merge(a, count_range(100001, 200000, 3, false)), DomainError);
}

TEST_CASE("split anywhere and merge") {
    const CountTable whole = count_range(20, 60000, 3, true);
    for (u64 m : {u64{20}, u64{999}, u64{31337}, u64{59999}}) {
        CHECK(merge(count_range(20, m, 3, true), count_range(m + 1, 60000, 3, true)) == whole);
    }
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(count_range(10, 5, 1, true), DomainError);
    CHECK_THROWS_AS(count_range(0, 5, 1, true), DomainError);
    CHECK_THROWS_AS(count_range(1, 5, 0, true), DomainError);
    CHECK_THROWS_AS(count_range(1, 5, 21, true), DomainError);
    CHECK_THROWS_AS(count_range(1, kMaxN, 1, true), RangeError);
}

TEST_CASE("cancellation returns the completed prefix") {
    std::atomic<bool> stop{true};
    CountOptions o;
    o.segment_size = 1000;
    o.cancel = &stop;
    const CountTable t = count_range(1, 100000, 2, true, o);
    CHECK(t.range_lo == 1);
    CHECK(t.range_hi < 100000);
    if (!t.is_empty()) CHECK(t == count_range(1, t.range_hi, 2, true));
}

TEST_CASE("checkpoint round trip and corruption") {
    const std::string path = temp_path("ckpt.bin");
    for (const CountTable& t : {count_range(1, 100000, 3, true), count_range(1, 10000, 1, true),
                                count_range(1, 1000000, 3, true), CountTable::empty(7, 2, false)}) {
        checkpoint_write(t, path);
        CHECK(checkpoint_read(path) == t);
    }
    checkpoint_write(count_range(1, 10000, 2, true), path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(30);
        f.put('\x5a');
    }
    CHECK_THROWS_AS(checkpoint_read(path), LoadError);
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << "not a checkpoint";
    }
    CHECK_THROWS_AS(checkpoint_read(path), LoadError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(checkpoint_read(path), LoadError);
}

TEST_CASE("checkpoint version mismatch is rejected") {
    const std::string path = temp_path("ckpt_version.bin");
    checkpoint_write(count_range(1, 1000, 1, true), path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);  // version follows the 8-byte magic
        f.put('\x07');
    }
    CHECK_THROWS_AS(checkpoint_read(path), LoadError);
    std::filesystem::remove(path);
}

TEST_CASE("CSV layout") {
    std::ostringstream out;
    write_csv(out, count_range(1, 100000, 3, true));
    CHECK(out.str() ==
          "range_lo,range_hi,ell,count\n"
          "1,100000,1,11360\n"
          "1,100000,2,193\n"
          "1,100000,3,1\n"
          "1,100000,0,13487\n");
}
