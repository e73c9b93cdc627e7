#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

/// Runs the CLI with `args` (shell syntax); stdout is captured, stderr is appended when `merge_err`.
Run cli(const std::string& args, bool merge_err = false, const std::string& env = "") {
    const std::string cmd = env + " " CBC_CLI " " + args + (merge_err ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

/// Parses a one-line JSON record and checks that re-emitting it reproduces it byte for byte.
nlohmann::ordered_json round_trip(const std::string& line) {
    const auto j = nlohmann::ordered_json::parse(line);
    CHECK(j.dump() + "\n" == line);
    return j;
}

} // namespace

TEST_CASE("count: published rows as CSV") {
    const Run r = cli("count --range 1:100000 --ell-max 3 --coprime");
    CHECK(r.status == 0);
    CHECK(r.out ==
          "range_lo,range_hi,ell,count\n"
          "1,100000,1,11360\n"
          "1,100000,2,193\n"
          "1,100000,3,1\n"
          "1,100000,0,13487\n");
    const Run s = cli("count --range 1:1e4 --ell-max 1 --coprime");
    CHECK(s.out.find("1,10000,0,1734\n") != std::string::npos);
}

TEST_CASE("count: JSON, thread invariance and the environment override") {
    const Run a = cli("count --range 1:300000 --ell-max 4 --coprime --format json --threads 1 --segment-size 4096");
    const Run b = cli("count --range 1:300000 --ell-max 4 --coprime --format json --threads 3 --segment-size 4096");
    const Run c = cli("count --range 1:300000 --ell-max 4 --coprime --format json", false, "CBC_THREADS=2");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const auto j = round_trip(a.out);
    CHECK(j["counts"][0]["ell"] == 1);
    CHECK(cli("count --range 1:1000", false, "CBC_THREADS=zero").status == 2);
}

TEST_CASE("count: configuration errors exit 2") {
    CHECK(cli("count --range 5:1").status == 2);
    CHECK(cli("count --range 0:10").status == 2);
    CHECK(cli("count --range 1-10").status == 2);
    CHECK(cli("count --range 1:1.5e0").status == 2);
    CHECK(cli("count --range 1:100 --ell-max 0").status == 2);
    CHECK(cli("count --range 1:100 --format xml").status == 2);
    CHECK(cli("count --range 1:1e30").status == 2);
    CHECK(cli("").status == 2);
    CHECK(cli("bogus").status == 2);
    CHECK(cli("--help").status == 0);
}

TEST_CASE("count: checkpoint resume") {
    const std::string path = (std::filesystem::temp_directory_path() / "cbc_cli_ckpt.bin").string();
    std::filesystem::remove(path);
    CHECK(cli("count --range 1:200000 --ell-max 3 --coprime --checkpoint " + path).status == 0);
    CHECK(std::filesystem::exists(path));
    const Run resumed = cli("count --range 1:500000 --ell-max 3 --coprime --checkpoint " + path, true);
    CHECK(resumed.status == 0);
    CHECK(resumed.out.find("resuming") != std::string::npos);
    const Run direct = cli("count --range 1:500000 --ell-max 3 --coprime");
    CHECK(resumed.out.substr(resumed.out.find("range_lo")) == direct.out);
    // A checkpoint for another configuration is ignored.
    const Run other = cli("count --range 1:1000 --ell-max 2 --checkpoint " + path, true);
    CHECK(other.status == 0);
    CHECK(other.out.find("different run") != std::string::npos);
    // A corrupt checkpoint is a configuration error.
    {
        FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("garbage", f);
        std::fclose(f);
    }
    CHECK(cli("count --range 1:1000 --checkpoint " + path).status == 2);
    std::filesystem::remove(path);
}

TEST_CASE("density and coprime-const") {
    const Run r = cli("density --ell 6 --precision 30 --nodes 800 --strict");
    CHECK(r.status == 0);
    const auto j = round_trip(r.out);
    CHECK(j["target"] == "c_ell");
    CHECK(j["ell"] == 6);
    CHECK(j["precision_digits"] == 30);
    CHECK(j["nodes"] == 800);
    CHECK(std::stod(j["value"].get<std::string>()) == doctest::Approx(3.403909048013e-13).epsilon(1e-9));
    CHECK(j["stability_delta"].is_string());

    CHECK(cli("density --ell 0").status == 2);
    CHECK(cli("density --ell 31").status == 2);
    CHECK(cli("density --ell 2 --precision 10").status == 2);
    CHECK(cli("density --ell 2 --precision 30 --nodes 32 --strict").status == 4);
    CHECK(cli("density --ell 2 --precision 30 --nodes 32").status == 0);

    const Run c = cli("coprime-const --precision 30 --nodes 800");
    CHECK(c.status == 0);
    const auto k = round_trip(c.out);
    CHECK(k["target"] == "coprime_c");
    CHECK(std::stod(k["value"].get<std::string>()) == doctest::Approx(1.526453).epsilon(1e-5));
}

TEST_CASE("montecarlo") {
    const Run r = cli("montecarlo --ell 1 --samples 1e5 --seed 42 --threads 1");
    CHECK(r.status == 0);
    const auto j = round_trip(r.out);
    CHECK(j["ell"] == 1);
    CHECK(j["samples"] == 100000);
    CHECK(j["seed"] == 42);
    CHECK(j["depth"] == 50);
    CHECK(j["workers"] == 1);
    const double mean = std::stod(j["mean"].get<std::string>());
    const double se = std::stod(j["std_error"].get<std::string>());
    CHECK(std::abs(mean - 0.1142474302) < 4 * se);
    CHECK(cli("montecarlo --ell 1 --samples 1e5 --seed 42 --threads 1").out == r.out);
    const Run w = cli("montecarlo --ell 1 --samples 1e5 --seed 42 --threads 2");
    CHECK(round_trip(w.out)["workers"] == 2);
    CHECK(cli("montecarlo --ell 0").status == 2);
    CHECK(cli("montecarlo --ell 3 --depth 4").status == 2);
}

TEST_CASE("rho and asymptotic") {
    const Run r = cli("rho --u 2");
    CHECK(r.status == 0);
    const auto j = round_trip(r.out);
    CHECK(std::stod(j["rho"].get<std::string>()) == doctest::Approx(0.3068528194400547).epsilon(1e-15));
    CHECK(cli("rho --u -1").status == 2);
    CHECK(cli("rho --u abc").status == 2);

    const Run a = cli("asymptotic --ell 4");
    CHECK(a.status == 0);
    const auto k = round_trip(a.out);
    CHECK(k["target"] == "rho_of_ustar");
    CHECK(k["u_star"].get<std::string>().rfind("5.8363937143", 0) == 0);
    CHECK(cli("asymptotic --ell 1").status == 2);
    CHECK(cli("asymptotic --ell 30 --u-max 20").status == 2);
}
