#include "cbc/records.hpp"

#include <cstdio>
#include <string>

namespace cbc {

namespace {

/// Shortest round-trip decimal form of a double.
std::string decimal(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

Json to_json(const DensityEstimate& est) {
    Json j;
    j["target"] = to_string(est.target);
    if (est.ell != 0) j["ell"] = est.ell;
    j["value"] = est.value.str(est.precision_digits);
    j["precision_digits"] = est.precision_digits;
    j["nodes"] = est.nodes;
    j["k_max"] = est.k_max;
    j["stability_delta"] = est.stability_delta.str(6);
    j["convergence_warning"] = est.convergence_warning;
    j["method"] = est.method;
    return j;
}

Json to_json(const MCResult& r) {
    Json j;
    j["ell"] = r.ell;
    j["samples"] = r.samples;
    j["mean"] = decimal(r.mean);
    j["std_error"] = decimal(r.std_error);
    j["seed"] = r.seed;
    j["depth"] = r.depth;
    j["workers"] = r.workers;
    return j;
}

Json to_json(const CountTable& table) {
    Json j;
    j["range_lo"] = table.range_lo;
    j["range_hi"] = table.range_hi;
    Json rows = Json::array();
    for (unsigned ell = 1; ell <= table.ell_max; ++ell) {
        Json row;
        row["ell"] = ell;
        row["count"] = table.count(ell);
        rows.push_back(std::move(row));
    }
    j["counts"] = std::move(rows);
    if (table.include_coprime) j["coprime_count"] = table.coprime_count;
    return j;
}

Json rho_record(const BigReal& u, const BigReal& rho, int precision_digits) {
    Json j;
    j["u"] = u.str(precision_digits);
    j["rho"] = rho.str(precision_digits);
    j["precision_digits"] = precision_digits;
    return j;
}

} // namespace cbc
