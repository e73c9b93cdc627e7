#pragma once

/**
 * JSON records for results.  Key order is fixed, and real numbers are
 * emitted as decimal strings so that no precision is lost in transit:
 * BigReal values carry precision_digits significant digits, doubles 17.
 */

#include "cbc/constants.hpp"
#include "cbc/counting.hpp"
#include "cbc/montecarlo.hpp"

#include <json.hpp>

namespace cbc {

using Json = nlohmann::ordered_json;

/// {target, ell?, value, precision_digits, nodes, k_max, stability_delta, convergence_warning, method}
Json to_json(const DensityEstimate& est);

/// {ell, samples, mean, std_error, seed, depth, workers}
Json to_json(const MCResult& r);

/// {range_lo, range_hi, counts: [{ell, count}...], coprime_count?}
Json to_json(const CountTable& table);

/// {u, rho, precision_digits}
Json rho_record(const BigReal& u, const BigReal& rho, int precision_digits);

} // namespace cbc
