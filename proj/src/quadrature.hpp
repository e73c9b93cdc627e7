#pragma once

// Internal quadrature helpers shared by the inversion routines.

#include "cbc/bigfloat.hpp"
#include "cbc/constants.hpp"

#include <vector>

namespace cbc::detail {

/// Gauss-Legendre nodes and weights on [-1, 1] at the current working precision.
void gauss_legendre(int n, std::vector<BigReal>& nodes, std::vector<BigReal>& weights);

/// Quadrature nodes along tau >= 0 for the Bromwich line s = sigma + i tau.
struct LineGrid {
    std::vector<BigReal> tau;
    std::vector<BigReal> weight;     ///< Gauss weight times panel half-width
    std::vector<double> panel_end;   ///< panel_end[p] = right end of panel p
    int panel_nodes = 0;

    /// Cutoff T for a run that uses the first `nodes` nodes (rounded up to whole panels).
    double cutoff(long nodes) const;
};

/// Lays out whole panels until at least `nodes` nodes exist.  Panels start at
/// half the distance to the origin near tau = 0 and widen to settings.panel_width.
LineGrid build_line_grid(const LineSettings& settings, long nodes);

/// C-infinity window: 1 on [0, 1/2], smooth decay to 0 at 1, 0 beyond.
BigReal window(const BigReal& x);

/// (1/pi) sum_i window(tau_i / T) weight_i values_i over the first `nodes` nodes.
BigReal windowed_sum(const LineGrid& grid, const std::vector<BigReal>& values, long nodes);

} // namespace cbc::detail
