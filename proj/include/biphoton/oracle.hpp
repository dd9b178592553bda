#pragma once

#include <span>
#include <utility>
#include <vector>

#include "biphoton/filter.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

/// Controls for the brute-force rate evaluation. The tau grid covers the two
/// amplitude bands plus a filter-dependent margin at `points_per_unit`
/// resolution (never fewer than `min_points` across the bands).
struct OracleOptions {
    double points_per_unit = 384.0;  ///< must outresolve the filter edge, ~5*Z
    double margin = -1.0;  ///< < 0 picks a filter-dependent default
    int min_points = 200;
    quad::Settings nu_quadrature{1e-10, 1e-13, 40000, 4096.0};
    bool parallel = true;
};

/// Brute-force rates with a Richardson error estimate from comparing the
/// full grid against its half-resolution subset.
struct OracleResult {
    CoincidenceRates rates;
    int grid_resolution = 0;
    double estimated_error = 0.0;
};

/// Literal evaluation of the coincidence-rate definition: the two-photon
/// amplitude is built on a tau_- grid by direct frequency quadrature of the
/// detection amplitude (one term per photon assignment, weighted by the
/// analyzer coefficients), squared, and integrated over tau_-. Entirely
/// independent of the closed-form I1/I2 route; used to gate it.
///
/// The overall constant follows from Parseval's theorem so that the
/// diagonal-setting rates land in the same units of R0 as diagonal_rates.
/// Throws when the Richardson estimate exceeds `max_error` (unresolved band).
OracleResult oracle_rates(const HwpAngles& angles, const OperatingPoint& point,
                          const FilterSpec& filter, const OracleOptions& options = {},
                          double max_error = 1e30);

/// Serial reference of the same computation, for parallel-consistency tests.
OracleResult oracle_rates_serial(const HwpAngles& angles, const OperatingPoint& point,
                                 const FilterSpec& filter,
                                 const OracleOptions& options = {},
                                 double max_error = 1e30);

/// Number of strict sign changes along a series, ignoring samples with
/// |y| < noise_floor. With noise_floor = 0.5 this counts the transitions of
/// a correlation trace between its negative and positive extremes.
int count_sign_changes(std::span<const std::pair<double, double>> series,
                       double noise_floor = 0.05);

}  // namespace biphoton
