#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biphoton/crystal.hpp"
#include "biphoton/filter.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

/// One temperature of a sweep: the diagonal-basis correlation, the pair
/// integrals and the relative coincidence-rate envelope (proportional to I1).
/// Quadrature trouble annotates the row instead of aborting the sweep.
struct SweepRow {
    double t_celsius = 0.0;
    double m = 0.0;
    double e = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double rpp = 0.0;
    double rpm = 0.0;
    double relative_rate = 0.0;
    std::string note;  ///< empty on success
};

struct SweepRequest {
    double t_min = 5.0;
    double t_max = 35.1;
    double step = 0.05;
};

/// Diagonal-basis correlation versus temperature, rows ordered by T.
/// Rows are independent, so parallel and serial evaluation agree exactly.
std::vector<SweepRow> temperature_sweep(const CrystalConfig& config,
                                        const FilterSpec& filter,
                                        const SweepRequest& request,
                                        const quad::Settings& settings = {},
                                        bool parallel = true);

std::vector<SweepRow> temperature_sweep_serial(const CrystalConfig& config,
                                               const FilterSpec& filter,
                                               const SweepRequest& request,
                                               const quad::Settings& settings = {});

/// A measured correlation point; sigma weights the fit when present.
struct MeasuredPoint {
    double t_celsius = 0.0;
    double e = 0.0;
    std::optional<double> sigma;
};

struct FitOptions {
    bool fit_t_opt = false;
    double a_lo = 1e10;      ///< rad s^-1 K^-1
    double a_hi = 1e14;
    double coarse_step = 1.02;  ///< multiplicative grid step of the scan
    double t_opt_span = 2.0;    ///< half-width of the T_opt grid when fitted
};

struct FitResult {
    double slope_a = 0.0;
    std::optional<double> t_opt;
    double residual = 0.0;  ///< weighted sum of squares at the optimum
};

/// Fits the temperature coefficient a (and optionally T_opt) by weighted
/// least squares of the model correlation against measured points: a coarse
/// multiplicative scan of [a_lo, a_hi] followed by golden-section refinement.
/// Throws on fewer than 5 points or on a non-identifiable (flat or multi-
/// minimum) residual landscape, listing the candidate minima.
FitResult fit_slope(std::span<const MeasuredPoint> data, const CrystalConfig& config,
                    const FilterSpec& filter, const FitOptions& options = {},
                    const quad::Settings& settings = {});

/// Adjusts the slope so that the model's correlation maximum nearest
/// `t_peak` (seeded by the m = -8 pi branch for the default geometry) lands
/// exactly on `t_peak`. Returns the calibrated slope in rad s^-1 K^-1.
double calibrate_slope_to_peak(const CrystalConfig& config, const FilterSpec& filter,
                               double t_peak, const quad::Settings& settings = {});

/// The four analyzer settings of a CHSH evaluation.
struct ChshSettings {
    double a = 0.0;
    double a_prime = 0.0;
    double b = 0.0;
    double b_prime = 0.0;

    /// Optimal singlet settings: S = 2 sqrt(2) at the dip center.
    static ChshSettings optimal();
};

/// S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')| from the model correlation.
double chsh(const OperatingPoint& point, const FilterSpec& filter,
            const ChshSettings& settings, const quad::Settings& quadrature = {});

/// (max - min)/(max + min) of R++ while Bob's analyzer scans
/// [beta_min, beta_max] at fixed alpha. The ideal model gives 1.
double visibility_scan(double alpha, double beta_min, double beta_max, int steps,
                       const OperatingPoint& point, const FilterSpec& filter,
                       const quad::Settings& settings = {});

}  // namespace biphoton
