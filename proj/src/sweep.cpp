#include "biphoton/sweep.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

std::vector<SweepRow> sweep_impl(const CrystalConfig& config, const FilterSpec& filter,
                                 const SweepRequest& request,
                                 const quad::Settings& settings, bool parallel) {
    config.validate();
    if (!(request.step > 0.0)) throw std::invalid_argument("sweep step must be > 0");
    if (request.t_max < request.t_min)
        throw std::invalid_argument("sweep range is empty (t_max < t_min)");

    const std::size_t rows =
        static_cast<std::size_t>(std::floor((request.t_max - request.t_min) /
                                            request.step + 1e-9)) + 1;
    std::vector<SweepRow> out(rows);

    parallel_for(rows, parallel, [&](std::size_t i) {
        SweepRow& row = out[i];
        row.t_celsius = request.t_min + request.step * static_cast<double>(i);
        row.m = m_of_temperature(config, row.t_celsius);
        try {
            const PairIntegrals pair =
                pair_integrals({row.m, -1.0}, filter, settings);
            const CoincidenceRates rates = diagonal_rates(pair);
            row.i1 = pair.i1;
            row.i2 = pair.i2;
            row.rpp = rates.rpp;
            row.rpm = rates.rpm;
            row.e = rates.correlation();
            row.relative_rate = pair.i1;
        } catch (const std::exception& err) {
            row.note = err.what();
            row.e = std::nan("");
            row.i1 = row.i2 = row.rpp = row.rpm = row.relative_rate = std::nan("");
        }
    });
    return out;
}

}  // namespace

std::vector<SweepRow> temperature_sweep(const CrystalConfig& config,
                                        const FilterSpec& filter,
                                        const SweepRequest& request,
                                        const quad::Settings& settings, bool parallel) {
    return sweep_impl(config, filter, request, settings, parallel);
}

std::vector<SweepRow> temperature_sweep_serial(const CrystalConfig& config,
                                               const FilterSpec& filter,
                                               const SweepRequest& request,
                                               const quad::Settings& settings) {
    return sweep_impl(config, filter, request, settings, false);
}

double calibrate_slope_to_peak(const CrystalConfig& config, const FilterSpec& filter,
                               double t_peak, const quad::Settings& settings) {
    config.validate();
    if (!(t_peak < config.t_opt))
        throw std::invalid_argument("peak temperature must lie below T_opt");

    // Seed: put m = -8 pi at the requested peak, then move the model's own
    // maximum onto it. E depends on T only through a*(T - T_opt), so the
    // correction is a pure rescaling per iteration.
    CrystalConfig work = config;
    work.slope_a = 8.0 * kPi / ((config.t_opt - t_peak) * config.transit_delay());

    for (int iteration = 0; iteration < 6; ++iteration) {
        auto e_of = [&](double t) {
            return diagonal_rates({m_of_temperature(work, t), -1.0}, filter, settings)
                .correlation();
        };
        // golden-section maximum of E near the target peak
        const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = t_peak - 1.2, hi = t_peak + 1.2;
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        double f1 = e_of(x1), f2 = e_of(x2);
        while (hi - lo > 1e-5) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = e_of(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = e_of(x1);
            }
        }
        const double t_max = 0.5 * (lo + hi);
        const double scale = (config.t_opt - t_max) / (config.t_opt - t_peak);
        work.slope_a *= scale;
        if (std::fabs(t_max - t_peak) < 2e-4) break;
    }
    return work.slope_a;
}

ChshSettings ChshSettings::optimal() {
    return {0.0, kPi / 8.0, kPi / 16.0, 3.0 * kPi / 16.0};
}

double chsh(const OperatingPoint& point, const FilterSpec& filter,
            const ChshSettings& settings, const quad::Settings& quadrature) {
    const PairIntegrals pair = pair_integrals(point, filter, quadrature);
    auto e_of = [&](double alpha, double beta) {
        return general_rates({alpha, beta}, pair).correlation();
    };
    return std::fabs(e_of(settings.a, settings.b) - e_of(settings.a, settings.b_prime)) +
           std::fabs(e_of(settings.a_prime, settings.b) +
                     e_of(settings.a_prime, settings.b_prime));
}

double visibility_scan(double alpha, double beta_min, double beta_max, int steps,
                       const OperatingPoint& point, const FilterSpec& filter,
                       const quad::Settings& settings) {
    if (steps < 2) throw std::invalid_argument("visibility scan needs >= 2 steps");
    if (!(beta_max - beta_min >= 0.5 * kPi))
        throw std::invalid_argument("beta scan must span at least pi/2");

    const PairIntegrals pair = pair_integrals(point, filter, settings);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
        const double beta =
            beta_min + (beta_max - beta_min) * static_cast<double>(i) / (steps - 1);
        const double rpp = general_rates({alpha, beta}, pair).rpp;
        lo = std::min(lo, rpp);
        hi = std::max(hi, rpp);
    }
    if (!(hi + lo > 0.0))
        throw std::domain_error("visibility undefined: R++ vanishes over the scan");
    return (hi - lo) / (hi + lo);
}

}  // namespace biphoton
