#include "biphoton/crystal.hpp"

#include <cmath>

namespace biphoton {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double CrystalConfig::physical_carrier() const {
    const double omega_pump = 2.0 * kPi * speed_of_light / lambda_pump;
    return 0.5 * omega_pump * transit_delay();
}

double CrystalConfig::default_slope() {
    // 8 pi of detuning across the 35.1 C -> 28.6 C gap of the default
    // geometry (transit delay 3.0021e-12 s).
    const double transit_delay = (1.84 - 1.75) * 10e-3 / speed_of_light;
    return 8.0 * kPi / ((35.1 - 28.6) * transit_delay);
}

double dimensionless_filter_width(const CrystalConfig& config,
                                  const PhysicalFilter& filter) {
    config.validate();
    if (!(filter.gaussian_width > 0.0))
        throw std::invalid_argument("filter width W must be > 0");
    if (filter.gaussian_width >= config.lambda0 / 10.0)
        throw std::invalid_argument(
            "filter width W is outside the narrow-filter regime (need W < lambda0/10)");
    return 2.0 * std::sqrt(2.0) * kPi * (config.n2 - config.n1) * config.length *
           filter.gaussian_width / (config.lambda0 * config.lambda0);
}

double m_of_temperature(const CrystalConfig& config, double t_celsius) {
    return config.slope_a * (t_celsius - config.t_opt) * config.transit_delay();
}

}  // namespace biphoton
