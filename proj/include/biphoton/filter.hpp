#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biphoton {

enum class FilterKind { none, gaussian, rectangular };

/// Spectral amplitude profile G of the interference filter in dimensionless
/// frequency units. `half_width` is the dimensionless width Z; it is ignored
/// for the no-filter case.
struct FilterSpec {
    FilterKind kind = FilterKind::none;
    double half_width = 0.0;

    static FilterSpec none() { return {FilterKind::none, 0.0}; }
    static FilterSpec gaussian(double z) {
        require_width(z);
        return {FilterKind::gaussian, z};
    }
    static FilterSpec rectangular(double z) {
        require_width(z);
        return {FilterKind::rectangular, z};
    }

private:
    static void require_width(double z) {
        if (!(z > 0.0))
            throw std::invalid_argument("filter width Z must be > 0");
    }
};

/// Amplitude G(zeta): 1 with no filter, exp(-(zeta/Z)^2) for a Gaussian,
/// and the indicator of |zeta| < Z for a rectangular profile.
double filter_amplitude(const FilterSpec& filter, double zeta);

/// Formats as "none", "gaussian:Z" or "rect:Z".
std::string to_string(const FilterSpec& filter);

/// Parses the formats produced by to_string ("gauss" and "rectangular" are
/// accepted as aliases). Throws std::invalid_argument with a usable message.
FilterSpec parse_filter(std::string_view text);

}  // namespace biphoton
