#include "biphoton/filter.hpp"

#include <charconv>
#include <cmath>

namespace biphoton {

double filter_amplitude(const FilterSpec& filter, double zeta) {
    switch (filter.kind) {
        case FilterKind::none:
            return 1.0;
        case FilterKind::gaussian: {
            const double u = zeta / filter.half_width;
            return std::exp(-u * u);
        }
        case FilterKind::rectangular:
            return std::fabs(zeta) < filter.half_width ? 1.0 : 0.0;
    }
    return 1.0;
}

std::string to_string(const FilterSpec& filter) {
    switch (filter.kind) {
        case FilterKind::none:
            return "none";
        case FilterKind::gaussian:
            return "gaussian:" + std::to_string(filter.half_width);
        case FilterKind::rectangular:
            return "rect:" + std::to_string(filter.half_width);
    }
    return "none";
}

FilterSpec parse_filter(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    if (name == "none") {
        if (colon != std::string_view::npos)
            throw std::invalid_argument("filter 'none' takes no width");
        return FilterSpec::none();
    }

    const bool gaussian = (name == "gaussian" || name == "gauss");
    const bool rectangular = (name == "rect" || name == "rectangular");
    if (!gaussian && !rectangular)
        throw std::invalid_argument(
            "unknown filter '" + std::string(text) +
            "' (expected none, gaussian:<Z> or rect:<Z>)");
    if (colon == std::string_view::npos)
        throw std::invalid_argument("filter '" + std::string(name) +
                                    "' needs a width, e.g. " +
                                    std::string(name) + ":7.8");

    const std::string_view width_text = text.substr(colon + 1);
    double z = 0.0;
    const auto [end, ec] =
        std::from_chars(width_text.data(), width_text.data() + width_text.size(), z);
    if (ec != std::errc{} || end != width_text.data() + width_text.size() || !(z > 0.0))
        throw std::invalid_argument("filter width must be a positive number, got '" +
                                    std::string(width_text) + "'");
    return gaussian ? FilterSpec::gaussian(z) : FilterSpec::rectangular(z);
}

}  // namespace biphoton
