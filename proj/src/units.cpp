#include "biphoton/units.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace biphoton {

double parse_angle(std::string_view text) {
    constexpr double kPi = 3.141592653589793238462643383279502884;

    bool degrees;
    std::string_view number;
    if (text.size() > 3 && text.substr(text.size() - 3) == "deg") {
        degrees = true;
        number = text.substr(0, text.size() - 3);
    } else if (text.size() > 3 && text.substr(text.size() - 3) == "rad") {
        degrees = false;
        number = text.substr(0, text.size() - 3);
    } else {
        throw std::invalid_argument("angle '" + std::string(text) +
                                    "' needs a deg or rad suffix, e.g. 22.5deg");
    }

    double value = 0.0;
    const auto r = std::from_chars(number.data(), number.data() + number.size(), value);
    if (r.ec != std::errc{} || r.ptr != number.data() + number.size())
        throw std::invalid_argument("angle '" + std::string(text) +
                                    "' is not a number with a deg/rad suffix");
    return degrees ? value * kPi / 180.0 : value;
}

}  // namespace biphoton
