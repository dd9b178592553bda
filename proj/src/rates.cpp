#include "biphoton/rates.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace biphoton {

namespace {

double pow4(double x) {
    const double x2 = x * x;
    return x2 * x2;
}

struct AnalyzerCoefficients {
    double c1, c2;  // ++ / -- channel
    double d1, d2;  // +- / -+ channel
};

AnalyzerCoefficients analyzer_coefficients(const HwpAngles& angles) {
    const double ca = std::cos(2.0 * angles.alpha);
    const double sa = std::sin(2.0 * angles.alpha);
    const double cb = std::cos(2.0 * angles.beta);
    const double sb = std::sin(2.0 * angles.beta);
    return {ca * sb, sa * cb, ca * cb, sa * sb};
}

// cos(nu w) / (w^2 - b^2) integrated over |w| > cut (both tails). Used to
// restore what the no-filter truncation discards. Exact for nu = 0. The
// two-term integration-by-parts remainder is bounded by 2/(nu^2 lo^3), so
// the asymptotic form only engages once nu*lo >= 700 (remainder < 1e-9);
// slower oscillations are bridged numerically, which costs a fixed ~110
// periods however small nu is.
double cosine_tail(double nu, double cut, double b) {
    b = std::fabs(b);
    nu = std::fabs(nu);
    if (nu * cut < 1e-7) {
        // effectively a DC component
        if (b < 1e-9 * cut) return 2.0 / cut;
        return std::log((cut + b) / (cut - b)) / b;
    }
    auto by_parts = [&](double lo) {
        const double q = lo * lo - b * b;
        return 2.0 * (-std::sin(nu * lo) / (nu * q) +
                      2.0 * lo * std::cos(nu * lo) / (nu * nu * q * q));
    };
    constexpr double kAsymptotic = 700.0;
    if (nu * cut >= kAsymptotic) return by_parts(cut);
    const double bridge_end = kAsymptotic / nu;
    quad::Settings s;
    s.rel_tol = 1e-12;
    s.abs_tol = 1e-15;
    const auto bridge = quad::integrate(
        [&](double w) { return std::cos(nu * w) / (w * w - b * b); }, cut,
        bridge_end, s);
    return 2.0 * bridge.value + by_parts(bridge_end);
}

}  // namespace

double CoincidenceRates::correlation() const {
    const double sum = total();
    if (!(sum > 0.0))
        throw std::domain_error("correlation undefined: total coincidence rate is zero");
    return (rpp - rpm - rmp + rmm) / sum;
}

double sinc_half(double zeta) {
    if (std::fabs(zeta) < 1e-4) {
        const double z2 = zeta * zeta;
        return 1.0 - z2 / 24.0 + z2 * z2 / 1920.0;
    }
    return 2.0 * std::sin(0.5 * zeta) / zeta;
}

namespace detail {

std::vector<quad::Interval> filter_window(const FilterSpec& filter, double m,
                                          double center, double truncation_bound) {
    switch (filter.kind) {
        case FilterKind::none: {
            const double cut = std::max(truncation_bound, std::fabs(m) + 64.0);
            return {{center - cut, center + cut}};
        }
        case FilterKind::gaussian: {
            const double cut = 8.0 * filter.half_width;
            return {{-0.5 * m - cut, -0.5 * m + cut}};
        }
        case FilterKind::rectangular:
            return {{-0.5 * m - filter.half_width, -0.5 * m + filter.half_width}};
    }
    return {};
}

double tail_i1(double cut) {
    const double c2 = cut * cut;
    return 4.0 / cut + 4.0 * std::sin(cut) / c2 - 8.0 * std::cos(cut) / (c2 * cut);
}

double tail_i2(double cut, double m, double kappa) {
    const double b = 0.5 * m;
    return 2.0 * std::cos(0.5 * m) * cosine_tail(kappa, cut, b) -
           cosine_tail(1.0 + kappa, cut, b) -
           cosine_tail(std::fabs(1.0 - kappa), cut, b);
}

}  // namespace detail

PairIntegrals pair_integrals(const OperatingPoint& point, const FilterSpec& filter,
                             const quad::Settings& settings) {
    if (std::fabs(point.d + 1.0) > 1e-12)
        throw std::invalid_argument(
            "pair_integrals requires d = -1 (compensator of half the crystal "
            "length); use rate_general_delta for other shifts");
    if (!std::isfinite(point.m))
        throw std::invalid_argument("detuning m must be finite");

    const double m = point.m;
    auto g4 = [&](double zeta) { return pow4(filter_amplitude(filter, zeta + 0.5 * m)); };

    const auto window1 = detail::filter_window(filter, m, 0.0, settings.truncation_bound);
    const auto i1 = quad::integrate(
        [&](double zeta) {
            const double s = sinc_half(zeta);
            return g4(zeta) * s * s;
        },
        window1, settings);

    const auto window2 =
        detail::filter_window(filter, m, -0.5 * m, settings.truncation_bound);
    const auto i2 = quad::integrate(
        [&](double zeta) { return g4(zeta) * sinc_half(zeta) * sinc_half(zeta + m); },
        window2, settings);

    PairIntegrals pair{i1.value, i2.value};
    if (filter.kind == FilterKind::none) {
        pair.i1 += detail::tail_i1(window1.front().second);
        pair.i2 += detail::tail_i2(window2.front().second + 0.5 * m, m, 0.0);
    }
    pair.i1 = std::max(pair.i1, 0.0);
    return pair;
}

CoincidenceRates diagonal_rates(const PairIntegrals& pair) {
    const double anti = std::max(pair.i1 - pair.i2, 0.0);
    const double co = std::max(pair.i1 + pair.i2, 0.0);
    return {anti, co, co, anti};
}

CoincidenceRates diagonal_rates(const OperatingPoint& point, const FilterSpec& filter,
                                const quad::Settings& settings) {
    return diagonal_rates(pair_integrals(point, filter, settings));
}

CoincidenceRates general_rates(const HwpAngles& angles, const PairIntegrals& pair) {
    const auto [c1, c2, d1, d2] = analyzer_coefficients(angles);
    const double anti =
        2.0 * ((c1 * c1 + c2 * c2) * pair.i1 - 2.0 * c1 * c2 * pair.i2);
    const double co =
        2.0 * ((d1 * d1 + d2 * d2) * pair.i1 + 2.0 * d1 * d2 * pair.i2);
    return {std::max(anti, 0.0), std::max(co, 0.0), std::max(co, 0.0),
            std::max(anti, 0.0)};
}

CoincidenceRates general_rates(const HwpAngles& angles, const OperatingPoint& point,
                               const FilterSpec& filter,
                               const quad::Settings& settings) {
    return general_rates(angles, pair_integrals(point, filter, settings));
}

double correlation(const HwpAngles& angles, const OperatingPoint& point,
                   const FilterSpec& filter, const quad::Settings& settings) {
    return general_rates(angles, point, filter, settings).correlation();
}

double rate_general_delta(const OperatingPoint& point, const FilterSpec& filter,
                          const quad::Settings& settings) {
    if (!std::isfinite(point.m) || !std::isfinite(point.d))
        throw std::invalid_argument("operating point must be finite");

    const double m = point.m;
    const double freq = 1.0 + point.d;  // phase frequency in w = zeta + m/2
    auto g4 = [&](double zeta) { return pow4(filter_amplitude(filter, zeta + 0.5 * m)); };

    const auto window1 = detail::filter_window(filter, m, 0.0, settings.truncation_bound);
    auto i1 = quad::integrate(
        [&](double zeta) {
            const double s = sinc_half(zeta);
            return g4(zeta) * s * s;
        },
        window1, settings);
    double i1_value = i1.value;
    if (filter.kind == FilterKind::none)
        i1_value += detail::tail_i1(window1.front().second);

    const auto window2 =
        detail::filter_window(filter, m, -0.5 * m, settings.truncation_bound);
    const std::complex<double> minus_i(0.0, -1.0);
    const auto cross = quad::integrate_complex(
        [&](double zeta) {
            const double w = zeta + 0.5 * m;
            return g4(zeta) * sinc_half(zeta) * sinc_half(zeta + m) *
                   std::exp(minus_i * (freq * w));
        },
        window2, settings);
    double cross_value = cross.value.real();
    if (filter.kind == FilterKind::none)
        cross_value += detail::tail_i2(window2.front().second + 0.5 * m, m,
                                       std::fabs(freq));

    const double imag_tol =
        std::max(1e-9, 100.0 * settings.rel_tol) * std::max(1.0, i1_value);
    if (std::fabs(cross.value.imag()) > imag_tol)
        throw std::runtime_error(
            "rate integral has a non-vanishing imaginary part (" +
            std::to_string(cross.value.imag()) +
            "): filter must be symmetric and quadrature converged");

    return std::max(i1_value - cross_value, 0.0);
}

CoincidenceRates single_mode_rates(const HwpAngles& angles) {
    const double s = std::sin(2.0 * (angles.alpha - angles.beta));
    const double c = std::cos(2.0 * (angles.alpha - angles.beta));
    const double anti = 0.5 * s * s;
    const double co = 0.5 * c * c;
    return {anti, co, co, anti};
}

PairIntegrals asymptotic_pair_integrals(double delta_m, double z) {
    const double s = std::sin(0.25 * delta_m);
    const double prefactor = 8.0 * z / (3.0 * delta_m * delta_m);
    return {prefactor * (12.0 * s * s + z * z), prefactor * (12.0 * s * s - z * z)};
}

double asymptotic_correlation(double delta_m, double z) {
    const double s = std::sin(0.25 * delta_m);
    const double peak = 12.0 * s * s;
    return -(peak - z * z) / (peak + z * z);
}

}  // namespace biphoton
