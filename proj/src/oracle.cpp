#include "biphoton/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <stdexcept>

#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const std::complex<double> kMinusI(0.0, -1.0);

using Complex = std::complex<double>;

// Detection-amplitude transform of one photon assignment:
//   H(x) = int dz G(z + m/2)^2 sinc_half(z) exp(-i z (x + 1/2)).
// No filter gives the exact 2*pi boxcar on [-1, 0] (half value on the edge).
Complex band_transform(double x, double m, const FilterSpec& filter,
                       const quad::Settings& settings) {
    if (filter.kind == FilterKind::none) {
        if (std::fabs(x + 1.0) < 1e-12 || std::fabs(x) < 1e-12) return kPi;
        return (x > -1.0 && x < 0.0) ? 2.0 * kPi : 0.0;
    }
    const auto window =
        detail::filter_window(filter, m, -0.5 * m, settings.truncation_bound);
    auto integrand = [&](double zeta) {
        const double g = filter_amplitude(filter, zeta + 0.5 * m);
        return g * g * sinc_half(zeta) * std::exp(kMinusI * (zeta * (x + 0.5)));
    };
    return quad::integrate_complex(integrand, window, settings).value;
}

double default_margin(const FilterSpec& filter) {
    switch (filter.kind) {
        case FilterKind::none:
            return 0.125;
        case FilterKind::gaussian:
            return 12.0 / filter.half_width + 0.5;
        case FilterKind::rectangular:
            // the boxcar spectrum rings in tau; coverage is best-effort here
            return std::min(240.0 / filter.half_width, 480.0);
    }
    return 0.5;
}

// Composite Simpson over samples with uniform step h (even interval count).
double simpson(std::span<const double> y, double h, std::size_t stride) {
    const std::size_t n = (y.size() - 1) / stride;
    double odd = 0.0, even = 0.0;
    for (std::size_t k = 1; k < n; k += 2) odd += y[k * stride];
    for (std::size_t k = 2; k < n; k += 2) even += y[k * stride];
    return h * stride * (y.front() + y.back() + 4.0 * odd + 2.0 * even) / 3.0;
}

// No filter: the two band transforms are exact boxcars, so |psi|^2 is
// piecewise trigonometric with jumps at the band edges. Integrating each
// piece adaptively avoids gridding across the discontinuities; the grid and
// its Richardson estimate only apply to filtered runs.
OracleResult oracle_none(const HwpAngles& angles, const OperatingPoint& point,
                         double max_error) {
    const double m = point.m;
    const double d = point.d;
    const double margin = 0.125;

    std::vector<double> cuts{std::min(-1.0, d) - margin, -1.0, 0.0, d, d + 1.0,
                             std::max(0.0, d + 1.0) + margin};
    std::sort(cuts.begin(), cuts.end());
    std::vector<quad::Interval> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i] + 1e-15) pieces.push_back({cuts[i], cuts[i + 1]});

    const double ca = std::cos(2.0 * angles.alpha), sa = std::sin(2.0 * angles.alpha);
    const double cb = std::cos(2.0 * angles.beta), sb = std::sin(2.0 * angles.beta);
    const double c1 = ca * sb, c2 = sa * cb, d1 = ca * cb, d2 = sa * sb;

    auto term1 = [&](double x) -> Complex {
        if (x <= -1.0 || x >= 0.0) return 0.0;
        return 2.0 * kPi * std::exp(kMinusI * (0.5 * m * x));
    };
    auto term2 = [&](double x) -> Complex {
        if (x <= d || x >= d + 1.0) return 0.0;
        return 2.0 * kPi * std::exp(kMinusI * (-0.5 * m * (x - d)));
    };

    quad::Settings settings;
    settings.rel_tol = 1e-10;
    settings.abs_tol = 1e-13;
    auto channel = [&](double w1, double w2, double& error) {
        const auto r = quad::integrate(
            [&](double x) { return std::norm(w1 * term1(x) + w2 * term2(x)); }, pieces,
            settings);
        error += r.error / kPi;
        return r.value / kPi;
    };

    OracleResult out;
    double error = 0.0;
    out.rates.rpp = channel(c1, -c2, error);
    out.rates.rmm = channel(c2, -c1, error);
    out.rates.rpm = channel(d1, d2, error);
    out.rates.rmp = channel(d2, d1, error);
    out.grid_resolution = 0;
    out.estimated_error = error;
    if (!(out.estimated_error <= max_error))
        throw std::runtime_error(
            "oracle does not meet the requested error: estimated " +
            std::to_string(out.estimated_error) + " > requested " +
            std::to_string(max_error));
    return out;
}

OracleResult oracle_impl(const HwpAngles& angles, const OperatingPoint& point,
                         const FilterSpec& filter, const OracleOptions& options,
                         double max_error, bool parallel) {
    if (filter.kind == FilterKind::none)
        return oracle_none(angles, point, max_error);

    const double m = point.m;
    const double d = point.d;

    const double margin = options.margin >= 0.0 ? options.margin : default_margin(filter);
    const double band_lo = std::min(-1.0, d);
    const double band_hi = std::max(0.0, d + 1.0);
    const double half_span = 0.5 * (band_hi - band_lo) + margin;

    const double ppu = options.points_per_unit;
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * half_span * ppu));
    n = std::max<std::size_t>(n, static_cast<std::size_t>(options.min_points));
    n = ((n + 3) / 4) * 4;  // halving must keep an even Simpson interval count
    const double h = 2.0 * half_span / static_cast<double>(n);
    const double center = 0.5 * d;  // the two bands mirror through d/2

    // One transform evaluation per grid point serves both terms, since the
    // grid is symmetric about d/2 and H(d - x_i) = H(x_{n-i}).
    std::vector<Complex> transform(n + 1);
    std::exception_ptr failure;
    parallel_for(n + 1, parallel && options.parallel, [&](std::size_t i) {
        try {
            const double x = center + (static_cast<double>(i) - 0.5 * n) * h;
            transform[i] = band_transform(x, m, filter, options.nu_quadrature);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (!failure) failure = std::current_exception();
            }
        }
    });
    if (failure) std::rethrow_exception(failure);

    const double ca = std::cos(2.0 * angles.alpha), sa = std::sin(2.0 * angles.alpha);
    const double cb = std::cos(2.0 * angles.beta), sb = std::sin(2.0 * angles.beta);
    const double c1 = ca * sb, c2 = sa * cb, d1 = ca * cb, d2 = sa * sb;

    std::vector<double> app(n + 1), apm(n + 1), amp(n + 1), amm(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = center + (static_cast<double>(i) - 0.5 * n) * h;
        const Complex t1 = std::exp(kMinusI * (0.5 * m * x)) * transform[i];
        const Complex t2 =
            std::exp(kMinusI * (-0.5 * m * (x - d))) * transform[n - i];
        app[i] = std::norm(c1 * t1 - c2 * t2);
        amm[i] = std::norm(c2 * t1 - c1 * t2);
        apm[i] = std::norm(d1 * t1 + d2 * t2);
        amp[i] = std::norm(d2 * t1 + d1 * t2);
    }

    auto rate = [&](std::span<const double> y, std::size_t stride) {
        return simpson(y, h, stride) / kPi;
    };
    OracleResult out;
    out.grid_resolution = static_cast<int>(n);
    out.rates = {rate(app, 1), rate(apm, 1), rate(amp, 1), rate(amm, 1)};
    const CoincidenceRates coarse{rate(app, 2), rate(apm, 2), rate(amp, 2),
                                  rate(amm, 2)};
    out.estimated_error =
        std::max({std::fabs(out.rates.rpp - coarse.rpp), std::fabs(out.rates.rpm - coarse.rpm),
                  std::fabs(out.rates.rmp - coarse.rmp), std::fabs(out.rates.rmm - coarse.rmm)}) /
        15.0;

    if (!(out.estimated_error <= max_error))
        throw std::runtime_error(
            "oracle grid does not resolve the band: estimated error " +
            std::to_string(out.estimated_error) + " > requested " +
            std::to_string(max_error));
    return out;
}

}  // namespace

OracleResult oracle_rates(const HwpAngles& angles, const OperatingPoint& point,
                          const FilterSpec& filter, const OracleOptions& options,
                          double max_error) {
    return oracle_impl(angles, point, filter, options, max_error, true);
}

OracleResult oracle_rates_serial(const HwpAngles& angles, const OperatingPoint& point,
                                 const FilterSpec& filter, const OracleOptions& options,
                                 double max_error) {
    return oracle_impl(angles, point, filter, options, max_error, false);
}

int count_sign_changes(std::span<const std::pair<double, double>> series,
                       double noise_floor) {
    int transitions = 0;
    int last_sign = 0;
    for (const auto& [x, y] : series) {
        (void)x;
        if (std::fabs(y) < noise_floor) continue;
        const int sign = y > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++transitions;
        last_sign = sign;
    }
    return transitions;
}

}  // namespace biphoton
