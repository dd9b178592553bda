#include "biphoton/amplitude.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const std::complex<double> kMinusI(0.0, -1.0);

// Envelope of one term: the nu-integral of F(nu) f(nu) against the detection
// phase, normalised so the no-filter result is the unit boxcar on [-1, 0].
std::complex<double> envelope(double x, double m, const FilterSpec& filter,
                              const quad::Settings& settings) {
    if (filter.kind == FilterKind::none)
        return (x >= -1.0 && x <= 0.0) ? 1.0 : 0.0;

    const auto window = detail::filter_window(filter, m, -0.5 * m,
                                              settings.truncation_bound);
    auto integrand = [&](double zeta) {
        const double g = filter_amplitude(filter, zeta + 0.5 * m);
        return g * g * sinc_half(zeta) * std::exp(kMinusI * (zeta * (x + 0.5)));
    };
    // far outside the band the transform underflows the envelope scale of
    // order one; an absolute floor keeps the refinement from chasing roundoff
    quad::Settings s = settings;
    s.abs_tol = std::max(s.abs_tol, 1e-12);
    return quad::integrate_complex(integrand, window, s).value / (2.0 * kPi);
}

}  // namespace

std::complex<double> two_photon_amplitude(double tau_a, double tau_b,
                                          const OperatingPoint& point,
                                          const FilterSpec& filter, double carrier,
                                          AmplitudeTerm term,
                                          const quad::Settings& settings) {
    if (carrier < 0.0)
        throw std::invalid_argument("carrier frequency must be >= 0");

    const double x = tau_a - tau_b;
    const std::complex<double> carrier_phase =
        std::exp(kMinusI * (carrier * (tau_a + tau_b)));

    std::complex<double> first{}, second{};
    if (term != AmplitudeTerm::second)
        first = carrier_phase * std::exp(kMinusI * (0.5 * point.m * x)) *
                envelope(x, point.m, filter, settings);
    if (term != AmplitudeTerm::first)
        second = carrier_phase *
                 std::exp(kMinusI * (-0.5 * point.m * (x - point.d))) *
                 envelope(point.d - x, point.m, filter, settings);

    switch (term) {
        case AmplitudeTerm::first:
            return first;
        case AmplitudeTerm::second:
            return second;
        case AmplitudeTerm::both:
            return first - second;
    }
    return {};
}

namespace {

std::vector<AmplitudeSample> map_impl(const GridSpec& grid, const OperatingPoint& point,
                                      const FilterSpec& filter, double carrier,
                                      const quad::Settings& settings, bool parallel) {
    if (grid.na < 2 || grid.nb < 2)
        throw std::invalid_argument("amplitude map needs at least a 2x2 grid");
    const double ha = (grid.tau_a_max - grid.tau_a_min) / (grid.na - 1);
    const double hb = (grid.tau_b_max - grid.tau_b_min) / (grid.nb - 1);

    std::vector<AmplitudeSample> samples(static_cast<std::size_t>(grid.na) * grid.nb);
    std::exception_ptr failure;

    parallel_for(static_cast<std::size_t>(grid.na), parallel, [&](std::size_t ia) {
        try {
            const double tau_a = grid.tau_a_min + ha * static_cast<double>(ia);
            for (int ib = 0; ib < grid.nb; ++ib) {
                const double tau_b = grid.tau_b_min + hb * ib;
                AmplitudeSample& s = samples[ia * grid.nb + ib];
                s.tau_a = tau_a;
                s.tau_b = tau_b;
                s.first = two_photon_amplitude(tau_a, tau_b, point, filter, carrier,
                                               AmplitudeTerm::first, settings);
                s.second = two_photon_amplitude(tau_a, tau_b, point, filter, carrier,
                                                AmplitudeTerm::second, settings);
            }
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
    return samples;
}

}  // namespace

std::vector<AmplitudeSample> amplitude_map(const GridSpec& grid,
                                           const OperatingPoint& point,
                                           const FilterSpec& filter, double carrier,
                                           const quad::Settings& settings,
                                           bool parallel) {
    return map_impl(grid, point, filter, carrier, settings, parallel);
}

std::vector<AmplitudeSample> amplitude_map_serial(const GridSpec& grid,
                                                  const OperatingPoint& point,
                                                  const FilterSpec& filter,
                                                  double carrier,
                                                  const quad::Settings& settings) {
    return map_impl(grid, point, filter, carrier, settings, false);
}

}  // namespace biphoton
