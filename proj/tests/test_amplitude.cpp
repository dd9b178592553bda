#include <doctest.h>

#include <cmath>
#include <complex>

#include "biphoton/amplitude.hpp"

using namespace biphoton;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// full width of |first| along tau_- at half of its peak value
double envelope_fwhm(const FilterSpec& filter, double m,
                     const quad::Settings& settings = {}) {
    double peak = 0.0;
    const double lo = -14.0, hi = 13.0, step = 0.02;
    std::vector<double> mags;
    for (double x = lo; x <= hi; x += step) {
        const double mag = std::abs(two_photon_amplitude(
            x, 0.0, {m, -1.0}, filter, 0.0, AmplitudeTerm::first, settings));
        mags.push_back(mag);
        peak = std::max(peak, mag);
    }
    double first = hi, last = lo;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        if (mags[i] >= 0.5 * peak) {
            first = std::min(first, lo + step * static_cast<double>(i));
            last = std::max(last, lo + step * static_cast<double>(i));
        }
    }
    return last - first;
}
}  // namespace

TEST_SUITE_BEGIN("amplitude");

TEST_CASE("no filter: first term is supported exactly on the boxcar band") {
    for (double x : {0.5, 1.3, -1.01, -2.0, 7.0}) {
        CHECK(std::abs(two_photon_amplitude(x, 0.0, {3.0, -1.0}, FilterSpec::none(),
                                            40.0, AmplitudeTerm::first)) == 0.0);
    }
    for (double x : {-0.99, -0.5, -0.01}) {
        CHECK(std::abs(two_photon_amplitude(x, 0.0, {3.0, -1.0}, FilterSpec::none(),
                                            40.0, AmplitudeTerm::first)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("terms cancel over the whole band at the dip center") {
    for (const auto& filter : {FilterSpec::none(), FilterSpec::gaussian(7.8)}) {
        for (double x = -0.95; x < 0.0; x += 0.13) {
            const auto sum = two_photon_amplitude(x, 0.0, {0.0, -1.0}, filter, 40.0,
                                                  AmplitudeTerm::both);
            CHECK(std::abs(sum) < 1e-10);
        }
    }
}

TEST_CASE("filtered envelope reproduces the boxcar as Z grows") {
    // Z = 80 is experimentally indistinguishable from no filter
    for (double x : {-0.7, -0.3}) {
        const auto filtered = two_photon_amplitude(x, 0.0, {0.0, -1.0},
                                                   FilterSpec::gaussian(80.0), 0.0,
                                                   AmplitudeTerm::first);
        CHECK(std::abs(filtered) == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("band widens as the filter narrows") {
    const double w80 = envelope_fwhm(FilterSpec::gaussian(80.0), 5.0);
    const double w78 = envelope_fwhm(FilterSpec::gaussian(7.8), 5.0);
    const double w1 = envelope_fwhm(FilterSpec::gaussian(1.0), 5.0);
    CHECK(w80 == doctest::Approx(1.0).epsilon(0.1));
    CHECK(w78 > w80);
    CHECK(w1 > 1.5 * w80);
}

TEST_CASE("narrow filter aligns the equal-phase lines with the diagonal") {
    // with the carrier removed, the residual phase slope along tau_- drops
    // from m/2 (no filter) to about zero (narrow filter): in the
    // (tau_A, tau_B) plane the wavefronts turn toward 45 degrees
    const double m = 5.0;
    auto phase_slope = [&](const FilterSpec& filter) {
        const double x0 = -0.55, x1 = -0.45;
        const auto a = two_photon_amplitude(x0, 0.0, {m, -1.0}, filter, 0.0,
                                            AmplitudeTerm::first);
        const auto b = two_photon_amplitude(x1, 0.0, {m, -1.0}, filter, 0.0,
                                            AmplitudeTerm::first);
        return std::arg(b / a) / (x1 - x0);
    };
    CHECK(std::fabs(phase_slope(FilterSpec::none()) + 0.5 * m) < 1e-9);
    CHECK(std::fabs(phase_slope(FilterSpec::gaussian(1.0))) < 0.5);
}

TEST_CASE("second term is the first reflected through the diagonal and shifted") {
    const OperatingPoint point{4.0, -1.0};
    const FilterSpec filter = FilterSpec::gaussian(7.8);
    for (double x : {-0.8, -0.4, 0.1}) {
        const auto second = two_photon_amplitude(x, 0.0, point, filter, 0.0,
                                                 AmplitudeTerm::second);
        const auto first = two_photon_amplitude(point.d - x, 0.0, point, filter, 0.0,
                                                AmplitudeTerm::first);
        CHECK(std::abs(second) == doctest::Approx(std::abs(first)).epsilon(1e-9));
    }
}

TEST_CASE("carrier controls only the overall phase, not the magnitude") {
    const auto a = two_photon_amplitude(-0.3, 0.2, {5.0, -1.0}, FilterSpec::gaussian(7.8),
                                        0.0, AmplitudeTerm::both);
    const auto b = two_photon_amplitude(-0.3, 0.2, {5.0, -1.0}, FilterSpec::gaussian(7.8),
                                        40.0, AmplitudeTerm::both);
    CHECK(std::abs(a) == doctest::Approx(std::abs(b)).epsilon(1e-12));
    CHECK_THROWS_AS((void)two_photon_amplitude(0.0, 0.0, {0.0, -1.0}, FilterSpec::none(),
                                               -1.0, AmplitudeTerm::both),
                    std::invalid_argument);
}

TEST_CASE("amplitude_map grid layout and term bookkeeping") {
    GridSpec grid;
    grid.tau_a_min = -1.5;
    grid.tau_a_max = 0.5;
    grid.tau_b_min = -0.5;
    grid.tau_b_max = 0.5;
    grid.na = 9;
    grid.nb = 5;
    const auto samples = amplitude_map(grid, {0.0, -1.0}, FilterSpec::none(), 40.0);
    REQUIRE(samples.size() == 45);
    // row-major, tau_a slowest
    CHECK(samples[0].tau_a == doctest::Approx(-1.5));
    CHECK(samples[0].tau_b == doctest::Approx(-0.5));
    CHECK(samples[4].tau_a == doctest::Approx(-1.5));
    CHECK(samples[4].tau_b == doctest::Approx(0.5));
    CHECK(samples[44].tau_a == doctest::Approx(0.5));
    for (const auto& s : samples)
        CHECK(std::abs(s.sum() - (s.first - s.second)) == 0.0);
}

TEST_SUITE_END();
