#pragma once

#include <complex>
#include <vector>

#include "biphoton/filter.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

enum class AmplitudeTerm { first, second, both };

/// One point of the two-photon amplitude over the (tau_A, tau_B) plane,
/// detection-path times in units of D*L. With no filter the first term is
/// supported exactly on -1 <= tau_A - tau_B <= 0.
struct AmplitudeSample {
    double tau_a = 0.0;
    double tau_b = 0.0;
    std::complex<double> first{};
    std::complex<double> second{};

    std::complex<double> sum() const { return first - second; }
};

/// The two-photon detection amplitude at (tau_a, tau_b) for the diagonal
/// analyzer setting, normalised so the no-filter band envelope is 1.
/// `carrier` is the dimensionless carrier frequency multiplying tau_a+tau_b
/// (0 renders the envelope only; the physical value is
/// CrystalConfig::physical_carrier()). With term = both the two terms are
/// combined with the relative minus sign of the ++ channel.
std::complex<double> two_photon_amplitude(double tau_a, double tau_b,
                                          const OperatingPoint& point,
                                          const FilterSpec& filter, double carrier,
                                          AmplitudeTerm term,
                                          const quad::Settings& settings = {});

/// Rectangle in the (tau_A, tau_B) plane and its sampling resolution.
struct GridSpec {
    double tau_a_min = -2.0, tau_a_max = 1.0;
    double tau_b_min = -1.0, tau_b_max = 2.0;
    int na = 121, nb = 121;
};

/// Row-major grid of both amplitude terms, tau_a varying slowest. Rows are
/// computed independently, so the parallel and serial paths agree exactly.
std::vector<AmplitudeSample> amplitude_map(const GridSpec& grid,
                                           const OperatingPoint& point,
                                           const FilterSpec& filter, double carrier,
                                           const quad::Settings& settings = {},
                                           bool parallel = true);

std::vector<AmplitudeSample> amplitude_map_serial(const GridSpec& grid,
                                                  const OperatingPoint& point,
                                                  const FilterSpec& filter,
                                                  double carrier,
                                                  const quad::Settings& settings = {});

}  // namespace biphoton
