#pragma once

#include "biphoton/filter.hpp"
#include "biphoton/quadrature.hpp"

namespace biphoton {

/// Dimensionless coordinates of every rate computation: the detuning
/// m = mu*D*L between the two downconverted center frequencies, and the
/// compensator shift d = delta/(D*L). d = -1 corresponds to a compensating
/// crystal of half the source-crystal length, which maximises the overlap of
/// the two amplitude bands; it is the operating point of the closed forms.
struct OperatingPoint {
    double m = 0.0;
    double d = -1.0;
};

/// Half-wave-plate orientations for the two analyzers, radians. All rate
/// dependence is through cos/sin of twice the angle, so rates are periodic
/// with period pi/2 in each angle.
struct HwpAngles {
    double alpha = 0.0;
    double beta = 0.0;
};

/// The pair (I1, I2) from which every rate and correlation derives, in units
/// where the overall prefactor R0 is dropped. I1 >= 0 and |I2| <= I1.
struct PairIntegrals {
    double i1 = 0.0;
    double i2 = 0.0;
};

/// Coincidence rates between the four analyzer ports, in units of R0.
struct CoincidenceRates {
    double rpp = 0.0, rpm = 0.0, rmp = 0.0, rmm = 0.0;

    double total() const { return rpp + rpm + rmp + rmm; }
    /// (R++ - R+- - R-+ + R--) / total; throws on zero total rate.
    double correlation() const;
};

/// 2*sin(zeta/2)/zeta, continued through the removable singularity at 0.
double sinc_half(double zeta);

/// Evaluates I1 and I2 by adaptive quadrature at compensator shift d = -1.
///
///   I1 = 4 int dz G(z+m/2)^4 sin^2(z/2) / z^2
///   I2 = 4 int dz G(z+m/2)^4 sin(z/2) sin((z+m)/2) / (z (z+m))
///
/// The integrands are rewritten with sinc_half so the removable
/// singularities at z = 0 and z = -m cost no precision. The infinite domain
/// is truncated per filter: at the support for rectangular profiles, at
/// 8 Z around the filter center for Gaussians, and at the settings'
/// truncation_bound with analytic tail corrections when there is no filter.
PairIntegrals pair_integrals(const OperatingPoint& point, const FilterSpec& filter,
                             const quad::Settings& settings = {});

/// Rates in the diagonal bases alpha = beta = pi/8:
/// R++ = R-- = I1 - I2 and R+- = R-+ = I1 + I2.
CoincidenceRates diagonal_rates(const OperatingPoint& point, const FilterSpec& filter,
                                const quad::Settings& settings = {});
CoincidenceRates diagonal_rates(const PairIntegrals& pair);

/// Rates at arbitrary analyzer angles, obtained by carrying the analyzer
/// coefficients c1 = cos2a sin2b, c2 = sin2a cos2b (for ++/--) and
/// d1 = cos2a cos2b, d2 = sin2a sin2b (for +-/-+) through the rate integral:
///
///   R++ = R-- = 2 [(c1^2 + c2^2) I1 - 2 c1 c2 I2]
///   R+- = R-+ = 2 [(d1^2 + d2^2) I1 + 2 d1 d2 I2]
///
/// normalised so the diagonal setting reproduces diagonal_rates exactly.
/// The total rate 4*I1 is independent of the angles.
CoincidenceRates general_rates(const HwpAngles& angles, const OperatingPoint& point,
                               const FilterSpec& filter,
                               const quad::Settings& settings = {});
CoincidenceRates general_rates(const HwpAngles& angles, const PairIntegrals& pair);

/// Correlation E(alpha, beta) built from general_rates. At the diagonal
/// setting this is -I2/I1; at m = 0 it equals -cos 4(alpha - beta) for every
/// symmetric filter.
double correlation(const HwpAngles& angles, const OperatingPoint& point,
                   const FilterSpec& filter, const quad::Settings& settings = {});

/// R++ in the diagonal bases for an arbitrary compensator shift d, evaluated
/// as the real part of the rate integral with the general phase
/// exp(-i (1+d)(z+m/2)). The imaginary part must vanish for a symmetric
/// filter; a residual above tolerance raises a numerical-consistency error.
/// At d = -1 this reduces to diagonal_rates().rpp.
double rate_general_delta(const OperatingPoint& point, const FilterSpec& filter,
                          const quad::Settings& settings = {});

/// The single-frequency-mode (singlet) prediction: R++ = R-- =
/// sin^2 2(alpha-beta) / 2, R+- = R-+ = cos^2 2(alpha-beta) / 2,
/// normalised to unit total and independent of temperature.
CoincidenceRates single_mode_rates(const HwpAngles& angles);

/// Narrow rectangular-filter asymptotics near m = 4 pi n (n != 0):
///   I_{1,2} = 8Z/(3 dm^2) (12 sin^2(dm/4) +- Z^2),  dm = m - 4 pi n.
/// Valid for small Z and dm; diverges at dm = 0, where only the ratio is
/// meaningful (use asymptotic_correlation). The caller is responsible for
/// staying inside the validity regime.
PairIntegrals asymptotic_pair_integrals(double delta_m, double z);

/// The correlation implied by the asymptotic pair:
///   E = -(12 sin^2(dm/4) - Z^2) / (12 sin^2(dm/4) + Z^2),
/// finite for every dm including 0 (where it is +1).
double asymptotic_correlation(double delta_m, double z);

namespace detail {
/// Quadrature windows for the pair integrands. For the no-filter case the
/// window is centered on `center` with half-width settings.truncation_bound
/// and the discarded tails must be added back analytically.
std::vector<quad::Interval> filter_window(const FilterSpec& filter, double m,
                                          double center, double truncation_bound);
/// Tail of 4 int_{|z| > L} sin^2(z/2)/z^2 dz (both sides).
double tail_i1(double cut);
/// Tail of the I2 integrand beyond |w| > L in w = z + m/2, including the
/// general compensator frequency kappa = |1+d| (kappa = 0 recovers I2).
double tail_i2(double cut, double m, double kappa);
}  // namespace detail

}  // namespace biphoton
