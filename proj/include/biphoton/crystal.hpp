#pragma once

#include <stdexcept>

namespace biphoton {

/// Physical constants of the source: crystal geometry, indices of refraction
/// of the two downconverted beams, wavelengths, compensator length and the
/// linear temperature coefficient. Bridges lab units and the dimensionless
/// (m, d) coordinates. All lengths in meters, temperatures in Celsius.
struct CrystalConfig {
    double length = 10e-3;              ///< L, crystal length
    double n1 = 1.75;                   ///< index of the fast beam
    double n2 = 1.84;                   ///< index of the slow beam
    double lambda0 = 810e-9;            ///< downconversion center wavelength
    double lambda_pump = 405e-9;        ///< pump wavelength
    double compensator_length = 5e-3;   ///< L_c, default L/2
    double t_opt = 35.1;                ///< optimal temperature, Celsius
    double slope_a = default_slope();   ///< d(mu)/dT, rad s^-1 K^-1

    static constexpr double speed_of_light = 299792458.0;

    /// Group-delay difference D*L = (n2 - n1) L / c across the crystal, s.
    double transit_delay() const { return (n2 - n1) * length / speed_of_light; }

    /// Compensator shift d = delta/(D L) = -2 L_c / L (d = -1 at L_c = L/2).
    double compensator_shift() const { return -2.0 * compensator_length / length; }

    /// Dimensionless pump carrier omega_p * D L / 2, useful as an upper bound
    /// for wavefront-rendering carriers (about 7e3 for the default geometry).
    double physical_carrier() const;

    void validate() const {
        if (!(length > 0.0)) throw std::invalid_argument("crystal length must be > 0");
        if (!(n2 > n1 && n1 > 1.0))
            throw std::invalid_argument("indices must satisfy n2 > n1 > 1");
        if (!(lambda0 > 0.0 && lambda_pump > 0.0))
            throw std::invalid_argument("wavelengths must be > 0");
        if (compensator_length < 0.0)
            throw std::invalid_argument("compensator length must be >= 0");
        if (!(slope_a > 0.0)) throw std::invalid_argument("slope a must be > 0");
    }

    /// Slope that puts the second positive correlation maximum (m = -8 pi)
    /// at 28.6 C for the default geometry; the measured maxima then fall at
    /// 28.6, 25.35 and 22.1 C, within half a degree of the observed ones.
    static double default_slope();
};

/// A filter measured in the lab: Gaussian intensity profile
/// exp(-((lambda - center)/W)^2) around a center wavelength.
struct PhysicalFilter {
    double center_wavelength = 810e-9;  ///< meters
    double gaussian_width = 0.64e-9;    ///< W, meters
};

/// Converts the measured wavelength-domain width W into the dimensionless
/// amplitude half-width Z = 2 sqrt(2) pi (n2 - n1) L W / lambda0^2. The
/// sqrt(2) accounts for the amplitude profile being the square root of the
/// measured intensity profile. Valid for narrow filters; W >= lambda0/10
/// is rejected as outside the linearised regime.
double dimensionless_filter_width(const CrystalConfig& config,
                                  const PhysicalFilter& filter);

/// Linear temperature map m(T) = a (T - T_opt) * D L.
double m_of_temperature(const CrystalConfig& config, double t_celsius);

}  // namespace biphoton
