#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "biphoton/crystal.hpp"
#include "biphoton/csv.hpp"
#include "biphoton/sweep.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("filter-width conversion reproduces the experiment values") {
    const CrystalConfig config;
    CHECK(dimensionless_filter_width(config, {810e-9, 0.64e-9}) ==
          doctest::Approx(7.8).epsilon(0.02));
    // ten times wider filter: Z close to 80
    CHECK(dimensionless_filter_width(config, {810e-9, 6.4e-9}) ==
          doctest::Approx(78.0).epsilon(0.02));
    // proportionality in W
    const double z1 = dimensionless_filter_width(config, {810e-9, 0.1e-9});
    const double z2 = dimensionless_filter_width(config, {810e-9, 0.2e-9});
    CHECK(z2 == doctest::Approx(2.0 * z1).epsilon(1e-12));
    // wide filters are outside the linearised regime
    CHECK_THROWS_AS(dimensionless_filter_width(config, {810e-9, 90e-9}),
                    std::invalid_argument);
}

TEST_CASE("temperature map is affine with zero at T_opt") {
    const CrystalConfig config;
    CHECK(m_of_temperature(config, config.t_opt) == 0.0);
    const double m1 = m_of_temperature(config, 20.0);
    const double m2 = m_of_temperature(config, 30.0);
    CHECK(m_of_temperature(config, 20.0 + 30.0 - config.t_opt) ==
          doctest::Approx(m1 + m2).epsilon(1e-12));
    // the default slope anchors m = -8*pi at the 28.6 C maximum
    CHECK(m_of_temperature(config, 28.6) == doctest::Approx(-8.0 * kPi).epsilon(1e-9));
}

TEST_CASE("crystal config invariants") {
    CrystalConfig config;
    CHECK(config.transit_delay() > 0.0);
    CHECK(config.compensator_shift() == doctest::Approx(-1.0));
    CHECK(config.physical_carrier() == doctest::Approx(7e3).epsilon(0.01));
    config.n2 = 1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("temperature sweep structure") {
    CrystalConfig config;
    const auto rows =
        temperature_sweep(config, FilterSpec::gaussian(7.8), {30.0, 35.1, 0.05});

    SUBCASE("deterministic ordering and the T_opt row") {
        CHECK(rows.front().t_celsius == doctest::Approx(30.0));
        CHECK(rows.back().t_celsius == doctest::Approx(35.1).epsilon(1e-9));
        CHECK(rows.back().e == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("relative rate peaks at the sweep point nearest T_opt") {
        std::size_t best = 0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].relative_rate > rows[best].relative_rate) best = i;
        CHECK(best == rows.size() - 1);
    }
    SUBCASE("mirror symmetry E(T) = E(2*T_opt - T)") {
        const auto mirrored = temperature_sweep(config, FilterSpec::gaussian(7.8),
                                                {35.1, 40.2, 0.05});
        // rows[k] at T_opt - x pairs with mirrored[k'] at T_opt + x
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double x = config.t_opt - rows[k].t_celsius;
            const double t_mirror = config.t_opt + x;
            const std::size_t k2 = static_cast<std::size_t>(
                std::llround((t_mirror - 35.1) / 0.05));
            if (k2 >= mirrored.size()) continue;
            CHECK(rows[k].e == doctest::Approx(mirrored[k2].e).epsilon(1e-8));
        }
    }
    SUBCASE("rows that fail to converge are annotated, not fatal") {
        quad::Settings starved;
        starved.rel_tol = 1e-14;
        starved.max_subdivisions = 2;
        const auto annotated = temperature_sweep(config, FilterSpec::gaussian(7.8),
                                                 {30.0, 30.2, 0.1}, starved);
        REQUIRE(annotated.size() == 3);
        for (const auto& r : annotated) {
            CHECK(!r.note.empty());
            CHECK(std::isnan(r.e));
        }
    }
    SUBCASE("wide filter has smaller oscillation amplitude away from T_opt") {
        const auto narrow =
            temperature_sweep(config, FilterSpec::gaussian(7.8), {20.0, 30.0, 0.05});
        const auto wide =
            temperature_sweep(config, FilterSpec::gaussian(80.0), {20.0, 30.0, 0.05});
        double amp_narrow = 0.0, amp_wide = 0.0;
        for (const auto& r : narrow) amp_narrow = std::max(amp_narrow, std::fabs(r.e));
        for (const auto& r : wide) amp_wide = std::max(amp_wide, std::fabs(r.e));
        CHECK(amp_wide < amp_narrow);
    }
}

TEST_CASE("slope calibration places the correlation maximum") {
    CrystalConfig config;
    const double a = calibrate_slope_to_peak(config, FilterSpec::gaussian(7.8), 28.6);
    config.slope_a = a;
    // scan the neighborhood: the local maximum must sit at 28.6 +- step
    const auto rows =
        temperature_sweep(config, FilterSpec::gaussian(7.8), {27.6, 29.6, 0.02});
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].e > rows[best].e) best = i;
    CHECK(rows[best].t_celsius == doctest::Approx(28.6).epsilon(0.002));
    CHECK(rows[best].e > 0.5);
}

TEST_CASE("fit_slope") {
    CrystalConfig truth;
    truth.slope_a = 1.26e12;
    const FilterSpec filter = FilterSpec::gaussian(7.8);

    auto synthesize = [&](double noise_sigma, unsigned seed) {
        std::mt19937 gen(seed);
        std::normal_distribution<double> noise(0.0, noise_sigma);
        std::vector<MeasuredPoint> data;
        for (double t = 21.0; t <= 34.5; t += 0.35) {
            const double e =
                diagonal_rates({m_of_temperature(truth, t), -1.0}, filter).correlation();
            MeasuredPoint p;
            p.t_celsius = t;
            p.e = std::clamp(e + (noise_sigma > 0.0 ? noise(gen) : 0.0), -1.0, 1.0);
            if (noise_sigma > 0.0) p.sigma = noise_sigma;
            data.push_back(p);
        }
        return data;
    };

    FitOptions options;
    options.a_lo = 0.5e12;
    options.a_hi = 2.5e12;

    SUBCASE("zero-noise round trip recovers the slope to 0.1%") {
        const auto fit = fit_slope(synthesize(0.0, 0), truth, filter, options);
        CHECK(fit.slope_a == doctest::Approx(truth.slope_a).epsilon(1e-3));
        CHECK(fit.residual < 1e-8);
    }
    SUBCASE("noisy data recovers the slope within 2%") {
        int hits = 0;
        for (unsigned seed = 1; seed <= 10; ++seed) {
            const auto fit = fit_slope(synthesize(0.05, seed), truth, filter, options);
            if (std::fabs(fit.slope_a - truth.slope_a) < 0.02 * truth.slope_a) ++hits;
        }
        CHECK(hits == 10);
    }
    SUBCASE("fitting T_opt recovers a shifted optimum") {
        CrystalConfig shifted = truth;
        shifted.t_opt = 34.9;  // data generated off the configured 35.1
        std::vector<MeasuredPoint> data;
        for (double t = 24.0; t <= 34.4; t += 0.45) {
            const double e = diagonal_rates({m_of_temperature(shifted, t), -1.0}, filter)
                                 .correlation();
            data.push_back({t, e, {}});
        }
        FitOptions both = options;
        both.fit_t_opt = true;
        both.t_opt_span = 0.5;
        const auto fit = fit_slope(data, truth, filter, both);
        REQUIRE(fit.t_opt.has_value());
        CHECK(*fit.t_opt == doctest::Approx(34.9).epsilon(2e-3));
        CHECK(fit.slope_a == doctest::Approx(truth.slope_a).epsilon(5e-3));
    }
    SUBCASE("three points are rejected") {
        std::vector<MeasuredPoint> tiny{{30.0, -0.5, {}}, {31.0, 0.2, {}}, {32.0, -0.9, {}}};
        CHECK_THROWS_AS((void)fit_slope(tiny, truth, filter, options),
                        std::invalid_argument);
    }
    SUBCASE("data clustered at T_opt cannot identify the slope") {
        // near the optimum E = -1 for every slope, so the residual
        // landscape is flat across the whole bracket
        std::vector<MeasuredPoint> flat;
        for (double t = 35.02; t <= 35.18; t += 0.02) flat.push_back({t, -1.0, {}});
        CHECK_THROWS_WITH_AS((void)fit_slope(flat, truth, filter, options),
                             doctest::Contains("ambiguous"), std::runtime_error);
    }
}

TEST_CASE("chsh") {
    SUBCASE("optimal settings at the dip center reach 2*sqrt(2)") {
        const double s =
            chsh({0.0, -1.0}, FilterSpec::gaussian(7.8), ChshSettings::optimal());
        CHECK(s == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
    }
    SUBCASE("degenerate settings stay below 2") {
        const ChshSettings same{0.3, 0.3, 0.3, 0.3};
        CHECK(chsh({0.0, -1.0}, FilterSpec::gaussian(7.8), same) <= 2.0 + 1e-12);
    }
    SUBCASE("no setting grid exceeds the quantum bound") {
        const OperatingPoint peak{4.0 * kPi, -1.0};
        const double bound = 2.0 * std::sqrt(2.0) + 1e-9;
        for (double a = 0.0; a < kPi / 2.0; a += kPi / 8.0)
            for (double b = kPi / 16.0; b < kPi / 2.0; b += kPi / 8.0) {
                const ChshSettings s{a, a + kPi / 8.0, b, b + kPi / 8.0};
                CHECK(std::fabs(chsh(peak, FilterSpec::gaussian(7.8), s)) <= bound);
            }
    }
}

TEST_CASE("visibility_scan is unity for the ideal model") {
    CHECK(visibility_scan(0.0, 0.0, kPi / 2.0, 181, {0.0, -1.0},
                          FilterSpec::gaussian(7.8)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(visibility_scan(kPi / 8.0, 0.0, kPi / 2.0, 181, {0.0, -1.0},
                          FilterSpec::gaussian(7.8)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS((void)visibility_scan(0.0, 0.0, 0.1, 10, {0.0, -1.0},
                                          FilterSpec::none()),
                    std::invalid_argument);
}

TEST_CASE("measured-data CSV ingestion") {
    const auto path = temp_file("biphoton_measured.csv");
    {
        std::ofstream out(path);
        out << "# lab run 12\n";
        out << "T_C,E,sigma\n";
        out << "30.5,-0.82,0.04\n";
        out << "31.0,-0.95,\n";
        out << "# comment inside\n";
        out << "31.5,-0.99\n";
    }
    const auto points = read_measured_csv(path);
    REQUIRE(points.size() == 3);
    CHECK(points[0].t_celsius == doctest::Approx(30.5));
    CHECK(points[0].e == doctest::Approx(-0.82));
    CHECK(points[0].sigma.has_value());
    CHECK(!points[1].sigma.has_value());
    CHECK(!points[2].sigma.has_value());
    std::filesystem::remove(path);

    CHECK_THROWS((void)read_measured_csv(temp_file("missing_file.csv")));
}

TEST_CASE("sweep CSV format") {
    CrystalConfig config;
    const auto rows = temperature_sweep(config, FilterSpec::gaussian(7.8),
                                        {34.0, 35.0, 0.5});
    std::ostringstream out;
    write_sweep_csv(out, rows);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "T_C,m,E,I1,I2,Rpp,Rpm,relative_rate");
    std::string line;
    int count = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++count;
    CHECK(count == static_cast<int>(rows.size()));
}

TEST_CASE("angle parsing") {
    CHECK(parse_angle("22.5deg") == doctest::Approx(kPi / 8.0).epsilon(1e-12));
    CHECK(parse_angle("0.5rad") == doctest::Approx(0.5));
    CHECK(parse_angle("-45deg") == doctest::Approx(-kPi / 4.0));
    CHECK_THROWS_AS(parse_angle("22.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_angle("fastdeg"), std::invalid_argument);
}

TEST_SUITE_END();
