#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/filter.hpp"
#include "biphoton/rates.hpp"

using namespace biphoton;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// analytic no-filter values: I1 = 2*pi, I2 = 2*pi * sinc_half(m)
double i2_no_filter(double m) { return 2.0 * kPi * sinc_half(m); }
}  // namespace

TEST_SUITE_BEGIN("core_physics");

TEST_CASE("sinc_half: limit, zero and direct values") {
    CHECK(sinc_half(0.0) == 1.0);
    CHECK(std::fabs(sinc_half(2.0 * kPi)) < 1e-15);
    CHECK(sinc_half(kPi) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
    // series joins the direct branch smoothly
    CHECK(sinc_half(1e-4) == doctest::Approx(sinc_half(1.0000001e-4)).epsilon(1e-12));
    CHECK(sinc_half(-3.7) == sinc_half(3.7));
}

TEST_CASE("filter_amplitude shapes") {
    CHECK(filter_amplitude(FilterSpec::gaussian(7.8), 0.0) == 1.0);
    CHECK(filter_amplitude(FilterSpec::gaussian(7.8), 7.8) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(filter_amplitude(FilterSpec::rectangular(2.0), 3.0) == 0.0);
    CHECK(filter_amplitude(FilterSpec::rectangular(2.0), 1.99) == 1.0);
    CHECK(filter_amplitude(FilterSpec::none(), 123.0) == 1.0);
    // symmetry G(-z) = G(z)
    for (double z : {0.3, 1.7, 5.0})
        for (const auto& f : {FilterSpec::none(), FilterSpec::gaussian(2.2),
                              FilterSpec::rectangular(1.1)})
            CHECK(filter_amplitude(f, z) == filter_amplitude(f, -z));
    CHECK_THROWS_AS(FilterSpec::gaussian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FilterSpec::rectangular(-1.0), std::invalid_argument);
}

TEST_CASE("filter parsing round-trips and rejects junk") {
    CHECK(parse_filter("none").kind == FilterKind::none);
    CHECK(parse_filter("gaussian:7.8").half_width == doctest::Approx(7.8));
    CHECK(parse_filter("rect:2").kind == FilterKind::rectangular);
    CHECK_THROWS_AS(parse_filter("boxcar:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_filter("gaussian"), std::invalid_argument);
    CHECK_THROWS_AS(parse_filter("gaussian:-3"), std::invalid_argument);
}

TEST_CASE("pair_integrals without filter hits the analytic values") {
    const auto at_zero = pair_integrals({0.0, -1.0}, FilterSpec::none());
    CHECK(at_zero.i1 == doctest::Approx(2.0 * kPi).epsilon(1e-10));
    CHECK(at_zero.i2 == doctest::Approx(2.0 * kPi).epsilon(1e-10));

    for (double m : {0.7, 3.0, 12.0, 25.0, -14.0}) {
        const auto p = pair_integrals({m, -1.0}, FilterSpec::none());
        CHECK(p.i1 == doctest::Approx(2.0 * kPi).epsilon(1e-10));
        CHECK(p.i2 - i2_no_filter(m) == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("pair_integrals: I1 = I2 at m = 0 for every filter") {
    for (const auto& f : {FilterSpec::none(), FilterSpec::gaussian(7.8),
                          FilterSpec::gaussian(80.0), FilterSpec::rectangular(2.0)}) {
        const auto p = pair_integrals({0.0, -1.0}, f);
        CHECK(p.i2 == doctest::Approx(p.i1).epsilon(1e-12));
    }
}

TEST_CASE("pair_integrals requires the d = -1 operating point") {
    CHECK_THROWS_AS(pair_integrals({1.0, 0.0}, FilterSpec::none()),
                    std::invalid_argument);
}

TEST_CASE("narrow rectangular filter at m = 4*pi: I2 = -I1 (co-polarized peak)") {
    // with the filter centered at zeta = -m/2, both sinc factors reduce to
    // -sin(xi/2) there, so the I2 integrand is negative definite
    const auto p = pair_integrals({4.0 * kPi, -1.0}, FilterSpec::rectangular(0.1));
    CHECK(p.i2 < 0.0);
    CHECK(-p.i2 / p.i1 == doctest::Approx(1.0).epsilon(1e-3));
    // the anticorrelated regime needs Z < |dm|, away from the peak
    const auto off = pair_integrals({4.0 * kPi + 1.0, -1.0}, FilterSpec::rectangular(0.1));
    CHECK(off.i2 / off.i1 == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("diagonal_rates ties to the pair integrals") {
    SUBCASE("m = 0: anticorrelated channel closes") {
        const auto r = diagonal_rates({0.0, -1.0}, FilterSpec::gaussian(7.8));
        CHECK(r.rpp == doctest::Approx(0.0).epsilon(1e-12));
        const auto p = pair_integrals({0.0, -1.0}, FilterSpec::gaussian(7.8));
        CHECK(r.rpm == doctest::Approx(2.0 * p.i1).epsilon(1e-12));
    }
    SUBCASE("m = 4*pi, rectangular Z = 2: co-polarized channel dominates") {
        const auto r = diagonal_rates({4.0 * kPi, -1.0}, FilterSpec::rectangular(2.0));
        CHECK(r.rpm < 0.1 * r.rpp);
        CHECK(r.rpp == doctest::Approx(r.rmm));
        CHECK(r.rpm == doctest::Approx(r.rmp));
    }
    SUBCASE("all four rates nonnegative and symmetric at a generic point") {
        const auto r = diagonal_rates({5.0, -1.0}, FilterSpec::gaussian(7.8));
        CHECK(r.rpp >= 0.0);
        CHECK(r.rpm >= 0.0);
        CHECK(r.rpp == r.rmm);
        CHECK(r.rpm == r.rmp);
    }
}

TEST_CASE("general_rates reductions") {
    const PairIntegrals pair = pair_integrals({5.0, -1.0}, FilterSpec::gaussian(7.8));

    SUBCASE("diagonal setting reproduces diagonal_rates") {
        const auto g = general_rates({kPi / 8.0, kPi / 8.0}, pair);
        const auto d = diagonal_rates(pair);
        CHECK(g.rpp == doctest::Approx(d.rpp).epsilon(1e-13));
        CHECK(g.rpm == doctest::Approx(d.rpm).epsilon(1e-13));
    }
    SUBCASE("rectilinear setting: no co-polarized coincidences, E = -1") {
        const auto g = general_rates({0.0, 0.0}, pair);
        CHECK(g.rpp == 0.0);
        CHECK(g.rmm == 0.0);
        CHECK(g.correlation() == -1.0);
    }
    SUBCASE("alpha = 0, beta = pi/8 at m = 0 balances the channels") {
        const auto g = general_rates({0.0, kPi / 8.0},
                                     pair_integrals({0.0, -1.0}, FilterSpec::gaussian(7.8)));
        CHECK(g.rpp == doctest::Approx(g.rpm).epsilon(1e-10));
    }
    SUBCASE("angle exchange symmetry") {
        const auto ab = general_rates({0.31, 1.13}, pair);
        const auto ba = general_rates({1.13, 0.31}, pair);
        CHECK(ab.rpp == doctest::Approx(ba.rpp).epsilon(1e-14));
        CHECK(ab.rpm == doctest::Approx(ba.rpm).epsilon(1e-14));
    }
    SUBCASE("rates are periodic in each angle with period pi/2") {
        std::mt19937 gen(19);
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        for (int i = 0; i < 20; ++i) {
            const double a = angle(gen), b = angle(gen);
            const auto base = general_rates({a, b}, pair);
            const auto shift_a = general_rates({a + kPi / 2.0, b}, pair);
            const auto shift_b = general_rates({a, b - kPi / 2.0}, pair);
            CHECK(base.rpp == doctest::Approx(shift_a.rpp).epsilon(1e-10));
            CHECK(base.rpm == doctest::Approx(shift_a.rpm).epsilon(1e-10));
            CHECK(base.rpp == doctest::Approx(shift_b.rpp).epsilon(1e-10));
            CHECK(base.rpm == doctest::Approx(shift_b.rpm).epsilon(1e-10));
        }
    }
    SUBCASE("total rate is angle independent: 4*I1") {
        std::mt19937 gen(7);
        std::uniform_real_distribution<double> angle(0.0, kPi);
        for (int i = 0; i < 50; ++i) {
            const auto g = general_rates({angle(gen), angle(gen)}, pair);
            CHECK(g.total() == doctest::Approx(4.0 * pair.i1).epsilon(1e-12));
        }
    }
}

TEST_CASE("correlation: dip universality and the singlet limit") {
    SUBCASE("E(pi/8, pi/8, m=0) = -1 for every filter width") {
        for (const auto& f :
             {FilterSpec::none(), FilterSpec::gaussian(1.0), FilterSpec::gaussian(7.8),
              FilterSpec::gaussian(80.0)}) {
            CHECK(correlation({kPi / 8.0, kPi / 8.0}, {0.0, -1.0}, f) ==
                  doctest::Approx(-1.0).epsilon(1e-12));
        }
    }
    SUBCASE("diagonal correlation equals -I2/I1") {
        const auto p = pair_integrals({5.0, -1.0}, FilterSpec::gaussian(7.8));
        CHECK(correlation({kPi / 8.0, kPi / 8.0}, {5.0, -1.0}, FilterSpec::gaussian(7.8)) ==
              doctest::Approx(-p.i2 / p.i1).epsilon(1e-12));
    }
    SUBCASE("m = 0 gives E = -cos 4(alpha - beta) for any filter") {
        std::mt19937 gen(11);
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        const auto p = pair_integrals({0.0, -1.0}, FilterSpec::gaussian(7.8));
        for (int i = 0; i < 60; ++i) {
            const double a = angle(gen), b = angle(gen);
            const auto g = general_rates({a, b}, p);
            CHECK(g.correlation() ==
                  doctest::Approx(-std::cos(4.0 * (a - b))).epsilon(1e-9));
        }
    }
    SUBCASE("zero total rate is a degenerate input") {
        CHECK_THROWS_AS((void)CoincidenceRates{}.correlation(), std::domain_error);
    }
}

TEST_CASE("single_mode_rates: singlet form") {
    const auto diag = single_mode_rates({kPi / 8.0, kPi / 8.0});
    CHECK(diag.rpp == doctest::Approx(0.0));
    CHECK(diag.rpm == doctest::Approx(0.5));

    const auto mixed = single_mode_rates({0.0, kPi / 8.0});
    CHECK(mixed.rpp == doctest::Approx(0.25).epsilon(1e-14));

    // orthogonal settings swap the channels
    for (double theta : {0.0, 0.2, 1.0}) {
        const auto r = single_mode_rates({theta, theta + kPi / 4.0});
        CHECK(r.rpm == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(r.rpp == doctest::Approx(0.5).epsilon(1e-14));
    }
    // normalised to unit total, independent of angles
    const auto r = single_mode_rates({0.37, 1.92});
    CHECK(r.total() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rate_general_delta") {
    SUBCASE("specializes to I1 - I2 at d = -1") {
        const double r = rate_general_delta({5.0, -1.0}, FilterSpec::gaussian(7.8));
        const double rpp = diagonal_rates({5.0, -1.0}, FilterSpec::gaussian(7.8)).rpp;
        CHECK(r == doctest::Approx(rpp).epsilon(1e-10));
    }
    SUBCASE("complete destructive interference at the dip center") {
        CHECK(rate_general_delta({0.0, -1.0}, FilterSpec::none()) ==
              doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("no filter: matches the band-overlap closed form for general d") {
        // the two boxcar bands overlap on [max(-1,d), min(0,d+1)];
        // R++ = pi (2 - 2 S) with S the cosine integral over the overlap.
        // d near -1 exercises the slow-phase tail bridge.
        for (double d : {0.0, -0.5, -1.0, -1.7, 0.6, -0.99, -1.002}) {
            for (double m : {0.0, 2.0, 9.0}) {
                const double lo = std::max(-1.0, d);
                const double hi = std::min(0.0, d + 1.0);
                double s = 0.0;
                if (hi > lo) {
                    if (std::fabs(m) < 1e-12) {
                        s = hi - lo;
                    } else {
                        s = (std::sin(m * (hi - 0.5 * d)) - std::sin(m * (lo - 0.5 * d))) / m;
                    }
                }
                const double expected = kPi * (2.0 - 2.0 * s);
                const double r = rate_general_delta({m, d}, FilterSpec::none());
                CHECK(r == doctest::Approx(expected).epsilon(1e-7));
            }
        }
    }
    SUBCASE("band separation beyond |d| > 1 removes the interference") {
        const double r = rate_general_delta({3.0, -2.5}, FilterSpec::none());
        CHECK(r == doctest::Approx(2.0 * kPi).epsilon(1e-7));
    }
}

TEST_CASE("asymptotic closed form near m = 4*pi*n") {
    SUBCASE("dm = 0: co-polarized limit E = +1") {
        CHECK(asymptotic_correlation(0.0, 0.5) == doctest::Approx(1.0));
        const auto p = asymptotic_pair_integrals(1e-9, 0.5);
        CHECK(-p.i2 / p.i1 == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("Z much smaller than dm restores E = -1") {
        CHECK(asymptotic_correlation(1.0, 0.05) == doctest::Approx(-1.0).epsilon(1e-2));
    }
    SUBCASE("closed form tracks quadrature inside the validity regime") {
        for (double dm : {0.25, 0.4, -0.5}) {
            for (double z : {0.1, 0.2, 0.3}) {
                const auto p =
                    pair_integrals({4.0 * kPi + dm, -1.0}, FilterSpec::rectangular(z));
                const double e_quad = -p.i2 / p.i1;
                const double e_asym = asymptotic_correlation(dm, z);
                CHECK(std::fabs(e_asym - e_quad) < 0.05 * std::max(std::fabs(e_quad), 0.5));
            }
        }
    }
}

TEST_CASE("property: |I2| <= I1 and detuning parity across filters") {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> detuning(-30.0, 30.0);
    const FilterSpec filters[] = {FilterSpec::gaussian(0.5), FilterSpec::gaussian(1.0),
                                  FilterSpec::gaussian(7.8), FilterSpec::gaussian(80.0),
                                  FilterSpec::none()};
    for (int i = 0; i < 40; ++i) {
        const double m = detuning(gen);
        const FilterSpec& f = filters[i % 5];
        const auto p = pair_integrals({m, -1.0}, f);
        CHECK(p.i1 >= 0.0);
        CHECK(std::fabs(p.i2) <= p.i1 * (1.0 + 1e-10) + 1e-14);
        const auto mirrored = pair_integrals({-m, -1.0}, f);
        CHECK(p.i1 == doctest::Approx(mirrored.i1).epsilon(1e-9));
        CHECK(p.i2 - mirrored.i2 == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_SUITE_END();
