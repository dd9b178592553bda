#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "biphoton/parallel.hpp"
#include "biphoton/sweep.hpp"

namespace biphoton {

namespace {

double weighted_residual(std::span<const MeasuredPoint> data,
                         const CrystalConfig& config, const FilterSpec& filter,
                         double slope, double t_opt, const quad::Settings& settings) {
    CrystalConfig work = config;
    work.slope_a = slope;
    work.t_opt = t_opt;

    std::vector<double> terms(data.size());
    parallel_for(data.size(), true, [&](std::size_t i) {
        const MeasuredPoint& p = data[i];
        double model;
        try {
            model = diagonal_rates({m_of_temperature(work, p.t_celsius), -1.0}, filter,
                                   settings)
                        .correlation();
        } catch (const quad::NonConvergence&) {
            model = 2.0;  // push non-evaluable parameters away from the optimum
        }
        const double w = p.sigma ? 1.0 / (*p.sigma * *p.sigma) : 1.0;
        const double r = model - p.e;
        terms[i] = w * r * r;
    });
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
}

template <class F>
double golden_minimum(F&& f, double lo, double hi, double x_tol) {
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > x_tol) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

FitResult fit_slope(std::span<const MeasuredPoint> data, const CrystalConfig& config,
                    const FilterSpec& filter, const FitOptions& options,
                    const quad::Settings& settings) {
    config.validate();
    if (data.size() < 5)
        throw std::invalid_argument(
            "fit needs at least 5 measured points for identifiability, got " +
            std::to_string(data.size()));
    for (const auto& p : data) {
        if (std::fabs(p.e) > 1.0 + 1e-9)
            throw std::invalid_argument("measured correlation outside [-1, 1]");
        if (p.sigma && !(*p.sigma > 0.0))
            throw std::invalid_argument("measurement sigma must be > 0");
    }
    if (!(options.a_hi > options.a_lo) || !(options.a_lo > 0.0))
        throw std::invalid_argument("slope bracket must satisfy 0 < a_lo < a_hi");
    if (!(options.coarse_step > 1.0))
        throw std::invalid_argument("coarse_step must be > 1");

    std::vector<double> t_opt_grid{config.t_opt};
    if (options.fit_t_opt) {
        t_opt_grid.clear();
        for (double t = config.t_opt - options.t_opt_span;
             t <= config.t_opt + options.t_opt_span + 1e-12; t += 0.1)
            t_opt_grid.push_back(t);
    }

    struct Candidate {
        double slope, t_opt, residual;
    };
    std::vector<Candidate> minima;
    double best = std::numeric_limits<double>::infinity();

    for (double t_opt : t_opt_grid) {
        // multiplicative scan; local minima become refinement candidates
        std::vector<double> grid, res;
        for (double a = options.a_lo; a <= options.a_hi * (1.0 + 1e-12);
             a *= options.coarse_step)
            grid.push_back(a);
        res.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            res[i] = weighted_residual(data, config, filter, grid[i], t_opt, settings);

        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            if (res[i] <= res[i - 1] && res[i] <= res[i + 1]) {
                const double refined = golden_minimum(
                    [&](double a) {
                        return weighted_residual(data, config, filter, a, t_opt,
                                                 settings);
                    },
                    grid[i - 1], grid[i + 1], 1e-6 * grid[i]);
                const double r =
                    weighted_residual(data, config, filter, refined, t_opt, settings);
                minima.push_back({refined, t_opt, r});
                best = std::min(best, r);
            }
        }
    }
    if (minima.empty())
        throw std::runtime_error(
            "fit is ambiguous: no interior minimum in the slope bracket (residual "
            "landscape flat or monotone; data may not constrain the slope)");

    std::sort(minima.begin(), minima.end(),
              [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    const Candidate& winner = minima.front();

    // Identifiability: the winner must beat the runner-up basins clearly and
    // must curve away from its optimum.
    const double scale =
        std::max(best, 1e-12 * static_cast<double>(data.size()));
    std::vector<Candidate> rivals;
    for (std::size_t i = 1; i < minima.size(); ++i) {
        const bool same_basin =
            std::fabs(minima[i].slope - winner.slope) < 1e-3 * winner.slope &&
            std::fabs(minima[i].t_opt - winner.t_opt) < 0.11;
        if (!same_basin && minima[i].residual < winner.residual + 0.05 * scale)
            rivals.push_back(minima[i]);
    }
    const double bump = weighted_residual(data, config, filter,
                                          winner.slope * 1.001, winner.t_opt, settings);
    const bool flat = (bump - winner.residual) < 1e-3 * scale;
    if (!rivals.empty() || flat) {
        std::ostringstream msg;
        msg << "fit is ambiguous: candidate minima at a = " << winner.slope;
        for (const auto& r : rivals) msg << ", " << r.slope;
        if (flat) msg << " (residual landscape is flat at the optimum)";
        throw std::runtime_error(msg.str());
    }

    FitResult out;
    out.slope_a = winner.slope;
    out.residual = winner.residual;
    if (options.fit_t_opt) {
        // refine T_opt around the winning grid cell
        const double refined_t = golden_minimum(
            [&](double t) {
                return weighted_residual(data, config, filter, winner.slope, t, settings);
            },
            winner.t_opt - 0.1, winner.t_opt + 0.1, 1e-4);
        const double refined_a = golden_minimum(
            [&](double a) {
                return weighted_residual(data, config, filter, a, refined_t, settings);
            },
            winner.slope * 0.98, winner.slope * 1.02, 1e-7 * winner.slope);
        out.t_opt = refined_t;
        out.slope_a = refined_a;
        out.residual =
            weighted_residual(data, config, filter, refined_a, refined_t, settings);
    }
    return out;
}

}  // namespace biphoton
