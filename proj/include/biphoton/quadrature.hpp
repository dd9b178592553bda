#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace biphoton::quad {

/// Tolerances and limits for adaptive integration.
struct Settings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_subdivisions = 40000;
    /// Half-width used by callers that truncate an infinite domain.
    double truncation_bound = 4096.0;
};

/// Thrown when the error estimate cannot be pushed below tolerance within
/// max_subdivisions. Carries the best value and the achieved error so the
/// caller can decide whether the partial result is usable.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(double value, double achieved, double requested)
        : std::runtime_error("quadrature did not converge: error " +
                             std::to_string(achieved) + " > requested " +
                             std::to_string(requested)),
          value_(value), achieved_(achieved), requested_(requested) {}

    double value() const { return value_; }
    double achieved() const { return achieved_; }
    double requested() const { return requested_; }

private:
    double value_, achieved_, requested_;
};

template <class T>
struct Integral {
    T value{};
    double error = 0.0;
    int panels = 0;
};

using Interval = std::pair<double, double>;

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights (positive half, QUADPACK values).
inline constexpr double kNodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWeights[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
// Gauss weights belong to nodes 1, 3, 5, 7 of the table above.
inline constexpr double kGaussWeights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

inline double norm_of(double v) { return std::fabs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a = 0.0, b = 0.0;
    T value{};
    double error = 0.0;
};

template <class T, class F>
Panel<T> evaluate_panel(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    T f_mid = f(mid);
    T kronrod = kWeights[7] * f_mid;
    T gauss = kGaussWeights[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        T pair_sum = f(mid + dx) + f(mid - dx);
        kronrod += kWeights[i] * pair_sum;
        if (i % 2 == 1)
            gauss += kGaussWeights[i / 2] * pair_sum;
    }
    kronrod *= half;
    gauss *= half;

    Panel<T> p;
    p.a = a;
    p.b = b;
    p.value = kronrod;
    p.error = norm_of(kronrod - gauss);
    if (!std::isfinite(p.error) || !std::isfinite(norm_of(kronrod)))
        throw std::runtime_error("non-finite integrand in quadrature panel");
    return p;
}

// Worst-panel-first refinement over an explicit list of intervals.
// The final sum runs over panels sorted by left endpoint, so the result is
// independent of the heap pop order and bit-reproducible.
template <class T, class F>
Integral<T> adaptive(F&& f, const std::vector<Interval>& domain,
                     const Settings& s) {
    auto worse = [](const Panel<T>& x, const Panel<T>& y) {
        if (x.error != y.error) return x.error < y.error;
        return x.a < y.a;
    };
    std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(worse)> heap(
        worse);

    T total{};
    double total_err = 0.0;
    for (const auto& [a, b] : domain) {
        if (!(b > a)) continue;
        Panel<T> p = evaluate_panel<T>(f, a, b);
        total += p.value;
        total_err += p.error;
        heap.push(std::move(p));
    }

    int splits = 0;
    while (total_err > std::max(s.abs_tol, s.rel_tol * norm_of(total))) {
        if (splits >= s.max_subdivisions || heap.empty())
            throw NonConvergence(norm_of(total), total_err,
                                 std::max(s.abs_tol, s.rel_tol * norm_of(total)));
        Panel<T> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw NonConvergence(norm_of(total), total_err,
                                 std::max(s.abs_tol, s.rel_tol * norm_of(total)));
        Panel<T> left = evaluate_panel<T>(f, worst.a, mid);
        Panel<T> right = evaluate_panel<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++splits;
    }

    std::vector<Panel<T>> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });

    Integral<T> out;
    out.panels = static_cast<int>(panels.size());
    double err = 0.0;
    T val{};
    for (const auto& p : panels) {
        val += p.value;
        err += p.error;
    }
    out.value = val;
    out.error = err;
    return out;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a real integrand over [a, b].
template <class F>
Integral<double> integrate(F&& f, double a, double b, const Settings& s = {}) {
    std::vector<Interval> domain{{a, b}};
    return detail::adaptive<double>(std::forward<F>(f), domain, s);
}

/// Same, over a union of disjoint intervals refined against a shared budget.
template <class F>
Integral<double> integrate(F&& f, const std::vector<Interval>& domain,
                           const Settings& s = {}) {
    return detail::adaptive<double>(std::forward<F>(f), domain, s);
}

/// Complex-valued integrand; the error estimate is the complex modulus.
template <class F>
Integral<std::complex<double>> integrate_complex(F&& f, double a, double b,
                                                 const Settings& s = {}) {
    std::vector<Interval> domain{{a, b}};
    return detail::adaptive<std::complex<double>>(std::forward<F>(f), domain, s);
}

template <class F>
Integral<std::complex<double>> integrate_complex(F&& f,
                                                 const std::vector<Interval>& domain,
                                                 const Settings& s = {}) {
    return detail::adaptive<std::complex<double>>(std::forward<F>(f), domain, s);
}

}  // namespace biphoton::quad
