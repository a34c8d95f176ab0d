#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace rmtlab {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Standard error of the mean.
inline double stderr_mean(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / (static_cast<double>(x.size()) - 1.0) / static_cast<double>(x.size()));
}

inline double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median: empty input");
    size_t n = x.size();
    auto mid = x.begin() + n / 2;
    std::nth_element(x.begin(), mid, x.end());
    if (n % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(x.begin(), mid);
    return 0.5 * (lo + hi);
}

inline double quantile(std::vector<double> x, double p) {
    if (x.empty()) throw std::invalid_argument("quantile: empty input");
    std::sort(x.begin(), x.end());
    double pos = p * (static_cast<double>(x.size()) - 1.0);
    size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= x.size()) return x.back();
    double f = pos - static_cast<double>(lo);
    return x[lo] * (1.0 - f) + x[lo + 1] * f;
}

/// Nonparametric standard error of the median: 1.2533 * IQR-based sigma / sqrt(n).
inline double stderr_median(const std::vector<double>& x) {
    if (x.size() < 4) return 0.0;
    double iqr = quantile(x, 0.75) - quantile(x, 0.25);
    double sigma = iqr / 1.349;
    return 1.2533 * sigma / std::sqrt(static_cast<double>(x.size()));
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares of y against x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matched points");
    double n = static_cast<double>(x.size());
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ss = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            ss += r * r;
        }
        fit.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
    }
    return fit;
}

namespace detail {
// 16-point Gauss-Legendre nodes/weights on [-1,1] (positive half; symmetric).
inline constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
} // namespace detail

/// Fixed-order Gauss-Legendre panel rule; integrates f over [a,b] with
/// `panels` panels of 16 nodes each.
template <typename F>
double integrate(F&& f, double a, double b, int panels = 64) {
    double total = 0.0;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * h;
        double half = 0.5 * h;
        double s = 0.0;
        for (int k = 0; k < 8; ++k) {
            double dx = half * detail::kGlNode[k];
            s += detail::kGlWeight[k] * (f(mid + dx) + f(mid - dx));
        }
        total += s * half;
    }
    return total;
}

/// Empirical CDF of sorted data evaluated at t (right-continuous).
inline double ecdf(const std::vector<double>& sorted, double t) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

} // namespace rmtlab
