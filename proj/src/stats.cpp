#include "rmtlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmtlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

UnfoldedGaps unfold(const Eigen::VectorXd& eigenvalues, int n_total, const EquilibriumLaw& law,
                    double center, double halfwidth) {
    const double lo = center - halfwidth, hi = center + halfwidth;
    if (!(halfwidth > 0.0)) throw std::invalid_argument("unfold: empty window");
    // Keep a bulk margin so rho(mid) stays bounded away from the edge.
    const double margin = 0.1;
    if (lo < law.support_lower() + margin || hi > law.support_upper() - margin)
        throw std::invalid_argument("unfold: window must sit inside the bulk of the support");

    UnfoldedGaps out;
    out.window_center = center;
    out.window_halfwidth = halfwidth;
    for (Eigen::Index j = 0; j + 1 < eigenvalues.size(); ++j) {
        double a = eigenvalues(j), b = eigenvalues(j + 1);
        if (a < lo || b > hi) continue;
        double mid = 0.5 * (a + b);
        out.gaps.push_back(n_total * law.density(mid) * (b - a));
    }
    return out;
}

UnfoldedGaps unfold(const Spectrum& spectrum, const EquilibriumLaw& law, double center,
                    double halfwidth) {
    return unfold(spectrum.eigenvalues, spectrum.n(), law, center, halfwidth);
}

std::vector<double> pool_gaps(const std::vector<UnfoldedGaps>& batches) {
    std::vector<double> all;
    for (const auto& b : batches) all.insert(all.end(), b.gaps.begin(), b.gaps.end());
    return all;
}

GapHistogram gap_histogram(std::span<const double> gaps, int bins, double hi) {
    if (gaps.size() < 500) throw std::invalid_argument("gap_histogram: need >= 500 pooled gaps");
    if (bins <= 0 || !(hi > 0.0)) throw std::invalid_argument("gap_histogram: bad binning");
    GapHistogram h;
    h.edges.resize(bins + 1);
    double w = hi / bins;
    for (int b = 0; b <= bins; ++b) h.edges[b] = b * w;
    std::vector<size_t> count(bins, 0);
    for (double s : gaps) {
        if (s < 0.0) throw std::invalid_argument("gap_histogram: negative gap");
        int b = static_cast<int>(s / w);
        if (b >= 0 && b < bins) ++count[b];
    }
    h.total_count = gaps.size();
    h.density.resize(bins);
    h.stderr_.resize(bins);
    double norm = static_cast<double>(gaps.size()) * w;
    for (int b = 0; b < bins; ++b) {
        h.density[b] = count[b] / norm;
        h.stderr_[b] = std::sqrt(static_cast<double>(count[b])) / norm;
    }
    return h;
}

double wigner_surmise_pdf(double s) {
    if (s < 0.0) throw std::invalid_argument("wigner_surmise_pdf: s must be >= 0");
    return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
}

PairCorrelation two_point_window_correlation(const std::vector<Eigen::VectorXd>& spectra,
                                             int n_total, const EquilibriumLaw& law, double center,
                                             double halfwidth, int bins, double alpha_max) {
    if (spectra.size() < 50)
        throw std::invalid_argument("two_point: need >= 50 pooled samples");
    double rho = law.density(center);
    if (!(2.0 * halfwidth * n_total * rho >= 10.0))
        throw std::invalid_argument("two_point: window too narrow for the density");

    PairCorrelation out;
    out.edges.resize(bins + 1);
    double w = alpha_max / bins;
    for (int b = 0; b <= bins; ++b) out.edges[b] = b * w;

    std::vector<double> counts(bins, 0.0);
    double lo = center - halfwidth, hi = center + halfwidth;
    double mean_in_window = 0.0;
    for (const auto& ev : spectra) {
        std::vector<double> in;
        for (Eigen::Index j = 0; j < ev.size(); ++j)
            if (ev(j) >= lo && ev(j) <= hi) in.push_back(ev(j));
        mean_in_window += static_cast<double>(in.size());
        for (size_t a = 0; a < in.size(); ++a)
            for (size_t b = a + 1; b < in.size(); ++b) {
                double alpha = n_total * rho * (in[b] - in[a]);
                int bin = static_cast<int>(alpha / w);
                if (bin >= 0 && bin < bins) counts[bin] += 1.0;
            }
    }
    mean_in_window /= static_cast<double>(spectra.size());

    // Normalize so iid points at the same density read ~1 per bin.
    double norm = static_cast<double>(spectra.size()) * mean_in_window * w;
    out.value.resize(bins);
    out.stderr_.resize(bins);
    for (int b = 0; b < bins; ++b) {
        out.value[b] = counts[b] / norm;
        out.stderr_[b] = std::sqrt(std::max(counts[b], 1.0)) / norm;
    }
    return out;
}

EdgeStatistic edge_statistic(const std::vector<Eigen::VectorXd>& spectra, EdgeWhich which) {
    EdgeStatistic out;
    out.which = which;
    out.values.reserve(spectra.size());
    for (const auto& ev : spectra) {
        if (ev.size() < 2) throw std::invalid_argument("edge_statistic: need N >= 2");
        double n = static_cast<double>(ev.size());
        double lambda =
            which == EdgeWhich::largest ? ev(ev.size() - 1) : ev(ev.size() - 2);
        out.values.push_back(std::cbrt(n) * std::cbrt(n) * (lambda - 2.0));
    }
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return std::max(d, std::abs(1.0 - (i < a.size() ? i / na : j / nb)));
}

double ks_distance_cdf(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_distance_cdf: empty sample");
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t k = 0; k < sample.size(); ++k) {
        double f = cdf(sample[k]);
        d = std::max(d, std::abs(f - k / n));
        d = std::max(d, std::abs((k + 1) / n - f));
    }
    return d;
}

} // namespace rmtlab
