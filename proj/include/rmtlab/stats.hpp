#pragma once
#include <span>
#include <vector>

#include "rmtlab/spectral.hpp"

namespace rmtlab {

/// Unfolded nearest-neighbour spacings s_i = N rho(mid) (lambda_{i+1} - lambda_i)
/// restricted to eigenvalues inside the window [E-b, E+b].
struct UnfoldedGaps {
    std::vector<double> gaps;
    double window_center = 0.0;
    double window_halfwidth = 0.0;
};

/// Unfold one spectrum against an analytic equilibrium law. The window must
/// sit inside the bulk: [E-b, E+b] within (A+0.1, B-0.1).
UnfoldedGaps unfold(const Eigen::VectorXd& eigenvalues, int n_total, const EquilibriumLaw& law,
                    double center, double halfwidth);
UnfoldedGaps unfold(const Spectrum& spectrum, const EquilibriumLaw& law, double center,
                    double halfwidth);

/// Pool gaps from many spectra into one sample.
std::vector<double> pool_gaps(const std::vector<UnfoldedGaps>& batches);

/// Density-normalized histogram with per-bin Poisson error bars.
struct GapHistogram {
    std::vector<double> edges;   // size bins+1
    std::vector<double> density; // size bins
    std::vector<double> stderr_; // size bins
    size_t total_count = 0;
};

/// Requires >= 500 pooled gaps. Bins cover [0, hi].
GapHistogram gap_histogram(std::span<const double> gaps, int bins, double hi = 5.0);

/// Wigner surmise for the orthogonal class: (pi s / 2) exp(-pi s^2 / 4), s >= 0.
double wigner_surmise_pdf(double s);

/// Averaged-window estimate of the two-point correlation shape: histogram of
/// rescaled pair separations alpha = N rho(E) (lambda_j - lambda_i) inside
/// [E-b, E+b], normalized so an uncorrelated (Poisson) input reads ~1.
/// Comparative use only: compare the same estimator between two ensembles.
struct PairCorrelation {
    std::vector<double> edges;
    std::vector<double> value;
    std::vector<double> stderr_;
};
PairCorrelation two_point_window_correlation(const std::vector<Eigen::VectorXd>& spectra,
                                             int n_total, const EquilibriumLaw& law, double center,
                                             double halfwidth, int bins = 40, double alpha_max = 10.0);

enum class EdgeWhich { largest, second_largest };

/// Per-sample scaled edge statistic N^{2/3}(lambda - 2). For Erdos-Renyi the
/// relevant value is the second largest (the largest is the mean outlier).
struct EdgeStatistic {
    std::vector<double> values;
    EdgeWhich which = EdgeWhich::largest;
};
EdgeStatistic edge_statistic(const std::vector<Eigen::VectorXd>& spectra, EdgeWhich which);

/// Exact two-sample Kolmogorov-Smirnov statistic (merge-based sup).
double ks_distance(std::vector<double> a, std::vector<double> b);

/// One-sample KS against a CDF callable.
double ks_distance_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

} // namespace rmtlab
