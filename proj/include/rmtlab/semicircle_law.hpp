#pragma once
#include <complex>
#include <functional>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

/// Per-(N, z) local-law errors against the predicted envelopes
/// sqrt(Im m_sc / (N eta)) + 1/(N eta) (entries) and 1/(N eta) (average).
struct LocalLawPoint {
    int n = 0;
    Complex z;
    double med_m_err = 0.0;     // median over samples of |m_N - m_sc|
    double med_m_err_se = 0.0;  // standard error of that median
    double envelope_avg = 0.0;  // 1/(N eta)
    double max_diag_err = 0.0;  // median over samples of max_j |G_jj - m_sc|
    double max_offdiag = 0.0;   // median over samples of max_{i!=j} |G_ij|
    double envelope_entry = 0.0;
    double polylog_l = 0.0;     // log log N, free metadata
};

/// Monte Carlo local-law report. Entry-level statistics are computed only
/// when `entry_stats` is set (cost: one full eigenvector set per sample).
/// Preconditions per point: |E| <= 5 and 1/N <= eta <= 10.
std::vector<LocalLawPoint> local_law_report(const EnsembleSpec& spec,
                                            const std::vector<Complex>& z_grid, int samples,
                                            uint64_t master_seed, bool entry_stats = false,
                                            int threads = 0);

struct RigidityReport {
    int n = 0;
    double q_mean = 0.0;        // mean of (1/N) sum_j (lambda_j - gamma_j)^2
    double q_se = 0.0;
    double med_center_dev = 0.0; // median |lambda_{N/2} - gamma_{N/2}|
    std::vector<double> max_scaled_dev; // per sample: max_j r_j
};

/// r_j = |lambda_j - gamma_j| N^{2/3} min(j, N-j+1)^{1/3}; edge indices carry
/// the same weight as the bulk.
RigidityReport rigidity_report(const EnsembleSpec& spec, int samples, uint64_t master_seed,
                               int threads = 0);

struct DelocalizationReport {
    int n = 0;
    std::vector<double> sup_norms; // per sample: N max_a ||u_a||_inf^2
    double med = 0.0;
    double med_se = 0.0;
};

DelocalizationReport delocalization_report(const EnsembleSpec& spec, int samples,
                                           uint64_t master_seed, int threads = 0);

struct FluctuationAveragingReport {
    int n = 0;
    Complex z;
    std::vector<double> a_values; // per sample |(1/N) sum_i Z_i|
    std::vector<double> b_values; // per sample (1/N) sum_i |Z_i|
    Complex mean_z;               // average Z_i over everything
    double mean_z_se = 0.0;
};

/// Z_i = sum_{k,l != i} h_ik G^(i)_kl h_li - (1/N) sum_{k != i} G^(i)_kk,
/// evaluated for every i from one full eigendecomposition through the Schur
/// identities h_i^T G^(i) h_i = h_ii - z - 1/G_ii and
/// Tr G^(i) = Tr G - (G^2)_ii / G_ii. The identity route is unit-tested
/// against recomputed minors. Flat profile, real symmetric only.
FluctuationAveragingReport fluctuation_averaging_report(const EnsembleSpec& spec, Complex z,
                                                        int samples, uint64_t master_seed,
                                                        int threads = 0);

/// Z_i via an honest minor eigendecomposition (test oracle; O(N^3) per i).
Complex fluctuation_z_from_minor(const MatrixSample& h, int i, Complex z);

/// Helffer-Sjostrand reconstruction residual |I(f, lambda) - f(lambda)| with
/// the standard smooth cutoff chi (=1 on [-1/2,1/2], supported in [-1,1]).
/// The integral is evaluated on a midpoint tensor grid; grid_n even keeps
/// y = 0 off the nodes.
double hs_identity_check(const std::function<double(double)>& f,
                         const std::function<double(double)>& fp,
                         const std::function<double(double)>& fpp, double support_lo,
                         double support_hi, double lambda, int grid_n = 400);

/// C^2 bump (1 - x^2)^3 on [-1, 1] with derivatives; the default test input.
double bump_c2(double x);
double bump_c2_d1(double x);
double bump_c2_d2(double x);

} // namespace rmtlab
