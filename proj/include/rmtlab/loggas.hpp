#pragma once
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

enum class PotentialKind { quadratic, quartic, custom };

/// External potential of the log-gas measure. quadratic: V = x^2/2.
/// quartic: V = x^2/2 + c x^4 with c >= 0.
struct Potential {
    PotentialKind kind = PotentialKind::quadratic;
    double quartic_c = 0.0;
    std::function<double(double)> v;       // custom only
    std::function<double(double)> vprime;  // custom only

    double operator()(double x) const;
    double deriv(double x) const;
    /// inf V'' (2 * the convexity constant recorded on the spec).
    double min_second_derivative() const;
};

/// N-point log-gas at inverse temperature beta with external potential V.
struct LogGasSpec {
    double beta = 2.0;
    Potential potential;
    int n = 0;
    void validate() const;
};

/// Hamiltonian of the measure: sum_k V(l_k)/2 - (1/N) sum_{i<j} log(l_j - l_i).
/// The sampling weight is exp(-beta N H).
double loggas_energy(const LogGasSpec& spec, const std::vector<double>& lambda);

/// One-cut equilibrium data: density/CDF plus the analytic pieces r(t) and
/// s(z) = -2 r(z) sqrt((A-z)(B-z)), square-root branch ~ z at infinity.
struct LogGasEquilibrium {
    double a = 0.0, b = 0.0;
    EquilibriumLaw law;
    std::function<double(double)> r;
    std::function<Complex(Complex)> s;
    /// Equilibrium Stieltjes transform m(z) = int rho(t)/(z-t) dt,
    /// m(z) = (V'(z) + s(z))/2 off the support.
    std::function<Complex(Complex)> m;
};

/// Closed/semi-closed one-cut equilibrium law for quadratic and quartic
/// potentials; custom potentials are rejected here.
LogGasEquilibrium equilibrium_density(const LogGasSpec& spec);

/// Residual of the equilibrium relation V'(t)/2 - PV int rho(s)/(t-s) ds at t.
double equilibrium_residual(const LogGasEquilibrium& eq, const Potential& v, double t);

/// Exact Gaussian beta-ensemble draw (V = x^2/2) via the tridiagonal model:
/// diagonal N(0, 2/(beta N)), off-diagonal chi_{beta (N-k)} / sqrt(beta N).
/// O(N^2) eigenvalue extraction; support scaled to [-2, 2].
Eigen::VectorXd gaussian_beta_tridiagonal_sample(double beta, int n, RngStream& rng);

struct McmcParams {
    int burnin_sweeps = 1000;
    int thin_sweeps = 10;
    int records = 200;
    double target_acceptance = 0.3;
    double initial_width = 0.0; // 0 = auto (about one mean spacing)
};

struct McmcResult {
    std::vector<std::vector<double>> samples; // thinned ordered configurations
    double acceptance = 0.0;
    double width = 0.0;
};

/// Metropolis sampling of the ordered log-gas, initialized at the classical
/// locations. Order-violating proposals carry -inf log-weight and are
/// rejected. The proposal width is tuned toward the target acceptance during
/// burn-in only; a final acceptance outside [0.1, 0.7] raises an error.
McmcResult loggas_mcmc_sample(const LogGasSpec& spec, const McmcParams& params, RngStream& rng);

struct LogGasRigidity {
    double median_bulk_dev = 0.0;     // median |lambda_k - gamma_k| over bulk k
    double median_scaled_dev = 0.0;   // median of N |lambda_k - gamma_k|
    double median_center = 0.0;       // median of lambda at k = N/2
};

/// Bulk rigidity statistics (k in [alpha N, (1-alpha) N], alpha = 0.1) from
/// tridiagonal samples of the Gaussian beta-ensemble.
LogGasRigidity loggas_rigidity_report(double beta, int n, int samples, uint64_t master_seed,
                                      int threads = 0);

struct LoopEquationRow {
    Complex z;
    Complex residual;        // (m_N - m)^2 + s (m_N - m) - c_N   (b_N = 0, quadratic V)
    double residual_err = 0.0; // jackknife standard error of |residual|
    Complex m_diff;          // m_N - m
    double k_n = 0.0;        // |var_mu sum_k (z - l_k)^{-1}|
};

/// Monte Carlo check of the first loop equation for quadratic V, sampling the
/// Gaussian beta-ensemble through the tridiagonal route.
std::vector<LoopEquationRow> loop_equation_residual(const LogGasSpec& spec,
                                                    const std::vector<Complex>& z_grid,
                                                    int samples, uint64_t master_seed,
                                                    int threads = 0);

/// Conditional local measure: K interior points with the outer points frozen
/// at the classical locations of their law (delta = 0 idealization).
struct ConditionalSpec {
    int n = 0;
    int window_index = 0; // L, 1-based: interior slots L+1..L+K
    int window_size = 0;  // K
    double beta = 2.0;
    Potential potential;
};

struct ConditionalResult {
    double ks = 0.0;
    double ks_err = 0.0;
    double acceptance_mu = 0.0;
    double acceptance_sigma = 0.0;
    double affine_shift = 0.0; // recorded map between the two windows
    double affine_scale = 1.0;
};

/// Gap comparison between mu_y (potential V, boundary at its classical
/// locations) and the Gaussian reference sigma_theta at the same (L, K).
/// Both interiors are sampled by MCMC; gaps are unfolded against the
/// respective equilibrium densities before the KS distance is taken.
ConditionalResult conditional_measure_experiment(const ConditionalSpec& cond,
                                                 const McmcParams& params, uint64_t master_seed);

/// K = 1 oracle: exact 1D conditional law by quadrature vs MCMC samples.
double conditional_k1_oracle_ks(const ConditionalSpec& cond, const McmcParams& params,
                                uint64_t master_seed);

} // namespace rmtlab
