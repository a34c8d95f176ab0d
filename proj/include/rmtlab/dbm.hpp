#pragma once
#include <array>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

/// Ornstein-Uhlenbeck interpolation at matrix level, exact in law:
/// H_t = e^{-t/2} H_0 + sqrt(1 - e^{-t}) U with U an independent Gaussian
/// ensemble of the same symmetry and variance profile scale as H_0.
MatrixSample ou_matrix_flow(const MatrixSample& h0, double t, RngStream& rng);

/// Same flow with a caller-supplied Gaussian matrix; symmetry must match.
MatrixSample ou_matrix_flow_with(const MatrixSample& h0, double t, const MatrixSample& u);

/// Closed-form OU evolution of the first four standardized entry moments:
/// m1(t) = a m1, m2(t) = 1, m3(t) = a^3 m3, m4(t) = e^{-2t} m4 + 3(1 - e^{-2t}),
/// with a = e^{-t/2}. `drift[s-1]` is |m_s(t) - m_s(0)|.
struct MomentDrift {
    std::array<double, 4> moments_t;
    std::array<double, 4> drift;
};
MomentDrift moment_drift(const EntryDistribution& dist0, double t);

/// Eigenvalue-level DBM state; positions strictly increasing.
struct DbmState {
    double t = 0.0;
    std::vector<double> lambda;
    double beta = 1.0;
    enum class Origin { matrix_flow, sde } origin = Origin::sde;
};

/// Drift vector of the eigenvalue SDE read off the generator:
/// -(beta/4) lambda_i + (beta/2N) sum_{j != i} 1/(lambda_i - lambda_j).
std::vector<double> dbm_sde_drift(const std::vector<double>& lambda, double beta);

/// One Euler-Maruyama step of the eigenvalue SDE:
/// d lambda_i = drift_i dt + sqrt(dt/N) dB_i. A proposal that breaks the
/// strict ordering is discarded and the step is retried as two recursive
/// half-steps; after 20 halvings the step aborts with a state dump in the
/// exception message. noise_scale = 0 runs the deterministic flow.
DbmState dbm_sde_step(const DbmState& state, double dt, RngStream& rng, double noise_scale = 1.0);

/// Run the SDE from `state` to time t_end with nominal step dt.
DbmState dbm_sde_run(DbmState state, double t_end, double dt, RngStream& rng,
                     double noise_scale = 1.0);

struct RelaxationRow {
    double t = 0.0;
    double ks_global = 0.0, ks_global_err = 0.0;
    double ks_local = 0.0, ks_local_err = 0.0;
};

/// Two-time-scale relaxation experiment: for each t, the Kolmogorov-Smirnov
/// distance between (a) pooled eigenvalues of H_t and of pure Gaussian
/// samples, and (b) pooled unfolded bulk gap samples of the two ensembles.
/// Error bars are delete-one jackknife over samples.
std::vector<RelaxationRow> relaxation_experiment(const EnsembleSpec& spec0,
                                                 const std::vector<double>& t_grid, int samples,
                                                 uint64_t master_seed, int threads = 0);

} // namespace rmtlab
