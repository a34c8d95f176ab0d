#pragma once
#include <array>
#include <complex>
#include <vector>

#include "rmtlab/dbm.hpp"
#include "rmtlab/ensembles.hpp"

namespace rmtlab {

struct MomentGap {
    std::array<double, 4> gaps{}; // |E v^s - E w^s| for s = 1..4
    int matching_order = 0;       // largest s with gaps[1..s] all zero (capped at 4)
};

/// Exact moment differences between two standardized entry laws.
MomentGap moment_gap(const EntryDistribution& v, const EntryDistribution& w);

/// Whether the moment-matching hypothesis |E v^s - E w^s| <= N^{-delta-2+s/2}
/// holds between dist0 and its OU-evolved law at time t, for the given (N, delta).
struct OuMatching {
    std::array<double, 4> gaps{};
    bool holds = false;
    double max_delta = 0.0; // largest delta for which the hypothesis holds
};
OuMatching ou_matching_check(const EntryDistribution& dist0, double t, int n, double delta);

/// Lindeberg swap experiment: entries are replaced v -> w one index pair at a
/// time along a fixed schedule while the resolvent is maintained by rank-2
/// (rank-1 on the diagonal) updates. m = (1/N) Tr G is checkpointed every N
/// swaps and the per-sample telescoping identity is recorded exactly.
struct SwapSummary {
    int n = 0;
    Complex z;
    Complex endpoint_diff;        // mean over samples of m(H^(w)) - m(H^(v))
    double endpoint_diff_se = 0.0;
    double telescoping_residual = 0.0; // max over samples |sum increments - endpoint diff|
    double update_vs_fresh = 0.0;      // max |m from updates - m recomputed| at the final state
    std::vector<Complex> checkpoint_mean; // cumulative delta at each checkpoint
    long degenerate_updates = 0;
};
SwapSummary swap_experiment(const EntryDistribution& dist_v, const EntryDistribution& dist_w,
                            int n, Complex z, int samples, uint64_t master_seed, int threads = 0);

/// Direct endpoint comparison: coupled samples of the pure-v and pure-w
/// ensembles (entries share uniforms through the quantile transform, the
/// Gaussian diagonal is shared outright), difference of m = (1/N) Tr G.
struct TraceDifference {
    Complex mean_diff;
    double se = 0.0; // standard error of |mean|, from component-wise errors
    int samples = 0;
};
TraceDifference trace_difference_direct(const EntryDistribution& dist_v,
                                        const EntryDistribution& dist_w, int n, Complex z,
                                        int samples, uint64_t master_seed, int threads = 0);

} // namespace rmtlab
