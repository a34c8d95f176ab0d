#include "rmtlab/dbm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rmtlab/numeric.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab {

static EnsembleSpec gaussian_twin(const EnsembleSpec& spec) {
    EnsembleSpec g = spec;
    g.entries = EntryDistribution::gaussian();
    g.er.reset();
    return g;
}

MatrixSample ou_matrix_flow(const MatrixSample& h0, double t, RngStream& rng) {
    MatrixSample u = sample_wigner(gaussian_twin(h0.spec), rng);
    return ou_matrix_flow_with(h0, t, u);
}

MatrixSample ou_matrix_flow_with(const MatrixSample& h0, double t, const MatrixSample& u) {
    if (t < 0.0) throw std::invalid_argument("ou_matrix_flow: t must be >= 0");
    if (u.spec.symmetry != h0.spec.symmetry || u.n() != h0.n())
        throw std::invalid_argument("ou_matrix_flow: symmetry/dimension mismatch between H0 and U");
    double decay = std::exp(-0.5 * t);
    double mix = std::sqrt(1.0 - std::exp(-t));
    MatrixSample out;
    out.spec = h0.spec;
    if (h0.is_complex())
        out.cplx = decay * h0.cplx + mix * u.cplx;
    else
        out.real = decay * h0.real + mix * u.real;
    return out;
}

MomentDrift moment_drift(const EntryDistribution& dist0, double t) {
    if (t < 0.0) throw std::invalid_argument("moment_drift: t must be >= 0");
    const auto& m0 = dist0.moments;
    double a = std::exp(-0.5 * t);
    MomentDrift out;
    out.moments_t[0] = a * m0[0];
    out.moments_t[1] = a * a * m0[1] + (1.0 - a * a); // = 1 for standardized input
    out.moments_t[2] = a * a * a * m0[2];
    out.moments_t[3] = std::exp(-2.0 * t) * m0[3] + 3.0 * (1.0 - std::exp(-2.0 * t));
    for (int s = 0; s < 4; ++s) out.drift[s] = std::abs(out.moments_t[s] - m0[s]);
    return out;
}

std::vector<double> dbm_sde_drift(const std::vector<double>& lambda, double beta) {
    const size_t n = lambda.size();
    std::vector<double> d(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double repulsion = 0.0;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            repulsion += 1.0 / (lambda[i] - lambda[j]);
        }
        d[i] = -0.25 * beta * lambda[i] + 0.5 * beta / n * repulsion;
    }
    return d;
}

namespace {

bool strictly_increasing(const std::vector<double>& x) {
    for (size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) return false;
    return true;
}

DbmState step_recursive(const DbmState& state, double dt, RngStream& rng, double noise_scale,
                        int depth) {
    const size_t n = state.lambda.size();
    if (depth > 20) {
        std::ostringstream msg;
        msg << "dbm_sde_step: collision persists after 20 halvings at t=" << state.t
            << "; state:";
        for (double x : state.lambda) msg << ' ' << x;
        throw std::runtime_error(msg.str());
    }
    double sigma = noise_scale * std::sqrt(dt / static_cast<double>(n));
    auto drift = dbm_sde_drift(state.lambda, state.beta);
    DbmState out = state;
    out.t = state.t + dt;
    for (size_t i = 0; i < n; ++i)
        out.lambda[i] = state.lambda[i] + drift[i] * dt + (sigma > 0.0 ? sigma * rng.gaussian() : 0.0);
    if (!strictly_increasing(out.lambda)) {
        DbmState half = step_recursive(state, 0.5 * dt, rng, noise_scale, depth + 1);
        return step_recursive(half, 0.5 * dt, rng, noise_scale, depth + 1);
    }
    return out;
}

} // namespace

DbmState dbm_sde_step(const DbmState& state, double dt, RngStream& rng, double noise_scale) {
    if (!(dt > 0.0)) throw std::invalid_argument("dbm_sde_step: dt must be > 0");
    if (state.beta < 1.0) throw std::invalid_argument("dbm_sde_step: beta must be >= 1");
    if (!strictly_increasing(state.lambda) && state.lambda.size() > 1)
        throw std::invalid_argument("dbm_sde_step: state positions must be strictly increasing");
    return step_recursive(state, dt, rng, noise_scale, 0);
}

DbmState dbm_sde_run(DbmState state, double t_end, double dt, RngStream& rng, double noise_scale) {
    while (state.t < t_end - 1e-12) {
        double step = std::min(dt, t_end - state.t);
        state = dbm_sde_step(state, step, rng, noise_scale);
    }
    return state;
}

namespace {

double jackknife_ks_err(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b) {
    const size_t s = a.size();
    if (s < 2) return 0.0;
    std::vector<double> theta;
    theta.reserve(s);
    for (size_t skip = 0; skip < s; ++skip) {
        std::vector<double> pa, pb;
        for (size_t k = 0; k < s; ++k) {
            if (k == skip) continue;
            pa.insert(pa.end(), a[k].begin(), a[k].end());
            pb.insert(pb.end(), b[k].begin(), b[k].end());
        }
        theta.push_back(ks_distance(std::move(pa), std::move(pb)));
    }
    double m = mean(theta);
    double ss = 0.0;
    for (double v : theta) ss += (v - m) * (v - m);
    return std::sqrt(ss * (static_cast<double>(s) - 1.0) / static_cast<double>(s));
}

} // namespace

std::vector<RelaxationRow> relaxation_experiment(const EnsembleSpec& spec0,
                                                 const std::vector<double>& t_grid, int samples,
                                                 uint64_t master_seed, int threads) {
    if (samples < 2) throw std::invalid_argument("relaxation_experiment: need >= 2 samples");
    const auto law = EquilibriumLaw::semicircle();
    const double window_b = 0.5;

    // Gaussian reference pool, one batch per sample index.
    std::vector<std::vector<double>> ref_evals(samples), ref_gaps(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "dbm-ref");
        auto h = sample_wigner(gaussian_twin(spec0), rng);
        auto spec = eigen_decompose(h, false);
        ref_evals[s].assign(spec.eigenvalues.begin(), spec.eigenvalues.end());
        ref_gaps[s] = unfold(spec, law, 0.0, window_b).gaps;
    });

    std::vector<RelaxationRow> rows(t_grid.size());
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
        double t = t_grid[ti];
        std::vector<std::vector<double>> evals(samples), gaps(samples);
        parallel_for(samples, threads, [&](int s) {
            RngStream rng0 = seed_stream(master_seed, static_cast<uint64_t>(s), "dbm-h0");
            auto h0 = sample_wigner(spec0, rng0);
            RngStream rngu = seed_stream(master_seed,
                                         static_cast<uint64_t>(s) + (static_cast<uint64_t>(ti) << 32),
                                         "dbm-flow");
            auto ht = ou_matrix_flow(h0, t, rngu);
            auto spec = eigen_decompose(ht, false);
            evals[s].assign(spec.eigenvalues.begin(), spec.eigenvalues.end());
            gaps[s] = unfold(spec, law, 0.0, window_b).gaps;
        });

        std::vector<double> pool_e, pool_g, pool_re, pool_rg;
        for (int s = 0; s < samples; ++s) {
            pool_e.insert(pool_e.end(), evals[s].begin(), evals[s].end());
            pool_g.insert(pool_g.end(), gaps[s].begin(), gaps[s].end());
            pool_re.insert(pool_re.end(), ref_evals[s].begin(), ref_evals[s].end());
            pool_rg.insert(pool_rg.end(), ref_gaps[s].begin(), ref_gaps[s].end());
        }
        RelaxationRow row;
        row.t = t;
        row.ks_global = ks_distance(pool_e, pool_re);
        row.ks_local = ks_distance(pool_g, pool_rg);
        row.ks_global_err = jackknife_ks_err(evals, ref_evals);
        row.ks_local_err = jackknife_ks_err(gaps, ref_gaps);
        rows[ti] = row;
    }
    return rows;
}

} // namespace rmtlab
