#include "rmtlab/compare.hpp"

#include <cmath>
#include <stdexcept>

#include "rmtlab/numeric.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

MomentGap moment_gap(const EntryDistribution& v, const EntryDistribution& w) {
    MomentGap out;
    out.matching_order = 4;
    for (int s = 0; s < 4; ++s) {
        out.gaps[s] = std::abs(v.moments[s] - w.moments[s]);
        if (out.gaps[s] > 1e-12 && out.matching_order == 4) out.matching_order = s;
    }
    return out;
}

OuMatching ou_matching_check(const EntryDistribution& dist0, double t, int n, double delta) {
    auto drift = moment_drift(dist0, t);
    OuMatching out;
    out.gaps = drift.drift;
    out.holds = true;
    out.max_delta = HUGE_VAL;
    for (int s = 1; s <= 4; ++s) {
        double gap = out.gaps[s - 1];
        double bound = std::pow(n, -delta - 2.0 + 0.5 * s);
        if (gap > bound) out.holds = false;
        if (gap > 0.0) {
            // largest admissible delta for this s: gap = N^{-d-2+s/2}
            double d = -std::log(gap) / std::log(static_cast<double>(n)) - 2.0 + 0.5 * s;
            out.max_delta = std::min(out.max_delta, d);
        }
    }
    if (out.max_delta == HUGE_VAL) out.max_delta = 10.0; // exact match at all four moments
    return out;
}

namespace {

struct SwapSample {
    Complex endpoint_diff;
    double telescoping_residual;
    double update_vs_fresh;
    std::vector<Complex> checkpoints;
    long degenerate;
};

SwapSample run_swap_sample(const EntryDistribution& dist_v, const EntryDistribution& dist_w,
                           int n, Complex z, RngStream& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    // Draw both full entry sets up front; the schedule is row-major over the
    // upper triangle including the diagonal (shared Gaussian law there).
    Eigen::MatrixXd ve(n, n), we(n, n);
    for (int i = 0; i < n; ++i) {
        double d = scale * rng.gaussian();
        ve(i, i) = d;
        we(i, i) = scale * rng.gaussian();
        for (int j = i + 1; j < n; ++j) {
            ve(i, j) = scale * dist_v.sample(rng);
            we(i, j) = scale * dist_w.sample(rng);
        }
    }

    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            h(i, j) = ve(i, j);
            h(j, i) = ve(i, j);
        }

    auto fresh_resolvent = [&](Eigen::MatrixXcd& g) {
        Eigen::MatrixXcd a = h.cast<Complex>();
        for (int i = 0; i < n; ++i) a(i, i) -= z;
        g = a.partialPivLu().inverse();
    };

    Eigen::MatrixXcd g;
    fresh_resolvent(g);
    auto trace_m = [&]() {
        Complex t(0, 0);
        for (int i = 0; i < n; ++i) t += g(i, i);
        return t / static_cast<double>(n);
    };

    SwapSample out;
    out.degenerate = 0;
    Complex m_start = trace_m();
    Complex m_prev = m_start;
    Complex increments(0, 0);

    long swap_count = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double delta = we(i, j) - ve(i, j);
            h(i, j) += delta;
            if (j != i) h(j, i) += delta;
            if (delta != 0.0) {
                if (i == j) {
                    // rank-1: G' = G - (d / (1 + d G_ii)) g_i g_i^T
                    Complex pivot = 1.0 + delta * g(i, i);
                    if (std::abs(pivot) < 1e-12) {
                        ++out.degenerate;
                        fresh_resolvent(g);
                    } else {
                        Eigen::VectorXcd gi = g.col(i);
                        g.noalias() -= (delta / pivot) * (gi * gi.transpose());
                    }
                } else {
                    // rank-2 Woodbury, Delta H = d (e_i e_j^T + e_j e_i^T):
                    // G' = G - [gi gj] W [gi gj]^T with
                    // W = [[-d^2 c, d(1+db)], [d(1+db), -d^2 a]] / det,
                    // det = (1+db)^2 - d^2 a c, (a, b, c) = (G_ii, G_ij, G_jj).
                    Eigen::VectorXcd gi = g.col(i), gj = g.col(j);
                    Complex a = g(i, i), b = g(i, j), c = g(j, j);
                    Complex det = (1.0 + delta * b) * (1.0 + delta * b) - delta * delta * a * c;
                    if (std::abs(det) < 1e-12) {
                        ++out.degenerate;
                        fresh_resolvent(g);
                    } else {
                        Complex w11 = -delta * delta * c / det;
                        Complex w12 = delta * (1.0 + delta * b) / det;
                        Complex w22 = -delta * delta * a / det;
                        g.noalias() -= gi * (w11 * gi.transpose() + w12 * gj.transpose());
                        g.noalias() -= gj * (w12 * gi.transpose() + w22 * gj.transpose());
                    }
                }
            }
            ++swap_count;
            if (swap_count % n == 0) {
                Complex m_now = trace_m();
                increments += m_now - m_prev;
                m_prev = m_now;
                out.checkpoints.push_back(m_now - m_start);
            }
        }
    }
    Complex m_end = trace_m();
    increments += m_end - m_prev;

    out.endpoint_diff = m_end - m_start;
    out.telescoping_residual = std::abs(increments - (m_end - m_start));

    Eigen::MatrixXcd g_fresh;
    fresh_resolvent(g_fresh);
    Complex m_fresh(0, 0);
    for (int i = 0; i < n; ++i) m_fresh += g_fresh(i, i);
    m_fresh /= static_cast<double>(n);
    out.update_vs_fresh = std::abs(m_fresh - m_end);
    return out;
}

} // namespace

SwapSummary swap_experiment(const EntryDistribution& dist_v, const EntryDistribution& dist_w,
                            int n, Complex z, int samples, uint64_t master_seed, int threads) {
    if (n > 400) throw std::invalid_argument("swap_experiment: N <= 400 (O(N^4) update cost)");
    if (!(z.imag() >= std::pow(n, -1.2)))
        throw std::invalid_argument("swap_experiment: Im z must be >= N^{-1.2}");

    std::vector<SwapSample> results(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "swap");
        results[s] = run_swap_sample(dist_v, dist_w, n, z, rng);
    });

    SwapSummary out;
    out.n = n;
    out.z = z;
    size_t ncp = results[0].checkpoints.size();
    out.checkpoint_mean.assign(ncp, Complex(0, 0));
    Complex sum(0, 0);
    std::vector<double> re(samples), im(samples);
    for (int s = 0; s < samples; ++s) {
        sum += results[s].endpoint_diff;
        re[s] = results[s].endpoint_diff.real();
        im[s] = results[s].endpoint_diff.imag();
        out.telescoping_residual = std::max(out.telescoping_residual, results[s].telescoping_residual);
        out.update_vs_fresh = std::max(out.update_vs_fresh, results[s].update_vs_fresh);
        out.degenerate_updates += results[s].degenerate;
        for (size_t c = 0; c < ncp; ++c) out.checkpoint_mean[c] += results[s].checkpoints[c];
    }
    for (auto& c : out.checkpoint_mean) c /= static_cast<double>(samples);
    out.endpoint_diff = sum / static_cast<double>(samples);
    double se_re = stderr_mean(re), se_im = stderr_mean(im);
    out.endpoint_diff_se = std::sqrt(se_re * se_re + se_im * se_im);
    return out;
}

TraceDifference trace_difference_direct(const EntryDistribution& dist_v,
                                        const EntryDistribution& dist_w, int n, Complex z,
                                        int samples, uint64_t master_seed, int threads) {
    std::vector<double> dre(samples), dim(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "trace-diff");
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd hv(n, n), hw(n, n);
        for (int i = 0; i < n; ++i) {
            double d = scale * rng.gaussian(); // diagonal shared between the pair
            hv(i, i) = d;
            hw(i, i) = d;
            for (int j = i + 1; j < n; ++j) {
                double u = rng.uniform();
                double a = scale * dist_v.quantile(u);
                double b = scale * dist_w.quantile(u);
                hv(i, j) = a;
                hv(j, i) = a;
                hw(i, j) = b;
                hw(j, i) = b;
            }
        }
        Complex mv = stieltjes(eigen_decompose(hv, false).eigenvalues, z);
        Complex mw = stieltjes(eigen_decompose(hw, false).eigenvalues, z);
        dre[s] = (mv - mw).real();
        dim[s] = (mv - mw).imag();
    });
    TraceDifference out;
    out.samples = samples;
    out.mean_diff = Complex(mean(dre), mean(dim));
    double se_re = stderr_mean(dre), se_im = stderr_mean(dim);
    out.se = std::sqrt(se_re * se_re + se_im * se_im);
    return out;
}

} // namespace rmtlab
