#include "rmtlab/loggas.hpp"

#include <cmath>
#include <stdexcept>

#include "rmtlab/numeric.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

// sqrt(z^2 - b^2) on the branch ~ z at infinity (analytic off [-b, b]).
Complex sqrt_branch(Complex z, double b) {
    return z * std::sqrt(1.0 - (b * b) / (z * z));
}
} // namespace

double Potential::operator()(double x) const {
    switch (kind) {
        case PotentialKind::quadratic: return 0.5 * x * x;
        case PotentialKind::quartic: return 0.5 * x * x + quartic_c * x * x * x * x;
        case PotentialKind::custom: return v(x);
    }
    throw std::logic_error("Potential: unknown kind");
}

double Potential::deriv(double x) const {
    switch (kind) {
        case PotentialKind::quadratic: return x;
        case PotentialKind::quartic: return x + 4.0 * quartic_c * x * x * x;
        case PotentialKind::custom: return vprime(x);
    }
    throw std::logic_error("Potential: unknown kind");
}

double Potential::min_second_derivative() const {
    switch (kind) {
        case PotentialKind::quadratic: return 1.0;
        case PotentialKind::quartic: return 1.0; // V'' = 1 + 12 c x^2 >= 1
        case PotentialKind::custom: return 0.0;  // unknown; caller must vouch
    }
    throw std::logic_error("Potential: unknown kind");
}

void LogGasSpec::validate() const {
    if (n <= 0) throw std::invalid_argument("LogGasSpec: N must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("LogGasSpec: beta must be > 0");
    if (potential.kind == PotentialKind::quartic && potential.quartic_c < 0.0)
        throw std::invalid_argument("LogGasSpec: quartic coefficient must be >= 0");
}

double loggas_energy(const LogGasSpec& spec, const std::vector<double>& lambda) {
    double e = 0.0;
    const size_t n = lambda.size();
    for (double x : lambda) e += 0.5 * spec.potential(x);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double d = lambda[j] - lambda[i];
            if (!(d > 0.0)) return HUGE_VAL; // off the ordered simplex
            e -= std::log(d) / spec.n;
        }
    return e;
}

LogGasEquilibrium equilibrium_density(const LogGasSpec& spec) {
    spec.validate();
    const auto kind = spec.potential.kind;
    if (kind == PotentialKind::custom)
        throw std::invalid_argument("equilibrium_density: custom potentials not supported here");

    const double c = (kind == PotentialKind::quartic) ? spec.potential.quartic_c : 0.0;
    // One-cut endpoints for V = x^2/2 + c x^4: 3 c B^4 + B^2 - 4 = 0.
    const double b2 = (c > 0.0) ? (std::sqrt(1.0 + 48.0 * c) - 1.0) / (6.0 * c) : 4.0;
    const double b = std::sqrt(b2);
    const double r0 = 0.5 * (1.0 + 2.0 * c * b2);

    auto r = [c, r0](double t) { return r0 + 2.0 * c * t * t; };
    auto density = [b, b2, c, r0](double x) {
        double t = b2 - x * x;
        if (t <= 0.0) return 0.0;
        return (r0 + 2.0 * c * x * x) * std::sqrt(t) / kPi;
    };
    auto s_fn = [b, c, r0](Complex z) {
        return -2.0 * (r0 + 2.0 * c * z * z) * sqrt_branch(z, b);
    };
    Potential pot = spec.potential;
    auto m_fn = [s_fn, pot](Complex z) {
        // m = (V' + s)/2 off the support; V' continued to complex z.
        Complex vp = z + 4.0 * ((pot.kind == PotentialKind::quartic) ? pot.quartic_c : 0.0) * z * z * z;
        return 0.5 * (vp + s_fn(z));
    };

    LogGasEquilibrium eq{
        -b, b,
        (kind == PotentialKind::quadratic)
            ? EquilibriumLaw::semicircle()
            : EquilibriumLaw(-b, b, density),
        r, s_fn, m_fn};
    return eq;
}

double equilibrium_residual(const LogGasEquilibrium& eq, const Potential& v, double t) {
    if (!(t > eq.a && t < eq.b)) throw std::invalid_argument("equilibrium_residual: t off support");
    // PV int rho(s)/(t-s) ds = int [rho(s)-rho(t)]/(t-s) ds + rho(t) log((t-A)/(B-t)).
    double rho_t = eq.law.density(t);
    auto regular = [&](double s) {
        if (std::abs(s - t) < 1e-14) {
            double h = 1e-7;
            return -(eq.law.density(t + h) - eq.law.density(t - h)) / (2.0 * h);
        }
        return (eq.law.density(s) - rho_t) / (t - s);
    };
    double pv = integrate(regular, eq.a, t, 96) + integrate(regular, t, eq.b, 96) +
                rho_t * std::log((t - eq.a) / (eq.b - t));
    return std::abs(0.5 * v.deriv(t) - pv);
}

Eigen::VectorXd gaussian_beta_tridiagonal_sample(double beta, int n, RngStream& rng) {
    if (!(beta > 0.0) || n <= 0)
        throw std::invalid_argument("gaussian_beta_tridiagonal_sample: bad parameters");
    const double scale = 1.0 / std::sqrt(beta * n);
    Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag(i) = std::sqrt(2.0) * scale * rng.gaussian();
    for (int k = 1; k < n; ++k) off(k - 1) = scale * rng.chi(beta * (n - k));
    if (n == 1) {
        Eigen::VectorXd ev(1);
        ev(0) = diag(0);
        return ev;
    }
    return tridiagonal_eigenvalues(diag, off);
}

McmcResult loggas_mcmc_sample(const LogGasSpec& spec, const McmcParams& params, RngStream& rng) {
    spec.validate();
    if (spec.potential.min_second_derivative() <= 0.0)
        throw std::invalid_argument("loggas_mcmc_sample: potential must be uniformly convex");
    const int n = spec.n;
    auto eq = equilibrium_density(spec);
    std::vector<double> x = classical_locations(n, eq.law);
    // Keep the last point strictly inside so the initial energy is finite.
    if (n >= 2) x[n - 1] = std::min(x[n - 1], eq.b - 0.25 * (x[n - 1] - x[n - 2]));

    const double beta_n = spec.beta * n;
    double width = params.initial_width > 0.0
                       ? params.initial_width
                       : (eq.b - eq.a) / (2.0 * n); // about one mean spacing

    auto delta_energy = [&](int k, double xn) {
        // beta N [V(xn)-V(xk)]/2 - beta sum_{j!=k} [log|xn-xj| - log|xk-xj|]
        double d = 0.5 * beta_n * (spec.potential(xn) - spec.potential(x[k]));
        for (int j = 0; j < n; ++j) {
            if (j == k) continue;
            double a = xn - x[j], bidx = x[k] - x[j];
            if ((a > 0) != (bidx > 0) || a == 0.0) return HUGE_VAL; // crossed a neighbour
            d -= spec.beta * (std::log(std::abs(a)) - std::log(std::abs(bidx)));
        }
        return d;
    };

    long accepted = 0, proposed = 0;
    long accepted_recent = 0, proposed_recent = 0;
    auto sweep = [&](bool tuning) {
        for (int k = 0; k < n; ++k) {
            double xn = x[k] + width * rng.gaussian();
            double de = delta_energy(k, xn);
            ++proposed;
            ++proposed_recent;
            if (de <= 0.0 || rng.uniform() < std::exp(-de)) {
                x[k] = xn;
                ++accepted;
                ++accepted_recent;
            }
        }
        if (tuning && proposed_recent >= 50L * n) {
            double acc = static_cast<double>(accepted_recent) / proposed_recent;
            width *= std::exp(0.8 * (acc - params.target_acceptance));
            accepted_recent = proposed_recent = 0;
        }
    };

    for (int s = 0; s < params.burnin_sweeps; ++s) sweep(true);
    accepted = proposed = 0;
    McmcResult out;
    out.samples.reserve(params.records);
    for (int r = 0; r < params.records; ++r) {
        for (int s = 0; s < params.thin_sweeps; ++s) sweep(false);
        out.samples.push_back(x);
    }
    out.acceptance = proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
    out.width = width;
    if (out.acceptance < 0.1 || out.acceptance > 0.7)
        throw std::runtime_error("loggas_mcmc_sample: acceptance " + std::to_string(out.acceptance) +
                                 " outside [0.1, 0.7] after tuning (width " +
                                 std::to_string(width) + ")");
    return out;
}

LogGasRigidity loggas_rigidity_report(double beta, int n, int samples, uint64_t master_seed,
                                      int threads) {
    auto gamma = classical_locations_sc(n);
    const int klo = static_cast<int>(0.1 * n), khi = static_cast<int>(0.9 * n);
    std::vector<std::vector<double>> devs(samples);
    std::vector<double> centers(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "beta-tridiag");
        auto ev = gaussian_beta_tridiagonal_sample(beta, n, rng);
        std::vector<double> d;
        d.reserve(khi - klo);
        for (int k = klo; k < khi; ++k) d.push_back(std::abs(ev(k) - gamma[k]));
        devs[s] = std::move(d);
        centers[s] = ev(n / 2);
    });
    std::vector<double> all;
    for (auto& d : devs) all.insert(all.end(), d.begin(), d.end());
    LogGasRigidity out;
    out.median_bulk_dev = median(all);
    out.median_scaled_dev = out.median_bulk_dev * n;
    out.median_center = median(centers);
    return out;
}

std::vector<LoopEquationRow> loop_equation_residual(const LogGasSpec& spec,
                                                    const std::vector<Complex>& z_grid,
                                                    int samples, uint64_t master_seed,
                                                    int threads) {
    spec.validate();
    if (spec.potential.kind != PotentialKind::quadratic)
        throw std::invalid_argument("loop_equation_residual: quadratic potential required (b_N = 0)");
    if (samples < 100)
        throw std::invalid_argument("loop_equation_residual: need >= 100 samples for the variance");
    for (Complex z : z_grid)
        if (!(z.imag() >= 0.5))
            throw std::invalid_argument("loop_equation_residual: need Im z >= 0.5");

    const int n = spec.n;
    auto eq = equilibrium_density(spec);

    // Per-sample S(z) = sum_k (z - l_k)^{-1} and S'(z); one tridiagonal draw
    // serves every grid point.
    const size_t nz = z_grid.size();
    std::vector<std::vector<Complex>> s_val(samples, std::vector<Complex>(nz)),
        sp_val(samples, std::vector<Complex>(nz));
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "loop-tridiag");
        auto ev = gaussian_beta_tridiagonal_sample(spec.beta, n, rng);
        for (size_t zi = 0; zi < nz; ++zi) {
            Complex sv(0, 0), sp(0, 0);
            for (int k = 0; k < n; ++k) {
                Complex d = 1.0 / (z_grid[zi] - ev(k));
                sv += d;
                sp -= d * d;
            }
            s_val[s][zi] = sv;
            sp_val[s][zi] = sp;
        }
    });

    std::vector<LoopEquationRow> rows(nz);
    for (size_t zi = 0; zi < nz; ++zi) {
        Complex z = z_grid[zi];
        Complex m_eq = eq.m(z);
        Complex s_of_z = eq.s(z);

        auto residual_from = [&](Complex mean_s, Complex mean_s2, Complex mean_sp) {
            Complex mbar = mean_s / static_cast<double>(n);
            Complex k_n = mean_s2 - mean_s * mean_s;
            Complex mbar_p = mean_sp / static_cast<double>(n);
            Complex diff = mbar - m_eq;
            Complex c_n = k_n / static_cast<double>(n) / static_cast<double>(n) +
                          (2.0 / spec.beta - 1.0) * mbar_p / static_cast<double>(n);
            return diff * diff + s_of_z * diff - c_n;
        };

        Complex sum_s(0, 0), sum_s2(0, 0), sum_sp(0, 0);
        for (int s = 0; s < samples; ++s) {
            sum_s += s_val[s][zi];
            sum_s2 += s_val[s][zi] * s_val[s][zi];
            sum_sp += sp_val[s][zi];
        }
        double inv = 1.0 / samples;
        Complex r_full = residual_from(sum_s * inv, sum_s2 * inv, sum_sp * inv);

        // Delete-one jackknife for the standard error of the residual.
        double invm1 = 1.0 / (samples - 1.0);
        Complex jk_mean(0, 0);
        std::vector<Complex> jk(samples);
        for (int s = 0; s < samples; ++s) {
            Complex ms = (sum_s - s_val[s][zi]) * invm1;
            Complex ms2 = (sum_s2 - s_val[s][zi] * s_val[s][zi]) * invm1;
            Complex msp = (sum_sp - sp_val[s][zi]) * invm1;
            jk[s] = residual_from(ms, ms2, msp);
            jk_mean += jk[s];
        }
        jk_mean *= inv;
        double var = 0.0;
        for (int s = 0; s < samples; ++s) var += std::norm(jk[s] - jk_mean);
        var *= (samples - 1.0) / samples;

        LoopEquationRow row;
        row.z = z;
        row.residual = r_full;
        row.residual_err = std::sqrt(var);
        row.m_diff = sum_s * inv / static_cast<double>(n) - m_eq;
        row.k_n = std::abs(sum_s2 * inv - (sum_s * inv) * (sum_s * inv));
        rows[zi] = row;
    }
    return rows;
}

namespace {

// Interior single-site Metropolis for a conditional log-gas window.
struct ConditionalChain {
    std::vector<double> interior;          // K ordered points
    double lo = 0.0, hi = 0.0;             // frozen bracket [y_L, y_{L+K+1}]
    const std::vector<double>* frozen = nullptr; // all N points; interior slots ignored
    int slot_lo = 0;                       // first interior slot (0-based)
    int window_k = 0;
    double beta = 2.0, beta_n = 0.0;
    const Potential* pot = nullptr;

    double delta_energy(int k, double xn) const {
        const auto& x = interior;
        double lo_k = (k == 0) ? lo : x[k - 1];
        double hi_k = (k + 1 == window_k) ? hi : x[k + 1];
        if (!(xn > lo_k && xn < hi_k)) return HUGE_VAL;
        double d = 0.5 * beta_n * ((*pot)(xn) - (*pot)(x[k]));
        for (int j = 0; j < window_k; ++j) {
            if (j == k) continue;
            d -= beta * (std::log(std::abs(xn - x[j])) - std::log(std::abs(x[k] - x[j])));
        }
        const auto& y = *frozen;
        for (int j = 0; j < static_cast<int>(y.size()); ++j) {
            if (j >= slot_lo && j < slot_lo + window_k) continue;
            d -= beta * (std::log(std::abs(xn - y[j])) - std::log(std::abs(x[k] - y[j])));
        }
        return d;
    }
};

// Run the conditional chain; returns thinned interior configurations.
std::vector<std::vector<double>> run_conditional_chain(ConditionalChain& chain,
                                                       const McmcParams& params, RngStream& rng,
                                                       double* acceptance_out) {
    const int k_count = chain.window_k;
    double width = params.initial_width > 0.0 ? params.initial_width
                                              : (chain.hi - chain.lo) / (2.0 * (k_count + 1));
    long acc = 0, prop = 0, acc_r = 0, prop_r = 0;
    auto sweep = [&](bool tuning) {
        for (int k = 0; k < k_count; ++k) {
            double xn = chain.interior[k] + width * rng.gaussian();
            double de = chain.delta_energy(k, xn);
            ++prop;
            ++prop_r;
            if (de <= 0.0 || rng.uniform() < std::exp(-de)) {
                chain.interior[k] = xn;
                ++acc;
                ++acc_r;
            }
        }
        if (tuning && prop_r >= 50L * k_count) {
            width *= std::exp(0.8 * (static_cast<double>(acc_r) / prop_r - params.target_acceptance));
            acc_r = prop_r = 0;
        }
    };
    for (int s = 0; s < params.burnin_sweeps; ++s) sweep(true);
    acc = prop = 0;
    std::vector<std::vector<double>> records;
    records.reserve(params.records);
    for (int r = 0; r < params.records; ++r) {
        for (int s = 0; s < params.thin_sweeps; ++s) sweep(false);
        records.push_back(chain.interior);
    }
    if (acceptance_out) *acceptance_out = prop > 0 ? static_cast<double>(acc) / prop : 0.0;
    return records;
}

std::vector<double> unfolded_window_gaps(const std::vector<std::vector<double>>& records, int n,
                                         const EquilibriumLaw& law) {
    std::vector<double> gaps;
    for (const auto& x : records)
        for (size_t i = 0; i + 1 < x.size(); ++i) {
            double mid = 0.5 * (x[i] + x[i + 1]);
            gaps.push_back(n * law.density(mid) * (x[i + 1] - x[i]));
        }
    return gaps;
}

double block_jackknife_ks(const std::vector<double>& a, const std::vector<double>& b,
                          int blocks) {
    // Blocked delete-one jackknife on both pools jointly.
    std::vector<double> theta;
    for (int skip = 0; skip < blocks; ++skip) {
        std::vector<double> pa, pb;
        for (size_t i = 0; i < a.size(); ++i)
            if (static_cast<int>(i * blocks / a.size()) != skip) pa.push_back(a[i]);
        for (size_t i = 0; i < b.size(); ++i)
            if (static_cast<int>(i * blocks / b.size()) != skip) pb.push_back(b[i]);
        theta.push_back(ks_distance(std::move(pa), std::move(pb)));
    }
    double m = mean(theta);
    double ss = 0.0;
    for (double v : theta) ss += (v - m) * (v - m);
    return std::sqrt(ss * (blocks - 1.0) / blocks);
}

} // namespace

ConditionalResult conditional_measure_experiment(const ConditionalSpec& cond,
                                                 const McmcParams& params, uint64_t master_seed) {
    const int n = cond.n, L = cond.window_index, K = cond.window_size;
    if (L < 1 || K < 1 || L + K + 1 > n)
        throw std::invalid_argument("conditional_measure_experiment: window out of range");

    LogGasSpec spec_v{cond.beta, cond.potential, n};
    auto eq_v = equilibrium_density(spec_v);
    auto gamma = classical_locations(n, eq_v.law);
    auto theta = classical_locations_sc(n);

    auto make_chain = [&](const std::vector<double>& y, const Potential& pot) {
        ConditionalChain c;
        c.slot_lo = L; // 0-based slots L..L+K-1 hold interior points
        c.window_k = K;
        c.lo = y[L - 1];
        c.hi = y[L + K];
        c.frozen = &y;
        c.beta = cond.beta;
        c.beta_n = cond.beta * n;
        c.pot = &pot;
        c.interior.assign(y.begin() + L, y.begin() + L + K);
        return c;
    };

    ConditionalResult out;
    Potential gauss_pot; // quadratic
    ConditionalChain chain_mu = make_chain(gamma, cond.potential);
    ConditionalChain chain_sigma = make_chain(theta, gauss_pot);

    RngStream rng_mu = seed_stream(master_seed, 0, "conditional-mu");
    RngStream rng_sigma = seed_stream(master_seed, 0, "conditional-sigma");
    auto rec_mu = run_conditional_chain(chain_mu, params, rng_mu, &out.acceptance_mu);
    auto rec_sigma = run_conditional_chain(chain_sigma, params, rng_sigma, &out.acceptance_sigma);

    // Affine map between the two windows (recorded; unfolding against the
    // respective densities already puts both gap samples on mean spacing 1).
    out.affine_scale = (chain_mu.hi - chain_mu.lo) / (chain_sigma.hi - chain_sigma.lo);
    out.affine_shift = chain_mu.lo - chain_sigma.lo * out.affine_scale;

    auto gaps_mu = unfolded_window_gaps(rec_mu, n, eq_v.law);
    auto gaps_sigma = unfolded_window_gaps(rec_sigma, n, EquilibriumLaw::semicircle());
    out.ks = ks_distance(gaps_mu, gaps_sigma);
    out.ks_err = block_jackknife_ks(gaps_mu, gaps_sigma, 20);
    return out;
}

double conditional_k1_oracle_ks(const ConditionalSpec& cond, const McmcParams& params,
                                uint64_t master_seed) {
    if (cond.window_size != 1)
        throw std::invalid_argument("conditional_k1_oracle_ks: window size must be 1");
    const int n = cond.n, L = cond.window_index;
    LogGasSpec spec_v{cond.beta, cond.potential, n};
    auto eq_v = equilibrium_density(spec_v);
    auto gamma = classical_locations(n, eq_v.law);

    auto chain = [&]() {
        ConditionalChain c;
        c.slot_lo = L;
        c.window_k = 1;
        c.lo = gamma[L - 1];
        c.hi = gamma[L + 1];
        c.frozen = &gamma;
        c.beta = cond.beta;
        c.beta_n = cond.beta * n;
        c.pot = &cond.potential;
        c.interior = {0.5 * (gamma[L - 1] + gamma[L + 1])};
        return c;
    }();

    RngStream rng = seed_stream(master_seed, 0, "conditional-k1");
    double acc = 0.0;
    auto rec = run_conditional_chain(chain, params, rng, &acc);
    std::vector<double> xs;
    xs.reserve(rec.size());
    for (const auto& r : rec) xs.push_back(r[0]);

    // Exact 1D conditional density by quadrature: log-density is
    // -beta N V(x)/2 + beta sum_{j != L} log|x - y_j| (additive constant free).
    auto log_density = [&](double x) {
        double ld = -0.5 * cond.beta * n * cond.potential(x);
        for (int j = 0; j < n; ++j) {
            if (j == L) continue;
            ld += cond.beta * std::log(std::abs(x - gamma[j]));
        }
        return ld;
    };
    double lo = chain.lo, hi = chain.hi;
    double peak = -HUGE_VAL;
    const int kGrid = 4096;
    std::vector<double> ld(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / kGrid;
        ld[i] = log_density(x);
        peak = std::max(peak, ld[i]);
    }
    std::vector<double> cdf_grid(kGrid + 1, 0.0);
    for (int i = 0; i < kGrid; ++i)
        cdf_grid[i + 1] = cdf_grid[i] + std::exp(ld[i] - peak);
    for (auto& c : cdf_grid) c /= cdf_grid.back();
    auto cdf = [&](double x) {
        if (x <= lo) return 0.0;
        if (x >= hi) return 1.0;
        double pos = (x - lo) / (hi - lo) * kGrid;
        int i = std::min(static_cast<int>(pos), kGrid - 1);
        double f = pos - i;
        return cdf_grid[i] * (1.0 - f) + cdf_grid[i + 1] * f;
    };
    return ks_distance_cdf(std::move(xs), cdf);
}

} // namespace rmtlab
