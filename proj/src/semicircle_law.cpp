#include "rmtlab/semicircle_law.hpp"

#include <cmath>
#include <stdexcept>

#include "rmtlab/numeric.hpp"
#include "rmtlab/parallel.hpp"

namespace rmtlab {

std::vector<LocalLawPoint> local_law_report(const EnsembleSpec& spec,
                                            const std::vector<Complex>& z_grid, int samples,
                                            uint64_t master_seed, bool entry_stats, int threads) {
    spec.validate();
    const int n = spec.n;
    for (Complex z : z_grid) {
        if (std::abs(z.real()) > 5.0 || z.imag() > 10.0)
            throw std::invalid_argument("local_law_report: z outside the admissible domain");
        if (z.imag() < 1.0 / n)
            throw std::invalid_argument("local_law_report: eta below the 1/N resolution floor");
    }

    const size_t nz = z_grid.size();
    std::vector<std::vector<double>> m_err(nz, std::vector<double>(samples));
    std::vector<std::vector<double>> diag_err(nz), offdiag(nz);
    if (entry_stats)
        for (size_t zi = 0; zi < nz; ++zi) {
            diag_err[zi].resize(samples);
            offdiag[zi].resize(samples);
        }

    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "local-law");
        auto h = sample_wigner(spec, rng);
        auto sp = eigen_decompose(h, entry_stats);
        for (size_t zi = 0; zi < nz; ++zi) {
            Complex z = z_grid[zi];
            m_err[zi][s] = std::abs(stieltjes(sp.eigenvalues, z) - m_sc(z));
        }
        if (entry_stats) {
            auto res = resolvent(sp, z_grid, true);
            for (size_t zi = 0; zi < nz; ++zi) {
                Complex msc = m_sc(z_grid[zi]);
                const auto& g = res.entries[zi];
                double dmax = 0.0, omax = 0.0;
                for (int i = 0; i < n; ++i) {
                    dmax = std::max(dmax, std::abs(g(i, i) - msc));
                    for (int j = i + 1; j < n; ++j) omax = std::max(omax, std::abs(g(i, j)));
                }
                diag_err[zi][s] = dmax;
                offdiag[zi][s] = omax;
            }
        }
    });

    std::vector<LocalLawPoint> out(nz);
    for (size_t zi = 0; zi < nz; ++zi) {
        LocalLawPoint p;
        p.n = n;
        p.z = z_grid[zi];
        double eta = p.z.imag();
        p.med_m_err = median(m_err[zi]);
        p.med_m_err_se = stderr_median(m_err[zi]);
        p.envelope_avg = 1.0 / (n * eta);
        p.envelope_entry = std::sqrt(m_sc(p.z).imag() / (n * eta)) + 1.0 / (n * eta);
        p.polylog_l = std::log(std::log(static_cast<double>(n)));
        if (entry_stats) {
            p.max_diag_err = median(diag_err[zi]);
            p.max_offdiag = median(offdiag[zi]);
        }
        out[zi] = p;
    }
    return out;
}

RigidityReport rigidity_report(const EnsembleSpec& spec, int samples, uint64_t master_seed,
                               int threads) {
    spec.validate();
    const int n = spec.n;
    auto gamma = classical_locations_sc(n);

    std::vector<double> q(samples), center(samples), maxdev(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "rigidity");
        auto h = sample_wigner(spec, rng);
        auto sp = eigen_decompose(h, false);
        double qs = 0.0, rmax = 0.0;
        for (int j = 0; j < n; ++j) {
            double dev = sp.eigenvalues(j) - gamma[j];
            qs += dev * dev;
            double weight = std::cbrt(static_cast<double>(std::min(j + 1, n - j)));
            rmax = std::max(rmax, std::abs(dev) * std::cbrt(n) * std::cbrt(n) * weight);
        }
        q[s] = qs / n;
        maxdev[s] = rmax;
        center[s] = std::abs(sp.eigenvalues(n / 2 - 1) - gamma[n / 2 - 1]);
    });

    RigidityReport out;
    out.n = n;
    out.q_mean = mean(q);
    out.q_se = stderr_mean(q);
    out.med_center_dev = median(center);
    out.max_scaled_dev = std::move(maxdev);
    return out;
}

DelocalizationReport delocalization_report(const EnsembleSpec& spec, int samples,
                                           uint64_t master_seed, int threads) {
    spec.validate();
    const int n = spec.n;
    std::vector<double> sup(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "deloc");
        auto h = sample_wigner(spec, rng);
        auto sp = eigen_decompose(h, true);
        double worst = 0.0;
        if (sp.vectors_real) {
            worst = sp.vectors_real->array().abs().maxCoeff();
        } else {
            worst = sp.vectors_cplx->array().abs().maxCoeff();
        }
        sup[s] = n * worst * worst;
    });
    DelocalizationReport out;
    out.n = n;
    out.med = median(sup);
    out.med_se = stderr_median(sup);
    out.sup_norms = std::move(sup);
    return out;
}

FluctuationAveragingReport fluctuation_averaging_report(const EnsembleSpec& spec, Complex z,
                                                        int samples, uint64_t master_seed,
                                                        int threads) {
    spec.validate();
    if (spec.symmetry != Symmetry::real_symmetric ||
        spec.profile.kind != VarianceProfile::Kind::flat)
        throw std::invalid_argument("fluctuation_averaging_report: flat real-symmetric only");
    if (!(z.imag() >= 1.0 / spec.n))
        throw std::invalid_argument("fluctuation_averaging_report: eta below 1/N");

    const int n = spec.n;
    std::vector<double> a_vals(samples), b_vals(samples);
    std::vector<Complex> zmeans(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(master_seed, static_cast<uint64_t>(s), "flucavg");
        auto h = sample_wigner(spec, rng);
        auto sp = eigen_decompose(h, true);
        const auto& u = *sp.vectors_real;

        Eigen::VectorXcd w(n), w2(n);
        Complex tr_g(0, 0);
        for (int a = 0; a < n; ++a) {
            Complex d = 1.0 / (sp.eigenvalues(a) - z);
            w(a) = d;
            w2(a) = d * d;
            tr_g += d;
        }
        Complex sum_z(0, 0);
        double sum_abs = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex gii(0, 0), g2ii(0, 0);
            for (int a = 0; a < n; ++a) {
                double uu = u(i, a) * u(i, a);
                gii += uu * w(a);
                g2ii += uu * w2(a);
            }
            // Schur: h_i^T G^(i) h_i = h_ii - z - 1/G_ii; interlacing:
            // Tr G^(i) = Tr G - (G^2)_ii / G_ii.
            Complex quad = h.real(i, i) - z - 1.0 / gii;
            Complex tr_minor = tr_g - g2ii / gii;
            Complex zi = quad - tr_minor / static_cast<double>(n);
            sum_z += zi;
            sum_abs += std::abs(zi);
        }
        a_vals[s] = std::abs(sum_z) / n;
        b_vals[s] = sum_abs / n;
        zmeans[s] = sum_z / static_cast<double>(n);
    });

    FluctuationAveragingReport out;
    out.n = n;
    out.z = z;
    Complex zm(0, 0);
    for (auto v : zmeans) zm += v;
    zm /= static_cast<double>(samples);
    double var = 0.0;
    for (auto v : zmeans) var += std::norm(v - zm);
    out.mean_z = zm;
    out.mean_z_se = samples > 1 ? std::sqrt(var / (samples - 1.0) / samples) : 0.0;
    out.a_values = std::move(a_vals);
    out.b_values = std::move(b_vals);
    return out;
}

Complex fluctuation_z_from_minor(const MatrixSample& h, int i, Complex z) {
    const int n = h.n();
    std::vector<Complex> grid{z};
    auto minor = minor_resolvent(h, i, grid, true);
    const auto& g = minor.entries[0];
    Complex quad(0, 0), trace(0, 0);
    // Minor entries are indexed by compacted labels; rebuild the row vector.
    Eigen::VectorXd hrow(n - 1);
    for (int k = 0, kk = 0; k < n; ++k) {
        if (k == i) continue;
        hrow(kk++) = h.real(k, i);
    }
    for (int k = 0; k < n - 1; ++k) {
        trace += g(k, k);
        for (int l = 0; l < n - 1; ++l) quad += hrow(k) * g(k, l) * hrow(l);
    }
    return quad - trace / static_cast<double>(n);
}

namespace {

// Smooth transition sigma(u) = exp(-1/u) on u > 0 and the standard bump-glue.
double smooth_sigma(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double smooth_sigma_d(double u) {
    return u > 0.0 ? std::exp(-1.0 / u) / (u * u) : 0.0;
}

double smooth_step(double u) {
    double a = smooth_sigma(u), b = smooth_sigma(1.0 - u);
    return a / (a + b);
}
double smooth_step_d(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double a = smooth_sigma(u), b = smooth_sigma(1.0 - u);
    double ad = smooth_sigma_d(u), bd = smooth_sigma_d(1.0 - u);
    double denom = (a + b) * (a + b);
    return (ad * b + a * bd) / denom;
}

// chi = 1 on [-1/2, 1/2], supported in [-1, 1], C-infinity.
double chi_cutoff(double y) {
    double a = std::abs(y);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    return smooth_step(2.0 * (1.0 - a));
}
double chi_cutoff_d(double y) {
    double a = std::abs(y);
    if (a <= 0.5 || a >= 1.0) return 0.0;
    double d = smooth_step_d(2.0 * (1.0 - a)) * -2.0;
    return y > 0 ? d : -d;
}

} // namespace

double hs_identity_check(const std::function<double(double)>& f,
                         const std::function<double(double)>& fp,
                         const std::function<double(double)>& fpp, double support_lo,
                         double support_hi, double lambda, int grid_n) {
    if (grid_n < 8) throw std::invalid_argument("hs_identity_check: grid too coarse");
    if (grid_n % 2 == 1) ++grid_n; // keep y = 0 off the midpoint nodes

    const double x_lo = support_lo - 0.25, x_hi = support_hi + 0.25;
    const double y_lo = -1.0, y_hi = 1.0;
    const double hx = (x_hi - x_lo) / grid_n, hy = (y_hi - y_lo) / grid_n;

    std::complex<double> total(0.0, 0.0);
    for (int ix = 0; ix < grid_n; ++ix) {
        double x = x_lo + (ix + 0.5) * hx;
        double fx = f(x), fpx = fp(x), fppx = fpp(x);
        if (fx == 0.0 && fpx == 0.0 && fppx == 0.0) continue;
        for (int iy = 0; iy < grid_n; ++iy) {
            double y = y_lo + (iy + 0.5) * hy;
            double chi = chi_cutoff(y), chid = chi_cutoff_d(y);
            if (chi == 0.0 && chid == 0.0) continue;
            std::complex<double> numer(0.0, y * fppx * chi);
            numer += std::complex<double>(0.0, 1.0) * (fx + std::complex<double>(0.0, y) * fpx) * chid;
            std::complex<double> denom(lambda - x, -y);
            total += numer / denom;
        }
    }
    total *= hx * hy / (2.0 * 3.14159265358979323846);
    return std::abs(total - f(lambda));
}

double bump_c2(double x) {
    double t = 1.0 - x * x;
    return t > 0.0 ? t * t * t : 0.0;
}
double bump_c2_d1(double x) {
    double t = 1.0 - x * x;
    return t > 0.0 ? -6.0 * x * t * t : 0.0;
}
double bump_c2_d2(double x) {
    double t = 1.0 - x * x;
    return t > 0.0 ? -6.0 * t * t + 24.0 * x * x * t : 0.0;
}

} // namespace rmtlab
