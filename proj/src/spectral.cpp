#include "rmtlab/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "rmtlab/numeric.hpp"

namespace rmtlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

template <typename Matrix>
Spectrum decompose_impl(const Matrix& h, bool want_vectors) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.compute(h, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        Eigen::MatrixXd re(h.rows(), h.cols());
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
                re(i, j) = std::real(static_cast<std::complex<double>>(h(i, j)));
        throw std::runtime_error("eigen_decompose: solver did not converge (matrix hash " +
                                 std::to_string(matrix_hash(re)) + ")");
    }
    Spectrum s;
    s.eigenvalues = solver.eigenvalues();
    if (want_vectors) {
        if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
            s.vectors_real = solver.eigenvectors();
        else
            s.vectors_cplx = solver.eigenvectors();
    }
    return s;
}
} // namespace

uint64_t matrix_hash(const Eigen::MatrixXd& m) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        uint64_t bits;
        double v = m.data()[i];
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

Spectrum eigen_decompose(const Eigen::MatrixXd& h, bool want_vectors) {
    return decompose_impl(h, want_vectors);
}

Spectrum eigen_decompose(const Eigen::MatrixXcd& h, bool want_vectors) {
    return decompose_impl(h, want_vectors);
}

Spectrum eigen_decompose(const MatrixSample& h, bool want_vectors) {
    return h.is_complex() ? decompose_impl(h.cplx, want_vectors)
                          : decompose_impl(h.real, want_vectors);
}

Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag,
                                        const Eigen::VectorXd& subdiag) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("tridiagonal_eigenvalues: solver did not converge");
    return solver.eigenvalues();
}

Complex stieltjes(const Eigen::VectorXd& eigenvalues, Complex z) {
    Complex s(0.0, 0.0);
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
        s += 1.0 / (eigenvalues(j) - z);
    return s / static_cast<double>(eigenvalues.size());
}

ResolventSample resolvent(const Spectrum& spectrum, std::span<const Complex> z_grid,
                          bool want_entries) {
    for (Complex z : z_grid)
        if (!(z.imag() > 0.0)) throw std::invalid_argument("resolvent: need Im z > 0");
    if (want_entries && !spectrum.has_vectors())
        throw std::invalid_argument("resolvent: entries require eigenvectors");

    const int n = spectrum.n();
    ResolventSample out;
    out.z_grid.assign(z_grid.begin(), z_grid.end());
    out.m_values.reserve(z_grid.size());
    for (Complex z : z_grid) out.m_values.push_back(stieltjes(spectrum.eigenvalues, z));

    if (want_entries) {
        out.entries.reserve(z_grid.size());
        for (Complex z : z_grid) {
            Eigen::VectorXcd w(n);
            for (int a = 0; a < n; ++a) w(a) = 1.0 / (spectrum.eigenvalues(a) - z);
            Eigen::MatrixXcd g;
            if (spectrum.vectors_real) {
                const auto& u = *spectrum.vectors_real;
                g.noalias() = u.cast<Complex>() * w.asDiagonal() * u.transpose().cast<Complex>();
            } else {
                const auto& u = *spectrum.vectors_cplx;
                g.noalias() = u * w.asDiagonal() * u.adjoint();
            }
            out.entries.push_back(std::move(g));
        }
    }
    return out;
}

ResolventSample minor_resolvent(const MatrixSample& h, int i, std::span<const Complex> z_grid,
                                bool want_entries) {
    const int n = h.n();
    if (i < 0 || i >= n) throw std::invalid_argument("minor_resolvent: index out of range");

    Spectrum minor_spec;
    if (h.is_complex()) {
        Eigen::MatrixXcd m(n - 1, n - 1);
        for (int r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (int c = 0, cc = 0; c < n; ++c) {
                if (c == i) continue;
                m(rr, cc++) = h.cplx(r, c);
            }
            ++rr;
        }
        minor_spec = eigen_decompose(m, want_entries);
    } else {
        Eigen::MatrixXd m(n - 1, n - 1);
        for (int r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (int c = 0, cc = 0; c < n; ++c) {
                if (c == i) continue;
                m(rr, cc++) = h.real(r, c);
            }
            ++rr;
        }
        minor_spec = eigen_decompose(m, want_entries);
    }

    ResolventSample out = resolvent(minor_spec, z_grid, want_entries);
    // Keep m normalized by the original N so that m - m^{(i)} matches the
    // interlacing bound C/(N eta) directly.
    for (auto& m : out.m_values) m *= static_cast<double>(n - 1) / n;
    out.minor_index = i;
    return out;
}

Complex m_sc(Complex z) {
    if (z.imag() == 0.0) {
        double e = z.real();
        if (std::abs(e) <= 2.0)
            throw std::invalid_argument("m_sc: real z inside [-2,2]; use the boundary density");
        // branch with m ~ -1/z at infinity
        double root = std::sqrt(e * e - 4.0);
        return Complex(e > 0 ? (-e + root) * 0.5 : (-e - root) * 0.5, 0.0);
    }
    if (z.imag() < 0.0) throw std::invalid_argument("m_sc: need Im z >= 0");
    Complex disc = std::sqrt(z * z - 4.0);
    Complex m = 0.5 * (-z + disc);
    if (m.imag() <= 0.0) m = 0.5 * (-z - disc);
    return m;
}

double rho_sc(double x) {
    double t = 4.0 - x * x;
    return t > 0.0 ? std::sqrt(t) / (2.0 * kPi) : 0.0;
}

double cdf_sc(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) + std::asin(0.5 * x) / kPi;
}

EquilibriumLaw::EquilibriumLaw(double a, double b, std::function<double(double)> density,
                               std::function<double(double)> closed_cdf)
    : a_(a), b_(b), density_(std::move(density)), closed_cdf_(std::move(closed_cdf)) {
    if (!(b_ > a_)) throw std::invalid_argument("EquilibriumLaw: empty support");
    if (!closed_cdf_) {
        // Cumulative Gauss-Legendre table on 2048 panels.
        constexpr int kPanels = 2048;
        grid_.resize(kPanels + 1);
        cum_.resize(kPanels + 1);
        double h = (b_ - a_) / kPanels;
        grid_[0] = a_;
        cum_[0] = 0.0;
        for (int p = 0; p < kPanels; ++p) {
            double lo = a_ + p * h;
            grid_[p + 1] = lo + h;
            cum_[p + 1] = cum_[p] + integrate(density_, lo, lo + h, 1);
        }
        double total = cum_.back();
        if (std::abs(total - 1.0) > 1e-8)
            throw std::invalid_argument("EquilibriumLaw: density does not integrate to 1");
        for (auto& c : cum_) c /= total;
    }
}

double EquilibriumLaw::density(double x) const {
    if (x < a_ || x > b_) return 0.0;
    return density_(x);
}

double EquilibriumLaw::cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    if (closed_cdf_) return closed_cdf_(x);
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    size_t k = static_cast<size_t>(it - grid_.begin()) - 1;
    return cum_[k] + integrate(density_, grid_[k], x, 1);
}

double EquilibriumLaw::quantile(double p) const {
    if (p <= 0.0) return a_;
    if (p >= 1.0) return b_;
    double lo = a_, hi = b_;
    // Bisection: CDF is monotone; 60 halvings put dF well below 1e-10 for
    // any bounded density.
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double f = cdf(mid);
        if (std::abs(f - p) <= 1e-11) return mid;
        (f < p ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

EquilibriumLaw EquilibriumLaw::semicircle() {
    return EquilibriumLaw(-2.0, 2.0, [](double x) { return rho_sc(x); },
                          [](double x) { return cdf_sc(x); });
}

EquilibriumLaw EquilibriumLaw::semicircle_scaled(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("semicircle_scaled: scale must be > 0");
    return EquilibriumLaw(
        -2.0 * scale, 2.0 * scale, [scale](double x) { return rho_sc(x / scale) / scale; },
        [scale](double x) { return cdf_sc(x / scale); });
}

std::vector<double> classical_locations(int n, const EquilibriumLaw& law) {
    if (n <= 0) throw std::invalid_argument("classical_locations: N must be positive");
    std::vector<double> g(n);
    for (int j = 1; j <= n; ++j)
        g[j - 1] = law.quantile(static_cast<double>(j) / n);
    return g;
}

std::string spectrum_to_csv(const Spectrum& spectrum) {
    std::string out = "index,eigenvalue\n";
    char buf[48];
    for (int j = 0; j < spectrum.n(); ++j) {
        std::snprintf(buf, sizeof buf, "%d,%.12g\n", j + 1, spectrum.eigenvalues(j));
        out += buf;
    }
    return out;
}

std::string resolvent_to_csv(const ResolventSample& sample) {
    std::string out = "re_z,im_z,re_m,im_m\n";
    char buf[96];
    for (size_t k = 0; k < sample.z_grid.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", sample.z_grid[k].real(),
                      sample.z_grid[k].imag(), sample.m_values[k].real(),
                      sample.m_values[k].imag());
        out += buf;
    }
    return out;
}

std::vector<double> classical_locations_sc(int n) {
    static thread_local std::pair<int, std::vector<double>> cache{0, {}};
    if (cache.first == n) return cache.second;
    auto law = EquilibriumLaw::semicircle();
    auto g = classical_locations(n, law);
    cache = {n, g};
    return g;
}

} // namespace rmtlab
