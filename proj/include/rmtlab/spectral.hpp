#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rmtlab/ensembles.hpp"

namespace rmtlab {

using Complex = std::complex<double>;

/// Ordered eigenvalues of one sample, optionally with orthonormal vectors.
struct Spectrum {
    Eigen::VectorXd eigenvalues; // ascending
    std::optional<Eigen::MatrixXd> vectors_real;
    std::optional<Eigen::MatrixXcd> vectors_cplx;
    int n() const { return static_cast<int>(eigenvalues.size()); }
    bool has_vectors() const { return vectors_real || vectors_cplx; }
};

/// Dense self-adjoint eigendecomposition. Ascending eigenvalues; residual
/// ||H v - lambda v|| <= 50 N eps ||H|| and Gram error <= 1e-10 when vectors
/// are requested. Throws on solver non-convergence (with a content hash of
/// the offending matrix in the message).
Spectrum eigen_decompose(const MatrixSample& h, bool want_vectors);
Spectrum eigen_decompose(const Eigen::MatrixXd& h, bool want_vectors);
Spectrum eigen_decompose(const Eigen::MatrixXcd& h, bool want_vectors);

/// Eigenvalues of a symmetric tridiagonal matrix (O(N^2), no vectors).
Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag,
                                        const Eigen::VectorXd& subdiag);

/// Green function data on a grid of spectral parameters z = E + i eta.
struct ResolventSample {
    std::vector<Complex> z_grid;
    std::vector<Complex> m_values;                 // (1/N) sum_j (lambda_j - z)^{-1}
    std::vector<Eigen::MatrixXcd> entries;         // full G(z) per point, if requested
    std::optional<int> minor_index;                // i of G^{(i)}, if a minor
    bool has_entries() const { return !entries.empty(); }
};

/// Resolvent via the eigendecomposition: G_ij(z) = sum_a u_a(i) conj(u_a(j)) / (lambda_a - z).
/// Eigenvectors must be present when entries are requested. All eta must be > 0.
ResolventSample resolvent(const Spectrum& spectrum, std::span<const Complex> z_grid,
                          bool want_entries = false);

/// Stieltjes transform of the empirical measure without entries.
Complex stieltjes(const Eigen::VectorXd& eigenvalues, Complex z);

/// Resolvent of the minor with row/column i removed; entries keep their
/// original labels (index i is skipped). Recomputed from scratch.
ResolventSample minor_resolvent(const MatrixSample& h, int i, std::span<const Complex> z_grid,
                                bool want_entries = false);

/// Stieltjes transform of the semicircle law: the root of m^2 + z m + 1 = 0
/// with Im m > 0 (or the branch ~ -1/z for real |z| > 2).
Complex m_sc(Complex z);

/// Closed-form semicircle objects on [-2,2].
double rho_sc(double x);
double cdf_sc(double x);

/// One-cut equilibrium law with evaluable density, CDF and quantile.
/// The CDF is tabulated on a fine Gauss-Legendre grid unless a closed form is
/// supplied; quantiles are solved by bracketed bisection to |dF| <= 1e-10.
class EquilibriumLaw {
public:
    EquilibriumLaw(double a, double b, std::function<double(double)> density,
                   std::function<double(double)> closed_cdf = nullptr);

    double support_lower() const { return a_; }
    double support_upper() const { return b_; }
    double density(double x) const;
    double cdf(double x) const;
    /// x with cdf(x) = p; clamps to the support at p = 0, 1.
    double quantile(double p) const;

    static EquilibriumLaw semicircle();
    /// Semicircle dilated by `scale` (support [-2 scale, 2 scale]).
    static EquilibriumLaw semicircle_scaled(double scale);

private:
    double a_, b_;
    std::function<double(double)> density_;
    std::function<double(double)> closed_cdf_;
    std::vector<double> grid_;
    std::vector<double> cum_;
};

/// Classical locations: gamma_j solves N * F(gamma_j) = j for j = 1..N
/// (quantile-j convention; gamma_N sits at the upper support edge).
std::vector<double> classical_locations(int n, const EquilibriumLaw& law);
std::vector<double> classical_locations_sc(int n);

/// FNV-1a content hash of a matrix (diagnostics).
uint64_t matrix_hash(const Eigen::MatrixXd& m);

/// CSV export: "index,eigenvalue" rows.
std::string spectrum_to_csv(const Spectrum& spectrum);
/// CSV export: "re_z,im_z,re_m,im_m" rows.
std::string resolvent_to_csv(const ResolventSample& sample);

} // namespace rmtlab
