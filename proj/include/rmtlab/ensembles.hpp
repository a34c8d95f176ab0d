#pragma once
#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rmtlab/rng.hpp"

namespace rmtlab {

enum class Symmetry { real_symmetric, complex_hermitian };

enum class EntryKind {
    gaussian,
    bernoulli_symmetric,
    uniform_centered,
    three_point_matched,
    custom_discrete
};

/// Standardized single-entry law: mean 0, variance 1 for every built-in.
struct EntryDistribution {
    EntryKind kind = EntryKind::gaussian;
    /// (value, probability) atoms; only for custom_discrete / three_point_matched.
    std::vector<std::pair<double, double>> atoms;
    /// First four standardized moments m1..m4.
    std::array<double, 4> moments{0.0, 1.0, 0.0, 3.0};
    /// Subexponential decay tag (C0, theta); metadata only.
    double subexp_c0 = 1.0;
    double subexp_theta = 1.0;

    double sample(RngStream& rng) const;

    /// Quantile transform F^{-1}(u); lets two laws be coupled on shared
    /// uniforms for variance-reduced comparisons.
    double quantile(double u) const;

    static EntryDistribution gaussian();
    static EntryDistribution bernoulli_symmetric();
    static EntryDistribution uniform_centered();
    static EntryDistribution custom_discrete(std::vector<std::pair<double, double>> atoms);

    std::string name() const;
};

/// Symmetric three-atom law with Gaussian-matched first four moments
/// (0, 1, 0, 3): atoms {-sqrt(3): 1/6, 0: 2/3, +sqrt(3): 1/6}.
EntryDistribution make_moment_matched_three_point();

/// Entry-variance profile sigma^2_ij. Rows sum to 1 (within 1e-10) except for
/// deliberately detuned diagnostic profiles.
struct VarianceProfile {
    enum class Kind { flat, generalized, band };

    Kind kind = Kind::flat;
    int n = 0;
    /// Uniform scale on the flat profile; != 1 only for diagnostic seeds whose
    /// global density is intentionally perturbed.
    double flat_scale = 1.0;
    /// Materialized sigma^2 for generalized/band profiles.
    Eigen::MatrixXd sigma2;
    /// Recorded comparability constants: c_inf <= N sigma^2_ij <= c_sup.
    double c_inf = 1.0;
    double c_sup = 1.0;
    int band_width = 0;

    double at(int i, int j) const {
        return kind == Kind::flat ? flat_scale / n : sigma2(i, j);
    }
    /// Max row-sum deviation from 1.
    double row_sum_error() const;
    void validate() const;

    static VarianceProfile flat(int n);
    /// Flat profile with all variances multiplied by `scale`; skips the
    /// row-normalization invariant (diagnostic use).
    static VarianceProfile flat_scaled(int n, double scale);
    static VarianceProfile generalized(Eigen::MatrixXd sigma2);
    /// Banded profile sigma^2_ij = W^{-1} f([i-j]_N / W), renormalized so each
    /// row sums to exactly 1. Periodic distance keeps the profile circulant,
    /// so the renormalization is a single global factor. W > N/2 degrades to
    /// the flat profile (a warning is recorded on the returned object).
    static VarianceProfile band(int n, int width, const std::function<double(double)>& shape);
    static VarianceProfile band_indicator(int n, int width);

    std::string warning; // set when a constructor had to degrade
};

struct ErParams {
    double p = 0.0;     // edge probability
    double q = 0.0;     // sqrt(p N)
    double gamma = 0.0; // (1 - q^2/N)^{-1/2}
};

struct EnsembleSpec {
    Symmetry symmetry = Symmetry::real_symmetric;
    int n = 0;
    EntryDistribution entries;
    VarianceProfile profile;
    std::optional<ErParams> er;
    /// E h_ij^2 / E |h_ij|^2 for complex entries; 0 (the default) gives the
    /// phase-symmetric law with independent equal-variance parts.
    double complex_second_moment = 0.0;

    void validate() const;
    static EnsembleSpec goe(int n);
    static EnsembleSpec gue(int n);
    static EnsembleSpec wigner(int n, Symmetry sym, EntryDistribution entries);
};

/// One self-adjoint draw. Exactly one of `real`/`cplx` is populated, matching
/// spec.symmetry; hermiticity is bit-exact by construction.
struct MatrixSample {
    EnsembleSpec spec;
    Eigen::MatrixXd real;
    Eigen::MatrixXcd cplx;
    uint64_t seed_key = 0;
    uint64_t seed_stream_id = 0;

    bool is_complex() const { return spec.symmetry == Symmetry::complex_hermitian; }
    int n() const { return spec.n; }
};

/// Draw a Wigner/generalized-Wigner sample: independent entries with
/// E h_ij = 0 and E |h_ij|^2 = sigma^2_ij; the diagonal is real Gaussian with
/// variance sigma^2_ii. Complex off-diagonals are (x + iy)/sqrt(2) with
/// independent standardized parts, so E h_ij^2 = 0.
MatrixSample sample_wigner(const EnsembleSpec& spec, RngStream& rng);

/// Erdos-Renyi adjacency matrix scaled per entry to gamma/q with edge
/// probability q^2/N; entries are deliberately not centered. Requires
/// q = sqrt(pN) >= 1.
MatrixSample sample_erdos_renyi(int n, double p, RngStream& rng);

/// Band matrix with Gaussian entries over the given shape profile.
MatrixSample sample_band(int n, int width, const std::function<double(double)>& shape,
                         RngStream& rng);

} // namespace rmtlab
