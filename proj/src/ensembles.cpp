#include "rmtlab/ensembles.hpp"

#include <cmath>
#include <stdexcept>

namespace rmtlab {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kInvSqrt2 = 0.70710678118654752440;
} // namespace

double EntryDistribution::sample(RngStream& rng) const {
    switch (kind) {
        case EntryKind::gaussian:
            return rng.gaussian();
        case EntryKind::bernoulli_symmetric:
            return (rng.next_u64() & 1u) ? 1.0 : -1.0;
        case EntryKind::uniform_centered:
            return (2.0 * rng.uniform() - 1.0) * kSqrt3;
        case EntryKind::three_point_matched:
        case EntryKind::custom_discrete: {
            double u = rng.uniform();
            double acc = 0.0;
            for (const auto& [v, p] : atoms) {
                acc += p;
                if (u <= acc) return v;
            }
            return atoms.back().first;
        }
    }
    throw std::logic_error("EntryDistribution: unknown kind");
}

namespace {
// Acklam's rational approximation to the standard normal quantile,
// refined with one Halley step (about 1e-15 absolute accuracy).
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = 0.5 * std::erfc(-x / 1.4142135623730951) - p;
    double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}
} // namespace

double EntryDistribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u must be in (0,1)");
    switch (kind) {
        case EntryKind::gaussian:
            return normal_quantile(u);
        case EntryKind::bernoulli_symmetric:
            return u < 0.5 ? -1.0 : 1.0;
        case EntryKind::uniform_centered:
            return (2.0 * u - 1.0) * kSqrt3;
        case EntryKind::three_point_matched:
        case EntryKind::custom_discrete: {
            double acc = 0.0;
            for (const auto& [v, p] : atoms) {
                acc += p;
                if (u <= acc) return v;
            }
            return atoms.back().first;
        }
    }
    throw std::logic_error("EntryDistribution: unknown kind");
}

static std::array<double, 4> atom_moments(const std::vector<std::pair<double, double>>& atoms) {
    std::array<double, 4> m{0, 0, 0, 0};
    for (const auto& [v, p] : atoms) {
        m[0] += p * v;
        m[1] += p * v * v;
        m[2] += p * v * v * v;
        m[3] += p * v * v * v * v;
    }
    return m;
}

EntryDistribution EntryDistribution::gaussian() {
    EntryDistribution d;
    d.kind = EntryKind::gaussian;
    d.moments = {0.0, 1.0, 0.0, 3.0};
    return d;
}

EntryDistribution EntryDistribution::bernoulli_symmetric() {
    EntryDistribution d;
    d.kind = EntryKind::bernoulli_symmetric;
    d.moments = {0.0, 1.0, 0.0, 1.0};
    return d;
}

EntryDistribution EntryDistribution::uniform_centered() {
    EntryDistribution d;
    d.kind = EntryKind::uniform_centered;
    d.moments = {0.0, 1.0, 0.0, 1.8};
    return d;
}

EntryDistribution EntryDistribution::custom_discrete(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) throw std::invalid_argument("custom_discrete: no atoms");
    double psum = 0.0;
    for (const auto& [v, p] : atoms) {
        if (!std::isfinite(v) || !(p >= 0.0))
            throw std::invalid_argument("custom_discrete: bad atom");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-12)
        throw std::invalid_argument("custom_discrete: probabilities must sum to 1");
    EntryDistribution d;
    d.kind = EntryKind::custom_discrete;
    d.atoms = std::move(atoms);
    d.moments = atom_moments(d.atoms);
    if (std::abs(d.moments[0]) > 1e-12 || std::abs(d.moments[1] - 1.0) > 1e-12)
        throw std::invalid_argument("custom_discrete: law must be standardized (m1=0, m2=1)");
    return d;
}

std::string EntryDistribution::name() const {
    switch (kind) {
        case EntryKind::gaussian: return "gaussian";
        case EntryKind::bernoulli_symmetric: return "bernoulli_symmetric";
        case EntryKind::uniform_centered: return "uniform_centered";
        case EntryKind::three_point_matched: return "three_point_matched";
        case EntryKind::custom_discrete: return "custom_discrete";
    }
    return "?";
}

EntryDistribution make_moment_matched_three_point() {
    // Symmetric three-atom law solving m2 = 1, m4 = 3: p a^2 * 2 = 1 and
    // p a^4 * 2 = 3 give a = sqrt(3), p = 1/6.
    EntryDistribution d;
    d.kind = EntryKind::three_point_matched;
    d.atoms = {{-kSqrt3, 1.0 / 6.0}, {0.0, 2.0 / 3.0}, {kSqrt3, 1.0 / 6.0}};
    d.moments = {0.0, 1.0, 0.0, 3.0};
    return d;
}

double VarianceProfile::row_sum_error() const {
    if (kind == Kind::flat) return std::abs(flat_scale - 1.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(sigma2.row(i).sum() - 1.0));
    return worst;
}

void VarianceProfile::validate() const {
    if (n <= 0) throw std::invalid_argument("VarianceProfile: dimension must be positive");
    if (kind == Kind::flat) {
        if (flat_scale != 1.0 && std::abs(flat_scale - 1.0) > 0.5)
            throw std::invalid_argument("VarianceProfile: flat scale out of range");
        return;
    }
    if (sigma2.rows() != n || sigma2.cols() != n)
        throw std::invalid_argument("VarianceProfile: matrix dimension mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            if (sigma2(i, j) < 0.0)
                throw std::invalid_argument("VarianceProfile: negative variance");
            if (std::abs(sigma2(i, j) - sigma2(j, i)) > 0.0)
                throw std::invalid_argument("VarianceProfile: not symmetric");
        }
    if (row_sum_error() > 1e-10)
        throw std::invalid_argument("VarianceProfile: row sums must equal 1 within 1e-10");
}

VarianceProfile VarianceProfile::flat(int n) {
    VarianceProfile p;
    p.kind = Kind::flat;
    p.n = n;
    return p;
}

VarianceProfile VarianceProfile::flat_scaled(int n, double scale) {
    VarianceProfile p;
    p.kind = Kind::flat;
    p.n = n;
    p.flat_scale = scale;
    p.c_inf = p.c_sup = scale;
    return p;
}

VarianceProfile VarianceProfile::generalized(Eigen::MatrixXd sigma2) {
    VarianceProfile p;
    p.kind = Kind::generalized;
    p.n = static_cast<int>(sigma2.rows());
    p.sigma2 = std::move(sigma2);
    p.c_inf = p.n * p.sigma2.minCoeff();
    p.c_sup = p.n * p.sigma2.maxCoeff();
    p.validate();
    return p;
}

VarianceProfile VarianceProfile::band(int n, int width,
                                      const std::function<double(double)>& shape) {
    if (width <= 0) throw std::invalid_argument("band: width must be positive");
    if (width > n / 2) {
        VarianceProfile p = flat(n);
        p.warning = "band width exceeds N/2; degraded to flat profile";
        return p;
    }
    Eigen::MatrixXd s2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int d = std::abs(i - j);
            d = std::min(d, n - d); // periodic distance
            double f = shape(static_cast<double>(d) / width);
            if (f < 0.0) throw std::invalid_argument("band: shape must be nonnegative");
            s2(i, j) = f / width;
        }
    // Circulant rows all share the same sum; renormalize globally.
    double rs = s2.row(0).sum();
    if (rs <= 0.0) throw std::invalid_argument("band: shape has empty support");
    s2 /= rs;
    VarianceProfile p;
    p.kind = Kind::band;
    p.n = n;
    p.band_width = width;
    p.sigma2 = std::move(s2);
    p.c_inf = n * p.sigma2.minCoeff();
    p.c_sup = n * p.sigma2.maxCoeff();
    return p;
}

VarianceProfile VarianceProfile::band_indicator(int n, int width) {
    return band(n, width, [](double x) { return std::abs(x) <= 0.5 ? 1.0 : 0.0; });
}

void EnsembleSpec::validate() const {
    if (n <= 0) throw std::invalid_argument("EnsembleSpec: N must be positive");
    if (profile.n != n) throw std::invalid_argument("EnsembleSpec: profile dimension mismatch");
    profile.validate();
    if (std::abs(entries.moments[0]) > 1e-12 || std::abs(entries.moments[1] - 1.0) > 1e-12)
        throw std::invalid_argument("EnsembleSpec: entry law must be standardized");
    if (std::abs(complex_second_moment) > 1.0)
        throw std::invalid_argument("EnsembleSpec: complex_second_moment must lie in [-1, 1]");
    if (er) {
        double q = std::sqrt(er->p * n);
        if (std::abs(q - er->q) > 1e-9 * std::max(1.0, q))
            throw std::invalid_argument("EnsembleSpec: er.q != sqrt(pN)");
        double g = 1.0 / std::sqrt(1.0 - er->q * er->q / n);
        if (std::abs(g - er->gamma) > 1e-9 * g)
            throw std::invalid_argument("EnsembleSpec: er.gamma != (1-q^2/N)^{-1/2}");
    }
}

EnsembleSpec EnsembleSpec::goe(int n) {
    return wigner(n, Symmetry::real_symmetric, EntryDistribution::gaussian());
}

EnsembleSpec EnsembleSpec::gue(int n) {
    return wigner(n, Symmetry::complex_hermitian, EntryDistribution::gaussian());
}

EnsembleSpec EnsembleSpec::wigner(int n, Symmetry sym, EntryDistribution entries) {
    EnsembleSpec s;
    s.symmetry = sym;
    s.n = n;
    s.entries = std::move(entries);
    s.profile = VarianceProfile::flat(n);
    return s;
}

MatrixSample sample_wigner(const EnsembleSpec& spec, RngStream& rng) {
    spec.validate();
    const int n = spec.n;
    MatrixSample out;
    out.spec = spec;
    if (spec.symmetry == Symmetry::real_symmetric) {
        out.real.resize(n, n);
        for (int i = 0; i < n; ++i) {
            // Diagonal: real Gaussian at the profile variance (uniform choice
            // across entry kinds; the paper leaves the diagonal law free).
            out.real(i, i) = std::sqrt(spec.profile.at(i, i)) * rng.gaussian();
            for (int j = i + 1; j < n; ++j) {
                double v = std::sqrt(spec.profile.at(i, j)) * spec.entries.sample(rng);
                out.real(i, j) = v;
                out.real(j, i) = v;
            }
        }
    } else {
        out.cplx.resize(n, n);
        // E h^2 = c E|h|^2 through unequal part variances (1 +- c)/2.
        const double c = spec.complex_second_moment;
        const double wr = std::sqrt(0.5 * (1.0 + c));
        const double wi = std::sqrt(0.5 * (1.0 - c));
        for (int i = 0; i < n; ++i) {
            out.cplx(i, i) = std::sqrt(spec.profile.at(i, i)) * rng.gaussian();
            for (int j = i + 1; j < n; ++j) {
                double s = std::sqrt(spec.profile.at(i, j));
                std::complex<double> v(s * wr * spec.entries.sample(rng),
                                       s * wi * spec.entries.sample(rng));
                out.cplx(i, j) = v;
                out.cplx(j, i) = std::conj(v);
            }
        }
    }
    return out;
}

MatrixSample sample_erdos_renyi(int n, double p, RngStream& rng) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("erdos_renyi: p must be in (0,1]");
    double q = std::sqrt(p * n);
    if (q < 1.0)
        throw std::invalid_argument("erdos_renyi: q = sqrt(pN) < 1; graph too sparse for the gamma/q scaling");
    // p = 1 is the complete graph; no variance left to rescale.
    double gamma = (p < 1.0) ? 1.0 / std::sqrt(1.0 - p) : 1.0;
    double value = gamma / q;

    MatrixSample out;
    out.spec.symmetry = Symmetry::real_symmetric;
    out.spec.n = n;
    out.spec.entries = EntryDistribution::bernoulli_symmetric();
    out.spec.profile = VarianceProfile::flat(n);
    out.spec.er = ErParams{p, q, gamma};
    out.real.resize(n, n);
    for (int i = 0; i < n; ++i) {
        out.real(i, i) = (rng.uniform() <= p) ? value : 0.0;
        for (int j = i + 1; j < n; ++j) {
            double v = (rng.uniform() <= p) ? value : 0.0;
            out.real(i, j) = v;
            out.real(j, i) = v;
        }
    }
    return out;
}

MatrixSample sample_band(int n, int width, const std::function<double(double)>& shape,
                         RngStream& rng) {
    EnsembleSpec spec;
    spec.symmetry = Symmetry::real_symmetric;
    spec.n = n;
    spec.entries = EntryDistribution::gaussian();
    spec.profile = VarianceProfile::band(n, width, shape);
    return sample_wigner(spec, rng);
}

} // namespace rmtlab
