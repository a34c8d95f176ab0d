// Acceptance suite: one numbered criterion per run, each printed as a single
// pass/fail line. Exit status is 0 iff every requested criterion passes.
#include <complex>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"

namespace {

using rmtlab::ParsedConfig;

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome run_config(const std::string& text, int threads = 0) {
    auto cfg = ParsedConfig::parse_string(text);
    auto rep = rmtlab::run_experiment(cfg, threads);
    Outcome out;
    out.pass = rep.all_passed();
    for (const auto& r : rep.rows) {
        if (r.status == "fail") {
            out.detail += " [" + r.statistic + " value=" + std::to_string(r.value) +
                          " envelope=" + std::to_string(r.envelope) + "]";
        }
    }
    return out;
}

Outcome criterion_1() {
    return run_config(R"(
experiment = semicircle
[semicircle]
moments = 1
[local_law]
enabled = 0
[ensemble]
n = 1000
[run]
samples = 50
master_seed = 1
)");
}

Outcome criterion_2() {
    return run_config(R"(
experiment = semicircle
[semicircle]
moments = 0
[local_law]
enabled = 1
n_sweep = 250,500,1000
samples_sweep = 2000,1000,500
eta_exponent = -0.8
[run]
master_seed = 2
)");
}

Outcome criterion_3() {
    return run_config(R"(
experiment = rigidity
[ensemble]
n_sweep = 250,500,1000,2000
[rigidity]
bulk_n = 1000
[run]
samples = 32
master_seed = 3
)");
}

Outcome criterion_4() {
    return run_config(R"(
experiment = deloc
[ensemble]
n_sweep = 250,500,1000
[run]
samples = 160
master_seed = 4
)");
}

Outcome criterion_5() {
    return run_config(R"(
experiment = gaps
[gaps]
surmise = 1
wdgm = 0
poisson_diagnostic = 1
[surmise]
n = 1000
samples = 34
[run]
master_seed = 5
)");
}

Outcome criterion_6() {
    return run_config(R"(
experiment = gaps
[gaps]
surmise = 0
wdgm = 1
poisson_diagnostic = 0
[wdgm]
n = 2000
samples = 20
[run]
master_seed = 6
)");
}

Outcome criterion_7() {
    return run_config(R"(
experiment = dbm-relax
[ensemble]
n = 1000
[run]
samples = 80
master_seed = 7
)");
}

Outcome criterion_8() {
    return run_config(R"(
experiment = loggas
[loggas]
n = 1000
tridiag_samples = 40
dense_samples = 20
mcmc_n = 200
[run]
master_seed = 8
)");
}

Outcome criterion_9() {
    return run_config(R"(
experiment = loop
[loggas]
beta = 2
n = 200
[loop]
z_re = 0
z_im = 2
n_sweep = 100,200,400
sweep_samples = 10000
[run]
samples = 10000
master_seed = 9
)");
}

Outcome criterion_10() {
    return run_config(R"(
experiment = conditional
[conditional]
n = 200
k = 32
beta = 2
quartic_c = 0.1
[run]
master_seed = 10
)");
}

Outcome criterion_11() {
    return run_config(R"(
experiment = compare
[compare]
n_sweep = 100,200,400
seeds = 10
[run]
master_seed = 11
)");
}

Outcome criterion_12() {
    return run_config(R"(
experiment = flucavg
[ensemble]
n_sweep = 50,100,200
[flucavg]
eta_exponent = -0.5
[run]
samples = 400
master_seed = 12
)");
}

Outcome criterion_13() {
    Outcome a = run_config(R"(
experiment = edge
[ensemble]
n = 500
[run]
samples = 500
master_seed = 13
)");
    Outcome b = run_config(R"(
experiment = er
[ensemble]
n = 1000
er_p = 0.1
[run]
samples = 500
master_seed = 13
)");
    Outcome out;
    out.pass = a.pass && b.pass;
    out.detail = a.detail + b.detail;
    return out;
}

Outcome criterion_14() {
    Outcome out;

    // Helffer-Sjostrand residual through the experiment surface.
    Outcome hs = run_config("experiment = hs-check\n[run]\nmaster_seed = 14\n");
    if (!hs.pass) {
        out.pass = false;
        out.detail += hs.detail;
    }

    // Byte-identical rerun and thread-count invariance on a sampled config.
    const char* tiny = R"(
experiment = semicircle
[ensemble]
n = 120
[run]
samples = 8
master_seed = 14
[local_law]
n_sweep = 100,120
samples = 10
)";
    auto cfg = ParsedConfig::parse_string(tiny);
    auto r1 = rmtlab::run_experiment(cfg, 1);
    auto r2 = rmtlab::run_experiment(cfg, 1);
    auto r8 = rmtlab::run_experiment(cfg, 8);
    if (r1.to_csv() != r2.to_csv()) {
        out.pass = false;
        out.detail += " [rerun not byte-identical]";
    }
    if (r1.to_csv() != r8.to_csv()) {
        out.pass = false;
        out.detail += " [thread-count dependence]";
    }

    // Ward and Schur identities on a fresh sample.
    {
        using Cx = std::complex<double>;
        rmtlab::RngStream rng = rmtlab::seed_stream(14, 0, "ci-identities");
        auto h = rmtlab::sample_wigner(rmtlab::EnsembleSpec::goe(60), rng);
        auto sp = rmtlab::eigen_decompose(h, true);
        std::vector<Cx> grid{Cx(0.2, 0.6)};
        auto res = rmtlab::resolvent(sp, grid, true);
        const auto& g = res.entries[0];
        for (int k = 0; k < 60; ++k) {
            double lhs = 0;
            for (int l = 0; l < 60; ++l) lhs += std::norm(g(k, l));
            double rhs = g(k, k).imag() / 0.6;
            if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(rhs))) {
                out.pass = false;
                out.detail += " [ward identity residual]";
                break;
            }
        }
        int i = 17;
        auto minor = rmtlab::minor_resolvent(h, i, grid, true);
        Eigen::VectorXd hrow(59);
        for (int k = 0, kk = 0; k < 60; ++k)
            if (k != i) hrow(kk++) = h.real(k, i);
        Cx quad(0, 0);
        for (int k = 0; k < 59; ++k)
            for (int l = 0; l < 59; ++l) quad += hrow(k) * minor.entries[0](k, l) * hrow(l);
        Cx gii = 1.0 / (h.real(i, i) - grid[0] - quad);
        if (std::abs(gii - g(i, i)) > 1e-9) {
            out.pass = false;
            out.detail += " [schur identity residual]";
        }
    }
    return out;
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "semicircle moments (Catalan oracle)", criterion_1},
    {2, "local law scaling slope", criterion_2},
    {3, "rigidity: Q slope and bulk median", criterion_3},
    {4, "eigenvector delocalization", criterion_4},
    {5, "Wigner surmise sup-norm", criterion_5},
    {6, "bulk gap universality across entry laws", criterion_6},
    {7, "DBM relaxation and two-scale separation", criterion_7},
    {8, "beta ensembles: tridiagonal, MCMC, rigidity", criterion_8},
    {9, "loop equation residual", criterion_9},
    {10, "conditional local measure", criterion_10},
    {11, "Green function comparison", criterion_11},
    {12, "fluctuation averaging slopes", criterion_12},
    {13, "edge universality and Erdos-Renyi", criterion_13},
    {14, "infrastructure: determinism, identities, HS", criterion_14},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }
    bool all_pass = true;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        Outcome out = c.fn();
        std::printf("[%s] criterion %d: %s%s\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
