#include "rmtlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmtlab/compare.hpp"
#include "rmtlab/dbm.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/loggas.hpp"
#include "rmtlab/numeric.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/semicircle_law.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

ParsedConfig ParsedConfig::parse_string(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key");
        cfg.kv_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

ParsedConfig ParsedConfig::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    ParsedConfig cfg = parse_string(buf.str());
    cfg.content_hash = fnv1a(buf.str());
    return cfg;
}

std::string ParsedConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

int ParsedConfig::get_int(const std::string& key, int fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stoi(it->second);
}

double ParsedConfig::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stod(it->second);
}

uint64_t ParsedConfig::get_u64(const std::string& key, uint64_t fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stoull(it->second);
}

std::vector<int> ParsedConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    std::istringstream in(get(key));
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> ParsedConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(key));
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::string ParsedConfig::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << " = " << v << '\n';
    return out.str();
}

bool ExperimentReport::all_passed() const {
    for (const auto& r : rows)
        if (r.status == "fail") return false;
    return true;
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "experiment,statistic,n,e,eta,value,stderr,envelope,status,samples,seed\n";
    for (const auto& r : rows) {
        out << experiment << ',' << r.statistic << ',' << r.n << ',' << fmt(r.e) << ','
            << fmt(r.eta) << ',' << fmt(r.value) << ',' << fmt(r.stderr_) << ','
            << fmt(r.envelope) << ',' << r.status << ',' << r.samples << ',' << master_seed
            << '\n';
    }
    return out.str();
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["content_hash"] = content_hash;
    j["master_seed"] = master_seed;
    j["tool_version"] = tool_version;
    j["wall_seconds"] = wall_seconds;
    j["all_passed"] = all_passed();
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["statistic"] = r.statistic;
        row["n"] = r.n;
        row["e"] = r.e;
        row["eta"] = r.eta;
        row["value"] = r.value;
        row["stderr"] = r.stderr_;
        row["envelope"] = r.envelope;
        row["status"] = r.status;
        row["samples"] = r.samples;
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

Envelopes::Envelopes() {
    values_ = {
        {"semicircle.tr2_tol", 0.02},     {"semicircle.tr4_tol", 0.06},
        {"semicircle.tr6_tol", 0.2},      {"locallaw.slope_lo", -1.3},
        {"locallaw.slope_hi", -0.7},      {"locallaw.macro_tol", 0.02},
        {"locallaw.avg_factor", 10.0},    {"rigidity.slope_lo", -2.2},
        {"rigidity.slope_hi", -1.8},      {"rigidity.bulk_factor", 5.0},
        {"deloc.median_max", 25.0},       {"deloc.growth_exponent", 0.2},
        {"gaps.surmise_sup", 0.05},       {"gaps.wdgm_ks", 0.02},
        {"twopoint.pair_sup", 0.05},      {"twopoint.self_sup", 0.03},
        {"dbm.monotone_sigmas", 2.0},     {"dbm.t0_local_ks", 0.03},     {"loggas.tridiag_ks", 0.02},
        {"loggas.mcmc_ks", 0.05},         {"loggas.rigidity_slope_lo", -1.2},
        {"loggas.rigidity_slope_hi", -0.8}, {"loggas.beta_slope_match", 0.2},
        {"loggas.sumsq_tol", 0.05},       {"loggas.density_ks", 0.03},
        {"loggas.eq_residual", 1e-4},     {"loop.residual_sigmas", 3.0},
        {"loop.trend_lo", -2.3},          {"loop.trend_hi", -1.7},
        {"conditional.ks", 0.1},          {"conditional.k1_ks", 0.02},
        {"conditional.self_ks", 0.03},    {"compare.telescope_tol", 1e-10},
        {"compare.update_tol", 1e-8},     {"compare.sign_test_min", 9.0},
        {"compare.three_moment_factor", 5.0}, {"flucavg.a_lo", -1.25},
        {"flucavg.a_hi", -0.75},          {"flucavg.b_lo", -0.65},
        {"flucavg.b_hi", -0.35},          {"flucavg.meanz_sigmas", 4.0},
        {"edge.ks", 0.07},                {"er.lambda_rel", 0.01},
        {"er.edge_ks", 0.1},              {"hs.residual", 1e-4},
        {"hs.far_residual", 1e-6},
    };
}

double Envelopes::get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw std::invalid_argument("Envelopes: unknown constant " + name);
    return it->second;
}

void Envelopes::load_overrides(const ParsedConfig& cfg) {
    for (auto& [name, v] : values_) {
        std::string key = "envelopes." + name;
        if (cfg.has(key)) v = cfg.get_double(key, v);
    }
}

namespace {

// ---------------------------------------------------------------- helpers

EntryDistribution entries_from_name(const std::string& name) {
    if (name == "gaussian") return EntryDistribution::gaussian();
    if (name == "bernoulli" || name == "bernoulli_symmetric")
        return EntryDistribution::bernoulli_symmetric();
    if (name == "uniform" || name == "uniform_centered")
        return EntryDistribution::uniform_centered();
    if (name == "three_point" || name == "three_point_matched")
        return make_moment_matched_three_point();
    throw std::invalid_argument("unknown entry distribution '" + name + "'");
}

EnsembleSpec spec_from_config(const ParsedConfig& cfg, int n) {
    EnsembleSpec spec;
    std::string sym = cfg.get("ensemble.symmetry", "real_symmetric");
    if (sym == "real_symmetric")
        spec.symmetry = Symmetry::real_symmetric;
    else if (sym == "complex_hermitian")
        spec.symmetry = Symmetry::complex_hermitian;
    else
        throw std::invalid_argument("unknown symmetry '" + sym + "'");
    spec.n = n;
    spec.entries = entries_from_name(cfg.get("ensemble.entries", "gaussian"));
    std::string prof = cfg.get("ensemble.profile", "flat");
    if (prof == "flat")
        spec.profile = VarianceProfile::flat(n);
    else if (prof == "flat_scaled")
        spec.profile = VarianceProfile::flat_scaled(n, cfg.get_double("ensemble.scale", 1.0));
    else if (prof == "band")
        spec.profile = VarianceProfile::band_indicator(n, cfg.get_int("ensemble.band_width", n / 8));
    else
        throw std::invalid_argument("unknown profile '" + prof + "'");
    spec.validate();
    return spec;
}

ReportRow make_row(const std::string& stat, double value, double envelope, bool pass, int n = 0,
                   int samples = 0, double se = 0.0, double e = 0.0, double eta = 0.0) {
    ReportRow r;
    r.statistic = stat;
    r.value = value;
    r.envelope = envelope;
    r.status = pass ? "pass" : "fail";
    r.n = n;
    r.samples = samples;
    r.stderr_ = se;
    r.e = e;
    r.eta = eta;
    return r;
}

ReportRow info_row(const std::string& stat, double value, int n = 0, int samples = 0,
                   double se = 0.0, double e = 0.0, double eta = 0.0) {
    ReportRow r;
    r.statistic = stat;
    r.value = value;
    r.status = "info";
    r.n = n;
    r.samples = samples;
    r.stderr_ = se;
    r.e = e;
    r.eta = eta;
    return r;
}

std::vector<Eigen::VectorXd> collect_eigenvalues(const EnsembleSpec& spec, int samples,
                                                 uint64_t seed, const char* label, int threads) {
    std::vector<Eigen::VectorXd> out(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), label);
        auto h = sample_wigner(spec, rng);
        out[s] = eigen_decompose(h, false).eigenvalues;
    });
    return out;
}

std::vector<double> pooled_bulk_gaps(const std::vector<Eigen::VectorXd>& eigs, int n,
                                     double window_b = 0.5) {
    auto law = EquilibriumLaw::semicircle();
    std::vector<double> pool;
    for (const auto& ev : eigs) {
        auto g = unfold(ev, n, law, 0.0, window_b);
        pool.insert(pool.end(), g.gaps.begin(), g.gaps.end());
    }
    return pool;
}

// ------------------------------------------------------------- experiments

ExperimentReport exp_semicircle(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                                int threads) {
    ExperimentReport rep;
    const bool want_moments = cfg.get_int("semicircle.moments", 1) != 0;
    const bool want_local_law = cfg.get_int("local_law.enabled", 1) != 0;
    const int n = cfg.get_int("ensemble.n", 1000);
    const int samples = cfg.get_int("run.samples", 50);
    EnsembleSpec spec = spec_from_config(cfg, n);

    if (want_moments) {
    std::vector<double> m2(samples), m4(samples), m6(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), "semicircle");
        auto ev = eigen_decompose(sample_wigner(spec, rng), false).eigenvalues;
        double s2 = 0, s4 = 0, s6 = 0;
        for (int j = 0; j < n; ++j) {
            double l2 = ev(j) * ev(j);
            s2 += l2;
            s4 += l2 * l2;
            s6 += l2 * l2 * l2;
        }
        m2[s] = s2 / n;
        m4[s] = s4 / n;
        m6[s] = s6 / n;
    });
    // Catalan moments of the semicircle: 1, 2, 5.
    double v2 = mean(m2), v4 = mean(m4), v6 = mean(m6);
    rep.rows.push_back(make_row("trace_h2_mean", v2, env.get("semicircle.tr2_tol"),
                                std::abs(v2 - 1.0) <= env.get("semicircle.tr2_tol"), n, samples,
                                stderr_mean(m2)));
    rep.rows.push_back(make_row("trace_h4_mean", v4, env.get("semicircle.tr4_tol"),
                                std::abs(v4 - 2.0) <= env.get("semicircle.tr4_tol"), n, samples,
                                stderr_mean(m4)));
    rep.rows.push_back(make_row("trace_h6_mean", v6, env.get("semicircle.tr6_tol"),
                                std::abs(v6 - 5.0) <= env.get("semicircle.tr6_tol"), n, samples,
                                stderr_mean(m6)));
    }

    if (!want_local_law) return rep;

    // Local-law scaling sweep: eta = N^{exponent} at E = 0.
    auto sweep = cfg.get_int_list("local_law.n_sweep");
    if (sweep.empty()) sweep = {250, 500, 1000};
    const double expo = cfg.get_double("local_law.eta_exponent", -0.8);
    auto samples_sweep = cfg.get_int_list("local_law.samples_sweep");
    if (samples_sweep.size() != sweep.size())
        samples_sweep.assign(sweep.size(), cfg.get_int("local_law.samples", 40));
    std::vector<double> log_neta, log_med;
    for (size_t si = 0; si < sweep.size(); ++si) {
        int nn = sweep[si];
        int ll_samples = samples_sweep[si];
        EnsembleSpec s2cfg = spec_from_config(cfg, nn);
        double eta = std::pow(nn, expo);
        std::vector<Complex> grid{Complex(0.0, eta)};
        auto pts = local_law_report(s2cfg, grid, ll_samples, seed, false, threads);
        const auto& p = pts[0];
        double factor = env.get("locallaw.avg_factor");
        rep.rows.push_back(make_row("local_law_med_err", p.med_m_err, factor * p.envelope_avg,
                                    p.med_m_err <= factor * p.envelope_avg, nn, ll_samples,
                                    p.med_m_err_se, 0.0, eta));
        log_neta.push_back(std::log(nn * eta));
        log_med.push_back(std::log(p.med_m_err));
    }
    auto fit = fit_line(log_neta, log_med);
    bool slope_ok = fit.slope >= env.get("locallaw.slope_lo") && fit.slope <= env.get("locallaw.slope_hi");
    rep.rows.push_back(make_row("local_law_slope", fit.slope, env.get("locallaw.slope_hi"),
                                slope_ok, 0, samples_sweep.back(), fit.slope_stderr));

    // Macroscopic regime: eta = 10 at the largest sweep N.
    {
        int nn = sweep.back();
        EnsembleSpec s3 = spec_from_config(cfg, nn);
        std::vector<Complex> grid{Complex(0.0, 10.0)};
        auto pts = local_law_report(s3, grid, 10, seed + 1, false, threads);
        rep.rows.push_back(make_row("local_law_macroscopic", pts[0].med_m_err,
                                    env.get("locallaw.macro_tol"),
                                    pts[0].med_m_err <= env.get("locallaw.macro_tol"), nn, 10,
                                    pts[0].med_m_err_se, 0.0, 10.0));
    }
    return rep;
}

ExperimentReport exp_rigidity(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                              int threads) {
    ExperimentReport rep;
    auto sweep = cfg.get_int_list("ensemble.n_sweep");
    if (sweep.empty()) sweep = {250, 500, 1000, 2000};
    const int samples = cfg.get_int("run.samples", 32);

    std::vector<double> log_n, log_q;
    double bulk_med_at_max = 0.0;
    int n_max = *std::max_element(sweep.begin(), sweep.end());
    int bulk_n = cfg.get_int("rigidity.bulk_n", 1000);
    for (int nn : sweep) {
        EnsembleSpec spec = spec_from_config(cfg, nn);
        auto r = rigidity_report(spec, samples, seed, threads);
        rep.rows.push_back(info_row("rigidity_q", r.q_mean, nn, samples, r.q_se));
        rep.rows.push_back(info_row("rigidity_max_scaled_dev", median(r.max_scaled_dev), nn, samples));
        if (nn == bulk_n || (bulk_n > n_max && nn == n_max)) bulk_med_at_max = r.med_center_dev;
        log_n.push_back(std::log(nn));
        log_q.push_back(std::log(r.q_mean));
    }
    auto fit = fit_line(log_n, log_q);
    rep.rows.push_back(make_row("rigidity_q_slope", fit.slope, env.get("rigidity.slope_hi"),
                                fit.slope >= env.get("rigidity.slope_lo") &&
                                    fit.slope <= env.get("rigidity.slope_hi"),
                                0, samples, fit.slope_stderr));
    double envlp = env.get("rigidity.bulk_factor") * std::log(static_cast<double>(bulk_n)) / bulk_n;
    rep.rows.push_back(make_row("rigidity_bulk_median", bulk_med_at_max, envlp,
                                bulk_med_at_max <= envlp, bulk_n, samples));
    return rep;
}

ExperimentReport exp_deloc(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                           int threads) {
    ExperimentReport rep;
    auto sweep = cfg.get_int_list("ensemble.n_sweep");
    if (sweep.empty()) sweep = {250, 500, 1000};
    const int samples = cfg.get_int("run.samples", 160);

    std::vector<double> log_n, log_med;
    double med_at_max = 0.0;
    int n_max = *std::max_element(sweep.begin(), sweep.end());
    for (int nn : sweep) {
        EnsembleSpec spec = spec_from_config(cfg, nn);
        auto r = delocalization_report(spec, samples, seed, threads);
        rep.rows.push_back(info_row("deloc_median", r.med, nn, samples, r.med_se));
        if (nn == n_max) med_at_max = r.med;
        log_n.push_back(std::log(nn));
        log_med.push_back(std::log(r.med));
    }
    rep.rows.push_back(make_row("deloc_median_max_n", med_at_max, env.get("deloc.median_max"),
                                med_at_max <= env.get("deloc.median_max"), n_max, samples));
    auto fit = fit_line(log_n, log_med);
    rep.rows.push_back(make_row("deloc_growth_slope", fit.slope, env.get("deloc.growth_exponent"),
                                fit.slope <= env.get("deloc.growth_exponent"), 0, samples,
                                fit.slope_stderr));
    return rep;
}

ExperimentReport exp_gaps(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                          int threads) {
    ExperimentReport rep;
    const bool want_surmise = cfg.get_int("gaps.surmise", 1) != 0;
    const bool want_wdgm = cfg.get_int("gaps.wdgm", 1) != 0;
    const bool want_poisson = cfg.get_int("gaps.poisson_diagnostic", 1) != 0;
    // --- Wigner surmise sup-norm on pooled GOE bulk gaps.
    if (want_surmise) {
        const int n = cfg.get_int("surmise.n", 1000);
        const int samples = cfg.get_int("surmise.samples", 34);
        EnsembleSpec goe = EnsembleSpec::goe(n);
        auto eigs = collect_eigenvalues(goe, samples, seed, "gaps-goe", threads);
        auto pool = pooled_bulk_gaps(eigs, n);
        auto hist = gap_histogram(pool, 20, 5.0);
        double sup = 0.0;
        for (size_t b = 0; b < hist.density.size(); ++b) {
            double lo = hist.edges[b], hi = hist.edges[b + 1];
            // Bin-averaged surmise via its closed CDF 1 - exp(-pi s^2/4).
            double pbar = (std::exp(-0.25 * M_PI * lo * lo) - std::exp(-0.25 * M_PI * hi * hi)) /
                          (hi - lo);
            sup = std::max(sup, std::abs(hist.density[b] - pbar));
        }
        rep.rows.push_back(make_row("surmise_sup_norm", sup, env.get("gaps.surmise_sup"),
                                    sup <= env.get("gaps.surmise_sup"), n,
                                    static_cast<int>(pool.size())));
        rep.rows.push_back(info_row("surmise_mean_gap", mean(pool), n, static_cast<int>(pool.size())));

        // Repulsion ordering: GUE density near zero sits below GOE's.
        const int gue_samples = cfg.get_int("surmise.gue_samples", 12);
        auto gue_eigs = collect_eigenvalues(EnsembleSpec::gue(n), gue_samples, seed, "gaps-gue", threads);
        auto gue_pool = pooled_bulk_gaps(gue_eigs, n);
        auto gue_hist = gap_histogram(gue_pool, 20, 5.0);
        rep.rows.push_back(make_row("repulsion_gue_below_goe", gue_hist.density[1], hist.density[1],
                                    gue_hist.density[1] < hist.density[1], n,
                                    static_cast<int>(gue_pool.size())));
    }
    // --- Wigner-Dyson-Gaudin-Mehta class comparisons.
    if (want_wdgm) {
        const int n = cfg.get_int("wdgm.n", 2000);
        const int samples = cfg.get_int("wdgm.samples", 20);
        auto goe = collect_eigenvalues(EnsembleSpec::goe(n), samples, seed, "wdgm-goe", threads);
        auto ber = collect_eigenvalues(
            EnsembleSpec::wigner(n, Symmetry::real_symmetric, EntryDistribution::bernoulli_symmetric()),
            samples, seed, "wdgm-ber", threads);
        double ks1 = ks_distance(pooled_bulk_gaps(ber, n), pooled_bulk_gaps(goe, n));
        rep.rows.push_back(make_row("wdgm_ks_bernoulli_goe", ks1, env.get("gaps.wdgm_ks"),
                                    ks1 <= env.get("gaps.wdgm_ks"), n, samples));

        auto gue = collect_eigenvalues(EnsembleSpec::gue(n), samples, seed, "wdgm-gue", threads);
        auto tp = collect_eigenvalues(
            EnsembleSpec::wigner(n, Symmetry::complex_hermitian, make_moment_matched_three_point()),
            samples, seed, "wdgm-tp", threads);
        double ks2 = ks_distance(pooled_bulk_gaps(tp, n), pooled_bulk_gaps(gue, n));
        rep.rows.push_back(make_row("wdgm_ks_threepoint_gue", ks2, env.get("gaps.wdgm_ks"),
                                    ks2 <= env.get("gaps.wdgm_ks"), n, samples));
    }
    // --- Poisson diagnostic: iid points show no level repulsion.
    if (want_poisson) {
        const int n = 1000, samples = 12;
        auto law = EquilibriumLaw::semicircle();
        std::vector<double> pool;
        for (int s = 0; s < samples; ++s) {
            RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), "gaps-poisson");
            std::vector<double> pts(n);
            // iid draws from the semicircle law itself, so the unfolding is exact.
            for (auto& x : pts) x = law.quantile(rng.uniform());
            std::sort(pts.begin(), pts.end());
            Eigen::VectorXd ev = Eigen::Map<Eigen::VectorXd>(pts.data(), n);
            auto g = unfold(ev, n, law, 0.0, 0.5);
            pool.insert(pool.end(), g.gaps.begin(), g.gaps.end());
        }
        auto hist = gap_histogram(pool, 20, 5.0);
        ReportRow r = info_row("poisson_no_repulsion", hist.density[0], n,
                               static_cast<int>(pool.size()));
        r.envelope = hist.density[4]; // density near s = 1 for comparison
        rep.rows.push_back(r);
    }
    return rep;
}

ExperimentReport exp_twopoint(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                              int threads) {
    ExperimentReport rep;
    const int n = cfg.get_int("ensemble.n", 500);
    const int samples = cfg.get_int("run.samples", 600);
    const int bins = cfg.get_int("twopoint.bins", 25);
    auto law = EquilibriumLaw::semicircle();

    auto gue = collect_eigenvalues(EnsembleSpec::gue(n), samples, seed, "twopoint-gue", threads);

    // Gaussian-divisible complex Bernoulli at t = 0.5 (same symmetry class).
    EnsembleSpec ber = EnsembleSpec::wigner(n, Symmetry::complex_hermitian,
                                            EntryDistribution::bernoulli_symmetric());
    std::vector<Eigen::VectorXd> flow(samples);
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), "twopoint-flow");
        auto h0 = sample_wigner(ber, rng);
        auto ht = ou_matrix_flow(h0, cfg.get_double("twopoint.t", 0.5), rng);
        flow[s] = eigen_decompose(ht, false).eigenvalues;
    });

    auto corr_gue = two_point_window_correlation(gue, n, law, 0.0, 0.5, bins);
    auto corr_flow = two_point_window_correlation(flow, n, law, 0.0, 0.5, bins);
    double sup = 0.0;
    for (size_t b = 0; b < corr_gue.value.size(); ++b)
        sup = std::max(sup, std::abs(corr_gue.value[b] - corr_flow.value[b]));
    rep.rows.push_back(make_row("twopoint_gue_vs_flow_sup", sup, env.get("twopoint.pair_sup"),
                                sup <= env.get("twopoint.pair_sup"), n, samples));

    // Split-half self-consistency.
    std::vector<Eigen::VectorXd> half_a(gue.begin(), gue.begin() + samples / 2);
    std::vector<Eigen::VectorXd> half_b(gue.begin() + samples / 2, gue.end());
    auto corr_a = two_point_window_correlation(half_a, n, law, 0.0, 0.5, bins);
    auto corr_b = two_point_window_correlation(half_b, n, law, 0.0, 0.5, bins);
    double sup_self = 0.0;
    for (size_t b = 0; b < corr_a.value.size(); ++b)
        sup_self = std::max(sup_self, std::abs(corr_a.value[b] - corr_b.value[b]));
    rep.rows.push_back(make_row("twopoint_self_split_sup", sup_self, env.get("twopoint.self_sup"),
                                sup_self <= env.get("twopoint.self_sup"), n, samples));

    // Poisson diagnostic: flat correlation about 1 away from zero separation.
    {
        const int psamples = 50;
        std::vector<Eigen::VectorXd> pts(psamples);
        for (int s = 0; s < psamples; ++s) {
            RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), "twopoint-poisson");
            std::vector<double> x(n);
            for (auto& v : x) v = law.quantile(rng.uniform());
            std::sort(x.begin(), x.end());
            pts[s] = Eigen::Map<Eigen::VectorXd>(x.data(), n);
        }
        auto corr = two_point_window_correlation(pts, n, law, 0.0, 0.5);
        double dev = 0.0;
        for (size_t b = 4; b < corr.value.size(); ++b)
            dev = std::max(dev, std::abs(corr.value[b] - 1.0));
        rep.rows.push_back(info_row("twopoint_poisson_flatness", dev, n, psamples));
    }
    return rep;
}

ExperimentReport exp_dbm_relax(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                               int threads) {
    ExperimentReport rep;
    const int n = cfg.get_int("ensemble.n", 1000);
    const int samples = cfg.get_int("run.samples", 80);
    std::vector<double> t_grid = cfg.get_double_list("dbm.t_grid");
    if (t_grid.empty()) t_grid = {0.0, 1.0 / n, 0.01, 0.1, 1.0, 3.0};

    EnsembleSpec ber = EnsembleSpec::wigner(n, Symmetry::real_symmetric,
                                            EntryDistribution::bernoulli_symmetric());
    auto rows = relaxation_experiment(ber, t_grid, samples, seed, threads);
    for (const auto& r : rows) {
        rep.rows.push_back(info_row("dbm_ks_local", r.ks_local, n, samples, r.ks_local_err, r.t));
        rep.rows.push_back(info_row("dbm_ks_global", r.ks_global, n, samples, r.ks_global_err, r.t));
    }
    if (t_grid.front() == 0.0) {
        // Universality already at t = 0: the non-Gaussian seed's bulk gaps
        // match the Gaussian reference before any relaxation.
        rep.rows.push_back(make_row("dbm_local_ks_t0", rows[0].ks_local,
                                    env.get("dbm.t0_local_ks"),
                                    rows[0].ks_local <= env.get("dbm.t0_local_ks"), n, samples,
                                    rows[0].ks_local_err));
    }
    if (cfg.has("dbm.dump_path")) {
        // Single-trajectory eigenvalue dump: t, lambda_1..lambda_N per row.
        int dn = cfg.get_int("dbm.dump_n", 16);
        int dsteps = cfg.get_int("dbm.dump_steps", 100);
        double ddt = cfg.get_double("dbm.dump_dt", 1e-3);
        RngStream rng = seed_stream(seed, 0, "dbm-dump");
        DbmState st;
        st.beta = 1.0;
        st.lambda = classical_locations_sc(dn);
        std::ostringstream out;
        out << "t";
        for (int i = 1; i <= dn; ++i) out << ",lambda_" << i;
        out << '\n';
        for (int k = 0; k <= dsteps; ++k) {
            out << fmt(st.t);
            for (double x : st.lambda) out << ',' << fmt(x);
            out << '\n';
            if (k < dsteps) st = dbm_sde_step(st, ddt, rng);
        }
        std::ofstream f(cfg.get("dbm.dump_path"), std::ios::binary);
        if (!f) throw std::runtime_error("dbm dump: cannot open " + cfg.get("dbm.dump_path"));
        f << out.str();
        rep.rows.push_back(info_row("dbm_trajectory_dumped", dsteps, dn, 1));
    }
    bool monotone = true;
    double sig = env.get("dbm.monotone_sigmas");
    for (size_t k = 0; k + 1 < rows.size(); ++k) {
        double slack = sig * (rows[k].ks_local_err + rows[k + 1].ks_local_err);
        if (rows[k + 1].ks_local > rows[k].ks_local + slack) monotone = false;
    }
    rep.rows.push_back(make_row("dbm_local_monotone", monotone ? 1.0 : 0.0, 1.0, monotone, n,
                                samples));

    // Two-scale check on a seed with a perturbed global density: all entry
    // variances scaled by `detune` (deliberately breaks row normalization).
    const double detune = cfg.get_double("dbm.detune", 1.05);
    EnsembleSpec det = ber;
    det.profile = VarianceProfile::flat_scaled(n, detune);
    std::vector<double> two_t{1.0 / n, 1.0};
    auto drows = relaxation_experiment(det, two_t, samples, seed + 1, threads);
    rep.rows.push_back(info_row("dbm_detuned_global_early", drows[0].ks_global, n, samples,
                                drows[0].ks_global_err, drows[0].t));
    rep.rows.push_back(info_row("dbm_detuned_global_late", drows[1].ks_global, n, samples,
                                drows[1].ks_global_err, drows[1].t));
    bool two_scale = drows[1].ks_global < drows[0].ks_global;
    rep.rows.push_back(make_row("dbm_two_scale_separation", two_scale ? 1.0 : 0.0, 1.0, two_scale,
                                n, samples));
    return rep;
}

ExperimentReport exp_edge(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                          int threads) {
    ExperimentReport rep;
    const int n = cfg.get_int("ensemble.n", 500);
    const int samples = cfg.get_int("run.samples", 500);
    // Coupled draws (shared uniforms through the quantile transform, shared
    // Gaussian diagonal): the marginal edge laws are untouched while the
    // sampling noise of the CDF difference largely cancels.
    std::vector<Eigen::VectorXd> goe(samples), ber(samples);
    auto gdist = EntryDistribution::gaussian();
    auto bdist = EntryDistribution::bernoulli_symmetric();
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), "edge-pair");
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd hg(n, n), hb(n, n);
        for (int i = 0; i < n; ++i) {
            double d = scale * rng.gaussian();
            hg(i, i) = d;
            hb(i, i) = d;
            for (int j = i + 1; j < n; ++j) {
                double u = rng.uniform();
                double a = scale * gdist.quantile(u);
                double b = scale * bdist.quantile(u);
                hg(i, j) = hg(j, i) = a;
                hb(i, j) = hb(j, i) = b;
            }
        }
        goe[s] = eigen_decompose(hg, false).eigenvalues;
        ber[s] = eigen_decompose(hb, false).eigenvalues;
    });
    auto sa = edge_statistic(goe, EdgeWhich::largest);
    auto sb = edge_statistic(ber, EdgeWhich::largest);
    double ks = ks_distance(sa.values, sb.values);
    rep.rows.push_back(make_row("edge_ks_goe_bernoulli", ks, env.get("edge.ks"),
                                ks <= env.get("edge.ks"), n, samples));
    rep.rows.push_back(info_row("edge_goe_median", median(sa.values), n, samples));
    rep.rows.push_back(info_row("edge_bernoulli_median", median(sb.values), n, samples));
    return rep;
}

ExperimentReport exp_er(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                        int threads) {
    ExperimentReport rep;
    const int n = cfg.get_int("ensemble.n", 1000);
    const double p = cfg.get_double("ensemble.er_p", 0.1);
    const int samples = cfg.get_int("run.samples", 500);
    const int loc_samples = cfg.get_int("er.location_samples", 100);

    double q = std::sqrt(p * n), gamma = 1.0 / std::sqrt(1.0 - p);
    // Coupled ER / GOE pairs: each uniform drives both the adjacency
    // indicator and the Gaussian entry, so the two edge samples share their
    // sampling noise and the KS distance reads the distributional gap.
    std::vector<Eigen::VectorXd> er(samples), goe(samples);
    const double value = gamma / q;
    parallel_for(samples, threads, [&](int s) {
        RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), "er-pair");
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd ha(n, n), hg(n, n);
        auto gdist = EntryDistribution::gaussian();
        for (int i = 0; i < n; ++i) {
            double u = rng.uniform();
            ha(i, i) = (u > 1.0 - p) ? value : 0.0; // edge fires at large u: positive coupling
            hg(i, i) = scale * gdist.quantile(u);
            for (int j = i + 1; j < n; ++j) {
                double v = rng.uniform();
                double a = (v > 1.0 - p) ? value : 0.0;
                double g = scale * gdist.quantile(v);
                ha(i, j) = ha(j, i) = a;
                hg(i, j) = hg(j, i) = g;
            }
        }
        er[s] = eigen_decompose(ha, false).eigenvalues;
        goe[s] = eigen_decompose(hg, false).eigenvalues;
    });

    double predicted = gamma * q + 1.0 / (gamma * q);
    std::vector<double> largest;
    for (int s = 0; s < loc_samples; ++s) largest.push_back(er[s](n - 1));
    double med_largest = median(largest);
    double rel = std::abs(med_largest - predicted) / predicted;
    rep.rows.push_back(make_row("er_largest_rel_err", rel, env.get("er.lambda_rel"),
                                rel <= env.get("er.lambda_rel"), n, loc_samples));
    rep.rows.push_back(info_row("er_largest_median", med_largest, n, loc_samples));
    rep.rows.push_back(info_row("er_largest_predicted", predicted, n, 0));

    auto s_er = edge_statistic(er, EdgeWhich::second_largest);
    auto s_goe = edge_statistic(goe, EdgeWhich::largest);
    double ks = ks_distance(s_er.values, s_goe.values);
    rep.rows.push_back(make_row("er_second_edge_ks_goe", ks, env.get("er.edge_ks"),
                                ks <= env.get("er.edge_ks"), n, samples));
    return rep;
}

ExperimentReport exp_loggas(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                            int threads) {
    ExperimentReport rep;
    const int n = cfg.get_int("loggas.n", 1000);
    const int tri_samples = cfg.get_int("loggas.tridiag_samples", 40);
    const int dense_samples = cfg.get_int("loggas.dense_samples", 20);
    auto law = EquilibriumLaw::semicircle();

    auto tridiag_gaps = [&](double beta, int nn, int count, const char* label) {
        std::vector<std::vector<double>> batches(count);
        parallel_for(count, threads, [&](int s) {
            RngStream rng = seed_stream(seed, static_cast<uint64_t>(s), label);
            auto ev = gaussian_beta_tridiagonal_sample(beta, nn, rng);
            batches[s] = unfold(ev, nn, law, 0.0, 0.5).gaps;
        });
        std::vector<double> pool;
        for (auto& b : batches) pool.insert(pool.end(), b.begin(), b.end());
        return pool;
    };

    // beta = 1 and beta = 2 against the dense Gaussian ensembles.
    {
        auto t1 = tridiag_gaps(1.0, n, tri_samples, "tri-b1");
        auto goe = collect_eigenvalues(EnsembleSpec::goe(n), dense_samples, seed, "tri-goe", threads);
        double ks1 = ks_distance(t1, pooled_bulk_gaps(goe, n));
        rep.rows.push_back(make_row("tridiag_beta1_vs_goe_ks", ks1, env.get("loggas.tridiag_ks"),
                                    ks1 <= env.get("loggas.tridiag_ks"), n, tri_samples));

        auto t2 = tridiag_gaps(2.0, n, tri_samples, "tri-b2");
        auto gue = collect_eigenvalues(EnsembleSpec::gue(n), dense_samples, seed, "tri-gue", threads);
        double ks2 = ks_distance(t2, pooled_bulk_gaps(gue, n));
        rep.rows.push_back(make_row("tridiag_beta2_vs_gue_ks", ks2, env.get("loggas.tridiag_ks"),
                                    ks2 <= env.get("loggas.tridiag_ks"), n, tri_samples));

        // Global checks: second moment and density against the semicircle CDF.
        RngStream rng = seed_stream(seed, 0, "tri-global");
        auto ev = gaussian_beta_tridiagonal_sample(2.0, n, rng);
        double sumsq = 0.0;
        for (int j = 0; j < n; ++j) sumsq += ev(j) * ev(j);
        sumsq /= n;
        rep.rows.push_back(make_row("tridiag_sum_sq", sumsq, env.get("loggas.sumsq_tol"),
                                    std::abs(sumsq - 1.0) <= env.get("loggas.sumsq_tol"), n, 1));
        std::vector<double> evv(ev.data(), ev.data() + n);
        double dks = ks_distance_cdf(evv, [](double x) { return cdf_sc(x); });
        rep.rows.push_back(make_row("tridiag_density_ks", dks, env.get("loggas.density_ks"),
                                    dks <= env.get("loggas.density_ks"), n, 1));
    }

    // MCMC route equivalence at (beta, V) = (2, quadratic), N = 200.
    {
        const int nm = cfg.get_int("loggas.mcmc_n", 200);
        LogGasSpec spec{2.0, Potential{}, nm};
        McmcParams params;
        params.burnin_sweeps = cfg.get_int("loggas.mcmc_burnin", 1500);
        params.thin_sweeps = cfg.get_int("loggas.mcmc_thin", 8);
        params.records = cfg.get_int("loggas.mcmc_records", 150);
        RngStream rng = seed_stream(seed, 0, "loggas-mcmc");
        auto res = loggas_mcmc_sample(spec, params, rng);
        std::vector<double> mcmc_pool;
        for (const auto& x : res.samples) {
            Eigen::Map<const Eigen::VectorXd> ev(x.data(), nm);
            auto g = unfold(ev, nm, law, 0.0, 0.5);
            mcmc_pool.insert(mcmc_pool.end(), g.gaps.begin(), g.gaps.end());
        }
        if (cfg.has("loggas.dump_path")) {
            std::ostringstream out;
            for (const auto& x : res.samples) {
                for (size_t i = 0; i < x.size(); ++i) out << (i ? "," : "") << fmt(x[i]);
                out << '\n';
            }
            std::ofstream f(cfg.get("loggas.dump_path"), std::ios::binary);
            if (!f) throw std::runtime_error("loggas dump: cannot open " + cfg.get("loggas.dump_path"));
            f << out.str();
        }
        auto tri_pool = tridiag_gaps(2.0, nm, 60, "tri-b2-small");
        double ks = ks_distance(mcmc_pool, tri_pool);
        rep.rows.push_back(make_row("mcmc_vs_tridiag_ks", ks, env.get("loggas.mcmc_ks"),
                                    ks <= env.get("loggas.mcmc_ks"), nm, params.records));
        rep.rows.push_back(info_row("mcmc_acceptance", res.acceptance, nm, params.records));
    }

    // Rigidity slopes per beta and their match.
    {
        auto sweep = cfg.get_int_list("loggas.rigidity_sweep");
        if (sweep.empty()) sweep = {250, 500, 1000};
        const int rs = cfg.get_int("loggas.rigidity_samples", 60);
        std::vector<double> slopes;
        for (double beta : {1.0, 2.0}) {
            std::vector<double> lx, ly;
            for (int nn : sweep) {
                auto r = loggas_rigidity_report(beta, nn, rs, seed, threads);
                lx.push_back(std::log(nn));
                ly.push_back(std::log(r.median_bulk_dev));
                rep.rows.push_back(info_row(beta == 1.0 ? "beta1_median_dev" : "beta2_median_dev",
                                            r.median_bulk_dev, nn, rs));
            }
            auto fit = fit_line(lx, ly);
            slopes.push_back(fit.slope);
            rep.rows.push_back(make_row(beta == 1.0 ? "beta1_rigidity_slope" : "beta2_rigidity_slope",
                                        fit.slope, env.get("loggas.rigidity_slope_hi"),
                                        fit.slope >= env.get("loggas.rigidity_slope_lo") &&
                                            fit.slope <= env.get("loggas.rigidity_slope_hi"),
                                        0, rs, fit.slope_stderr));
        }
        double mismatch = std::abs(slopes[0] - slopes[1]);
        rep.rows.push_back(make_row("beta_slope_match", mismatch, env.get("loggas.beta_slope_match"),
                                    mismatch <= env.get("loggas.beta_slope_match"), 0, rs));
    }

    // Equilibrium relation residual for the quartic law.
    {
        LogGasSpec spec{2.0, Potential{PotentialKind::quartic, 0.1}, n};
        auto eq = equilibrium_density(spec);
        double worst = 0.0;
        for (int k = 1; k <= 50; ++k) {
            double t = eq.a + (eq.b - eq.a) * k / 51.0;
            worst = std::max(worst, equilibrium_residual(eq, spec.potential, t));
        }
        rep.rows.push_back(make_row("equilibrium_residual_max", worst,
                                    env.get("loggas.eq_residual"),
                                    worst <= env.get("loggas.eq_residual"), n, 50));
    }
    return rep;
}

ExperimentReport exp_conditional(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                                 int /*threads*/) {
    ExperimentReport rep;
    const int n = cfg.get_int("conditional.n", 200);
    const int k = cfg.get_int("conditional.k", 32);
    const int l = cfg.get_int("conditional.l", (n - k) / 2);
    const double beta = cfg.get_double("conditional.beta", 2.0);
    const double c = cfg.get_double("conditional.quartic_c", 0.1);

    McmcParams params;
    params.burnin_sweeps = cfg.get_int("conditional.burnin", 4000);
    params.thin_sweeps = cfg.get_int("conditional.thin", 6);
    params.records = cfg.get_int("conditional.records", 400);

    rep.rows.push_back(info_row("conditional_k", k, n, 0));
    rep.rows.push_back(info_row("conditional_l", l, n, 0));
    rep.rows.push_back(info_row("conditional_beta", beta, n, 0));
    rep.rows.push_back(info_row("conditional_quartic_c", c, n, 0));

    // Quartic window against the Gaussian reference.
    ConditionalSpec cond{n, l, k, beta, Potential{PotentialKind::quartic, c}};
    auto res = conditional_measure_experiment(cond, params, seed);
    rep.rows.push_back(make_row("conditional_quartic_ks", res.ks, env.get("conditional.ks"),
                                res.ks <= env.get("conditional.ks"), n, params.records, res.ks_err));
    rep.rows.push_back(info_row("conditional_acceptance_mu", res.acceptance_mu, n, params.records));
    rep.rows.push_back(info_row("conditional_acceptance_sigma", res.acceptance_sigma, n,
                                params.records));
    rep.rows.push_back(info_row("conditional_affine_scale", res.affine_scale, n, 0));
    rep.rows.push_back(info_row("conditional_affine_shift", res.affine_shift, n, 0));

    // Self-comparison: quadratic V means mu_y and sigma_theta are the same law.
    ConditionalSpec self{n, l, k, beta, Potential{}};
    auto res_self = conditional_measure_experiment(self, params, seed + 1);
    rep.rows.push_back(make_row("conditional_self_ks", res_self.ks,
                                env.get("conditional.self_ks"),
                                res_self.ks <= env.get("conditional.self_ks"), n, params.records,
                                res_self.ks_err));

    // K = 1 exact-quadrature oracle.
    McmcParams p1;
    p1.burnin_sweeps = cfg.get_int("conditional.k1_burnin", 2000);
    p1.thin_sweeps = cfg.get_int("conditional.k1_thin", 20);
    p1.records = cfg.get_int("conditional.k1_records", 10000);
    ConditionalSpec cond1{n, cfg.get_int("conditional.k1_l", n / 2), 1, beta,
                          Potential{PotentialKind::quartic, c}};
    double k1 = conditional_k1_oracle_ks(cond1, p1, seed + 2);
    rep.rows.push_back(make_row("conditional_k1_oracle_ks", k1, env.get("conditional.k1_ks"),
                                k1 <= env.get("conditional.k1_ks"), n, p1.records));
    return rep;
}

ExperimentReport exp_loop(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                          int threads) {
    ExperimentReport rep;
    const int n = cfg.get_int("loggas.n", 200);
    const double beta = cfg.get_double("loggas.beta", 2.0);
    const int samples = cfg.get_int("run.samples", 10000);
    Complex z(cfg.get_double("loop.z_re", 0.0), cfg.get_double("loop.z_im", 2.0));

    LogGasSpec spec{beta, Potential{}, n};
    auto rows = loop_equation_residual(spec, {z}, samples, seed, threads);
    const auto& r = rows[0];
    double sig = env.get("loop.residual_sigmas");
    rep.rows.push_back(make_row("loop_residual", std::abs(r.residual), sig * r.residual_err,
                                std::abs(r.residual) <= sig * r.residual_err, n, samples,
                                r.residual_err, z.real(), z.imag()));
    rep.rows.push_back(info_row("loop_k_n", r.k_n, n, samples, 0.0, z.real(), z.imag()));
    rep.rows.push_back(info_row("loop_m_diff", std::abs(r.m_diff), n, samples, 0.0, z.real(),
                                z.imag()));

    // Size trend of the driving term: the equation itself (verified above)
    // gives |m_N - m| ~ |c_N / s|; the direct difference sits beneath the
    // Monte Carlo floor at these sample counts, so the trend is checked
    // through the measured k_N.
    auto sweep = cfg.get_int_list("loop.n_sweep");
    if (sweep.empty()) sweep = {100, 200, 400};
    const int sweep_samples = cfg.get_int("loop.sweep_samples", 10000);
    std::vector<double> lx, ly;
    for (int nn : sweep) {
        LogGasSpec sp{beta, Potential{}, nn};
        auto rr = loop_equation_residual(sp, {z}, sweep_samples, seed + nn, threads);
        auto eq = equilibrium_density(sp);
        double predicted = rr[0].k_n / (static_cast<double>(nn) * nn) / std::abs(eq.s(z));
        if (beta != 2.0) predicted += std::abs(rr[0].m_diff); // (2/beta - 1) term, reported only
        rep.rows.push_back(info_row("loop_predicted_mdiff", predicted, nn, sweep_samples));
        lx.push_back(std::log(nn));
        ly.push_back(std::log(predicted));
    }
    auto fit = fit_line(lx, ly);
    rep.rows.push_back(make_row("loop_trend_slope", fit.slope, env.get("loop.trend_hi"),
                                fit.slope >= env.get("loop.trend_lo") &&
                                    fit.slope <= env.get("loop.trend_hi"),
                                0, sweep_samples, fit.slope_stderr));
    return rep;
}

ExperimentReport exp_compare(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                             int threads) {
    ExperimentReport rep;
    // Telescoping identity on the swap machinery.
    {
        const int n = cfg.get_int("compare.swap_n", 100);
        const int samples = cfg.get_int("compare.swap_samples", 4);
        auto sum = swap_experiment(EntryDistribution::gaussian(),
                                   EntryDistribution::bernoulli_symmetric(), n, Complex(0.0, 1.0),
                                   samples, seed, threads);
        rep.rows.push_back(make_row("telescoping_residual", sum.telescoping_residual,
                                    env.get("compare.telescope_tol"),
                                    sum.telescoping_residual <= env.get("compare.telescope_tol"), n,
                                    samples));
        rep.rows.push_back(make_row("update_vs_fresh", sum.update_vs_fresh,
                                    env.get("compare.update_tol"),
                                    sum.update_vs_fresh <= env.get("compare.update_tol"), n,
                                    samples));
        rep.rows.push_back(info_row("swap_endpoint_diff", std::abs(sum.endpoint_diff), n, samples,
                                    sum.endpoint_diff_se));
        size_t stride = std::max<size_t>(1, sum.checkpoint_mean.size() / 10);
        for (size_t c = stride - 1; c < sum.checkpoint_mean.size(); c += stride) {
            ReportRow r = info_row("swap_profile_cumulative", std::abs(sum.checkpoint_mean[c]), n,
                                   samples);
            r.e = static_cast<double>(c + 1); // checkpoint index (every N swaps)
            rep.rows.push_back(r);
        }
    }

    // Moment-matching ordering: the 4-moment pair's trace difference must not
    // exceed the 3-moment pair's, one-sided sign test across seeds.
    {
        const int seeds = cfg.get_int("compare.seeds", 10);
        auto sweep = cfg.get_int_list("compare.n_sweep");
        if (sweep.empty()) sweep = {100, 200, 400};
        std::vector<int> samples_per_n = {400, 250, 120};
        if (sweep.size() != samples_per_n.size()) samples_per_n.assign(sweep.size(), 200);
        Complex z(0.0, 1.0);

        auto g = EntryDistribution::gaussian();
        auto b3 = EntryDistribution::bernoulli_symmetric(); // 3-moment match to Gaussian
        auto t4 = make_moment_matched_three_point();        // 4-moment match

        int majority_count = 0;
        std::vector<double> d3_at_200, se_at_200;
        for (int sd = 0; sd < seeds; ++sd) {
            int wins = 0;
            for (size_t k = 0; k < sweep.size(); ++k) {
                int nn = sweep[k], ns = samples_per_n[k];
                auto d3 = trace_difference_direct(g, b3, nn, z, ns, seed + 1000 * (sd + 1), threads);
                auto d4 = trace_difference_direct(g, t4, nn, z, ns, seed + 1000 * (sd + 1) + 500,
                                                  threads);
                if (std::abs(d4.mean_diff) <= std::abs(d3.mean_diff)) ++wins;
                if (nn == 200) {
                    d3_at_200.push_back(std::abs(d3.mean_diff));
                    se_at_200.push_back(d3.se);
                }
                if (sd == 0) {
                    rep.rows.push_back(info_row("compare_d3_abs", std::abs(d3.mean_diff), nn, ns,
                                                d3.se));
                    rep.rows.push_back(info_row("compare_d4_abs", std::abs(d4.mean_diff), nn, ns,
                                                d4.se));
                }
            }
            if (2 * wins > static_cast<int>(sweep.size())) ++majority_count;
        }
        double need = env.get("compare.sign_test_min");
        rep.rows.push_back(make_row("compare_sign_test", majority_count, need,
                                    majority_count >= need, 0, seeds));

        // Envelope from the pilot: |Delta E m| <= 5/N for the 3-moment pair.
        if (!d3_at_200.empty()) {
            double v = median(d3_at_200);
            double envl = env.get("compare.three_moment_factor") / 200.0;
            rep.rows.push_back(make_row("compare_d3_envelope_n200", v, envl, v <= envl, 200,
                                        static_cast<int>(d3_at_200.size())));
        }
    }

    // OU matching order rows (closed moment flow).
    {
        const int n = cfg.get_int("compare.ou_n", 1000);
        double t = 1.0 / n;
        auto m = ou_matching_check(EntryDistribution::bernoulli_symmetric(), t, n, 0.75);
        rep.rows.push_back(make_row("ou_matching_delta", m.max_delta, 0.75, m.holds, n, 0));
        rep.rows.push_back(info_row("ou_matching_gap_s4", m.gaps[3], n, 0));
    }
    return rep;
}

ExperimentReport exp_flucavg(const ParsedConfig& cfg, const Envelopes& env, uint64_t seed,
                             int threads) {
    ExperimentReport rep;
    auto sweep = cfg.get_int_list("ensemble.n_sweep");
    if (sweep.empty()) sweep = {50, 100, 200};
    const int samples = cfg.get_int("run.samples", 400);
    const double expo = cfg.get_double("flucavg.eta_exponent", -0.5);

    std::vector<double> lx, la, lb;
    double worst_meanz_sigmas = 0.0;
    for (int nn : sweep) {
        EnsembleSpec spec = EnsembleSpec::goe(nn);
        double eta = std::pow(nn, expo);
        auto r = fluctuation_averaging_report(spec, Complex(0.0, eta), samples, seed, threads);
        double med_a = median(r.a_values), med_b = median(r.b_values);
        rep.rows.push_back(info_row("flucavg_a_median", med_a, nn, samples,
                                    stderr_median(r.a_values), 0.0, eta));
        rep.rows.push_back(info_row("flucavg_b_median", med_b, nn, samples,
                                    stderr_median(r.b_values), 0.0, eta));
        lx.push_back(std::log(nn * eta));
        la.push_back(std::log(med_a));
        lb.push_back(std::log(med_b));
        if (r.mean_z_se > 0.0)
            worst_meanz_sigmas = std::max(worst_meanz_sigmas, std::abs(r.mean_z) / r.mean_z_se);
    }
    auto fa = fit_line(lx, la);
    auto fb = fit_line(lx, lb);
    rep.rows.push_back(make_row("flucavg_a_slope", fa.slope, env.get("flucavg.a_hi"),
                                fa.slope >= env.get("flucavg.a_lo") &&
                                    fa.slope <= env.get("flucavg.a_hi"),
                                0, samples, fa.slope_stderr));
    rep.rows.push_back(make_row("flucavg_b_slope", fb.slope, env.get("flucavg.b_hi"),
                                fb.slope >= env.get("flucavg.b_lo") &&
                                    fb.slope <= env.get("flucavg.b_hi"),
                                0, samples, fb.slope_stderr));
    rep.rows.push_back(make_row("flucavg_mean_z_sigmas", worst_meanz_sigmas,
                                env.get("flucavg.meanz_sigmas"),
                                worst_meanz_sigmas <= env.get("flucavg.meanz_sigmas"), 0, samples));
    return rep;
}

ExperimentReport exp_hs_check(const ParsedConfig& cfg, const Envelopes& env, uint64_t /*seed*/,
                              int /*threads*/) {
    ExperimentReport rep;
    const int grid = cfg.get_int("hs.grid", 400);
    double r0 = hs_identity_check(bump_c2, bump_c2_d1, bump_c2_d2, -1.0, 1.0, 0.0, grid);
    rep.rows.push_back(make_row("hs_residual_center", r0, env.get("hs.residual"),
                                r0 <= env.get("hs.residual"), grid, 0));
    double r5 = hs_identity_check(bump_c2, bump_c2_d1, bump_c2_d2, -1.0, 1.0, 5.0, grid);
    rep.rows.push_back(make_row("hs_residual_outside", r5, env.get("hs.far_residual"),
                                r5 <= env.get("hs.far_residual"), grid, 0));
    auto zero = [](double) { return 0.0; };
    double rz = hs_identity_check(zero, zero, zero, -1.0, 1.0, 0.0, grid);
    rep.rows.push_back(make_row("hs_residual_zero_f", rz, 0.0, rz == 0.0, grid, 0));
    return rep;
}

using ExperimentFn = ExperimentReport (*)(const ParsedConfig&, const Envelopes&, uint64_t, int);

const std::vector<std::pair<std::string, ExperimentFn>>& experiment_table() {
    static const std::vector<std::pair<std::string, ExperimentFn>> table = {
        {"semicircle", exp_semicircle}, {"rigidity", exp_rigidity},
        {"deloc", exp_deloc},           {"gaps", exp_gaps},
        {"twopoint", exp_twopoint},     {"dbm-relax", exp_dbm_relax},
        {"edge", exp_edge},             {"er", exp_er},
        {"loggas", exp_loggas},         {"conditional", exp_conditional},
        {"loop", exp_loop},             {"compare", exp_compare},
        {"flucavg", exp_flucavg},       {"hs-check", exp_hs_check},
    };
    return table;
}

} // namespace

std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& [n, fn] : experiment_table()) names.push_back(n);
    return names;
}

std::string ensemble_to_config(const EnsembleSpec& spec) {
    std::ostringstream out;
    out << "[ensemble]\n";
    out << "symmetry = "
        << (spec.symmetry == Symmetry::real_symmetric ? "real_symmetric" : "complex_hermitian")
        << '\n';
    out << "n = " << spec.n << '\n';
    out << "entries = " << spec.entries.name() << '\n';
    switch (spec.profile.kind) {
        case VarianceProfile::Kind::flat:
            if (spec.profile.flat_scale == 1.0) {
                out << "profile = flat\n";
            } else {
                out << "profile = flat_scaled\n";
                out << "scale = " << fmt(spec.profile.flat_scale) << '\n';
            }
            break;
        case VarianceProfile::Kind::band:
            out << "profile = band\n";
            out << "band_width = " << spec.profile.band_width << '\n';
            break;
        case VarianceProfile::Kind::generalized:
            throw std::invalid_argument("ensemble_to_config: generalized profiles carry a full matrix");
    }
    if (spec.er) out << "er_p = " << fmt(spec.er->p) << '\n';
    return out.str();
}

EnsembleSpec ensemble_from_config(const ParsedConfig& cfg, int n_fallback) {
    int n = cfg.get_int("ensemble.n", n_fallback);
    return spec_from_config(cfg, n);
}

void validate_config(const ParsedConfig& cfg) {
    std::string name = cfg.get("experiment");
    if (name.empty()) throw std::invalid_argument("config: missing 'experiment' key");
    bool known = false;
    for (const auto& [n, fn] : experiment_table()) known = known || (n == name);
    if (!known) throw std::invalid_argument("unknown experiment '" + name + "'");
    if (cfg.has("ensemble.n")) {
        EnsembleSpec spec = spec_from_config(cfg, cfg.get_int("ensemble.n", 100));
        spec.validate();
    }
    if (cfg.has("loggas.beta")) {
        LogGasSpec spec{cfg.get_double("loggas.beta", 2.0), Potential{}, cfg.get_int("loggas.n", 100)};
        spec.validate();
    }
    Envelopes env;
    env.load_overrides(cfg);
}

ExperimentReport run_experiment(const ParsedConfig& cfg, int threads) {
    std::string name = cfg.get("experiment");
    const ExperimentFn* fn = nullptr;
    for (const auto& [n, f] : experiment_table())
        if (n == name) fn = &f;
    if (!fn) throw std::invalid_argument("unknown experiment '" + name + "'");

    Envelopes env;
    env.load_overrides(cfg);
    uint64_t seed = cfg.get_u64("run.master_seed", 1);
    if (threads == 0) threads = cfg.get_int("run.threads", 0);

    auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep = (*fn)(cfg, env, seed, threads);
    auto t1 = std::chrono::steady_clock::now();

    rep.experiment = name;
    rep.master_seed = seed;
    rep.tool_version = kToolVersion;
    rep.config_hash = fnv1a(cfg.canonical());
    rep.content_hash = cfg.content_hash;
    rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    return rep;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"rmtlab: random-matrix universality experiments"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list-experiments", "list experiment names");

    std::string cfg_path, out_path, format = "csv";
    uint64_t seed_override = 0;
    bool seed_given = false;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", cfg_path, "config file (key = value sections)")->required();
    run->add_option("--seed", seed_override, "override run.master_seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--threads", threads, "worker threads (0 = auto / RMTLAB_THREADS)");
    run->add_option("--out", out_path, "output path (default: stdout)");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string val_path;
    auto* val = app.add_subcommand("validate", "validate a config file without sampling");
    val->add_option("config", val_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (list->parsed()) {
        for (const auto& n : experiment_names()) std::printf("%s\n", n.c_str());
        return 0;
    }

    if (val->parsed()) {
        try {
            validate_config(ParsedConfig::parse_file(val_path));
        } catch (const std::runtime_error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 4;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "invalid config: %s\n", e.what());
            return 3;
        }
        std::printf("ok\n");
        return 0;
    }

    ParsedConfig cfg;
    try {
        cfg = ParsedConfig::parse_file(cfg_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    if (seed_given) cfg.set("run.master_seed", std::to_string(seed_override));
    if (!out_path.empty()) cfg.set("output.path", out_path);
    if (format == "csv" || format == "json") cfg.set("output.format", format);
    else if (cfg.has("output.format")) format = cfg.get("output.format");

    ExperimentReport rep;
    try {
        rep = run_experiment(cfg, threads);
    } catch (const std::invalid_argument& e) {
        std::string what = e.what();
        std::fprintf(stderr, "error: %s\n", what.c_str());
        return what.find("unknown experiment") != std::string::npos ? 2 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }

    std::string body = (cfg.get("output.format", format) == "json") ? rep.to_json() : rep.to_csv();
    std::string target = cfg.get("output.path", out_path);
    if (target.empty()) {
        std::fputs(body.c_str(), stdout);
    } else {
        std::ofstream out(target, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "error: cannot open %s for writing\n", target.c_str());
            return 4;
        }
        out << body;
        if (!out) {
            std::fprintf(stderr, "error: write failed for %s\n", target.c_str());
            return 4;
        }
    }
    for (const auto& r : rep.rows)
        if (r.status == "fail")
            std::fprintf(stderr, "FAIL %s (value %.6g, envelope %.6g)\n", r.statistic.c_str(),
                         r.value, r.envelope);
    return rep.all_passed() ? 0 : 1;
}

} // namespace rmtlab
