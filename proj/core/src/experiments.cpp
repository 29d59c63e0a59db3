#include "supersde/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "supersde/field_io.hpp"
#include "supersde/multiplier.hpp"
#include "supersde/paraproduct.hpp"

namespace supersde {

namespace fs = std::filesystem;
using nlohmann::json;

ScalarField TestFunctionSpec::build(const TorusGrid& g) const {
    ScalarField f = ScalarField::zero(g);
    for (const auto& m : modes) f = f + ScalarField::cosine(g, m.k, m.amp, m.phase);
    return f;
}

std::string EtaSpec::label() const {
    switch (kind) {
        case Kind::Uniform: return "uniform";
        case Kind::Bump: return "bump_h" + format_double(height);
        case Kind::File: return "file:" + path;
    }
    return "?";
}

std::optional<ScalarField> EtaSpec::build(const TorusGrid& g) const {
    if (kind == Kind::Uniform) return std::nullopt;
    if (kind == Kind::File) {
        ScalarField f = read_field(path);
        if (f.grid() != g)
            throw std::invalid_argument("eta file grid does not match the run grid");
        return f;
    }
    // bump of prescribed peak height (relative to uniform) on a flat floor
    const double R = width * g.L;
    std::array<double, 3> c{0.5 * g.L, 0.5 * g.L, 0.5 * g.L};
    ScalarField shape = ScalarField::from_function(g, [&](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double d = g.wrap_diff(x[a], c[a]);
            r2 += d * d;
        }
        return smoothstep_down(std::sqrt(r2) / R);
    });
    const double smax = lp_norm(shape, kInf);
    const double sbar = shape.mean();
    // eta = (1 + w shape)/Z with w chosen so max eta = height * uniform
    const double w = (height - 1.0) / std::max(smax - height * sbar, 1e-12);
    std::vector<double> vals(shape.values().begin(), shape.values().end());
    double total = 0.0;
    for (auto& v : vals) {
        v = 1.0 + w * v;
        total += v;
    }
    total *= g.cell_volume();
    for (auto& v : vals) v /= total;
    return ScalarField(g, std::move(vals));
}

namespace {

// ------------------------------------------------------------------
// Blockwise common-random-numbers Monte Carlo over several drifts
// ------------------------------------------------------------------
struct McRunSpec {
    TorusGrid grid;
    std::vector<const VectorField*> drifts;
    const ScalarField* eta = nullptr;
    const ScalarField* f = nullptr;
    McParams mc;
    std::uint64_t seed = 1;
    const SingularSet* K = nullptr;
    std::vector<double> eps_list;          // hit thresholds
    double occupation_delta0 = 0.0;        // hitter gate for occupation stats
    std::vector<std::pair<int, int>> diff_pairs;  // (hi, lo) drift indices
};

struct McRunResult {
    std::vector<double> checkpoint_times;
    std::vector<std::vector<MeanCI>> f_mean;  // [drift][checkpoint]
    std::vector<std::vector<MeanCI>> diff;    // [pair][checkpoint] f_hi - f_lo
    std::vector<std::vector<MeanCI>> hit;     // [drift][eps]
    std::vector<std::vector<std::vector<double>>> hitter_occ;  // [drift][eps][..]
    std::int64_t paths = 0;
    double dt = 0.0;
};

McRunResult run_mc(const McRunSpec& spec) {
    const int nd = int(spec.drifts.size());
    const std::int64_t steps = std::int64_t(std::llround(spec.mc.T / spec.mc.dt));
    std::vector<std::int64_t> cps;
    for (int c = 1; c <= spec.mc.checkpoints; ++c)
        cps.push_back(std::max<std::int64_t>(1, steps * c / spec.mc.checkpoints));
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    const int ncp = int(cps.size());

    McRunResult res;
    res.dt = spec.mc.dt;
    for (std::int64_t k : cps) res.checkpoint_times.push_back(double(k) * spec.mc.dt);

    struct Sums {
        std::vector<double> s, s2;
    };
    std::vector<Sums> level(nd, Sums{std::vector<double>(ncp, 0.0),
                                     std::vector<double>(ncp, 0.0)});
    std::vector<Sums> pair(spec.diff_pairs.size(),
                           Sums{std::vector<double>(ncp, 0.0),
                                std::vector<double>(ncp, 0.0)});
    const int neps = int(spec.eps_list.size());
    std::vector<std::vector<std::int64_t>> hit_counts(
        nd, std::vector<std::int64_t>(neps, 0));
    res.hitter_occ.assign(nd, std::vector<std::vector<double>>(neps));

    const auto fv = spec.f->values();
    const std::int64_t block = spec.mc.block;
    const std::int64_t n_blocks = (spec.mc.paths + block - 1) / block;
    // per-path per-checkpoint f values for the current block, per drift
    std::vector<std::vector<double>> fbuf(nd);

    for (std::int64_t b = 0; b < n_blocks; ++b) {
        const std::int64_t lo = b * block;
        const std::int64_t count = std::min(block, spec.mc.paths - lo);
        for (int d = 0; d < nd; ++d) {
            SimConfig cfg;
            cfg.T = spec.mc.T;
            cfg.dt = spec.mc.dt;
            cfg.paths = count;
            cfg.seed = spec.seed;
            cfg.drift = spec.drifts[d];
            cfg.eta = spec.eta;
            cfg.path_offset = lo;
            cfg.grid = spec.grid;
            const PathEnsemble ens = euler_maruyama(cfg);

            auto& buf = fbuf[d];
            buf.assign(std::size_t(count) * ncp, 0.0);
            for (std::int64_t i = 0; i < count; ++i) {
                for (int c = 0; c < ncp; ++c) {
                    const double v = interpolate_multilinear(
                        spec.grid, fv, ens.path(i) + cps[c] * spec.grid.dim);
                    buf[i * ncp + c] = v;
                    level[d].s[c] += v;
                    level[d].s2[c] += v * v;
                }
                if (spec.K && !spec.K->empty()) {
                    double min_dist = kInf;
                    std::vector<std::int64_t> occ(neps, 0);
                    double x[3];
                    for (std::int64_t k = 0; k <= ens.steps(); ++k) {
                        ens.wrapped(i, k, x);
                        const double dist = spec.K->distance(ens.time_of(k), x);
                        min_dist = std::min(min_dist, dist);
                        for (int e = 0; e < neps; ++e)
                            if (dist < spec.eps_list[e]) ++occ[e];
                    }
                    for (int e = 0; e < neps; ++e) {
                        if (min_dist <= spec.eps_list[e]) ++hit_counts[d][e];
                        if (spec.occupation_delta0 > 0.0 &&
                            min_dist <= spec.occupation_delta0)
                            res.hitter_occ[d][e].push_back(double(occ[e]) * spec.mc.dt);
                    }
                }
            }
        }
        for (std::size_t pi = 0; pi < spec.diff_pairs.size(); ++pi) {
            const auto [dh, dl] = spec.diff_pairs[pi];
            for (std::int64_t i = 0; i < count; ++i)
                for (int c = 0; c < ncp; ++c) {
                    const double d = fbuf[dh][i * ncp + c] - fbuf[dl][i * ncp + c];
                    pair[pi].s[c] += d;
                    pair[pi].s2[c] += d * d;
                }
        }
    }

    res.paths = spec.mc.paths;
    res.f_mean.assign(nd, {});
    for (int d = 0; d < nd; ++d)
        for (int c = 0; c < ncp; ++c)
            res.f_mean[d].push_back(
                mean_ci_from_sums(level[d].s[c], level[d].s2[c], spec.mc.paths));
    res.diff.assign(spec.diff_pairs.size(), {});
    for (std::size_t pi = 0; pi < spec.diff_pairs.size(); ++pi)
        for (int c = 0; c < ncp; ++c)
            res.diff[pi].push_back(
                mean_ci_from_sums(pair[pi].s[c], pair[pi].s2[c], spec.mc.paths));
    res.hit.assign(nd, {});
    for (int d = 0; d < nd; ++d)
        for (int e = 0; e < neps; ++e)
            res.hit[d].push_back(mean_ci_from_sums(double(hit_counts[d][e]),
                                                   double(hit_counts[d][e]),
                                                   spec.mc.paths));
    return res;
}

// sup over checkpoints of |mean - target|, with the SE at the arg-sup
std::pair<double, double> sup_error(const std::vector<MeanCI>& means,
                                    const std::vector<double>& targets) {
    double best = -1.0, se = 0.0;
    for (std::size_t c = 0; c < means.size(); ++c) {
        const double e = std::abs(means[c].mean - targets[c]);
        if (e > best) {
            best = e;
            se = means[c].se;
        }
    }
    return {best, se};
}

double max_pointwise_drift(const AntisymmetricField& A) {
    return drift(A).max_pointwise_norm();
}

double auto_kbe_dt(const TorusGrid& g, const AntisymmetricField& A, double cap) {
    const double bmax = max_pointwise_drift(A);
    double dt = cap;
    if (bmax > 0.0) dt = std::min(dt, 0.125 * g.h() / bmax);  // half the CFL gate
    return dt;
}

}  // namespace

RateReport weak_rate(const RateConfig& cfg) {
    if (cfg.levels.size() < 4)
        throw std::invalid_argument("weak_rate: need at least 4 levels");
    std::vector<double> levels = cfg.levels;
    std::sort(levels.begin(), levels.end());

    const TorusGrid grid = cfg.drift.grid.make();
    const AntisymmetricField A = build_potential(cfg.drift);
    RateReport rep;
    rep.conditions = condition_report(cfg.drift, grid.dim);
    rep.beta_max = rep.conditions.beta_max;
    rep.oracle_mode = cfg.oracle == OracleMode::Kbe ? "kbe" : "self-difference";

    const ScalarField f = cfg.f.build(grid);
    rep.f_l2linf = std::max(lp_norm(f, 2.0), lp_norm(f, kInf));
    rep.b_norm =
        besov_norm(drift(A), BesovIndex(-cfg.drift.gamma, cfg.drift.p, kInf)).value;

    const auto eta_field = cfg.eta.build(grid);
    const ScalarField* eta = eta_field ? &*eta_field : nullptr;
    const InitialSampler init(grid, eta);
    rep.eta_prefactor = std::max(1.0, init.lq_norm(cfg.eta_q));

    // mollified drifts per level (plus the CRN partner 2 n_max in
    // self-difference mode)
    std::vector<double> sim_levels = levels;
    if (cfg.oracle == OracleMode::SelfDifference)
        sim_levels.push_back(2.0 * levels.back());
    std::vector<VectorField> drifts;
    drifts.reserve(sim_levels.size());
    for (double n : sim_levels) drifts.push_back(drift(mollify(A, Mollifier(grid.dim, n))));

    McRunSpec ms;
    ms.grid = grid;
    for (const auto& d : drifts) ms.drifts.push_back(&d);
    ms.eta = eta;
    ms.f = &f;
    ms.mc = cfg.mc;
    ms.seed = cfg.seed;
    if (cfg.oracle == OracleMode::SelfDifference)
        for (std::size_t i = 0; i + 1 < sim_levels.size(); ++i)
            ms.diff_pairs.emplace_back(int(i + 1), int(i));
    const McRunResult mc = run_mc(ms);

    std::vector<double> targets(mc.checkpoint_times.size(), 0.0);
    if (cfg.oracle == OracleMode::Kbe) {
        const double n_ref = cfg.n_ref.value_or(8.0 * levels.back());
        const AntisymmetricField A_ref = mollify(A, Mollifier(grid.dim, n_ref));
        KbeOptions ko;
        ko.T = cfg.mc.T;
        ko.dt = cfg.kbe_dt > 0.0 ? cfg.kbe_dt : auto_kbe_dt(grid, A_ref, cfg.mc.dt);
        ko.scheme = KbeScheme::Strang;
        ko.slice_times = mc.checkpoint_times;
        const KbeRun ref = solve_kbe(&A_ref, f, ko);
        for (std::size_t c = 0; c < targets.size(); ++c) {
            targets[c] = eta ? expectation_oracle(ref, *eta, mc.checkpoint_times[c])
                             : expectation_oracle_uniform(ref, mc.checkpoint_times[c]);
        }
    }

    double pooled_se_sq = 0.0;
    if (cfg.oracle == OracleMode::Kbe) {
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto [err, se] = sup_error(mc.f_mean[l], targets);
            LevelError row{levels[l], err, se,
                           std::max(0.0, err - 1.96 * se), err + 1.96 * se, true};
            rep.rows.push_back(row);
            pooled_se_sq += se * se;
        }
    } else {
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto [err, se] = sup_error(mc.diff[l], targets);  // targets are 0
            LevelError row{levels[l], err, se,
                           std::max(0.0, err - 1.96 * se), err + 1.96 * se, true};
            rep.rows.push_back(row);
            pooled_se_sq += se * se;
        }
        // geometric tail bound e_n <= sum_{i>=0} d_{2^i n} over available d's
        for (std::size_t l = 0; l < rep.rows.size(); ++l) {
            double s = 0.0;
            for (std::size_t j = l; j < rep.rows.size(); ++j) s += rep.rows[j].error;
            rep.tail_bound.push_back(s);
        }
    }

    rep.noise_floor = 2.0 * std::sqrt(pooled_se_sq / double(rep.rows.size()));
    std::vector<double> lx, ly, lw;
    double prev = kInf;
    for (auto& row : rep.rows) {
        row.informative = row.error > rep.noise_floor;
        if (!row.informative) continue;
        if (row.error >= prev) rep.errors_decreasing = false;
        prev = row.error;
        const double sigma_log = std::max(row.se / row.error, 1e-6);
        lx.push_back(std::log(row.level));
        ly.push_back(std::log(row.error));
        lw.push_back(1.0 / (sigma_log * sigma_log));
    }
    rep.exact_zero = lx.empty();
    if (lx.size() >= 2) {
        rep.fit = fit_line(lx, ly, lw);
        rep.beta_hat = -rep.fit.slope;
        rep.beta_ci_low = -rep.fit.slope_ci_high;
        rep.beta_ci_high = -rep.fit.slope_ci_low;
        rep.ci_width = rep.beta_ci_high - rep.beta_ci_low;
        std::ostringstream os;
        os << "beta_hat = " << format_double(rep.beta_hat) << " (CI ["
           << format_double(rep.beta_ci_low) << ", " << format_double(rep.beta_ci_high)
           << "]) vs theorem range [0, " << format_double(rep.beta_max) << ")";
        if (!rep.conditions.in_theory) os << " [out-of-theory run]";
        rep.verdict = os.str();
    } else {
        rep.verdict = rep.exact_zero
                          ? "all levels at the noise floor (exact agreement)"
                          : "too few informative levels for a slope";
    }
    return rep;
}

void write_rate_artifacts(const RateReport& rep, const std::string& dir,
                          const std::string& name) {
    fs::create_directories(dir);
    {
        CsvWriter csv(dir + "/" + name + ".csv",
                      {"level", "error", "ci_low", "ci_high", "se", "informative"});
        for (const auto& r : rep.rows)
            csv.row({r.level, r.error, r.ci_low, r.ci_high, r.se,
                     r.informative ? 1.0 : 0.0});
    }
    json j;
    j["beta_hat"] = rep.beta_hat;
    j["ci_low"] = rep.beta_ci_low;
    j["ci_high"] = rep.beta_ci_high;
    j["ci_width"] = rep.ci_width;
    j["beta_max"] = rep.beta_max;
    j["b_norm"] = rep.b_norm;
    j["eta_prefactor"] = rep.eta_prefactor;
    j["noise_floor"] = rep.noise_floor;
    j["errors_decreasing"] = rep.errors_decreasing;
    j["exact_zero"] = rep.exact_zero;
    j["oracle"] = rep.oracle_mode;
    j["verdict"] = rep.verdict;
    j["conditions"] = json::parse(rep.conditions.to_json());
    if (!rep.tail_bound.empty()) j["tail_bound"] = rep.tail_bound;
    std::ofstream(dir + "/" + name + ".json") << j.dump(2) << "\n";

    PlotSeries series;
    series.label = "weak error";
    for (const auto& r : rep.rows) {
        series.x.push_back(r.level);
        series.y.push_back(r.error);
        series.ylo.push_back(r.ci_low);
        series.yhi.push_back(r.ci_high);
    }
    std::vector<PlotFitLine> fits;
    if (!rep.exact_zero && rep.fit.used >= 2)
        fits.push_back({rep.fit.slope, rep.fit.intercept, "fit", "#c23b22"});
    write_loglog_svg(dir + "/" + name + ".svg", "weak error vs mollification level",
                     "level n", "sup_t |E f(X_t) - oracle|", {series}, fits);
}

EtaSensitivityReport eta_sensitivity(const RateConfig& base,
                                     const std::vector<EtaSpec>& etas) {
    if (etas.empty()) throw std::invalid_argument("eta_sensitivity: no etas");
    EtaSensitivityReport rep;
    rep.used_q = base.eta_q;
    rep.eta_q_threshold =
        eta_q_threshold(base.drift.target_beta, base.drift.gamma, base.drift.p);
    const TorusGrid grid = base.drift.grid.make();
    std::vector<LevelError> baseline;
    for (std::size_t e = 0; e < etas.size(); ++e) {
        RateConfig cfg = base;
        cfg.eta = etas[e];
        const RateReport r = weak_rate(cfg);
        EtaSensitivityRow row;
        row.label = etas[e].label();
        const auto field = etas[e].build(grid);
        const InitialSampler init(grid, field ? &*field : nullptr);
        row.eta_lq = init.lq_norm(base.eta_q);
        row.prefactor = std::max(1.0, row.eta_lq);
        row.out_of_theory = std::isfinite(rep.eta_q_threshold) &&
                            !std::isinf(base.eta_q) && base.eta_q <= rep.eta_q_threshold;
        row.rows = r.rows;
        if (e == 0) baseline = r.rows;
        for (std::size_t l = 0; l < r.rows.size(); ++l)
            row.ratio_to_baseline.push_back(
                baseline[l].error > 0.0 ? r.rows[l].error / baseline[l].error : 0.0);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

DimensionGate hoelder_dimension_gate(const SingularSet& K, double alpha,
                                     double delta_margin,
                                     std::span<const double> eps_grid,
                                     double horizon) {
    DimensionGate gate;
    gate.required = 1.0 / alpha;
    if (K.empty()) {
        gate.never_hit = true;  // nothing to hit
        gate.measured_exponent = kInf;
        return gate;
    }
    const MeasureExponent scan =
        measure_exponent_scan(K, eps_grid, MeasureMode::Analytic, horizon);
    gate.measured_exponent = scan.exponent;
    gate.never_hit = scan.exponent >= gate.required + delta_margin;
    return gate;
}

std::vector<std::pair<double, MeanCI>> empirical_hit_scan(
    const PathEnsemble& ens, const SingularSet& K, std::span<const double> eps_grid) {
    std::vector<std::pair<double, MeanCI>> out;
    std::vector<double> min_dist(ens.paths(), kInf);
    double x[3];
    for (std::int64_t i = 0; i < ens.paths(); ++i) {
        for (std::int64_t k = 0; k <= ens.steps(); ++k) {
            ens.wrapped(i, k, x);
            min_dist[i] = std::min(min_dist[i], K.distance(ens.time_of(k), x));
        }
    }
    for (double eps : eps_grid) {
        std::int64_t c = 0;
        for (double d : min_dist)
            if (d <= eps) ++c;
        out.emplace_back(eps, mean_ci_from_sums(double(c), double(c), ens.paths()));
    }
    return out;
}

SingularityReport singularity_rate(const SingularityConfig& cfg) {
    const TorusGrid grid = cfg.drift.grid.make();
    if (grid.dim != 2)
        throw std::invalid_argument("singularity_rate: vortex runs are 2d");
    const AntisymmetricField A = build_potential(cfg.drift);
    const SingularSet K = build_singular_set(cfg.drift);
    if (K.empty())
        throw std::invalid_argument("singularity_rate: the drift spec has no K");

    SingularityReport rep;
    rep.conditions = condition_report(cfg.drift, grid.dim);
    const double p = cfg.drift.p;
    rep.alpha = cfg.alpha > 0.0 ? cfg.alpha : 0.5 - 1.0 / p;

    std::vector<double> eps_grid = cfg.eps_grid;
    std::sort(eps_grid.begin(), eps_grid.end());
    for (double eps : eps_grid)
        if (eps < 4.0 * grid.h())
            throw std::invalid_argument("singularity_rate: eps below 4h excluded");

    // spatial neighborhood exponent (analytic primitives)
    const MeasureExponent mscan =
        measure_exponent_scan(K, eps_grid, MeasureMode::Analytic, cfg.mc.T);
    rep.measure_exponent = mscan.exponent;

    // drifts: full potential at n and n_ref, cutoff potential per eps
    const ScalarField f = cfg.f.build(grid);
    const double f_inf = lp_norm(f, kInf);
    std::vector<VectorField> drifts;
    drifts.push_back(drift(mollify(A, Mollifier(grid.dim, cfg.n_ref))));  // 0: ref
    drifts.push_back(drift(mollify(A, Mollifier(grid.dim, cfg.level)))); // 1: n
    std::vector<AntisymmetricField> cutoffs;
    for (double eps : eps_grid) {
        const CutoffFamily g_eps = cutoff(K, eps);
        cutoffs.push_back(apply_cutoff(A, g_eps));
        drifts.push_back(drift(mollify(cutoffs.back(), Mollifier(grid.dim, cfg.n_ref))));
        drifts.push_back(drift(mollify(cutoffs.back(), Mollifier(grid.dim, cfg.level))));
    }

    // shared dt: the worst stability gate across the coupled processes
    McParams mc = cfg.mc;
    double lip = 0.0;
    for (const auto& d : drifts) lip = std::max(lip, lipschitz_estimate(d));
    if (lip > 0.0) mc.dt = std::min(mc.dt, 0.45 / lip);
    const std::int64_t steps = std::max<std::int64_t>(8, std::int64_t(std::ceil(mc.T / mc.dt)));
    mc.dt = mc.T / double(steps);

    McRunSpec ms;
    ms.grid = grid;
    for (const auto& d : drifts) ms.drifts.push_back(&d);
    ms.f = &f;
    ms.mc = mc;
    ms.seed = cfg.seed;
    ms.K = &K;
    ms.eps_list = eps_grid;
    ms.occupation_delta0 = 0.25 * eps_grid.front();
    ms.diff_pairs.emplace_back(0, 1);  // measured weak error ref vs n
    for (std::size_t e = 0; e < eps_grid.size(); ++e)
        ms.diff_pairs.emplace_back(int(2 + 2 * e), int(3 + 2 * e));
    const McRunResult mcres = run_mc(ms);

    // L grid
    rep.L_grid = cfg.L_grid;
    if (rep.L_grid.empty()) {
        for (int i = 0; i < 16; ++i)
            rep.L_grid.push_back(0.25 * std::pow(1.45, i));
    }

    const std::vector<double> zero_targets(mcres.checkpoint_times.size(), 0.0);
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        SingularityEpsRow row;
        row.eps = eps_grid[e];
        row.hit_ref = mcres.hit[0][e];
        row.hit_n = mcres.hit[1][e];
        row.hit_stop_ref = mcres.hit[2 + 2 * e][e];
        row.hit_stop_n = mcres.hit[3 + 2 * e][e];
        row.measured_error = sup_error(mcres.diff[0], zero_targets).first;
        row.stopped_error = sup_error(mcres.diff[1 + e], zero_targets).first;
        row.envelope = f_inf * (row.hit_ref.mean + row.hit_n.mean +
                                row.hit_stop_ref.mean + row.hit_stop_n.mean) +
                       row.stopped_error;
        const double slack =
            1.96 * (mcres.diff[0][0].se + mcres.diff[1 + e][0].se);
        row.envelope_ok = row.envelope + slack >= row.measured_error;
        row.b_eps_norm =
            besov_norm(drift(cutoffs[e]),
                       BesovIndex(-cfg.drift.gamma, cfg.drift.p, kInf))
                .value;

        // two-term bound on the L grid vs the paper optimiser
        row.delta_tilde = rep.measure_exponent - 1.0 / rep.alpha;
        const double inv_a = 1.0 / rep.alpha;
        row.L_min = std::pow(p / (inv_a * std::pow(row.eps, row.delta_tilde)),
                             1.0 / (inv_a + p));
        int argmin = 0, nearest = 0;
        double best = kInf, best_dist = kInf;
        for (std::size_t i = 0; i < rep.L_grid.size(); ++i) {
            const double L = rep.L_grid[i];
            const double val =
                std::pow(row.eps, row.delta_tilde) * std::pow(L, inv_a) +
                std::pow(L, -p);
            if (val < best) {
                best = val;
                argmin = int(i);
            }
            const double dist = std::abs(std::log(L / row.L_min));
            if (dist < best_dist) {
                best_dist = dist;
                nearest = int(i);
            }
        }
        row.L_argmin = rep.L_grid[argmin];
        row.argmin_cell_distance = std::abs(argmin - nearest);
        rep.rows.push_back(row);
    }

    // occupation exponent on the hitting sub-ensemble of the reference run
    {
        std::vector<double> lx, ly;
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            auto occ = mcres.hitter_occ[0][e];
            if (occ.size() < 8) continue;
            const double med = quantile(std::move(occ), 0.5);
            if (med <= 0.0) continue;
            lx.push_back(std::log(eps_grid[e]));
            ly.push_back(std::log(med));
        }
        if (lx.size() >= 2) rep.occupation_exponent = fit_line(lx, ly).slope;
    }

    rep.hits_decreasing_ci =
        rep.rows.front().hit_ref.ci_high < rep.rows.back().hit_ref.ci_low;
    return rep;
}

void write_singularity_artifacts(const SingularityReport& rep, const std::string& dir) {
    fs::create_directories(dir);
    {
        CsvWriter csv(dir + "/singularity.csv",
                      {"eps", "hit_ref", "hit_ref_lo", "hit_ref_hi", "hit_n",
                       "hit_stop_ref", "hit_stop_n", "measured_error",
                       "stopped_error", "envelope", "envelope_ok", "b_eps_norm",
                       "L_min", "L_argmin", "argmin_cell_distance"});
        for (const auto& r : rep.rows)
            csv.row({r.eps, r.hit_ref.mean, r.hit_ref.ci_low, r.hit_ref.ci_high,
                     r.hit_n.mean, r.hit_stop_ref.mean, r.hit_stop_n.mean,
                     r.measured_error, r.stopped_error, r.envelope,
                     r.envelope_ok ? 1.0 : 0.0, r.b_eps_norm, r.L_min, r.L_argmin,
                     double(r.argmin_cell_distance)});
    }
    json j;
    j["measure_exponent"] = rep.measure_exponent;
    j["alpha"] = rep.alpha;
    j["occupation_exponent"] = rep.occupation_exponent;
    j["hits_decreasing_ci"] = rep.hits_decreasing_ci;
    j["conditions"] = json::parse(rep.conditions.to_json());
    std::ofstream(dir + "/singularity.json") << j.dump(2) << "\n";

    PlotSeries hits;
    hits.label = "P(tau^eps < T)";
    for (const auto& r : rep.rows) {
        hits.x.push_back(r.eps);
        hits.y.push_back(std::max(r.hit_ref.mean, 1e-12));
        hits.ylo.push_back(std::max(r.hit_ref.ci_low, 1e-12));
        hits.yhi.push_back(std::max(r.hit_ref.ci_high, 1e-12));
    }
    write_loglog_svg(dir + "/singularity_hits.svg", "hitting probability vs eps",
                     "eps", "P(tau^eps < T)", {hits}, {});
}

SuiteReport energy_solution_suite(const SuiteConfig& cfg) {
    const TorusGrid grid = cfg.drift.grid.make();
    const AntisymmetricField A = build_potential(cfg.drift);
    const SingularSet K = build_singular_set(cfg.drift);
    const VectorField b = drift(mollify(A, Mollifier(grid.dim, cfg.level)));
    const InitialSampler init(grid, nullptr);

    // test field for the martingale / composition diagnostics: one low mode
    const ScalarField f = ScalarField::cosine(grid, {1, 1, 0}, 1.0, 0.3);

    // KBE slices on the MC grid for the stopped-composition statistic:
    // u(t) = v(T - t) with v(0) = f, so u(t, X_t) is the exact-martingale
    // composition at this drift level
    const std::int64_t steps = std::int64_t(std::llround(cfg.mc.T / cfg.mc.dt));
    std::vector<double> slice_times;
    for (std::int64_t k = 0; k <= steps; ++k) slice_times.push_back(k * cfg.mc.dt);
    const AntisymmetricField A_n = mollify(A, Mollifier(grid.dim, cfg.level));
    KbeOptions ko;
    ko.T = cfg.mc.T;
    ko.dt = std::min(cfg.mc.dt, auto_kbe_dt(grid, A_n, cfg.mc.dt));
    ko.scheme = KbeScheme::Strang;
    ko.slice_times = slice_times;
    const KbeRun vrun = solve_kbe(&A_n, f, ko);
    std::vector<ScalarField> u_slices;
    u_slices.reserve(steps + 1);
    for (std::int64_t k = 0; k <= steps; ++k)
        u_slices.push_back(vrun.slice_at(cfg.mc.T - k * cfg.mc.dt));

    const std::vector<double> box_sides{0.4 * grid.L, 0.2 * grid.L, 0.1 * grid.L,
                                        0.05 * grid.L};
    const std::array<double, 3> box_center{0.5 * grid.L, 0.5 * grid.L, 0.5 * grid.L};

    MartingaleAccum mart;
    IncompressibilityAccum incomp;
    StoppedCompositionAccum comp;
    const std::int64_t block = cfg.mc.block;
    const std::int64_t n_blocks = (cfg.mc.paths + block - 1) / block;
    for (std::int64_t bi = 0; bi < n_blocks; ++bi) {
        SimConfig sc;
        sc.T = cfg.mc.T;
        sc.dt = cfg.mc.dt;
        sc.paths = std::min(block, cfg.mc.paths - bi * block);
        sc.seed = cfg.seed;
        sc.drift = &b;
        sc.path_offset = bi * block;
        sc.grid = grid;
        const PathEnsemble ens = euler_maruyama(sc);
        mart.merge(martingale_accumulate(ens, f, &b));
        incompressibility_accumulate(ens, box_sides, box_center, cfg.mc.checkpoints,
                                     true, incomp);
        comp.merge(stopped_composition_accumulate(
            ens, K, cfg.stop_delta, u_slices, cfg.mc.checkpoints));
    }

    SuiteReport rep;
    rep.martingale = martingale_finalize(mart, f);
    rep.incompressibility = incompressibility_finalize(incomp, init.sup_density());
    rep.stopped = stopped_composition_finalize(comp, u_slices);

    // Ito-trick: two mollification levels, shared noise, smaller M
    {
        std::vector<ScalarField> gs;
        gs.push_back(ScalarField::cosine(grid, {1, 0, 0}, 1.0, 0.0));
        gs.push_back(ScalarField::cosine(grid, {0, 2, 0}, 0.7, 1.1));
        gs.push_back(ScalarField::cosine(grid, {2, 1, 0}, 0.5, 0.4));
        const VectorField b_a = drift(mollify(A, Mollifier(grid.dim, cfg.level)));
        const VectorField b_b = drift(mollify(A, Mollifier(grid.dim, cfg.ito_level_b)));
        for (int which = 0; which < 2; ++which) {
            ItoTrickAccum acc;
            for (std::int64_t bi = 0; bi * block < cfg.ito_paths; ++bi) {
                SimConfig sc;
                sc.T = cfg.mc.T;
                sc.dt = cfg.mc.dt;
                sc.paths = std::min(block, cfg.ito_paths - bi * block);
                sc.seed = cfg.seed;
                sc.drift = which == 0 ? &b_a : &b_b;
                sc.path_offset = bi * block;
                sc.grid = grid;
                const PathEnsemble ens = euler_maruyama(sc);
                acc.merge(ito_trick_accumulate(ens, gs, cfg.ito_p));
            }
            const ItoTrickCheck chk = ito_trick_finalize(
                acc, init, gs, cfg.ito_p, 2.0, kInf, cfg.mc.T);
            if (which == 0) rep.ito_a = chk;
            else rep.ito_b = chk;
        }
        const double ra = rep.ito_a.max_ratio_laplacian;
        const double rb = rep.ito_b.max_ratio_laplacian;
        rep.ito_agreement = (ra > 0 && rb > 0) ? std::max(ra / rb, rb / ra) : 0.0;
    }

    rep.all_pass = rep.incompressibility.ks_pass_1pct &&
                   rep.incompressibility.box_bound_ok &&
                   std::abs(rep.martingale.terminal_mean.mean) <=
                       3.0 * rep.martingale.terminal_mean.se + 1e-12 &&
                   rep.martingale.uncorrelated_1pct &&
                   std::abs(rep.martingale.qv_ratio - 1.0) <= 0.05 &&
                   rep.ito_agreement > 0.0 && rep.ito_agreement <= 2.0 &&
                   rep.stopped.zero_mean_3se && rep.stopped.identity_ok &&
                   rep.stopped.sup_bound_ok;
    return rep;
}

std::string SuiteReport::to_json() const {
    json j;
    j["incompressibility"] = {
        {"worst_ks", incompressibility.worst_ks},
        {"ks_pass_1pct", incompressibility.ks_pass_1pct},
        {"box_bound_ok", incompressibility.box_bound_ok},
        {"sup_density", incompressibility.sup_density}};
    json boxes = json::array();
    for (const auto& b : incompressibility.boxes)
        boxes.push_back({{"side", b.side},
                         {"volume", b.volume},
                         {"sup_ratio", b.sup_ratio},
                         {"ci_high_ratio", b.ci_high_ratio}});
    j["incompressibility"]["boxes"] = boxes;
    j["martingale"] = {{"terminal_mean", martingale.terminal_mean.mean},
                       {"terminal_se", martingale.terminal_mean.se},
                       {"lag_correlation", martingale.lag_correlation},
                       {"lag_threshold_1pct", martingale.lag_threshold_1pct},
                       {"uncorrelated_1pct", martingale.uncorrelated_1pct},
                       {"qv_ratio", martingale.qv_ratio},
                       {"qv_ratio_se", martingale.qv_ratio_se}};
    j["ito_trick"] = {{"max_ratio_level_a", ito_a.max_ratio_laplacian},
                      {"max_ratio_level_b", ito_b.max_ratio_laplacian},
                      {"max_general_a", ito_a.max_ratio_general},
                      {"max_general_b", ito_b.max_ratio_general},
                      {"agreement_factor", ito_agreement}};
    json cps = json::array();
    for (const auto& [t, m] : stopped.checkpoint_means)
        cps.push_back({{"t", t}, {"mean", m.mean}, {"se", m.se}});
    j["stopped_composition"] = {{"checkpoints", cps},
                                {"identity_ok", stopped.identity_ok},
                                {"sup_bound_ok", stopped.sup_bound_ok},
                                {"zero_mean_3se", stopped.zero_mean_3se},
                                {"max_abs", stopped.max_abs_composition},
                                {"sup_norm_u", stopped.sup_norm_u}};
    j["all_pass"] = all_pass;
    return j.dump(2);
}

// ------------------------------------------------------------------
// config-driven execution
// ------------------------------------------------------------------
namespace {

McParams parse_mc(const json& j) {
    McParams mc;
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        mc.paths = m.value("M", std::int64_t(10000));
        mc.dt = m.value("dt", 1e-3);
        mc.T = m.value("T", 0.25);
        mc.checkpoints = m.value("checkpoints", 8);
        mc.block = m.value("block", std::int64_t(4096));
    }
    return mc;
}

TestFunctionSpec parse_fs(const json& j) {
    TestFunctionSpec f;
    if (!j.contains("fs")) return f;
    f.modes.clear();
    for (const auto& m : j.at("fs")) {
        TestFunctionSpec::Mode mode;
        const auto& k = m.at("k");
        for (std::size_t a = 0; a < k.size() && a < 3; ++a)
            mode.k[a] = k[a].get<int>();
        mode.amp = m.value("amp", 1.0);
        mode.phase = m.value("phase", 0.0);
        f.modes.push_back(mode);
    }
    return f;
}

EtaSpec parse_eta(const json& j) {
    EtaSpec eta;
    if (!j.contains("eta")) return eta;
    const auto& e = j.at("eta");
    if (e.is_string()) {
        const std::string s = e.get<std::string>();
        if (s == "uniform") eta.kind = EtaSpec::Kind::Uniform;
        else {
            eta.kind = EtaSpec::Kind::File;
            eta.path = s;
        }
        return eta;
    }
    const std::string kind = e.value("kind", "uniform");
    if (kind == "uniform") eta.kind = EtaSpec::Kind::Uniform;
    else if (kind == "bump") {
        eta.kind = EtaSpec::Kind::Bump;
        eta.height = e.value("height", 5.0);
        eta.width = e.value("width", 0.25);
    } else if (kind == "file") {
        eta.kind = EtaSpec::Kind::File;
        eta.path = e.at("path").get<std::string>();
    } else {
        throw std::invalid_argument("eta: unknown kind \"" + kind + "\"");
    }
    return eta;
}

void run_one_experiment(const json& e, const std::string& dir, std::uint64_t seed);

}  // namespace

RunOutcome run_config(const std::string& config_path, const std::string& out_dir,
                      bool force) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("run_config: cannot open " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const std::exception& ex) {
        throw std::invalid_argument(std::string("run_config: JSON parse error: ") +
                                    ex.what());
    }
    if (!cfg.contains("experiments") || !cfg.at("experiments").is_array())
        throw std::invalid_argument(
            "run_config: missing \"experiments\" array (field-level schema: "
            "{seed?, experiments:[{type, name, ...}]})");

    if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
        if (!force)
            throw std::runtime_error("run_config: output directory " + out_dir +
                                     " exists; pass --force to overwrite");
    }
    fs::create_directories(out_dir);

    const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
    json manifest;
    manifest["config_hash"] = fnv1a(text);
    manifest["config_path"] = config_path;
    manifest["seed"] = seed;
    manifest["tool"] = "supersde 0.1.0";
    manifest["experiments"] = json::array();

    RunOutcome outcome;
    for (const auto& e : cfg.at("experiments")) {
        if (!e.contains("type"))
            throw std::invalid_argument("run_config: experiment without \"type\"");
        const std::string type = e.at("type").get<std::string>();
        const std::string name = e.value("name", type);
        const std::string dir = out_dir + "/" + name;
        json entry;
        entry["name"] = name;
        entry["type"] = type;
        entry["seed"] = e.value("seed", seed);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run_one_experiment(e, dir, e.value("seed", seed));
            entry["status"] = "ok";
            ++outcome.executed;
        } catch (const std::exception& ex) {
            entry["status"] = "failed";
            entry["error"] = ex.what();
            ++outcome.failed;
        }
        entry["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        manifest["experiments"].push_back(entry);
    }
    outcome.manifest_path = out_dir + "/manifest.json";
    std::ofstream(outcome.manifest_path) << manifest.dump(2) << "\n";
    return outcome;
}

namespace {

void run_one_experiment(const json& e, const std::string& dir, std::uint64_t seed) {
    const std::string type = e.at("type").get<std::string>();
    fs::create_directories(dir);
    if (type == "rate") {
        RateConfig rc;
        rc.drift = drift_spec_from_json(e.at("drift").dump());
        if (e.contains("levels"))
            rc.levels = e.at("levels").get<std::vector<double>>();
        if (e.contains("n_ref")) rc.n_ref = e.at("n_ref").get<double>();
        rc.mc = parse_mc(e);
        rc.eta = parse_eta(e);
        rc.f = parse_fs(e);
        rc.oracle = e.value("oracle", std::string("kbe")) == "self-difference"
                        ? OracleMode::SelfDifference
                        : OracleMode::Kbe;
        rc.seed = seed;
        const RateReport rep = weak_rate(rc);
        write_rate_artifacts(rep, dir, "rate");
    } else if (type == "singularity") {
        SingularityConfig sc;
        sc.drift = drift_spec_from_json(e.at("drift").dump());
        if (e.contains("eps"))
            sc.eps_grid = e.at("eps").get<std::vector<double>>();
        sc.level = e.value("level", 8.0);
        sc.n_ref = e.value("n_ref", 64.0);
        sc.mc = parse_mc(e);
        sc.f = parse_fs(e);
        sc.seed = seed;
        const SingularityReport rep = singularity_rate(sc);
        write_singularity_artifacts(rep, dir);
    } else if (type == "suite") {
        SuiteConfig sc;
        sc.drift = drift_spec_from_json(e.at("drift").dump());
        sc.level = e.value("level", 8.0);
        sc.ito_level_b = e.value("ito_level_b", 32.0);
        sc.mc = parse_mc(e);
        sc.seed = seed;
        sc.stop_delta = e.value("stop_delta", 0.0);
        const SuiteReport rep = energy_solution_suite(sc);
        std::ofstream(dir + "/suite.json") << rep.to_json() << "\n";
    } else if (type == "mollify_scan") {
        const GridSpec gs{e.value("d", 2), e.value("N", 256), e.value("L", 4.0)};
        const TorusGrid grid = gs.make();
        const double s = e.value("s", 0.0), pp = e.value("p", 2.0);
        const double alpha = e.value("alpha", 0.5);
        std::vector<double> levels = e.value("levels", std::vector<double>{4, 8, 16, 32});
        const ScalarField b =
            synth_random_scalar(grid, s, seed, e.value("amplitude", 1.0));
        const MollifyScan scan = mollification_rate_scan(
            b, BesovIndex(s, pp, kInf), alpha, levels);
        CsvWriter csv(dir + "/mollify_scan.csv", {"level", "error"});
        std::vector<double> lx, ly;
        for (const auto& r : scan.rows) {
            csv.row({r.level, r.error});
            lx.push_back(std::log(r.level));
            ly.push_back(std::log(r.error));
        }
        const LineFit fit = fit_line(lx, ly);
        json j;
        j["slope"] = fit.slope;
        j["ci_low"] = fit.slope_ci_low;
        j["ci_high"] = fit.slope_ci_high;
        j["alpha"] = alpha;
        j["base_norm"] = scan.base_norm;
        std::ofstream(dir + "/mollify_scan.json") << j.dump(2) << "\n";
        PlotSeries series;
        for (const auto& r : scan.rows) {
            series.x.push_back(r.level);
            series.y.push_back(r.error);
        }
        write_loglog_svg(dir + "/mollify_scan.svg", "mollification error vs level",
                         "level n", "Besov error",
                         {series}, {{fit.slope, fit.intercept, "fit", "#c23b22"}});
    } else if (type == "besov_norm") {
        const GridSpec gs{e.value("d", 2), e.value("N", 128), e.value("L", 4.0)};
        const TorusGrid grid = gs.make();
        ScalarField u = e.contains("input")
                            ? read_field(e.at("input").get<std::string>())
                            : synth_random_scalar(grid, e.value("s", 0.0), seed,
                                                  e.value("amplitude", 1.0));
        const BesovIndex idx(e.value("s_norm", e.value("s", 0.0)),
                             e.value("p", 2.0),
                             e.value("q", -1.0) < 0 ? kInf : e.at("q").get<double>());
        const BesovNorm n = besov_norm(u, idx);
        CsvWriter csv(dir + "/blocks.csv", {"j", "block_lp_norm"});
        for (std::size_t j = 0; j < n.block_norms.size(); ++j)
            csv.row({double(int(j) - 1), n.block_norms[j]});
        json out;
        out["norm"] = n.value;
        out["jmax"] = n.jmax;
        out["top_block_share"] = n.top_block_share;
        out["under_resolved"] = n.under_resolved;
        std::ofstream(dir + "/besov_norm.json") << out.dump(2) << "\n";
    } else if (type == "paraproduct_check") {
        const GridSpec gs{e.value("d", 2), e.value("N", 32), e.value("L", 4.0)};
        const TorusGrid grid = gs.make();
        const int pairs = e.value("pairs", 20);
        double worst = 0.0, mean = 0.0;
        CsvWriter csv(dir + "/paraproduct.csv", {"pair", "rel_residual"});
        for (int i = 0; i < pairs; ++i) {
            const ScalarField b = dealias(synth_random_scalar(grid, 1.0, seed + 2 * i));
            const ScalarField v = dealias(synth_random_scalar(grid, 1.0, seed + 2 * i + 1));
            const ScalarField sum = para_lt(b, v) + para_gt(b, v) + resonant(b, v);
            const ScalarField prod = b.pointwise(v);
            const double res =
                lp_norm(sum - prod, 2.0) / std::max(lp_norm(prod, 2.0), 1e-300);
            csv.row({double(i), res});
            worst = std::max(worst, res);
            mean += res / pairs;
        }
        json out;
        out["pairs"] = pairs;
        out["max_rel_residual"] = worst;
        out["mean_rel_residual"] = mean;
        std::ofstream(dir + "/paraproduct.json") << out.dump(2) << "\n";
    } else {
        throw std::invalid_argument("run_config: unknown experiment type \"" + type +
                                    "\"");
    }
}

}  // namespace

}  // namespace supersde
