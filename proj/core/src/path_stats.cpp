#include "supersde/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "supersde/besov.hpp"
#include "supersde/multiplier.hpp"

namespace supersde {

namespace {

double step_displacement(const PathEnsemble& ens, std::int64_t i, std::int64_t k) {
    double s = 0.0;
    for (int a = 0; a < ens.grid().dim; ++a) {
        const double d = ens.pos(i, k + 1, a) - ens.pos(i, k, a);
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<std::int64_t> checkpoint_list(std::int64_t steps, int count) {
    std::vector<std::int64_t> out;
    for (int c = 1; c <= count; ++c)
        out.push_back(std::max<std::int64_t>(1, steps * c / count));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

StopRecord stopping_time(const PathEnsemble& ens, const SingularSet& K, double delta) {
    if (delta < 0.0) throw std::invalid_argument("stopping_time: delta < 0");
    StopRecord rec;
    rec.delta = delta;
    rec.tau_index.assign(ens.paths(), -1);
    if (K.empty()) {
        rec.hit_prob = mean_ci_from_sums(0.0, 0.0, ens.paths());
        return rec;
    }
    std::int64_t hits = 0;
    double max_step = 0.0;
    double x[3];
    for (std::int64_t i = 0; i < ens.paths(); ++i) {
        for (std::int64_t k = 0; k <= ens.steps(); ++k) {
            ens.wrapped(i, k, x);
            if (K.distance(ens.time_of(k), x) <= delta) {
                rec.tau_index[i] = k;
                ++hits;
                if (k > 0)
                    max_step = std::max(max_step, step_displacement(ens, i, k - 1));
                break;
            }
        }
    }
    rec.hit_fraction = double(hits) / double(ens.paths());
    rec.hit_prob = mean_ci_from_sums(double(hits), double(hits), ens.paths());
    rec.max_step_displacement = max_step;
    return rec;
}

double holder_norm_path(const PathEnsemble& ens, std::int64_t i, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("holder_norm: alpha must be in (0,1)");
    const int d = ens.grid().dim;
    const double dt = ens.dt();
    double best = 0.0;
    for (std::int64_t m = 1; m <= ens.steps(); m <<= 1) {
        const double denom = std::pow(m * dt, alpha);
        for (std::int64_t k = 0; (k + 1) * m <= ens.steps(); ++k) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                const double diff = ens.pos(i, (k + 1) * m, a) - ens.pos(i, k * m, a);
                s += diff * diff;
            }
            best = std::max(best, std::sqrt(s) / denom);
        }
    }
    return best;
}

std::vector<double> holder_norms(const PathEnsemble& ens, double alpha) {
    std::vector<double> out(ens.paths());
    const std::int64_t block = 512;
    const std::int64_t n_blocks = (ens.paths() + block - 1) / block;
    parallel_blocks(n_blocks, [&](std::int64_t b) {
        const std::int64_t lo = b * block, hi = std::min(lo + block, ens.paths());
        for (std::int64_t i = lo; i < hi; ++i) out[i] = holder_norm_path(ens, i, alpha);
    });
    return out;
}

HolderTail holder_tail(const PathEnsemble& ens, double alpha,
                       std::span<const double> levels) {
    const auto norms = holder_norms(ens, alpha);
    HolderTail out;
    std::vector<double> lx, ly;
    for (double L : levels) {
        std::int64_t count = 0;
        for (double n : norms)
            if (n > L) ++count;
        TailRow row;
        row.level = L;
        row.prob = mean_ci_from_sums(double(count), double(count), ens.paths());
        out.rows.push_back(row);
        if (count > 0 && count < ens.paths()) {
            lx.push_back(std::log(L));
            ly.push_back(std::log(row.prob.mean));
        }
    }
    if (lx.size() >= 2) {
        out.exponent = fit_line(lx, ly).slope;
        out.fitted_rows = int(lx.size());
    }
    return out;
}

MomentRegression moment_regression(const PathEnsemble& ens, double p,
                                   int dyadic_levels) {
    if (dyadic_levels < 4)
        throw std::invalid_argument("moment_regression: need >= 4 dyadic levels");
    MomentRegression out;
    const int d = ens.grid().dim;
    std::vector<double> lx, ly;
    for (int l = 0; l < dyadic_levels; ++l) {
        const std::int64_t gap = ens.steps() >> l;
        if (gap < 1) break;
        double acc = 0.0;
        std::int64_t n = 0;
        const std::int64_t stride = std::max<std::int64_t>(1, gap / 2);
        for (std::int64_t i = 0; i < ens.paths(); ++i) {
            for (std::int64_t k = 0; k + gap <= ens.steps(); k += stride) {
                double s = 0.0;
                for (int a = 0; a < d; ++a) {
                    const double diff = ens.pos(i, k + gap, a) - ens.pos(i, k, a);
                    s += diff * diff;
                }
                acc += std::pow(s, 0.5 * p);
                ++n;
            }
        }
        const double gap_t = gap * ens.dt();
        const double moment = acc / double(n);
        out.rows.emplace_back(gap_t, moment);
        lx.push_back(std::log(gap_t));
        ly.push_back(std::log(moment));
    }
    out.slope = fit_line(lx, ly).slope;
    return out;
}

OccupationResult occupation_time(const PathEnsemble& ens, const SingularSet& K,
                                 double eps, double alpha, double delta0) {
    OccupationResult out;
    out.occupation.assign(ens.paths(), 0.0);
    out.hit.assign(ens.paths(), 0);
    if (K.empty()) return out;
    const double dt = ens.dt();
    const double T = ens.horizon();
    double min_margin = kInf;
    std::vector<double> hitter_occ;
    double x[3];
    for (std::int64_t i = 0; i < ens.paths(); ++i) {
        std::int64_t occ_count = 0;
        std::int64_t tau0 = -1;
        for (std::int64_t k = 0; k <= ens.steps(); ++k) {
            ens.wrapped(i, k, x);
            const double dist = K.distance(ens.time_of(k), x);
            if (dist < eps) ++occ_count;
            if (tau0 < 0 && dist <= delta0) tau0 = k;
        }
        out.occupation[i] = dt * double(occ_count);
        if (tau0 >= 0) {
            out.hit[i] = 1;
            ++out.hitters;
            hitter_occ.push_back(out.occupation[i]);
            // Hoelder quotient: dyadic pairs plus pairs anchored at the
            // entry step (those are the ones the window argument uses)
            double H = holder_norm_path(ens, i, alpha);
            const double t0 = ens.time_of(tau0);
            for (std::int64_t k = 0; k <= ens.steps(); ++k) {
                if (k == tau0) continue;
                double s = 0.0;
                for (int a = 0; a < ens.grid().dim; ++a) {
                    const double diff = ens.pos(i, k, a) - ens.pos(i, tau0, a);
                    s += diff * diff;
                }
                H = std::max(H, std::sqrt(s) /
                                    std::pow(std::abs(ens.time_of(k) - t0), alpha));
            }
            const double eps_eff = eps - delta0;
            if (eps_eff > 0.0 && H > 0.0) {
                const double w = std::min(
                    std::pow(eps_eff / (M_SQRT2 * H), 1.0 / alpha), eps_eff / M_SQRT2);
                const double bound = std::min(w, T);
                const double margin = out.occupation[i] - bound;
                min_margin = std::min(min_margin, margin);
                if (out.occupation[i] < bound - 2.0 * dt) ++out.violations;
            }
        }
    }
    out.min_margin = out.hitters ? min_margin : 0.0;
    if (!hitter_occ.empty())
        out.median_hitter_occupation = quantile(std::move(hitter_occ), 0.5);
    return out;
}

AdditiveFunctional additive_functional(const PathEnsemble& ens, const ScalarField& f) {
    AdditiveFunctional out;
    out.sup_abs.assign(ens.paths(), 0.0);
    const auto fv = f.values();
    const TorusGrid& g = f.grid();
    const double dt = ens.dt();
    const std::int64_t block = 512;
    const std::int64_t n_blocks = (ens.paths() + block - 1) / block;
    parallel_blocks(n_blocks, [&](std::int64_t b) {
        const std::int64_t lo = b * block, hi = std::min(lo + block, ens.paths());
        for (std::int64_t i = lo; i < hi; ++i) {
            const double* traj = ens.path(i);
            double run = 0.0, sup = 0.0;
            for (std::int64_t k = 0; k < ens.steps(); ++k) {
                run += interpolate_multilinear(g, fv, traj + k * g.dim) * dt;
                sup = std::max(sup, std::abs(run));
            }
            out.sup_abs[i] = sup;
        }
    });
    return out;
}

double AdditiveFunctional::moment(double p) const {
    double s = 0.0;
    for (double v : sup_abs) s += std::pow(v, p);
    return s / double(sup_abs.size());
}

void ItoTrickAccum::merge(const ItoTrickAccum& o) {
    if (sup_pow_sum.empty()) sup_pow_sum.assign(o.sup_pow_sum.size(), 0.0);
    for (std::size_t i = 0; i < sup_pow_sum.size(); ++i)
        sup_pow_sum[i] += o.sup_pow_sum[i];
    paths += o.paths;
}

ItoTrickAccum ito_trick_accumulate(const PathEnsemble& ens,
                                   std::span<const ScalarField> test_potentials,
                                   double p) {
    ItoTrickAccum acc;
    acc.paths = ens.paths();
    for (const auto& g : test_potentials) {
        const AdditiveFunctional af = additive_functional(ens, laplacian(g));
        double s = 0.0;
        for (double v : af.sup_abs) s += std::pow(v, p);
        acc.sup_pow_sum.push_back(s);
    }
    return acc;
}

ItoTrickCheck ito_trick_finalize(const ItoTrickAccum& acc, const InitialSampler& init,
                                 std::span<const ScalarField> test_potentials,
                                 double p, double q, double kappa, double horizon) {
    if (!(kappa > 1.0))
        throw std::invalid_argument("ito_trick: kappa must be in (1, inf]");
    const double kappa_p = std::isinf(kappa) ? 1.0 : kappa / (kappa - 1.0);
    if (p < 2.0 / kappa_p)
        throw std::invalid_argument("ito_trick: p below 2/kappa'");
    ItoTrickCheck out;
    out.p = p;
    out.q = q;
    out.kappa = kappa;
    const double T = horizon;
    const double eta_norm = init.lq_norm(kappa);
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    for (std::size_t t = 0; t < test_potentials.size(); ++t) {
        const ScalarField& g = test_potentials[t];
        const ScalarField f = laplacian(g);
        VectorField gg = gradient(g);
        std::vector<double> gv(g.size(), 0.0);
        for (std::int64_t n = 0; n < g.size(); ++n) {
            double s = 0.0;
            for (int a = 0; a < g.grid().dim; ++a)
                s += gg.comp(a).value(n) * gg.comp(a).value(n);
            gv[n] = std::sqrt(s);
        }
        const ScalarField grad_abs(g.grid(), std::move(gv));

        const double lhs = acc.sup_pow_sum[t] / double(acc.paths);
        const double grad_norm = std::pow(T, inv_q) * lp_norm(grad_abs, p * kappa_p);
        const double rhs_lap =
            eta_norm * std::pow(T, p * (0.5 - inv_q)) * std::pow(grad_norm, p);
        const double f_besov = besov_norm(f, BesovIndex(-1.0, kappa_p * p, 2.0)).value;
        const double rhs_gen = eta_norm * std::pow(std::pow(T, inv_q) * f_besov, p);

        ItoTrickRow row;
        row.ratio_laplacian = rhs_lap > 0.0 ? lhs / rhs_lap : 0.0;
        row.ratio_general = rhs_gen > 0.0 ? lhs / rhs_gen : 0.0;
        out.rows.push_back(row);
        out.max_ratio_laplacian = std::max(out.max_ratio_laplacian, row.ratio_laplacian);
        out.max_ratio_general = std::max(out.max_ratio_general, row.ratio_general);
    }
    return out;
}

ItoTrickCheck ito_trick_check(const PathEnsemble& ens, const InitialSampler& init,
                              std::span<const ScalarField> test_potentials,
                              double p, double q, double kappa) {
    return ito_trick_finalize(ito_trick_accumulate(ens, test_potentials, p), init,
                              test_potentials, p, q, kappa, ens.horizon());
}

void MartingaleAccum::merge(const MartingaleAccum& o) {
    sum_mt += o.sum_mt;
    sum_mt2 += o.sum_mt2;
    sum_d += o.sum_d;
    sum_d2 += o.sum_d2;
    sum_pred += o.sum_pred;
    sx += o.sx;
    sy += o.sy;
    sxx += o.sxx;
    syy += o.syy;
    sxy += o.sxy;
    n_pairs += o.n_pairs;
    paths += o.paths;
}

MartingaleAccum martingale_accumulate(const PathEnsemble& ens, const ScalarField& f,
                                      const VectorField* drift_field, int windows) {
    const TorusGrid& g = f.grid();
    ScalarField Lf = laplacian(f);
    VectorField gf = gradient(f);
    if (drift_field) {
        for (int a = 0; a < g.dim; ++a)
            Lf = Lf + drift_field->comp(a).pointwise(gf.comp(a));
    }
    std::vector<double> grad2(g.size(), 0.0);
    for (std::int64_t n = 0; n < g.size(); ++n) {
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a)
            s += gf.comp(a).value(n) * gf.comp(a).value(n);
        grad2[n] = s;
    }
    const ScalarField grad_sq(g, std::move(grad2));

    const auto fv = f.values();
    const auto lfv = Lf.values();
    const auto g2v = grad_sq.values();
    const double dt = ens.dt();
    const std::int64_t steps = ens.steps();
    const std::int64_t win_len = std::max<std::int64_t>(1, steps / windows);
    const int actual_windows = int(steps / win_len);

    const std::int64_t block = 256;
    const std::int64_t n_blocks = (ens.paths() + block - 1) / block;
    std::vector<MartingaleAccum> accs(n_blocks);
    parallel_blocks(n_blocks, [&](std::int64_t b) {
        MartingaleAccum& acc = accs[b];
        acc.windows = windows;
        std::vector<double> wsum(actual_windows, 0.0);
        const std::int64_t lo = b * block, hi = std::min(lo + block, ens.paths());
        for (std::int64_t i = lo; i < hi; ++i) {
            const double* traj = ens.path(i);
            std::fill(wsum.begin(), wsum.end(), 0.0);
            double mt = 0.0, qv = 0.0, pred = 0.0;
            double f_prev = interpolate_multilinear(g, fv, traj);
            for (std::int64_t k = 0; k < steps; ++k) {
                const double* xk = traj + k * g.dim;
                const double* xk1 = traj + (k + 1) * g.dim;
                const double f_next = interpolate_multilinear(g, fv, xk1);
                const double dm =
                    f_next - f_prev - interpolate_multilinear(g, lfv, xk) * dt;
                mt += dm;
                qv += dm * dm;
                pred += 2.0 * interpolate_multilinear(g, g2v, xk) * dt;
                const std::int64_t w = k / win_len;
                if (w < actual_windows) wsum[w] += dm;
                f_prev = f_next;
            }
            acc.sum_mt += mt;
            acc.sum_mt2 += mt * mt;
            const double d = qv - pred;
            acc.sum_d += d;
            acc.sum_d2 += d * d;
            acc.sum_pred += pred;
            for (int w = 0; w + 1 < actual_windows; ++w) {
                acc.sx += wsum[w];
                acc.sy += wsum[w + 1];
                acc.sxx += wsum[w] * wsum[w];
                acc.syy += wsum[w + 1] * wsum[w + 1];
                acc.sxy += wsum[w] * wsum[w + 1];
                ++acc.n_pairs;
            }
        }
        acc.paths = hi - lo;
    });
    MartingaleAccum total;
    total.windows = windows;
    for (const auto& a : accs) total.merge(a);
    return total;
}

MartingaleReport martingale_finalize(const MartingaleAccum& acc, const ScalarField& f) {
    MartingaleReport rep;
    rep.terminal_mean = mean_ci_from_sums(acc.sum_mt, acc.sum_mt2, acc.paths);
    rep.terminal_scale = lp_norm(f, kInf);
    const double n = double(acc.n_pairs);
    if (n > 1) {
        const double cov = acc.sxy / n - (acc.sx / n) * (acc.sy / n);
        const double vx = acc.sxx / n - (acc.sx / n) * (acc.sx / n);
        const double vy = acc.syy / n - (acc.sy / n) * (acc.sy / n);
        rep.lag_correlation = (vx > 0 && vy > 0) ? cov / std::sqrt(vx * vy) : 0.0;
        rep.lag_threshold_1pct = 2.576 / std::sqrt(n);
        rep.uncorrelated_1pct = std::abs(rep.lag_correlation) <= rep.lag_threshold_1pct;
    }
    rep.predicted_qv_mean = acc.paths ? acc.sum_pred / double(acc.paths) : 0.0;
    if (rep.predicted_qv_mean > 0.0) {
        const MeanCI d = mean_ci_from_sums(acc.sum_d, acc.sum_d2, acc.paths);
        rep.qv_ratio = 1.0 + d.mean / rep.predicted_qv_mean;
        rep.qv_ratio_se = d.se / rep.predicted_qv_mean;
    }
    return rep;
}

MartingaleReport martingale_diagnostics(const PathEnsemble& ens, const ScalarField& f,
                                        const VectorField* drift_field, int windows) {
    return martingale_finalize(martingale_accumulate(ens, f, drift_field, windows), f);
}

void incompressibility_accumulate(const PathEnsemble& ens,
                                  std::span<const double> box_sides,
                                  const std::array<double, 3>& box_center,
                                  int checkpoints, bool collect_ks,
                                  IncompressibilityAccum& acc) {
    const TorusGrid& g = ens.grid();
    if (acc.paths == 0) {
        acc.checkpoint_steps = checkpoint_list(ens.steps(), checkpoints);
        acc.box_sides.assign(box_sides.begin(), box_sides.end());
        acc.box_center = box_center;
        acc.collect_ks = collect_ks;
        acc.dim = g.dim;
        acc.box_counts.assign(box_sides.size() * acc.checkpoint_steps.size(), 0);
        if (collect_ks) acc.coords.assign(acc.checkpoint_steps.size() * g.dim, {});
    }
    const auto& cps = acc.checkpoint_steps;
    for (std::int64_t i = 0; i < ens.paths(); ++i) {
        for (std::size_t c = 0; c < cps.size(); ++c) {
            const std::int64_t k = cps[c];
            if (acc.collect_ks)
                for (int a = 0; a < g.dim; ++a)
                    acc.coords[c * g.dim + a].push_back(
                        float(g.wrap(ens.pos(i, k, a)) / g.L));
            for (std::size_t b = 0; b < acc.box_sides.size(); ++b) {
                bool inside = true;
                for (int a = 0; a < g.dim; ++a) {
                    if (std::abs(g.wrap_diff(ens.pos(i, k, a), acc.box_center[a])) >
                        0.5 * acc.box_sides[b]) {
                        inside = false;
                        break;
                    }
                }
                if (inside) ++acc.box_counts[b * cps.size() + c];
            }
        }
    }
    acc.paths += ens.paths();
}

IncompressibilityReport incompressibility_finalize(const IncompressibilityAccum& acc,
                                                   double sup_density) {
    IncompressibilityReport rep;
    rep.sup_density = sup_density;
    if (acc.collect_ks) {
        for (const auto& sample : acc.coords) {
            std::vector<double> xs(sample.begin(), sample.end());
            const double ks = ks_statistic_uniform(std::move(xs));
            rep.worst_ks = std::max(rep.worst_ks, ks);
            if (!ks_uniform_pass(ks, acc.paths, 0.01)) rep.ks_pass_1pct = false;
        }
    }
    const std::size_t ncp = acc.checkpoint_steps.size();
    for (std::size_t b = 0; b < acc.box_sides.size(); ++b) {
        BoxRow row;
        row.side = acc.box_sides[b];
        row.volume = std::pow(row.side, acc.dim);
        double sup_ratio = 0.0, sup_hi = 0.0;
        for (std::size_t c = 0; c < ncp; ++c) {
            const double cnt = double(acc.box_counts[b * ncp + c]);
            const MeanCI prob = mean_ci_from_sums(cnt, cnt, acc.paths);
            sup_ratio = std::max(sup_ratio, prob.mean / row.volume);
            sup_hi = std::max(sup_hi, prob.ci_high / row.volume);
        }
        row.sup_ratio = sup_ratio;
        row.ci_high_ratio = sup_hi;
        rep.boxes.push_back(row);
        if (sup_ratio > 1.1 * rep.sup_density) rep.box_bound_ok = false;
    }
    return rep;
}

IncompressibilityReport incompressibility_check(const PathEnsemble& ens,
                                                const InitialSampler& init,
                                                std::span<const double> box_sides,
                                                int checkpoints, bool expect_uniform) {
    const TorusGrid& g = ens.grid();
    std::array<double, 3> center{0.5 * g.L, 0.5 * g.L, 0.5 * g.L};
    IncompressibilityAccum acc;
    incompressibility_accumulate(ens, box_sides, center, checkpoints, expect_uniform,
                                 acc);
    return incompressibility_finalize(acc, init.sup_density());
}

void StoppedCompositionAccum::merge(const StoppedCompositionAccum& o) {
    if (sum.empty()) {
        *this = o;
        return;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] += o.sum[i];
        sum2[i] += o.sum2[i];
    }
    identity_ok = identity_ok && o.identity_ok;
    max_abs = std::max(max_abs, o.max_abs);
    paths += o.paths;
}

StoppedCompositionAccum stopped_composition_accumulate(
    const PathEnsemble& ens, const SingularSet& K, double delta,
    std::span<const ScalarField> u_at_step_times, int checkpoints) {
    if (std::int64_t(u_at_step_times.size()) != ens.steps() + 1)
        throw std::invalid_argument(
            "stopped_composition: need one u slice per ensemble step (" +
            std::to_string(ens.steps() + 1) + " slices)");
    const TorusGrid& g = ens.grid();
    StoppedCompositionAccum acc;
    const auto cps = checkpoint_list(ens.steps(), checkpoints);
    acc.checkpoint_steps = cps;
    for (std::int64_t k : cps) acc.times.push_back(ens.time_of(k));
    acc.sum.assign(cps.size(), 0.0);
    acc.sum2.assign(cps.size(), 0.0);

    const StopRecord stop = stopping_time(ens, K, delta);
    for (std::size_t c = 0; c < cps.size(); ++c) {
        const std::int64_t kc = cps[c];
        for (std::int64_t i = 0; i < ens.paths(); ++i) {
            const std::int64_t tau = stop.tau_index[i] < 0
                                         ? std::numeric_limits<std::int64_t>::max()
                                         : stop.tau_index[i];
            const std::int64_t ks = std::min<std::int64_t>(kc, tau);
            const double u0 =
                interpolate_multilinear(g, u_at_step_times[0].values(), ens.path(i));
            const double ut = interpolate_multilinear(
                g, u_at_step_times[ks].values(), ens.path(i) + ks * g.dim);
            const double stat = ut - u0;
            acc.sum[c] += stat;
            acc.sum2[c] += stat * stat;
            acc.max_abs = std::max(acc.max_abs, std::abs(ut));
            if (tau >= kc) {
                const double direct = interpolate_multilinear(
                    g, u_at_step_times[kc].values(), ens.path(i) + kc * g.dim);
                if (direct != ut) acc.identity_ok = false;
            }
        }
    }
    acc.paths = ens.paths();
    return acc;
}

StoppedCompositionReport stopped_composition_finalize(
    const StoppedCompositionAccum& acc, std::span<const ScalarField> u_at_step_times) {
    StoppedCompositionReport rep;
    for (const auto& u : u_at_step_times)
        rep.sup_norm_u = std::max(rep.sup_norm_u, lp_norm(u, kInf));
    rep.identity_ok = acc.identity_ok;
    rep.max_abs_composition = acc.max_abs;
    for (std::size_t c = 0; c < acc.sum.size(); ++c) {
        const MeanCI m = mean_ci_from_sums(acc.sum[c], acc.sum2[c], acc.paths);
        rep.checkpoint_means.emplace_back(acc.times[c], m);
        if (std::abs(m.mean) > 3.0 * m.se + 1e-12) rep.zero_mean_3se = false;
    }
    rep.sup_bound_ok =
        rep.max_abs_composition <= rep.sup_norm_u * (1.0 + 1e-9) + 1e-12;
    return rep;
}

StoppedCompositionReport stopped_composition_test(
    const PathEnsemble& ens, const SingularSet& K, double delta,
    std::span<const ScalarField> u_at_step_times, int checkpoints) {
    return stopped_composition_finalize(
        stopped_composition_accumulate(ens, K, delta, u_at_step_times, checkpoints),
        u_at_step_times);
}

}  // namespace supersde
