#include "supersde/kbe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "supersde/fft.hpp"
#include "supersde/multiplier.hpp"

namespace supersde {

namespace {

using Spectrum = std::vector<std::complex<double>>;

// Spectral workspace: frequency tables, dealias mask, cached potential
// values, scratch buffers.
class KbeWorkspace {
  public:
    KbeWorkspace(const TorusGrid& grid, const AntisymmetricField* A)
        : g(grid), n(grid.size()) {
        xi_.assign(std::size_t(g.dim) * n, 0.0);
        xi2_.assign(n, 0.0);
        mask_.assign(n, 1.0);
        const int kmax = dealias_limit(g);
        const double nyq = g.nyquist();
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k,
                             const std::array<double, 3>& xi) {
            double s = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                // Nyquist row zeroed in every derivative
                const bool nyquist = xi[a] <= -nyq * (1.0 - 1e-12);
                xi_[a * n + idx] = nyquist ? 0.0 : xi[a];
                s += xi[a] * xi[a];
            }
            xi2_[idx] = s;
            for (int a = 0; a < g.dim; ++a)
                if (std::abs(k[a]) > kmax) mask_[idx] = 0.0;
        });
        if (A) {
            pot_.reserve(A->components());
            for (int c = 0; c < A->components(); ++c) {
                const ScalarField trunc = dealias(A->potential(c));
                pot_.emplace_back(trunc.values().begin(), trunc.values().end());
            }
        }
        for (auto& b : scratch_) b.assign(n, {0.0, 0.0});
        rvals_.assign(n, 0.0);
    }

    bool has_transport() const { return !pot_.empty(); }

    // T(v) = div(A grad v), dealiased; also reports <T v, v> and |T v| for
    // the skewness monitor when requested.
    void transport(const Spectrum& vhat, Spectrum& out, double* skew_num = nullptr,
                   double* skew_den = nullptr) {
        const int d = g.dim;
        // grad v in real space
        for (int a = 0; a < d; ++a) {
            auto& buf = scratch_[a];
            const double* xia = &xi_[a * n];
            for (std::int64_t i = 0; i < n; ++i)
                buf[i] = std::complex<double>(0.0, xia[i]) * vhat[i];
            fft::backward(g, buf.data());
        }
        const double inv_vol = 1.0 / g.volume();
        // w = A grad v pointwise from the potential, packed back into the
        // axis buffers
        if (d == 2) {
            const auto& a0 = pot_[0];
            for (std::int64_t i = 0; i < n; ++i) {
                const double g0 = scratch_[0][i].real() * inv_vol;
                const double g1 = scratch_[1][i].real() * inv_vol;
                scratch_[0][i] = a0[i] * g1;
                scratch_[1][i] = -a0[i] * g0;
            }
        } else {
            const auto& w0 = pot_[0];
            const auto& w1 = pot_[1];
            const auto& w2 = pot_[2];
            for (std::int64_t i = 0; i < n; ++i) {
                const double g0 = scratch_[0][i].real() * inv_vol;
                const double g1 = scratch_[1][i].real() * inv_vol;
                const double g2 = scratch_[2][i].real() * inv_vol;
                scratch_[0][i] = g1 * w2[i] - g2 * w1[i];
                scratch_[1][i] = g2 * w0[i] - g0 * w2[i];
                scratch_[2][i] = g0 * w1[i] - g1 * w0[i];
            }
        }
        // div w spectrally, dealiased
        out.assign(n, {0.0, 0.0});
        for (int a = 0; a < d; ++a) {
            auto& buf = scratch_[a];
            fft::forward(g, buf.data());
            const double* xia = &xi_[a * n];
            const double cell = g.cell_volume();
            for (std::int64_t i = 0; i < n; ++i)
                out[i] += std::complex<double>(0.0, xia[i]) * buf[i] * cell;
        }
        for (std::int64_t i = 0; i < n; ++i) out[i] *= mask_[i];
        if (skew_num && skew_den) {
            double num = 0.0, den_t = 0.0, den_v = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                num += (out[i] * std::conj(vhat[i])).real();
                den_t += std::norm(out[i]);
                den_v += std::norm(vhat[i]);
            }
            *skew_num = std::abs(num);
            *skew_den = std::sqrt(den_t * den_v);
        }
    }

    void heat(Spectrum& vhat, double dt) {
        for (std::int64_t i = 0; i < n; ++i)
            vhat[i] *= std::exp(-xi2_[i] * dt);
    }

    // exact integral of ||grad v||^2 over a heat substep of length dt
    double heat_dissipation_integral(const Spectrum& vhat, double dt) const {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (xi2_[i] == 0.0) continue;
            s += 0.5 * (1.0 - std::exp(-2.0 * xi2_[i] * dt)) * std::norm(vhat[i]);
        }
        return s / g.volume();
    }

    double l2_sq(const Spectrum& vhat) const {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += std::norm(vhat[i]);
        return s / g.volume();
    }

    double grad_sq(const Spectrum& vhat) const {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += xi2_[i] * std::norm(vhat[i]);
        return s / g.volume();
    }

    ScalarField materialise(const Spectrum& vhat) {
        return ScalarField::from_coeffs(g, vhat);
    }

    double linf(const Spectrum& vhat) {
        auto& buf = scratch_[0];
        buf = vhat;
        fft::backward(g, buf.data());
        const double inv_vol = 1.0 / g.volume();
        double m = 0.0;
        for (std::int64_t i = 0; i < n; ++i)
            m = std::max(m, std::abs(buf[i].real() * inv_vol));
        return m;
    }

    const TorusGrid g;
    const std::int64_t n;

  private:
    std::vector<double> xi_, xi2_, mask_;
    std::vector<std::vector<double>> pot_;
    std::array<Spectrum, 3> scratch_;
    std::vector<double> rvals_;
};

}  // namespace

const ScalarField& KbeRun::slice_at(double t) const {
    for (const auto& [st, f] : slices)
        if (std::abs(st - t) <= 0.5 * dt + 1e-12) return f;
    throw std::invalid_argument("KbeRun: no slice stored at t = " + std::to_string(t));
}

bool KbeRun::has_slice(double t) const {
    for (const auto& [st, f] : slices)
        if (std::abs(st - t) <= 0.5 * dt + 1e-12) return true;
    return false;
}

KbeRun solve_kbe(const AntisymmetricField* A, const ScalarField& v0,
                 const KbeOptions& opts) {
    const TorusGrid& g = v0.grid();
    if (A && A->grid() != g)
        throw std::invalid_argument("solve_kbe: grid mismatch between A and v0");
    if (!(opts.dt > 0.0) || !(opts.T > 0.0))
        throw std::invalid_argument("solve_kbe: need positive T and dt");
    if (A && opts.check_cfl) {
        const double bmax = drift(*A).max_pointwise_norm();
        if (bmax > 0.0 && opts.dt > 0.25 * g.h() / bmax)
            throw std::invalid_argument(
                "solve_kbe: CFL gate dt <= 0.25 h / max|b| violated; max|b| = " +
                std::to_string(bmax) + " requires dt <= " +
                std::to_string(0.25 * g.h() / bmax));
    }

    const std::int64_t steps = std::int64_t(std::llround(opts.T / opts.dt));
    if (steps <= 0) throw std::invalid_argument("solve_kbe: T < dt");
    const double dt = opts.T / double(steps);

    std::vector<std::int64_t> slice_steps;
    for (double t : opts.slice_times) {
        const std::int64_t k =
            std::min<std::int64_t>(steps, std::max<std::int64_t>(0, std::llround(t / dt)));
        slice_steps.push_back(k);
    }

    KbeWorkspace ws(g, A);
    const ScalarField v0d = dealias(v0);
    Spectrum vhat(v0d.coeffs().begin(), v0d.coeffs().end());

    KbeRun run;
    run.grid = g;
    run.dt = dt;
    run.scheme = opts.scheme;
    run.initial_linf = ws.linf(vhat);
    run.max_linf = run.initial_linf;

    const double e0 = ws.l2_sq(vhat);
    double grad_integral = 0.0;
    Spectrum k1, k2, stage;

    auto store_slices = [&](std::int64_t k, double t) {
        for (std::size_t s = 0; s < slice_steps.size(); ++s)
            if (slice_steps[s] == k) {
                run.slices.emplace_back(t, ws.materialise(vhat));
                break;
            }
    };

    auto transport_substep = [&](double h) {
        if (!ws.has_transport()) return;
        double num = 0.0, den = 0.0;
        ws.transport(vhat, k1, &num, &den);
        if (den > 0.0)
            run.transport_skew_residual =
                std::max(run.transport_skew_residual, num / den);
        stage = vhat;
        for (std::int64_t i = 0; i < ws.n; ++i) stage[i] += h * k1[i];
        ws.transport(stage, k2);
        for (std::int64_t i = 0; i < ws.n; ++i)
            vhat[i] += 0.5 * h * (k1[i] + k2[i]);
    };

    store_slices(0, 0.0);
    {
        BudgetRow row{0.0, ws.l2_sq(vhat), ws.grad_sq(vhat), run.initial_linf};
        run.budget.push_back(row);
        run.l2t_h1_sq += 0.5 * dt * (row.l2_sq + row.grad_sq);
    }

    for (std::int64_t k = 0; k < steps; ++k) {
        if (opts.scheme == KbeScheme::Strang) {
            grad_integral += ws.heat_dissipation_integral(vhat, 0.5 * dt);
            ws.heat(vhat, 0.5 * dt);
            transport_substep(dt);
            grad_integral += ws.heat_dissipation_integral(vhat, 0.5 * dt);
            ws.heat(vhat, 0.5 * dt);
        } else {
            transport_substep(dt);
            grad_integral += ws.heat_dissipation_integral(vhat, dt);
            ws.heat(vhat, dt);
        }
        const double t = dt * double(k + 1);
        BudgetRow row{t, ws.l2_sq(vhat), ws.grad_sq(vhat), ws.linf(vhat)};
        run.budget.push_back(row);
        run.max_linf = std::max(run.max_linf, row.linf);
        const double w = (k + 1 == steps) ? 0.5 : 1.0;
        run.l2t_h1_sq += w * dt * (row.l2_sq + row.grad_sq);
        store_slices(k + 1, t);
    }

    const double eT = ws.l2_sq(vhat);
    run.dissipation_residual = std::abs(eT - e0 + 2.0 * grad_integral) / opts.T;
    return run;
}

namespace {

ScalarField band_project(const ScalarField& f) { return dealias(f); }

double rel_l2(const ScalarField& a, const ScalarField& b) {
    const double na = lp_norm(a, 2.0), nb = lp_norm(b, 2.0);
    const double scale = std::max(std::max(na, nb), 1e-300);
    return lp_norm(a - b, 2.0) / scale;
}

}  // namespace

IdentityResiduals identity_check(const AntisymmetricField& A, const ScalarField& u) {
    if (A.grid() != u.grid())
        throw std::invalid_argument("identity_check: grid mismatch");
    const TorusGrid& g = u.grid();

    AntisymmetricField Ad = A.dim() == 2
        ? AntisymmetricField::stream2d(dealias(A.potential(0)))
        : AntisymmetricField::potential3d({dealias(A.potential(0)),
                                           dealias(A.potential(1)),
                                           dealias(A.potential(2))});
    const ScalarField ud = dealias(u);
    const VectorField b = drift(Ad);
    const VectorField grad_u = gradient(ud);

    // route 1: b . grad u (pointwise)
    ScalarField r1 = ScalarField::zero(g);
    for (int a = 0; a < g.dim; ++a) r1 = r1 + b.comp(a).pointwise(grad_u.comp(a));
    r1 = band_project(r1);

    // route 2: div(b u)
    std::vector<ScalarField> bu;
    for (int a = 0; a < g.dim; ++a) bu.push_back(b.comp(a).pointwise(ud));
    ScalarField r2 = band_project(divergence(VectorField(std::move(bu))));

    // route 3: div(A grad u)
    ScalarField r3 = band_project(divergence(apply_matrix(Ad, grad_u)));

    IdentityResiduals res;
    res.grad_vs_divbu = rel_l2(r1, r2);
    res.grad_vs_divAgrad = rel_l2(r1, r3);
    res.divbu_vs_divAgrad = rel_l2(r2, r3);
    res.max_rel = std::max({res.grad_vs_divbu, res.grad_vs_divAgrad,
                            res.divbu_vs_divAgrad});
    return res;
}

double expectation_oracle(const KbeRun& run, const ScalarField& eta, double t) {
    const ScalarField& v = run.slice_at(t);
    if (eta.grid() != v.grid())
        throw std::invalid_argument("expectation_oracle: eta grid mismatch");
    const double cell = v.grid().cell_volume();
    double s = 0.0;
    auto ev = eta.values();
    auto vv = v.values();
    for (std::int64_t i = 0; i < v.size(); ++i) s += ev[i] * vv[i];
    return s * cell;
}

double expectation_oracle_uniform(const KbeRun& run, double t) {
    return run.slice_at(t).mean();
}

double duhamel_defect(const AntisymmetricField& A_m, const AntisymmetricField& A_n,
                      const ScalarField& f, double t, int quadrature_nodes,
                      double dt, KbeScheme scheme) {
    if (quadrature_nodes < 2)
        throw std::invalid_argument("duhamel_defect: need >= 2 quadrature nodes");
    const TorusGrid& g = f.grid();
    const VectorField bm = drift(A_m);
    const VectorField bn = drift(A_n);
    std::vector<ScalarField> bdiff;
    for (int a = 0; a < g.dim; ++a) bdiff.push_back(bm.comp(a) - bn.comp(a));

    // slices of P^m_s f at the quadrature nodes
    std::vector<double> nodes(quadrature_nodes + 1);
    for (int i = 0; i <= quadrature_nodes; ++i)
        nodes[i] = t * double(i) / double(quadrature_nodes);
    KbeOptions mopts{t, dt, scheme, nodes, true};
    const KbeRun mrun = solve_kbe(&A_m, f, mopts);

    KbeOptions lhs_n{t, dt, scheme, {t}, true};
    const KbeRun nrun = solve_kbe(&A_n, f, lhs_n);
    const ScalarField lhs = mrun.slice_at(t) - nrun.slice_at(t);

    ScalarField rhs = ScalarField::zero(g);
    const double panel = t / double(quadrature_nodes);
    for (int i = 0; i <= quadrature_nodes; ++i) {
        const double s = nodes[i];
        const ScalarField& vms = mrun.slice_at(s);
        VectorField grad_vms = gradient(vms);
        ScalarField w = ScalarField::zero(g);
        for (int a = 0; a < g.dim; ++a)
            w = w + bdiff[a].pointwise(grad_vms.comp(a));
        w = dealias(w);
        ScalarField propagated = w;
        if (t - s > 0.5 * dt) {
            KbeOptions popts{t - s, dt, scheme, {t - s}, true};
            propagated = solve_kbe(&A_n, w, popts).slice_at(t - s);
        }
        const double weight = (i == 0 || i == quadrature_nodes) ? 0.5 : 1.0;
        rhs = rhs + propagated * (weight * panel);
    }
    return lp_norm(lhs - rhs, 2.0) / std::max(lp_norm(lhs, 2.0), 1e-300);
}

}  // namespace supersde
