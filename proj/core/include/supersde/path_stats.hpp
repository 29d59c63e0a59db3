#pragma once

#include <span>
#include <vector>

#include "supersde/sde.hpp"
#include "supersde/singular.hpp"
#include "supersde/stats.hpp"

namespace supersde {

/// First entry of (t, X_t) into the closed delta-neighborhood of K, on the
/// discrete time grid. The continuous-time overshoot bias is bounded by the
/// path modulus over one step, reported as max_step_displacement.
struct StopRecord {
    double delta = 0.0;
    std::vector<std::int64_t> tau_index;  // -1 = never
    double hit_fraction = 0.0;
    MeanCI hit_prob;                      // P(tau^delta < T)
    double max_step_displacement = 0.0;
};

StopRecord stopping_time(const PathEnsemble& ens, const SingularSet& K, double delta);

/// Discrete C^alpha quotient: max over dyadic pairs (k 2^l, (k+1) 2^l) of
/// |X_t - X_s| / |t-s|^alpha, on unwrapped displacements.
double holder_norm_path(const PathEnsemble& ens, std::int64_t i, double alpha);
std::vector<double> holder_norms(const PathEnsemble& ens, double alpha);

struct TailRow {
    double level = 0.0;   // L
    MeanCI prob;          // P(||X||_{C^alpha} > L)
};

struct HolderTail {
    std::vector<TailRow> rows;
    double exponent = 0.0;  // fitted slope of log P vs log L
    int fitted_rows = 0;
};

HolderTail holder_tail(const PathEnsemble& ens, double alpha,
                       std::span<const double> levels);

struct MomentRegression {
    std::vector<std::pair<double, double>> rows;  // (gap, E|X_{t+gap}-X_t|^p)
    double slope = 0.0;                           // expected p/2 for Brownian
};

MomentRegression moment_regression(const PathEnsemble& ens, double p,
                                   int dyadic_levels);

/// Occupation Leb{ s <= T : (s, X_s) in B_eps(K) } by step counting, plus
/// the pathwise lower bound min{ (eps'/(sqrt2 ||X||_Calpha))^(1/alpha),
/// eps'/sqrt2 } checked on the sub-ensemble that enters B_delta0(K).
struct OccupationResult {
    std::vector<double> occupation;      // per path
    std::vector<char> hit;               // entered the delta0 neighborhood
    std::int64_t hitters = 0;
    std::int64_t violations = 0;         // occupation < bound - 2 dt
    double min_margin = 0.0;             // min over hitters of occ - bound
    double median_hitter_occupation = 0.0;
};

OccupationResult occupation_time(const PathEnsemble& ens, const SingularSet& K,
                                 double eps, double alpha, double delta0);

/// sup_t |int_0^t f(X_s) ds| per path (Riemann sum), and moments.
struct AdditiveFunctional {
    std::vector<double> sup_abs;
    double moment(double p) const;
};

AdditiveFunctional additive_functional(const PathEnsemble& ens, const ScalarField& f);

/// Ito-trick ratios over an ensemble of test potentials g:
///  laplacian route: E sup_t |int Delta g|^p over
///                   ||eta||_kappa T^{p(1/2-1/q)} || |grad g| ||_{L^q_T L^{p kappa'}}^p
///  general route:   E sup_t |int f|^p over
///                   ||eta||_kappa || f ||_{L^q_T B^{-1}_{kappa' p, 2}}^p,  f = Delta g.
/// The implicit constants are drift-independent, which is what the
/// two-drift comparison pins.
struct ItoTrickRow {
    double ratio_laplacian = 0.0;
    double ratio_general = 0.0;
};

struct ItoTrickCheck {
    std::vector<ItoTrickRow> rows;
    double max_ratio_laplacian = 0.0;
    double max_ratio_general = 0.0;
    double p = 2.0, q = kInf, kappa = kInf;
};

/// Block-mergeable: E sup|...|^p accumulates over path blocks.
struct ItoTrickAccum {
    std::vector<double> sup_pow_sum;  // per test potential
    std::int64_t paths = 0;
    void merge(const ItoTrickAccum& o);
};

ItoTrickAccum ito_trick_accumulate(const PathEnsemble& ens,
                                   std::span<const ScalarField> test_potentials,
                                   double p);
ItoTrickCheck ito_trick_finalize(const ItoTrickAccum& acc, const InitialSampler& init,
                                 std::span<const ScalarField> test_potentials,
                                 double p, double q, double kappa,
                                 double horizon);
ItoTrickCheck ito_trick_check(const PathEnsemble& ens, const InitialSampler& init,
                              std::span<const ScalarField> test_potentials,
                              double p, double q, double kappa);

/// Discrete M^f_t = f(X_t) - f(X_0) - int (Delta f + b.grad f)(X_s) ds with
/// (a) zero-mean test at T, (b) lag correlation of window increments,
/// (c) realized quadratic variation against 2 int |grad f|^2 (X_s) ds — the
/// sqrt(2) noise doubles the carre-du-champ.
struct MartingaleReport {
    MeanCI terminal_mean;
    double terminal_scale = 0.0;   // ||f||_inf, for relative comparisons
    double lag_correlation = 0.0;
    double lag_threshold_1pct = 0.0;
    bool uncorrelated_1pct = false;
    double qv_ratio = 0.0;         // realized / predicted
    double qv_ratio_se = 0.0;
    double predicted_qv_mean = 0.0;
};

struct MartingaleAccum {
    double sum_mt = 0.0, sum_mt2 = 0.0;
    double sum_d = 0.0, sum_d2 = 0.0, sum_pred = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    std::int64_t n_pairs = 0;
    std::int64_t paths = 0;
    int windows = 16;
    void merge(const MartingaleAccum& o);
};

MartingaleAccum martingale_accumulate(const PathEnsemble& ens, const ScalarField& f,
                                      const VectorField* drift_field,
                                      int windows = 16);
MartingaleReport martingale_finalize(const MartingaleAccum& acc, const ScalarField& f);
MartingaleReport martingale_diagnostics(const PathEnsemble& ens, const ScalarField& f,
                                        const VectorField* drift_field,
                                        int windows = 16);

/// Incompressibility: P(X_t in B) <= eps + M Leb(B). For uniform eta the law
/// stays uniform under divergence-free drift (KS test per coordinate); for
/// general eta a family of shrinking boxes around the density peak checks
/// sup_t P(X_t in B)/Leb(B) against ||eta||_inf.
struct BoxRow {
    double side = 0.0;
    double volume = 0.0;
    double sup_ratio = 0.0;   // sup over checkpoints of P-hat / volume
    double ci_high_ratio = 0.0;
};

struct IncompressibilityReport {
    double worst_ks = 0.0;
    bool ks_pass_1pct = true;      // meaningful for uniform-law runs
    std::vector<BoxRow> boxes;
    double sup_density = 0.0;      // ||eta||_inf reference
    bool box_bound_ok = true;      // sup_ratio <= 1.1 ||eta||_inf everywhere
};

struct IncompressibilityAccum {
    std::vector<std::vector<float>> coords;  // [checkpoint*axis] wrapped/L samples
    std::vector<std::int64_t> box_counts;    // [box * n_checkpoints + cp]
    std::vector<double> box_sides;
    std::vector<std::int64_t> checkpoint_steps;
    std::array<double, 3> box_center{0.0, 0.0, 0.0};
    int dim = 2;
    std::int64_t paths = 0;
    bool collect_ks = true;
};

void incompressibility_accumulate(const PathEnsemble& ens,
                                  std::span<const double> box_sides,
                                  const std::array<double, 3>& box_center,
                                  int checkpoints, bool collect_ks,
                                  IncompressibilityAccum& into);
IncompressibilityReport incompressibility_finalize(const IncompressibilityAccum& acc,
                                                   double sup_density);
IncompressibilityReport incompressibility_check(const PathEnsemble& ens,
                                                const InitialSampler& init,
                                                std::span<const double> box_sides,
                                                int checkpoints = 8,
                                                bool expect_uniform = false);

/// Stopped composition u(t ^ tau^delta, X_{t ^ tau^delta}) - u(0, X_0):
/// zero-mean test across the checkpoint grid, the stopped identity
/// 1_{tau >= t} u(t ^ tau, X_{t ^ tau}) = 1_{tau >= t} u(t, X_t) (exact
/// bookkeeping on the discrete grid), and the pathwise sup bound by
/// ||u||_{L^inf_T L^inf}.
struct StoppedCompositionReport {
    std::vector<std::pair<double, MeanCI>> checkpoint_means;
    bool identity_ok = true;
    double max_abs_composition = 0.0;
    double sup_norm_u = 0.0;
    bool sup_bound_ok = true;
    bool zero_mean_3se = true;
};

struct StoppedCompositionAccum {
    std::vector<std::int64_t> checkpoint_steps;
    std::vector<double> times;
    std::vector<double> sum, sum2;
    bool identity_ok = true;
    double max_abs = 0.0;
    std::int64_t paths = 0;
    void merge(const StoppedCompositionAccum& o);
};

StoppedCompositionAccum stopped_composition_accumulate(
    const PathEnsemble& ens, const SingularSet& K, double delta,
    std::span<const ScalarField> u_at_step_times, int checkpoints);
StoppedCompositionReport stopped_composition_finalize(
    const StoppedCompositionAccum& acc, std::span<const ScalarField> u_at_step_times);
StoppedCompositionReport stopped_composition_test(
    const PathEnsemble& ens, const SingularSet& K, double delta,
    std::span<const ScalarField> u_at_step_times, int checkpoints = 8);

}  // namespace supersde
