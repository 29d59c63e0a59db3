#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supersde/conditions.hpp"
#include "supersde/kbe.hpp"
#include "supersde/mollify.hpp"
#include "supersde/path_stats.hpp"
#include "supersde/report.hpp"
#include "supersde/stats.hpp"

namespace supersde {

struct McParams {
    std::int64_t paths = 10000;
    double dt = 1e-3;
    double T = 0.25;
    int checkpoints = 8;
    std::int64_t block = 4096;
};

/// Test function as a list of cosine modes (the "fs" config entries).
struct TestFunctionSpec {
    struct Mode {
        std::array<int, 3> k{1, 0, 0};
        double amp = 1.0;
        double phase = 0.0;
    };
    std::vector<Mode> modes{Mode{}};
    ScalarField build(const TorusGrid& g) const;
};

struct EtaSpec {
    enum class Kind { Uniform, Bump, File };
    Kind kind = Kind::Uniform;
    double height = 1.0;       // bump peak relative to the uniform density
    double width = 0.25;       // bump radius as a fraction of L
    std::string path;          // SSL1 file
    std::string label() const;
    /// nullopt = uniform
    std::optional<ScalarField> build(const TorusGrid& g) const;
};

enum class OracleMode { Kbe, SelfDifference };

struct RateConfig {
    DriftSpec drift;
    std::vector<double> levels{2, 4, 8, 16};
    std::optional<double> n_ref;   // kbe reference level; default 8 x max level
    McParams mc;
    EtaSpec eta;
    double eta_q = kInf;           // integrability index for the prefactor
    TestFunctionSpec f;
    OracleMode oracle = OracleMode::Kbe;
    std::uint64_t seed = 1;
    double kbe_dt = 0.0;           // 0: auto from the CFL gate
};

struct LevelError {
    double level = 0.0;
    double error = 0.0;       // e_n (kbe) or d_n (self-difference)
    double se = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    bool informative = true;  // error > 2 x pooled SE
};

struct RateReport {
    std::vector<LevelError> rows;
    std::vector<double> tail_bound;  // self-difference: sum_{i>=0} d_{2^i n}
    LineFit fit;                     // log error vs log n, informative rows
    double beta_hat = 0.0;           // -slope
    double beta_ci_low = 0.0, beta_ci_high = 0.0, ci_width = 0.0;
    double beta_max = 0.0;
    ConditionReport conditions;
    double b_norm = 0.0;             // measured ||b||_{B^{-gamma}_{p,inf}}
    double f_l2linf = 0.0;
    double eta_prefactor = 1.0;      // max(1, ||eta||_{L^q})
    double noise_floor = 0.0;        // 2 x pooled SE
    bool errors_decreasing = true;   // informative rows strictly decreasing
    bool exact_zero = false;         // every level at the noise floor (b = 0)
    std::string verdict;
    std::string oracle_mode;
};

RateReport weak_rate(const RateConfig& cfg);
void write_rate_artifacts(const RateReport& rep, const std::string& dir,
                          const std::string& name);

struct EtaSensitivityRow {
    std::string label;
    double eta_lq = 0.0;       // ||eta||_{L^q}
    double prefactor = 1.0;    // max(1, ||eta||_{L^q})
    bool out_of_theory = false;
    std::vector<LevelError> rows;
    std::vector<double> ratio_to_baseline;  // per level
};

struct EtaSensitivityReport {
    std::vector<EtaSensitivityRow> rows;  // first row is the baseline
    double eta_q_threshold = 0.0;
    double used_q = kInf;
};

EtaSensitivityReport eta_sensitivity(const RateConfig& base,
                                     const std::vector<EtaSpec>& etas);

struct SingularityConfig {
    DriftSpec drift;             // vortex with K
    std::vector<double> eps_grid{0.05, 0.1, 0.2};
    double level = 8.0;          // the n the Corollary bound is evaluated at
    double n_ref = 64.0;         // proxy for the unapproximated process
    McParams mc;                 // dt is lowered to the worst stability gate
    TestFunctionSpec f;
    std::vector<double> L_grid;  // empty: auto log-spaced
    double alpha = 0.0;          // 0: use 1/2 - 1/p
    std::uint64_t seed = 1;
};

struct SingularityEpsRow {
    double eps = 0.0;
    MeanCI hit_ref, hit_n, hit_stop_ref, hit_stop_n;  // P(tau^eps < T), 4 processes
    double measured_error = 0.0;   // sup_t |MC_ref f - MC_n f|
    double stopped_error = 0.0;    // sup_t |MC f(X^{eps,ref}) - f(X^{eps,n})|
    double envelope = 0.0;         // ||f||inf sum P + stopped_error
    bool envelope_ok = true;
    double b_eps_norm = 0.0;       // ||b^eps||_{B^{-gamma}_{p,inf}}
    double delta_tilde = 0.0;      // m-hat - 1/alpha
    double L_min = 0.0;            // paper optimiser
    double L_argmin = 0.0;         // grid argmin of the two-term bound
    int argmin_cell_distance = 0;
};

struct SingularityReport {
    std::vector<SingularityEpsRow> rows;
    bool hits_decreasing_ci = false;  // CI separation between extreme eps
    double measure_exponent = 0.0;    // fitted spatial neighborhood exponent
    double alpha = 0.0;
    double occupation_exponent = 0.0; // median hitter occupation vs eps
    std::vector<double> L_grid;
    ConditionReport conditions;
};

SingularityReport singularity_rate(const SingularityConfig& cfg);
void write_singularity_artifacts(const SingularityReport& rep, const std::string& dir);

struct DimensionGate {
    double measured_exponent = 0.0;  // space-time neighborhood exponent
    double required = 0.0;           // 1/alpha
    bool never_hit = false;
    std::vector<std::pair<double, MeanCI>> empirical_hits;
    bool empirical_decreasing = false;
};

/// Analytic part of the never-hit gate; empirical hit probabilities can be
/// attached with empirical_hit_scan.
DimensionGate hoelder_dimension_gate(const SingularSet& K, double alpha,
                                     double delta_margin,
                                     std::span<const double> eps_grid,
                                     double horizon);
std::vector<std::pair<double, MeanCI>> empirical_hit_scan(
    const PathEnsemble& ens, const SingularSet& K, std::span<const double> eps_grid);

struct SuiteConfig {
    DriftSpec drift;
    double level = 8.0;
    double ito_level_b = 32.0;   // second level for the drift-independence check
    McParams mc;
    std::int64_t ito_paths = 10000;
    double ito_p = 2.0;
    std::uint64_t seed = 1;
    double stop_delta = 0.0;     // 0: no stopping (empty K)
};

struct SuiteReport {
    IncompressibilityReport incompressibility;
    MartingaleReport martingale;
    ItoTrickCheck ito_a, ito_b;
    double ito_agreement = 0.0;  // max ratio across the two levels
    StoppedCompositionReport stopped;
    bool all_pass = false;
    std::string to_json() const;
};

SuiteReport energy_solution_suite(const SuiteConfig& cfg);

/// Executes the experiment list of a JSON config; writes one directory per
/// experiment plus a manifest with config hash, seeds and wall times.
/// Partial failures are recorded in the manifest and remaining experiments
/// continue. Refuses an existing output directory unless force is set.
struct RunOutcome {
    std::string manifest_path;
    int executed = 0;
    int failed = 0;
};

RunOutcome run_config(const std::string& config_path, const std::string& out_dir,
                      bool force);

}  // namespace supersde
