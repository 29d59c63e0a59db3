#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supersde/singular.hpp"
#include "supersde/synth.hpp"

namespace supersde {

struct GridSpec {
    int d = 2;
    int N = 64;
    double L = 2.0 * M_PI;
    TorusGrid make() const { return TorusGrid(d, N, L); }
};

/// Drift construction recipe plus the regularity parameters the theory
/// conditions are checked against.
struct DriftSpec {
    enum class Kind { RandomBesov, Vortex, Superposition };
    Kind kind = Kind::RandomBesov;

    // shared condition parameters
    double gamma = 0.0;          // drift regularity -gamma
    double p = 8.0;              // integrability
    double q = kInf;             // time integrability in (excond)
    double target_beta = 0.0;    // rate the eta threshold is evaluated at

    // random_besov
    double s = 1.0;              // potential regularity, -gamma + 1
    double amplitude = 1.0;
    std::uint64_t seed = 1;

    // vortex
    double lambda = 0.0;
    std::array<double, 2> center{0.0, 0.0};
    double cutoff_radius = 1.0;

    GridSpec grid;
    std::vector<SpaceTimeBall> K;

    std::vector<DriftSpec> parts;  // superposition members
};

DriftSpec drift_spec_from_json(const std::string& json_text);
DriftSpec drift_spec_from_json_file(const std::string& path);
std::string drift_spec_to_json(const DriftSpec& spec);

/// Builds the antisymmetric potential the spec describes (deterministic in
/// the seed).
AntisymmetricField build_potential(const DriftSpec& spec);
SingularSet build_singular_set(const DriftSpec& spec);

/// Evaluation of every parameter condition the theory imposes. Pure
/// function of its inputs; violations are marked, never fatal.
struct ConditionReport {
    int d = 2;
    double gamma = 0.0, p = 0.0, q = kInf;

    double excond_value = 0.0;        // p (1/2 - 1/q)
    bool excond_holds = false;        // > 1

    double criticality_threshold = 0.0;  // d / (1 - gamma)
    // Scaling verdict for b in B^{-gamma}_{p,inf}: under the parabolic
    // zoom-in the drift norm scales like lambda^{gamma + d/p - 1}, so the
    // drift effect grows at small scales iff p < d/(1-gamma).
    std::string scaling_verdict;      // supercritical / critical / subcritical

    double alpha = 0.0;               // 1/2 - 1/q - 1/p
    double hoelder_class_bound = 0.0; // (p/2 - 1)/p, time-independent A in L^p
    double beta_max = 0.0;            // 1 - 2/p - gamma
    bool rate_hypothesis_ok = false;  // gamma in [0,1), p in (2,inf), p > 2/(1-gamma)

    double target_beta = 0.0;
    double eta_q_threshold = 0.0;     // 2p / ((2 - beta - gamma) p - 2)
    bool eta_threshold_defined = false;

    bool vortex_lp_ok = true;         // lambda p < d when a vortex is present
    bool in_theory = false;

    std::string to_json() const;
};

ConditionReport condition_report(const DriftSpec& spec, int d);

/// eta integrability threshold 2p/((2-beta-gamma)p - 2); infinity when the
/// denominator is not positive.
double eta_q_threshold(double beta, double gamma, double p);

/// Dimension gate from the never-hit discussion for K = [0,T] x {0} and
/// time-independent A in L^p: requires p > 2d/(d-2) (infinite for d <= 2).
double never_hit_min_p(int d);

}  // namespace supersde
