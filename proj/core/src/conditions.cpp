#include "supersde/conditions.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace supersde {

using nlohmann::json;

namespace {

double parse_extended(const json& j, double fallback) {
    if (j.is_null()) return fallback;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
        throw std::invalid_argument("expected a number or \"inf\", got \"" + s + "\"");
    }
    return j.get<double>();
}

SpaceTimeBall parse_primitive(const json& j) {
    SpaceTimeBall b;
    if (!j.contains("center"))
        throw std::invalid_argument("K primitive: missing \"center\"");
    const auto& c = j.at("center");
    for (std::size_t a = 0; a < c.size() && a < 3; ++a) b.center[a] = c[a].get<double>();
    b.radius = j.value("radius", 0.0);
    if (j.contains("t0")) b.t0 = parse_extended(j.at("t0"), -kInf);
    if (j.contains("t1")) b.t1 = parse_extended(j.at("t1"), kInf);
    return b;
}

DriftSpec parse_spec(const json& j) {
    DriftSpec s;
    const std::string kind = j.value("kind", "random_besov");
    if (kind == "random_besov") s.kind = DriftSpec::Kind::RandomBesov;
    else if (kind == "vortex") s.kind = DriftSpec::Kind::Vortex;
    else if (kind == "superposition") s.kind = DriftSpec::Kind::Superposition;
    else
        throw std::invalid_argument("drift spec: unknown kind \"" + kind + "\"");

    s.gamma = j.value("gamma", 0.0);
    if (j.contains("p")) s.p = j.at("p").get<double>();
    if (j.contains("q")) s.q = parse_extended(j.at("q"), kInf);
    s.target_beta = j.value("target_beta", 0.0);
    s.s = j.contains("s") ? j.at("s").get<double>() : (1.0 - s.gamma);
    s.amplitude = j.value("amplitude", 1.0);
    s.seed = j.value("seed", std::uint64_t(1));
    s.lambda = j.value("lambda", 0.0);
    if (j.contains("center")) {
        const auto& c = j.at("center");
        s.center = {c.at(0).get<double>(), c.at(1).get<double>()};
    }
    s.cutoff_radius = j.value("cutoff_radius", 1.0);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        s.grid.d = g.value("d", 2);
        s.grid.N = g.value("N", 64);
        s.grid.L = g.value("L", 2.0 * M_PI);
    }
    if (j.contains("K"))
        for (const auto& prim : j.at("K")) s.K.push_back(parse_primitive(prim));
    if (j.contains("parts"))
        for (const auto& part : j.at("parts")) s.parts.push_back(parse_spec(part));
    if (s.kind == DriftSpec::Kind::Superposition && s.parts.empty())
        throw std::invalid_argument("drift spec: superposition needs \"parts\"");
    return s;
}

json dump_extended(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

json dump_spec(const DriftSpec& s) {
    json j;
    switch (s.kind) {
        case DriftSpec::Kind::RandomBesov: j["kind"] = "random_besov"; break;
        case DriftSpec::Kind::Vortex: j["kind"] = "vortex"; break;
        case DriftSpec::Kind::Superposition: j["kind"] = "superposition"; break;
    }
    j["gamma"] = s.gamma;
    j["p"] = s.p;
    j["q"] = dump_extended(s.q);
    j["target_beta"] = s.target_beta;
    j["s"] = s.s;
    j["amplitude"] = s.amplitude;
    j["seed"] = s.seed;
    if (s.kind == DriftSpec::Kind::Vortex) {
        j["lambda"] = s.lambda;
        j["center"] = {s.center[0], s.center[1]};
        j["cutoff_radius"] = s.cutoff_radius;
    }
    j["grid"] = {{"d", s.grid.d}, {"N", s.grid.N}, {"L", s.grid.L}};
    if (!s.K.empty()) {
        json arr = json::array();
        for (const auto& p : s.K) {
            json b;
            b["center"] = {p.center[0], p.center[1], p.center[2]};
            b["radius"] = p.radius;
            b["t0"] = dump_extended(p.t0);
            b["t1"] = dump_extended(p.t1);
            arr.push_back(b);
        }
        j["K"] = arr;
    }
    if (!s.parts.empty()) {
        json arr = json::array();
        for (const auto& part : s.parts) arr.push_back(json::parse(drift_spec_to_json(part)));
        j["parts"] = arr;
    }
    return j;
}

}  // namespace

DriftSpec drift_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("drift spec: JSON parse error: ") +
                                    e.what());
    }
    return parse_spec(j);
}

DriftSpec drift_spec_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("drift spec: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return drift_spec_from_json(ss.str());
}

std::string drift_spec_to_json(const DriftSpec& spec) {
    return dump_spec(spec).dump(2);
}

AntisymmetricField build_potential(const DriftSpec& spec) {
    const TorusGrid g = spec.grid.make();
    switch (spec.kind) {
        case DriftSpec::Kind::RandomBesov:
            return synth_random_besov(g, BesovIndex(spec.s, spec.p, kInf), spec.seed,
                                      spec.amplitude)
                .A;
        case DriftSpec::Kind::Vortex:
            return synth_vortex(g, spec.lambda, spec.center, spec.cutoff_radius,
                                spec.p, spec.amplitude)
                .A;
        case DriftSpec::Kind::Superposition: {
            AntisymmetricField acc = build_potential(spec.parts.at(0));
            for (std::size_t i = 1; i < spec.parts.size(); ++i) {
                AntisymmetricField next = build_potential(spec.parts[i]);
                if (acc.dim() == 2) {
                    acc = AntisymmetricField::stream2d(acc.potential(0) +
                                                       next.potential(0));
                } else {
                    acc = AntisymmetricField::potential3d(
                        {acc.potential(0) + next.potential(0),
                         acc.potential(1) + next.potential(1),
                         acc.potential(2) + next.potential(2)});
                }
            }
            return acc;
        }
    }
    throw std::logic_error("build_potential: unreachable");
}

SingularSet build_singular_set(const DriftSpec& spec) {
    if (spec.K.empty()) return SingularSet{};
    return SingularSet(spec.grid.make(), spec.K);
}

double eta_q_threshold(double beta, double gamma, double p) {
    const double den = (2.0 - beta - gamma) * p - 2.0;
    if (den <= 0.0) return kInf;
    return 2.0 * p / den;
}

double never_hit_min_p(int d) {
    if (d <= 2) return kInf;
    return 2.0 * d / (d - 2.0);
}

ConditionReport condition_report(const DriftSpec& spec, int d) {
    ConditionReport r;
    r.d = d;
    r.gamma = spec.gamma;
    r.p = spec.p;
    r.q = spec.q;

    const double inv_q = std::isinf(spec.q) ? 0.0 : 1.0 / spec.q;
    r.excond_value = spec.p * (0.5 - inv_q);
    r.excond_holds = r.excond_value > 1.0;

    r.criticality_threshold = d / (1.0 - spec.gamma);
    if (spec.p < r.criticality_threshold) r.scaling_verdict = "supercritical";
    else if (spec.p == r.criticality_threshold) r.scaling_verdict = "critical";
    else r.scaling_verdict = "subcritical";

    r.alpha = 0.5 - inv_q - 1.0 / spec.p;
    r.hoelder_class_bound = (0.5 * spec.p - 1.0) / spec.p;
    r.beta_max = 1.0 - 2.0 / spec.p - spec.gamma;
    r.rate_hypothesis_ok = spec.gamma >= 0.0 && spec.gamma < 1.0 && spec.p > 2.0 &&
                           spec.p > 2.0 / (1.0 - spec.gamma);

    r.target_beta = spec.target_beta;
    r.eta_q_threshold = eta_q_threshold(spec.target_beta, spec.gamma, spec.p);
    r.eta_threshold_defined = std::isfinite(r.eta_q_threshold);

    if (spec.kind == DriftSpec::Kind::Vortex)
        r.vortex_lp_ok = spec.lambda * spec.p < d;

    r.in_theory = r.excond_holds && r.rate_hypothesis_ok && r.vortex_lp_ok &&
                  r.beta_max > 0.0;
    return r;
}

std::string ConditionReport::to_json() const {
    json j;
    j["d"] = d;
    j["gamma"] = gamma;
    j["p"] = p;
    j["q"] = dump_extended(q);
    j["excond_value"] = excond_value;
    j["excond_holds"] = excond_holds;
    j["criticality_threshold"] = criticality_threshold;
    j["scaling_verdict"] = scaling_verdict;
    j["alpha"] = alpha;
    j["hoelder_class_bound"] = hoelder_class_bound;
    j["beta_max"] = beta_max;
    j["rate_hypothesis_ok"] = rate_hypothesis_ok;
    j["target_beta"] = target_beta;
    j["eta_q_threshold"] = eta_threshold_defined ? json(eta_q_threshold) : json("inf");
    j["vortex_lp_ok"] = vortex_lp_ok;
    j["in_theory"] = in_theory;
    return j.dump(2);
}

}  // namespace supersde
