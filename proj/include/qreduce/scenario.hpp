#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qreduce/correlation_model.hpp"
#include "qreduce/diffusion.hpp"
#include "qreduce/errors.hpp"
#include "qreduce/fokker_planck.hpp"
#include "qreduce/norm_vector.hpp"
#include "qreduce/quantum.hpp"

namespace qreduce {

enum class ScenarioKind { diffusion, fokker_planck, quantum, mixture, bridge };

inline const char* to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::diffusion: return "diffusion";
    case ScenarioKind::fokker_planck: return "fokker-planck";
    case ScenarioKind::quantum: return "quantum";
    case ScenarioKind::mixture: return "mixture";
    case ScenarioKind::bridge: return "bridge";
    }
    return "?";
}

struct DiffusionScenario {
    NormVector p0 = NormVector::validated({1.0});
    CorrelationModel model = CorrelationModel::constant_uniform(2, 1.0);
    std::size_t n_trajectories = 1000;
    double dt = 1e-3;
    double t_max = 50.0;
    StepControl control;

    struct Expect {
        std::optional<std::vector<double>> frequencies; // within n_sigma binomial SE
        double n_sigma = 3.0;
        std::optional<double> mean_hitting_time; // within rel_tol
        double rel_tol = 0.05;
    };
    std::optional<Expect> expect;
};

struct FpScenario {
    double a = 1.0; // SDE-level coefficient; the solver runs with D = a/2
    std::size_t n_cells = 405;
    double x0 = 0.5;
    double t_end = 3.0;
    double dt = 1e-3;
    FpScheme scheme = FpScheme::crank_nicolson;
    std::size_t record_every = 0;

    struct Expect {
        std::optional<std::vector<double>> absorbed; // (mass0, mass1) within tol
        double tol = 1e-3;
    };
    std::optional<Expect> expect;
};

struct QuantumScenario {
    GridSpec grid;
    Complex c1{1.0, 0.0};
    Complex c2{0.0, 0.0};
    GaussianPacket packet;
    CouplingSpec coupling;
    double dt = 1e-3;
    std::size_t n_steps = 1000;
    std::size_t record_every = 1;
    bool snapshots = false;

    struct Wkb {
        double threshold_rel = 1e-6;
        double fd_dt = 1e-4;
    };
    std::optional<Wkb> wkb;

    struct Expect {
        std::optional<double> pointer_tol; // every p_j constant within tol
        std::optional<double> rabi_tol;    // closed-form two-level match
    };
    std::optional<Expect> expect;
};

/// Diffusion-sampled component of a mixture scenario.
struct SyntheticComponent {
    NormVector p0 = NormVector::validated({0.5, 0.5});
    CorrelationModel model = CorrelationModel::constant_uniform(2, 1.0);
    double dt = 1e-6;
    std::size_t n_samples = 20001;
    StepControl control;
};

struct MixtureScenario {
    struct Component {
        double weight = 0.0;
        std::variant<SyntheticComponent, QuantumScenario> source;
    };

    std::vector<Component> components;
    double variance_dt = 0.0;

    struct Expect {
        double pooled_rel_tol = 0.02; // combined vs pooled weighted increments
    };
    std::optional<Expect> expect;
};

struct BridgeScenario {
    QuantumScenario quantum;
    std::size_t window = 10;
    std::size_t n_trajectories = 20000;
    // When omitted, the ensemble scales go with the estimated coupling:
    // dt = 1e-3 / A_12, t_max = 50 / A_12 (time units are arbitrary).
    std::optional<double> dt;
    std::optional<double> t_max;
    StepControl control;

    struct Expect {
        double born_sigma = 3.0;
    };
    std::optional<Expect> expect;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::diffusion;
    std::uint64_t seed = 0;
    std::variant<DiffusionScenario, FpScenario, QuantumScenario, MixtureScenario,
                 BridgeScenario>
        body;
    nlohmann::json raw; // echoed into summaries
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& context,
                       std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object())
        throw ParseError(context + " must be an object");
    for (const char* key : required)
        if (!obj.contains(key))
            throw ParseError(context + " is missing required key '" + key + "'");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : required)
            if (key == k) { known = true; break; }
        if (!known)
            for (const char* k : optional)
                if (key == k) { known = true; break; }
        if (!known)
            throw ParseError("unknown key '" + key + "' in " + context);
    }
}

inline double as_number(const json& v, const std::string& context) {
    if (!v.is_number())
        throw ParseError(context + " must be a number");
    return v.get<double>();
}

inline std::size_t as_count(const json& v, const std::string& context) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ParseError(context + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

inline std::vector<double> as_number_list(const json& v, const std::string& context) {
    if (!v.is_array() || v.empty())
        throw ParseError(context + " must be a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_number(e, context + " entry"));
    return out;
}

inline Complex as_complex(const json& v, const std::string& context) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ParseError(context + " must be a number or an [re, im] pair");
}

template <typename Fn>
auto validated(const std::string& context, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(context + ": " + e.what());
    }
}

inline StepControl parse_step_control(const json& obj, const std::string& context) {
    StepControl ctl;
    if (obj.contains("theta")) {
        ctl.theta = as_number(obj["theta"], context + ".theta");
        if (!(ctl.theta > 0.0))
            throw ValidationError(context + ".theta must be positive");
    }
    if (obj.contains("max_halvings")) {
        ctl.max_halvings = static_cast<int>(as_count(obj["max_halvings"],
                                                     context + ".max_halvings"));
    }
    return ctl;
}

inline CorrelationModel parse_model(const json& obj, std::size_t n_channels,
                                    const std::string& context) {
    check_keys(obj, context, {"kind"}, {"coefficients", "value", "gain", "ramp_time"});
    const std::string kind = obj["kind"].is_string() ? obj["kind"].get<std::string>() : "";

    auto base_matrix = [&]() -> std::vector<std::vector<double>> {
        if (obj.contains("coefficients")) {
            const auto& rows = obj["coefficients"];
            if (!rows.is_array())
                throw ParseError(context + ".coefficients must be a matrix");
            std::vector<std::vector<double>> m;
            for (const auto& row : rows)
                m.push_back(as_number_list(row, context + ".coefficients row"));
            if (m.size() != n_channels)
                throw ValidationError(context + ".coefficients must be " +
                                      std::to_string(n_channels) + " x " +
                                      std::to_string(n_channels));
            return m;
        }
        if (obj.contains("value")) {
            const double v = as_number(obj["value"], context + ".value");
            std::vector<std::vector<double>> m(n_channels,
                                               std::vector<double>(n_channels, v));
            for (std::size_t j = 0; j < n_channels; ++j) m[j][j] = 0.0;
            return m;
        }
        throw ParseError(context + " needs 'coefficients' or 'value'");
    };

    if (kind == "constant") {
        return validated(context,
                         [&] { return CorrelationModel::constant(base_matrix()); });
    }
    if (kind == "bilinear") {
        if (!obj.contains("gain"))
            throw ParseError(context + " of kind bilinear needs 'gain'");
        const double gain = as_number(obj["gain"], context + ".gain");
        return validated(context,
                         [&] { return CorrelationModel::bilinear(n_channels, gain); });
    }
    if (kind == "time-ramp") {
        if (!obj.contains("ramp_time"))
            throw ParseError(context + " of kind time-ramp needs 'ramp_time'");
        const double ramp = as_number(obj["ramp_time"], context + ".ramp_time");
        return validated(context, [&] {
            return CorrelationModel::time_ramp(base_matrix(), ramp);
        });
    }
    throw ParseError(context + ".kind must be constant, bilinear or time-ramp");
}

inline CouplingField parse_coupling_field(const json& obj, const std::string& context) {
    check_keys(obj, context, {"kind"}, {"value", "offset", "slope", "ramp_time"});
    const std::string kind = obj["kind"].is_string() ? obj["kind"].get<std::string>() : "";
    CouplingField f;
    if (kind == "zero") {
        // stays zero
    } else if (kind == "constant") {
        if (!obj.contains("value"))
            throw ParseError(context + " of kind constant needs 'value'");
        f.offset = as_number(obj["value"], context + ".value");
    } else if (kind == "linear") {
        if (obj.contains("offset")) f.offset = as_number(obj["offset"], context + ".offset");
        if (obj.contains("slope")) f.slope = as_number(obj["slope"], context + ".slope");
    } else {
        throw ParseError(context + ".kind must be zero, constant or linear");
    }
    if (obj.contains("ramp_time")) {
        f.ramp_time = as_number(obj["ramp_time"], context + ".ramp_time");
        if (f.ramp_time < 0.0)
            throw ValidationError(context + ".ramp_time must be nonnegative");
    }
    return f;
}

inline QuantumScenario parse_quantum_block(const json& obj, const std::string& context) {
    check_keys(obj, context, {"grid", "initial", "dt", "n_steps"},
               {"potential", "lambda_x", "lambda_y", "lambda_z", "record_every",
                "snapshots", "wkb", "expect"});

    QuantumScenario q;
    {
        const auto& g = obj["grid"];
        check_keys(g, context + ".grid", {"x_min", "x_max", "n_points"}, {"mass", "hbar"});
        const double x_min = as_number(g["x_min"], context + ".grid.x_min");
        const double x_max = as_number(g["x_max"], context + ".grid.x_max");
        const std::size_t n = as_count(g["n_points"], context + ".grid.n_points");
        const double mass = g.contains("mass")
                                ? as_number(g["mass"], context + ".grid.mass")
                                : 1.0;
        const double hbar = g.contains("hbar")
                                ? as_number(g["hbar"], context + ".grid.hbar")
                                : 1.0;
        q.grid = validated(context + ".grid", [&] {
            return GridSpec::validated(x_min, x_max, n, mass, hbar);
        });
    }
    {
        const auto& init = obj["initial"];
        check_keys(init, context + ".initial", {"c1", "c2", "packet"});
        q.c1 = as_complex(init["c1"], context + ".initial.c1");
        q.c2 = as_complex(init["c2"], context + ".initial.c2");
        const auto& pk = init["packet"];
        check_keys(pk, context + ".initial.packet", {"width"}, {"center", "momentum"});
        q.packet.width = as_number(pk["width"], context + ".initial.packet.width");
        if (pk.contains("center"))
            q.packet.center = as_number(pk["center"], context + ".initial.packet.center");
        if (pk.contains("momentum"))
            q.packet.momentum =
                as_number(pk["momentum"], context + ".initial.packet.momentum");
        // Surface bad coefficients / packets now rather than at run time.
        validated(context + ".initial",
                  [&] { return init_state(q.c1, q.c2, q.packet, q.grid); });
    }
    if (obj.contains("potential")) {
        const auto& pot = obj["potential"];
        check_keys(pot, context + ".potential", {"kind"}, {"omega"});
        const std::string kind =
            pot["kind"].is_string() ? pot["kind"].get<std::string>() : "";
        if (kind == "zero") {
            q.coupling.potential.kind = PotentialSpec::Kind::zero;
        } else if (kind == "harmonic") {
            q.coupling.potential.kind = PotentialSpec::Kind::harmonic;
            if (pot.contains("omega"))
                q.coupling.potential.omega =
                    as_number(pot["omega"], context + ".potential.omega");
        } else {
            throw ParseError(context + ".potential.kind must be zero or harmonic");
        }
    }
    if (obj.contains("lambda_x"))
        q.coupling.lambda_x = parse_coupling_field(obj["lambda_x"], context + ".lambda_x");
    if (obj.contains("lambda_y"))
        q.coupling.lambda_y = parse_coupling_field(obj["lambda_y"], context + ".lambda_y");
    if (obj.contains("lambda_z"))
        q.coupling.lambda_z = parse_coupling_field(obj["lambda_z"], context + ".lambda_z");

    q.dt = as_number(obj["dt"], context + ".dt");
    q.n_steps = as_count(obj["n_steps"], context + ".n_steps");
    if (obj.contains("record_every"))
        q.record_every = as_count(obj["record_every"], context + ".record_every");
    if (q.record_every < 1 || q.n_steps == 0 || q.n_steps % q.record_every != 0)
        throw ValidationError(context + ": record_every must divide a positive n_steps");
    if (obj.contains("snapshots")) {
        if (!obj["snapshots"].is_boolean())
            throw ParseError(context + ".snapshots must be a boolean");
        q.snapshots = obj["snapshots"].get<bool>();
    }
    if (obj.contains("wkb")) {
        const auto& w = obj["wkb"];
        check_keys(w, context + ".wkb", {}, {"threshold_rel", "fd_dt"});
        QuantumScenario::Wkb wkb;
        if (w.contains("threshold_rel"))
            wkb.threshold_rel = as_number(w["threshold_rel"], context + ".wkb.threshold_rel");
        if (w.contains("fd_dt"))
            wkb.fd_dt = as_number(w["fd_dt"], context + ".wkb.fd_dt");
        q.wkb = wkb;
    }
    if (obj.contains("expect")) {
        const auto& e = obj["expect"];
        check_keys(e, context + ".expect", {}, {"pointer_tol", "rabi_tol"});
        QuantumScenario::Expect expect;
        if (e.contains("pointer_tol"))
            expect.pointer_tol = as_number(e["pointer_tol"], context + ".expect.pointer_tol");
        if (e.contains("rabi_tol")) {
            expect.rabi_tol = as_number(e["rabi_tol"], context + ".expect.rabi_tol");
            if (q.coupling.lambda_x.slope != 0.0 || q.coupling.lambda_x.ramp_time != 0.0 ||
                !q.coupling.lambda_y.is_zero() || !q.coupling.lambda_z.is_zero())
                throw ValidationError(context +
                                      ".expect.rabi_tol needs a constant lambda_x only");
        }
        q.expect = expect;
    }
    return q;
}

inline DiffusionScenario parse_diffusion_block(const json& obj, const std::string& context) {
    check_keys(obj, context, {"p0", "model", "n_trajectories", "dt", "t_max"},
               {"theta", "max_halvings", "expect"});
    DiffusionScenario d;
    d.p0 = validated(context + ".p0", [&] {
        return NormVector::validated(as_number_list(obj["p0"], context + ".p0"));
    });
    d.model = parse_model(obj["model"], d.p0.size(), context + ".model");
    d.n_trajectories = as_count(obj["n_trajectories"], context + ".n_trajectories");
    if (d.n_trajectories < 1)
        throw ValidationError(context + ".n_trajectories must be at least 1");
    d.dt = as_number(obj["dt"], context + ".dt");
    d.t_max = as_number(obj["t_max"], context + ".t_max");
    if (!(d.dt > 0.0) || !(d.t_max > 0.0))
        throw ValidationError(context + ": dt and t_max must be positive");
    d.control = parse_step_control(obj, context);
    if (obj.contains("expect")) {
        const auto& e = obj["expect"];
        check_keys(e, context + ".expect", {},
                   {"frequencies", "n_sigma", "mean_hitting_time", "rel_tol"});
        DiffusionScenario::Expect expect;
        if (e.contains("frequencies")) {
            expect.frequencies = as_number_list(e["frequencies"], context + ".expect.frequencies");
            if (expect.frequencies->size() != d.p0.size())
                throw ValidationError(context + ".expect.frequencies has wrong length");
        }
        if (e.contains("n_sigma"))
            expect.n_sigma = as_number(e["n_sigma"], context + ".expect.n_sigma");
        if (e.contains("mean_hitting_time"))
            expect.mean_hitting_time =
                as_number(e["mean_hitting_time"], context + ".expect.mean_hitting_time");
        if (e.contains("rel_tol"))
            expect.rel_tol = as_number(e["rel_tol"], context + ".expect.rel_tol");
        d.expect = expect;
    }
    return d;
}

inline FpScenario parse_fp_block(const json& obj, const std::string& context) {
    check_keys(obj, context, {"a", "x0", "t_end", "dt"},
               {"n_cells", "scheme", "record_every", "expect"});
    FpScenario f;
    f.a = as_number(obj["a"], context + ".a");
    if (!(f.a > 0.0))
        throw ValidationError(context + ".a must be positive");
    f.x0 = as_number(obj["x0"], context + ".x0");
    f.t_end = as_number(obj["t_end"], context + ".t_end");
    f.dt = as_number(obj["dt"], context + ".dt");
    if (obj.contains("n_cells")) f.n_cells = as_count(obj["n_cells"], context + ".n_cells");
    if (obj.contains("record_every"))
        f.record_every = as_count(obj["record_every"], context + ".record_every");
    if (obj.contains("scheme")) {
        const std::string s =
            obj["scheme"].is_string() ? obj["scheme"].get<std::string>() : "";
        if (s == "crank-nicolson")
            f.scheme = FpScheme::crank_nicolson;
        else if (s == "explicit")
            f.scheme = FpScheme::explicit_euler;
        else
            throw ParseError(context + ".scheme must be crank-nicolson or explicit");
    }
    validated(context, [&] { return FpGrid::validated(f.n_cells, f.a / 2.0); });
    if (!(f.x0 > 0.0) || !(f.x0 < 1.0))
        throw ValidationError(context + ".x0 must lie strictly inside (0, 1)");
    if (!(f.t_end > 0.0) || !(f.dt > 0.0))
        throw ValidationError(context + ": t_end and dt must be positive");
    if (obj.contains("expect")) {
        const auto& e = obj["expect"];
        check_keys(e, context + ".expect", {}, {"absorbed", "tol"});
        FpScenario::Expect expect;
        if (e.contains("absorbed")) {
            expect.absorbed = as_number_list(e["absorbed"], context + ".expect.absorbed");
            if (expect.absorbed->size() != 2)
                throw ValidationError(context + ".expect.absorbed needs two entries");
        }
        if (e.contains("tol")) expect.tol = as_number(e["tol"], context + ".expect.tol");
        f.expect = expect;
    }
    return f;
}

inline MixtureScenario parse_mixture_block(const json& obj, const std::string& context) {
    check_keys(obj, context, {"components", "variance_dt"}, {"expect"});
    MixtureScenario m;
    m.variance_dt = as_number(obj["variance_dt"], context + ".variance_dt");
    if (!(m.variance_dt > 0.0))
        throw ValidationError(context + ".variance_dt must be positive");
    const auto& comps = obj["components"];
    if (!comps.is_array() || comps.empty())
        throw ParseError(context + ".components must be a nonempty array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string cctx = context + ".components[" + std::to_string(i) + "]";
        const auto& c = comps[i];
        check_keys(c, cctx, {"weight"}, {"synthetic", "quantum"});
        MixtureScenario::Component comp;
        comp.weight = as_number(c["weight"], cctx + ".weight");
        if (c.contains("synthetic") == c.contains("quantum"))
            throw ParseError(cctx + " needs exactly one of 'synthetic' or 'quantum'");
        if (c.contains("synthetic")) {
            const auto& s = c["synthetic"];
            check_keys(s, cctx + ".synthetic", {"p0", "model", "dt", "n_samples"},
                       {"theta", "max_halvings"});
            SyntheticComponent syn;
            syn.p0 = validated(cctx + ".synthetic.p0", [&] {
                return NormVector::validated(
                    as_number_list(s["p0"], cctx + ".synthetic.p0"));
            });
            syn.model = parse_model(s["model"], syn.p0.size(), cctx + ".synthetic.model");
            syn.dt = as_number(s["dt"], cctx + ".synthetic.dt");
            syn.n_samples = as_count(s["n_samples"], cctx + ".synthetic.n_samples");
            if (!(syn.dt > 0.0) || syn.n_samples < 2)
                throw ValidationError(cctx + ".synthetic needs dt > 0 and n_samples >= 2");
            syn.control = parse_step_control(s, cctx + ".synthetic");
            comp.source = std::move(syn);
        } else {
            comp.source = parse_quantum_block(c["quantum"], cctx + ".quantum");
        }
        m.components.push_back(std::move(comp));
    }
    double total = 0.0;
    for (const auto& c : m.components) total += c.weight;
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError(context + ": weights sum to " + std::to_string(total));
    if (obj.contains("expect")) {
        const auto& e = obj["expect"];
        check_keys(e, context + ".expect", {}, {"pooled_rel_tol"});
        MixtureScenario::Expect expect;
        if (e.contains("pooled_rel_tol"))
            expect.pooled_rel_tol =
                as_number(e["pooled_rel_tol"], context + ".expect.pooled_rel_tol");
        m.expect = expect;
    }
    return m;
}

inline BridgeScenario parse_bridge_block(const json& obj, const std::string& context) {
    check_keys(obj, context, {"quantum", "window", "ensemble"}, {"expect"});
    BridgeScenario b;
    b.quantum = parse_quantum_block(obj["quantum"], context + ".quantum");
    b.window = as_count(obj["window"], context + ".window");
    if (b.window < 1)
        throw ValidationError(context + ".window must be at least 1");
    const auto& e = obj["ensemble"];
    check_keys(e, context + ".ensemble", {"n_trajectories"},
               {"dt", "t_max", "theta", "max_halvings"});
    b.n_trajectories = as_count(e["n_trajectories"], context + ".ensemble.n_trajectories");
    if (b.n_trajectories < 1)
        throw ValidationError(context + ".ensemble.n_trajectories must be at least 1");
    if (e.contains("dt")) {
        b.dt = as_number(e["dt"], context + ".ensemble.dt");
        if (!(*b.dt > 0.0))
            throw ValidationError(context + ".ensemble.dt must be positive");
    }
    if (e.contains("t_max")) {
        b.t_max = as_number(e["t_max"], context + ".ensemble.t_max");
        if (!(*b.t_max > 0.0))
            throw ValidationError(context + ".ensemble.t_max must be positive");
    }
    b.control = parse_step_control(e, context + ".ensemble");
    if (obj.contains("expect")) {
        const auto& ex = obj["expect"];
        check_keys(ex, context + ".expect", {}, {"born_sigma"});
        BridgeScenario::Expect expect;
        if (ex.contains("born_sigma"))
            expect.born_sigma = as_number(ex["born_sigma"], context + ".expect.born_sigma");
        b.expect = expect;
    }
    return b;
}

} // namespace detail

/// Parses and fully validates a scenario document. Unknown keys anywhere are
/// hard errors; module-level validation failures surface as ValidationError.
inline Scenario parse_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    detail::check_keys(doc, "scenario", {"kind", "seed"},
                       {"diffusion", "fokker-planck", "quantum", "mixture", "bridge"});
    if (!doc["kind"].is_string())
        throw ParseError("scenario.kind must be a string");
    const std::string kind = doc["kind"].get<std::string>();
    if (!doc["seed"].is_number_unsigned())
        throw ParseError("scenario.seed must be a nonnegative integer");

    Scenario sc;
    sc.seed = doc["seed"].get<std::uint64_t>();
    sc.raw = doc;

    auto block = [&](const char* name) -> const nlohmann::json& {
        if (!doc.contains(name))
            throw ParseError(std::string("scenario of kind ") + name + " needs a '" +
                             name + "' block");
        for (const char* other :
             {"diffusion", "fokker-planck", "quantum", "mixture", "bridge"})
            if (std::string(other) != name && doc.contains(other))
                throw ParseError(std::string("unexpected '") + other +
                                 "' block in a " + name + " scenario");
        return doc[name];
    };

    if (kind == "diffusion") {
        sc.kind = ScenarioKind::diffusion;
        sc.body = detail::parse_diffusion_block(block("diffusion"), "diffusion");
    } else if (kind == "fokker-planck") {
        sc.kind = ScenarioKind::fokker_planck;
        sc.body = detail::parse_fp_block(block("fokker-planck"), "fokker-planck");
    } else if (kind == "quantum") {
        sc.kind = ScenarioKind::quantum;
        sc.body = detail::parse_quantum_block(block("quantum"), "quantum");
    } else if (kind == "mixture") {
        sc.kind = ScenarioKind::mixture;
        sc.body = detail::parse_mixture_block(block("mixture"), "mixture");
    } else if (kind == "bridge") {
        sc.kind = ScenarioKind::bridge;
        sc.body = detail::parse_bridge_block(block("bridge"), "bridge");
    } else {
        throw ParseError("scenario.kind '" + kind + "' is not recognized");
    }
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

} // namespace qreduce
