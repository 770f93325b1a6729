// Scenario configuration: the JSON document read by the rveuler CLI.
//
// Angles are stored in degrees exactly as written in the document; they are
// converted to radians once, when a run is set up. See docs/config.md for the
// schema.
#pragma once

#include <rveuler/constants.hpp>
#include <rveuler/errors.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rveuler {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Orbit, Convergence, Entry, Compare };
enum class FormulationChoice { RvEuler, Spherical, Both };

struct SphericalInput {
    double r = 6971.0;
    double lon_deg = 0.0;
    double lat_deg = 0.0;
    std::optional<double> v; // circular speed sqrt(mu / r) when absent
    double gamma_deg = 0.0;
    double psi_deg = 0.0;

    bool operator==(const SphericalInput&) const = default;
};

struct CartesianInput {
    std::array<double, 3> r{};
    std::array<double, 3> v{};

    bool operator==(const CartesianInput&) const = default;
};

struct RvEulerInput {
    double r = 0.0;
    std::array<double, 4> ep_a{0.0, 0.0, 0.0, 1.0};
    double v = 0.0;
    std::array<double, 4> ep_b{0.0, 0.0, 0.0, 1.0};

    bool operator==(const RvEulerInput&) const = default;
};

using InitialStateInput = std::variant<SphericalInput, CartesianInput, RvEulerInput>;

struct PolicyConfig {
    bool custom = false;
    std::array<double, 4> ep_a{0.0, 0.0, 0.0, 1.0}; // C_AE seed, used when custom

    bool operator==(const PolicyConfig&) const = default;
};

struct IntegratorConfig {
    std::size_t steps = 1000;
    std::vector<std::size_t> steps_list; // convergence sweep; empty = default sweep
    bool renormalize = false;
    double t0 = 0.0;
    std::optional<double> tf; // orbit: one period when absent
    unsigned threads = 1;

    bool operator==(const IntegratorConfig&) const = default;
};

struct AeroConfig {
    double rho0 = 1.225e9;     // kg/km^3
    double scale_height = 7.5; // km
    double h_floor = 0.0;      // km
    double area = 4.839e-7;    // km^2
    double cl_alpha = 1.0;     // 1/rad
    double cd0 = 0.05;
    double k = 0.5;

    bool operator==(const AeroConfig&) const = default;
};

struct LimitsConfig {
    double a_max = 0.5;            // km/s^2
    double q_min = 1.0;            // kg/(km s^2)
    double alpha_max_deg = 30.0;
    double u_alpha_max_deg = 10.0; // deg/s
    double u_sigma_max_deg = 30.0; // deg/s

    bool operator==(const LimitsConfig&) const = default;
};

struct EntryConfig {
    double mass = 907.0; // kg
    AeroConfig aero;
    std::vector<std::pair<double, double>> alpha_deg{{0.0, 28.0}}; // (t [s], deg)
    std::vector<std::pair<double, double>> sigma_deg{{0.0, 0.0}};
    LimitsConfig limits;
    double target_lon_deg = 25.15;
    double target_lat_deg = 0.0;
    bool rotating_frame = true;
    double v_min = 1e-9; // km/s

    bool operator==(const EntryConfig&) const = default;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Orbit;
    FormulationChoice formulation = FormulationChoice::RvEuler;
    PlanetConstants constants;
    InitialStateInput initial = SphericalInput{};
    PolicyConfig policy;
    IntegratorConfig integrator;
    EntryConfig entry;

    bool operator==(const ScenarioConfig& o) const {
        return kind == o.kind && formulation == o.formulation && constants.mu == o.constants.mu &&
               constants.omega == o.constants.omega && constants.radius == o.constants.radius &&
               initial == o.initial && policy == o.policy && integrator == o.integrator && entry == o.entry;
    }
};

inline std::string to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::Orbit: return "orbit";
    case ScenarioKind::Convergence: return "convergence";
    case ScenarioKind::Entry: return "entry";
    case ScenarioKind::Compare: return "compare";
    }
    return "orbit";
}

inline std::string to_string(FormulationChoice f) {
    switch (f) {
    case FormulationChoice::RvEuler: return "rv-euler";
    case FormulationChoice::Spherical: return "spherical";
    case FormulationChoice::Both: return "both";
    }
    return "rv-euler";
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
    if (s == "orbit") return ScenarioKind::Orbit;
    if (s == "convergence") return ScenarioKind::Convergence;
    if (s == "entry") return ScenarioKind::Entry;
    if (s == "compare") return ScenarioKind::Compare;
    throw ConfigError("scenario: unknown scenario '" + s + "' (expected orbit, convergence, entry or compare)");
}

inline FormulationChoice parse_formulation(const std::string& s) {
    if (s == "rv-euler") return FormulationChoice::RvEuler;
    if (s == "spherical") return FormulationChoice::Spherical;
    if (s == "both") return FormulationChoice::Both;
    throw ConfigError("formulation: unknown formulation '" + s + "' (expected rv-euler, spherical or both)");
}

/// Table-2 style circular orbit (orbit, convergence, compare) or Table-3
/// style entry conditions (entry).
inline ScenarioConfig default_config(ScenarioKind kind) {
    ScenarioConfig c;
    c.kind = kind;
    switch (kind) {
    case ScenarioKind::Orbit:
        c.formulation = FormulationChoice::Both;
        c.initial = SphericalInput{6971.0, 0.0, 0.0, std::nullopt, 0.0, -172.223};
        c.integrator.steps = 1000;
        break;
    case ScenarioKind::Convergence:
        c.formulation = FormulationChoice::Both;
        c.initial = SphericalInput{6971.0, 0.0, 0.0, std::nullopt, 0.0, -172.223};
        break;
    case ScenarioKind::Compare:
        c.formulation = FormulationChoice::Both;
        c.initial = SphericalInput{6971.0, 0.0, 0.0, std::nullopt, 0.0, -172.223};
        c.integrator.steps = 10000;
        break;
    case ScenarioKind::Entry: {
        c.formulation = FormulationChoice::RvEuler;
        const double h = std::sqrt(0.5);
        c.initial = RvEulerInput{c.constants.radius + 37.0, {0.0, 0.0, 0.0, 1.0}, 7.138, {0.0, 0.0, h, h}};
        c.integrator.steps = 2600;
        c.integrator.tf = 26.0;
        break;
    }
    }
    return c;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ConfigError(label() + ": expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    Reader sub(const std::string& key) const { return Reader(j_.at(key), field(key)); }

    const json& raw(const std::string& key) const { return j_.at(key); }

    template <class T>
    void get(const std::string& key, T& out) const {
        if (!has(key))
            return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(field(key) + ": " + e.what());
        }
    }

    void number(const std::string& key, double& out) const {
        if (!has(key))
            return;
        if (!j_.at(key).is_number())
            throw ConfigError(field(key) + ": expected a number");
        out = j_.at(key).get<double>();
        if (!std::isfinite(out))
            throw ConfigError(field(key) + ": must be finite");
    }

    /// Non-negative integer no smaller than `min`.
    template <class U>
    void count(const std::string& key, U& out, U min) const {
        if (!has(key))
            return;
        out = to_count<U>(j_.at(key), field(key), min);
    }

    template <class U>
    static U to_count(const json& x, const std::string& where, U min) {
        if (!x.is_number_integer() || (!x.is_number_unsigned() && x.get<long long>() < 0))
            throw ConfigError(where + ": expected a non-negative integer");
        const auto n = x.get<unsigned long long>();
        if (n < min || n > std::numeric_limits<U>::max())
            throw ConfigError(where + ": must be an integer in [" + std::to_string(min) + ", " +
                              std::to_string(std::numeric_limits<U>::max()) + "]");
        return static_cast<U>(n);
    }

    void positive(const std::string& key, double& out) const {
        number(key, out);
        if (has(key) && !(out > 0.0))
            throw ConfigError(field(key) + ": must be positive");
    }

    void reject_unknown(std::initializer_list<const char*> known) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* k : known)
                ok = ok || it.key() == k;
            if (!ok)
                throw ConfigError(field(it.key()) + ": unknown key");
        }
    }

private:
    std::string label() const { return path_.empty() ? "<root>" : path_; }

    const json& j_;
    std::string path_;
};

template <std::size_t N>
std::array<double, N> read_array(const Reader& r, const std::string& key) {
    std::array<double, N> out{};
    const json& a = r.raw(key);
    if (!a.is_array() || a.size() != N)
        throw ConfigError(r.field(key) + ": expected an array of " + std::to_string(N) + " numbers");
    for (std::size_t i = 0; i < N; ++i) {
        if (!a[i].is_number())
            throw ConfigError(r.field(key) + "[" + std::to_string(i) + "]: expected a number");
        out[i] = a[i].get<double>();
    }
    return out;
}

inline std::vector<std::pair<double, double>> read_profile(const Reader& r, const std::string& key) {
    const json& a = r.raw(key);
    if (!a.is_array() || a.empty())
        throw ConfigError(r.field(key) + ": expected a non-empty array of [t, value] pairs");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const json& p = a[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError(r.field(key) + "[" + std::to_string(i) + "]: expected [t, value]");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
        if (i > 0 && !(out[i].first > out[i - 1].first))
            throw ConfigError(r.field(key) + "[" + std::to_string(i) + "]: times must be strictly increasing");
    }
    return out;
}

} // namespace detail

inline nlohmann::json to_json(const ScenarioConfig& c) {
    using nlohmann::json;
    json j;
    j["scenario"] = to_string(c.kind);
    j["formulation"] = to_string(c.formulation);
    j["constants"] = {{"mu", c.constants.mu}, {"omega_e", c.constants.omega}, {"R_e", c.constants.radius}};

    json init;
    if (const auto* s = std::get_if<SphericalInput>(&c.initial)) {
        json sj = {{"r", s->r}, {"lon_deg", s->lon_deg}, {"lat_deg", s->lat_deg},
                   {"gamma_deg", s->gamma_deg}, {"psi_deg", s->psi_deg}};
        if (s->v)
            sj["v"] = *s->v;
        init["spherical"] = sj;
    } else if (const auto* x = std::get_if<CartesianInput>(&c.initial)) {
        init["cartesian"] = {{"r", x->r}, {"v", x->v}};
    } else {
        const auto& e = std::get<RvEulerInput>(c.initial);
        init["rv_euler"] = {{"r", e.r}, {"ep_a", e.ep_a}, {"v", e.v}, {"ep_b", e.ep_b}};
    }
    j["initial_state"] = init;

    j["policy"] = c.policy.custom ? json{{"kind", "custom"}, {"ep_a", c.policy.ep_a}} : json{{"kind", "h-aligned"}};

    json integ = {{"steps", c.integrator.steps},
                  {"steps_list", c.integrator.steps_list},
                  {"renormalize", c.integrator.renormalize},
                  {"t0", c.integrator.t0},
                  {"threads", c.integrator.threads}};
    if (c.integrator.tf)
        integ["tf"] = *c.integrator.tf;
    j["integrator"] = integ;

    const EntryConfig& e = c.entry;
    json profile_a = json::array(), profile_s = json::array();
    for (const auto& [t, v] : e.alpha_deg)
        profile_a.push_back({t, v});
    for (const auto& [t, v] : e.sigma_deg)
        profile_s.push_back({t, v});
    j["entry"] = {
        {"mass", e.mass},
        {"aero",
         {{"rho0", e.aero.rho0},
          {"scale_height", e.aero.scale_height},
          {"h_floor", e.aero.h_floor},
          {"area", e.aero.area},
          {"cl_alpha", e.aero.cl_alpha},
          {"cd0", e.aero.cd0},
          {"k", e.aero.k}}},
        {"alpha_deg", profile_a},
        {"sigma_deg", profile_s},
        {"limits",
         {{"a_max", e.limits.a_max},
          {"q_min", e.limits.q_min},
          {"alpha_max_deg", e.limits.alpha_max_deg},
          {"u_alpha_max_deg", e.limits.u_alpha_max_deg},
          {"u_sigma_max_deg", e.limits.u_sigma_max_deg}}},
        {"target", {{"lon_deg", e.target_lon_deg}, {"lat_deg", e.target_lat_deg}}},
        {"rotating_frame", e.rotating_frame},
        {"v_min", e.v_min}};
    return j;
}

/// Parses a configuration document. Keys that are absent keep the defaults of
/// the scenario named by "scenario" (or `fallback` when that key is absent).
inline ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioKind fallback = ScenarioKind::Orbit) {
    using detail::Reader;
    const Reader root(j, "");
    root.reject_unknown({"scenario", "formulation", "constants", "initial_state", "policy", "integrator", "entry"});

    ScenarioKind kind = fallback;
    if (root.has("scenario")) {
        std::string s;
        root.get("scenario", s);
        kind = parse_scenario_kind(s);
    }
    ScenarioConfig c = default_config(kind);

    if (root.has("formulation")) {
        std::string s;
        root.get("formulation", s);
        c.formulation = parse_formulation(s);
    }

    if (root.has("constants")) {
        const Reader k = root.sub("constants");
        k.reject_unknown({"mu", "omega_e", "R_e"});
        k.positive("mu", c.constants.mu);
        k.number("omega_e", c.constants.omega);
        k.positive("R_e", c.constants.radius);
    }

    if (root.has("initial_state")) {
        const Reader s = root.sub("initial_state");
        s.reject_unknown({"spherical", "cartesian", "rv_euler"});
        const int count = int(s.has("spherical")) + int(s.has("cartesian")) + int(s.has("rv_euler"));
        if (count != 1)
            throw ConfigError("initial_state: exactly one of spherical, cartesian, rv_euler is required");
        if (s.has("spherical")) {
            const Reader p = s.sub("spherical");
            p.reject_unknown({"r", "lon_deg", "lat_deg", "v", "gamma_deg", "psi_deg"});
            SphericalInput in;
            in.r = 0.0;
            p.positive("r", in.r);
            if (!p.has("r"))
                throw ConfigError(p.field("r") + ": required");
            p.number("lon_deg", in.lon_deg);
            p.number("lat_deg", in.lat_deg);
            if (p.has("v")) {
                double v = 0.0;
                p.positive("v", v);
                in.v = v;
            }
            p.number("gamma_deg", in.gamma_deg);
            p.number("psi_deg", in.psi_deg);
            c.initial = in;
        } else if (s.has("cartesian")) {
            const Reader p = s.sub("cartesian");
            p.reject_unknown({"r", "v"});
            if (!p.has("r") || !p.has("v"))
                throw ConfigError(p.field("r") + ": cartesian state needs both r and v");
            c.initial = CartesianInput{detail::read_array<3>(p, "r"), detail::read_array<3>(p, "v")};
        } else {
            const Reader p = s.sub("rv_euler");
            p.reject_unknown({"r", "ep_a", "v", "ep_b"});
            RvEulerInput in;
            p.positive("r", in.r);
            p.positive("v", in.v);
            if (!p.has("r") || !p.has("v"))
                throw ConfigError(p.field("r") + ": rv_euler state needs r and v");
            if (p.has("ep_a"))
                in.ep_a = detail::read_array<4>(p, "ep_a");
            if (p.has("ep_b"))
                in.ep_b = detail::read_array<4>(p, "ep_b");
            c.initial = in;
        }
    }

    if (root.has("policy")) {
        const Reader p = root.sub("policy");
        p.reject_unknown({"kind", "ep_a"});
        std::string kind_s = "h-aligned";
        p.get("kind", kind_s);
        if (kind_s == "h-aligned") {
            c.policy = {};
        } else if (kind_s == "custom") {
            if (!p.has("ep_a"))
                throw ConfigError(p.field("ep_a") + ": required for a custom policy");
            c.policy.custom = true;
            c.policy.ep_a = detail::read_array<4>(p, "ep_a");
        } else {
            throw ConfigError(p.field("kind") + ": expected h-aligned or custom");
        }
    }

    if (root.has("integrator")) {
        const Reader p = root.sub("integrator");
        p.reject_unknown({"steps", "steps_list", "renormalize", "t0", "tf", "threads"});
        p.count<std::size_t>("steps", c.integrator.steps, 1);
        if (p.has("steps_list")) {
            const nlohmann::json& a = p.raw("steps_list");
            if (!a.is_array())
                throw ConfigError(p.field("steps_list") + ": expected an array of integers");
            c.integrator.steps_list.clear();
            for (std::size_t i = 0; i < a.size(); ++i)
                c.integrator.steps_list.push_back(
                    Reader::to_count<std::size_t>(a[i], p.field("steps_list") + "[" + std::to_string(i) + "]", 1));
        }
        p.get("renormalize", c.integrator.renormalize);
        p.number("t0", c.integrator.t0);
        if (p.has("tf")) {
            double tf = 0.0;
            p.number("tf", tf);
            if (!(tf > c.integrator.t0))
                throw ConfigError(p.field("tf") + ": must exceed t0");
            c.integrator.tf = tf;
        }
        p.count<unsigned>("threads", c.integrator.threads, 0);
    }

    if (root.has("entry")) {
        const Reader p = root.sub("entry");
        p.reject_unknown({"mass", "aero", "alpha_deg", "sigma_deg", "limits", "target", "rotating_frame", "v_min"});
        EntryConfig& e = c.entry;
        p.positive("mass", e.mass);
        if (p.has("aero")) {
            const Reader a = p.sub("aero");
            a.reject_unknown({"rho0", "scale_height", "h_floor", "area", "cl_alpha", "cd0", "k"});
            a.number("rho0", e.aero.rho0);
            a.positive("scale_height", e.aero.scale_height);
            a.number("h_floor", e.aero.h_floor);
            a.number("area", e.aero.area);
            a.number("cl_alpha", e.aero.cl_alpha);
            a.number("cd0", e.aero.cd0);
            a.number("k", e.aero.k);
            if (e.aero.rho0 < 0.0 || e.aero.area < 0.0)
                throw ConfigError(a.field("area") + ": density and reference area must be non-negative");
        }
        if (p.has("alpha_deg"))
            e.alpha_deg = detail::read_profile(p, "alpha_deg");
        if (p.has("sigma_deg"))
            e.sigma_deg = detail::read_profile(p, "sigma_deg");
        if (p.has("limits")) {
            const Reader l = p.sub("limits");
            l.reject_unknown({"a_max", "q_min", "alpha_max_deg", "u_alpha_max_deg", "u_sigma_max_deg"});
            l.positive("a_max", e.limits.a_max);
            l.positive("q_min", e.limits.q_min);
            l.positive("alpha_max_deg", e.limits.alpha_max_deg);
            l.positive("u_alpha_max_deg", e.limits.u_alpha_max_deg);
            l.positive("u_sigma_max_deg", e.limits.u_sigma_max_deg);
        }
        if (p.has("target")) {
            const Reader t = p.sub("target");
            t.reject_unknown({"lon_deg", "lat_deg"});
            t.number("lon_deg", e.target_lon_deg);
            t.number("lat_deg", e.target_lat_deg);
        }
        p.get("rotating_frame", e.rotating_frame);
        p.positive("v_min", e.v_min);
    }
    return c;
}

inline ScenarioConfig parse_config(const std::string& text, ScenarioKind fallback = ScenarioKind::Orbit) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("<document>: ") + e.what());
    }
    return config_from_json(j, fallback);
}

inline std::string serialize_config(const ScenarioConfig& c) { return to_json(c).dump(2); }

} // namespace rveuler
