#pragma once

// Run configuration: a JSON document naming a model, one task, its
// parameters and tolerances. Unknown keys are rejected at every level.

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nhsi/error.hpp"
#include "nhsi/model.hpp"
#include "nhsi/spectra.hpp"

namespace nhsi {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Task { Spectrum, Obc, Agbz, Gbz, WindingRaster, Intersections, Verify, NfoldGenerate };

inline const std::map<std::string, Task>& task_names() {
    static const std::map<std::string, Task> names{
        {"spectrum", Task::Spectrum},           {"obc", Task::Obc},
        {"agbz", Task::Agbz},                   {"gbz", Task::Gbz},
        {"winding-raster", Task::WindingRaster}, {"intersections", Task::Intersections},
        {"verify", Task::Verify},               {"nfold-generate", Task::NfoldGenerate}};
    return names;
}

inline std::string to_string(Task t) {
    for (const auto& [name, task] : task_names())
        if (task == t) return name;
    return "?";
}

struct Tolerances {
    double tie_tol = 1e-6;
    double guard_tol = 1e-4;
    double tol_E = 1e-6;
    double residual_tol = 1e-10;
    double dedup_tol = 1e-8;
    double gap_factor = 5.0;

    /// Key → member, shared by the config parser and --tol-override.
    static const std::map<std::string, double Tolerances::*>& keys() {
        static const std::map<std::string, double Tolerances::*> k{
            {"tieTol", &Tolerances::tie_tol},       {"guardTol", &Tolerances::guard_tol},
            {"tolE", &Tolerances::tol_E},           {"residualTol", &Tolerances::residual_tol},
            {"dedupTol", &Tolerances::dedup_tol},   {"gapFactor", &Tolerances::gap_factor}};
        return k;
    }
};

struct TaskParams {
    int numK = 1024;
    int L = 60;
    int maxL = kDefaultMaxL;
    int thetaGrid = 720;
    std::optional<std::array<double, 4>> bbox;
    double margin = 0.5;
    std::array<int, 2> resolution{200, 200};
    bool thermodynamic = true;
    bool implicit = true;
    double localRadius = 1e-2;
};

struct NfoldSpec {
    int n = 2;
    double phi = 0.0;
    LaurentPoly q;
};

struct RunConfig {
    json echo;
    Model model;
    std::optional<NfoldSpec> nfold;
    Task task = Task::Spectrum;
    TaskParams params;
    Tolerances tol;
    std::string output;
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

inline void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) invalid(where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) invalid("unknown key '" + key + "' in " + where);
}

inline double number(const json& v, const std::string& what) {
    if (!v.is_number()) invalid(what + " must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) invalid(what + " must be finite");
    return x;
}

inline int integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) invalid(what + " must be an integer");
    return v.get<int>();
}

/// A number or a [re, im] pair.
inline cplx complex_value(const json& v, const std::string& what) {
    if (v.is_number()) return number(v, what);
    if (v.is_array() && v.size() == 2) return {number(v[0], what + "[0]"), number(v[1], what + "[1]")};
    invalid(what + " must be a number or [re, im]");
}

/// [[n, re, im], ...] → {n: re + i im}; repeated n are summed.
inline std::map<int, cplx> hop_list(const json& v, const std::string& what) {
    if (!v.is_array() || v.empty()) invalid(what + " must be a nonempty list of [n, re, im]");
    std::map<int, cplx> hops;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& h = v[i];
        std::string at = what + "[" + std::to_string(i) + "]";
        if (!h.is_array() || h.size() != 3) invalid(at + " must be [n, re, im]");
        hops[integer(h[0], at + "[0]")] += cplx(number(h[1], at + "[1]"), number(h[2], at + "[2]"));
    }
    return hops;
}

inline Model parse_model(const json& m, std::optional<NfoldSpec>& nfold) {
    if (!m.is_object() || !m.contains("type") || !m["type"].is_string()) invalid("model.type must be a string");
    const std::string type = m["type"];
    if (type == "one_band") {
        only_keys(m, {"type", "hops"}, "model");
        if (!m.contains("hops")) invalid("model.hops is required for one_band");
        return OneBandModel(hop_list(m["hops"], "model.hops"));
    }
    if (type == "extended_hn") {
        only_keys(m, {"type", "gamma1", "t2", "tm2", "t1", "tm1"}, "model");
        auto get = [&](const char* key, cplx fallback) {
            return m.contains(key) ? complex_value(m[key], std::string("model.") + key) : fallback;
        };
        if (m.contains("gamma1")) {
            if (m.contains("t1") || m.contains("tm1")) invalid("model.gamma1 cannot be combined with t1/tm1");
            double g = number(m["gamma1"], "model.gamma1");
            return extended_hn(get("tm2", 0.5), 1.0 - g, 1.0 + g, get("t2", 1.5));
        }
        for (const char* key : {"t1", "tm1", "t2", "tm2"})
            if (!m.contains(key)) invalid(std::string("model.") + key + " is required without gamma1");
        return extended_hn(get("tm2", 0.0), get("tm1", 0.0), get("t1", 0.0), get("t2", 0.0));
    }
    if (type == "ssh") {
        only_keys(m, {"type", "t1", "t2", "t3", "gamma"}, "model");
        for (const char* key : {"t1", "t2", "t3", "gamma"})
            if (!m.contains(key)) invalid(std::string("model.") + key + " is required for ssh");
        return nh_ssh(complex_value(m["t1"], "model.t1"), complex_value(m["t2"], "model.t2"),
                      complex_value(m["t3"], "model.t3"), complex_value(m["gamma"], "model.gamma"));
    }
    if (type == "nfold") {
        only_keys(m, {"type", "n", "phi", "q"}, "model");
        for (const char* key : {"n", "phi", "q"})
            if (!m.contains(key)) invalid(std::string("model.") + key + " is required for nfold");
        NfoldSpec spec{integer(m["n"], "model.n"), number(m["phi"], "model.phi"), LaurentPoly(hop_list(m["q"], "model.q"))};
        if (spec.n < 2) invalid("model.n must be at least 2");
        auto built = nfold_construct(spec.n, spec.phi, spec.q);
        nfold = std::move(spec);
        return built;
    }
    invalid("model.type '" + type + "' is not one of one_band, extended_hn, ssh, nfold");
}

inline void parse_params(const json& p, TaskParams& out) {
    only_keys(p, {"numK", "L", "maxL", "thetaGrid", "bbox", "margin", "resolution", "thermodynamic", "implicit", "localRadius"},
              "params");
    if (p.contains("numK")) out.numK = integer(p["numK"], "params.numK");
    if (p.contains("L")) out.L = integer(p["L"], "params.L");
    if (p.contains("maxL")) out.maxL = integer(p["maxL"], "params.maxL");
    if (p.contains("thetaGrid")) out.thetaGrid = integer(p["thetaGrid"], "params.thetaGrid");
    if (p.contains("margin")) out.margin = number(p["margin"], "params.margin");
    if (p.contains("localRadius")) out.localRadius = number(p["localRadius"], "params.localRadius");
    if (p.contains("bbox")) {
        const auto& b = p["bbox"];
        if (!b.is_array() || b.size() != 4) invalid("params.bbox must be [reMin, reMax, imMin, imMax]");
        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i) v[i] = number(b[i], "params.bbox");
        if (!(v[1] > v[0]) || !(v[3] > v[2])) invalid("params.bbox is empty");
        out.bbox = v;
    }
    if (p.contains("resolution")) {
        const auto& r = p["resolution"];
        if (!r.is_array() || r.size() != 2) invalid("params.resolution must be [nx, ny]");
        out.resolution = {integer(r[0], "params.resolution[0]"), integer(r[1], "params.resolution[1]")};
    }
    for (const char* key : {"thermodynamic", "implicit"})
        if (p.contains(key)) {
            if (!p[key].is_boolean()) invalid(std::string("params.") + key + " must be true or false");
            (std::string(key) == "thermodynamic" ? out.thermodynamic : out.implicit) = p[key].get<bool>();
        }
}

inline void validate(const RunConfig& c) {
    const auto& p = c.params;
    const int min_k = c.task == Task::Intersections || c.task == Task::Verify ? 256 : 8;
    if (p.numK < min_k) invalid("params.numK must be at least " + std::to_string(min_k) + " for task " + to_string(c.task));
    if (p.L < 1) invalid("params.L must be positive");
    if (p.maxL < 1) invalid("params.maxL must be positive");
    if (c.task == Task::Obc && p.L > p.maxL) invalid("params.L exceeds params.maxL");
    if (p.thetaGrid < 2) invalid("params.thetaGrid must be at least 2");
    if (p.resolution[0] < 16 || p.resolution[1] < 16) invalid("params.resolution must be at least 16x16");
    if (!(p.margin > 0.0)) invalid("params.margin must be positive");
    if (!(p.localRadius > 0.0)) invalid("params.localRadius must be positive");
    for (const auto& [key, member] : Tolerances::keys())
        if (!(c.tol.*member > 0.0)) invalid("tolerance " + key + " must be positive");
    if (c.task == Task::NfoldGenerate && !c.nfold) invalid("task nfold-generate needs a model of type nfold");
}

} // namespace detail

/// Applies "KEY=VAL" to the tolerances.
inline void apply_tolerance_override(Tolerances& tol, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) detail::invalid("tolerance override '" + assignment + "' is not KEY=VAL");
    std::string key = assignment.substr(0, eq), val = assignment.substr(eq + 1);
    auto it = Tolerances::keys().find(key);
    if (it == Tolerances::keys().end()) detail::invalid("unknown tolerance '" + key + "'");
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(val, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != val.size() || !std::isfinite(x)) detail::invalid("tolerance " + key + " value '" + val + "' is not a number");
    tol.*(it->second) = x;
}

/// Parses and validates a configuration document.
inline RunConfig parse_config(const json& doc, const std::vector<std::string>& tol_overrides = {}) {
    detail::only_keys(doc, {"schemaVersion", "model", "task", "params", "tolerances", "output"}, "config");
    if (!doc.contains("schemaVersion")) detail::invalid("schemaVersion is required");
    if (detail::integer(doc["schemaVersion"], "schemaVersion") != kSchemaVersion)
        detail::invalid("schemaVersion must be " + std::to_string(kSchemaVersion));
    if (!doc.contains("model")) detail::invalid("model is required");
    if (!doc.contains("task") || !doc["task"].is_string()) detail::invalid("task must be a string");

    RunConfig c;
    auto task = task_names().find(doc["task"].get<std::string>());
    if (task == task_names().end()) detail::invalid("unknown task '" + doc["task"].get<std::string>() + "'");
    c.task = task->second;
    try {
        c.model = detail::parse_model(doc["model"], c.nfold);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigInvalid) throw;
        detail::invalid("model: " + e.detail());
    }
    if (doc.contains("params")) detail::parse_params(doc["params"], c.params);
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        if (!t.is_object()) detail::invalid("tolerances must be an object");
        for (const auto& [key, value] : t.items()) {
            auto it = Tolerances::keys().find(key);
            if (it == Tolerances::keys().end()) detail::invalid("unknown key '" + key + "' in tolerances");
            c.tol.*(it->second) = detail::number(value, "tolerances." + key);
        }
    }
    for (const auto& o : tol_overrides) apply_tolerance_override(c.tol, o);
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) detail::invalid("output must be a string");
        c.output = doc["output"];
    }
    detail::validate(c);
    c.echo = doc;
    if (!tol_overrides.empty())
        for (const auto& [key, member] : Tolerances::keys()) c.echo["tolerances"][key] = c.tol.*member;
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::invalid("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        detail::invalid("config '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace nhsi
