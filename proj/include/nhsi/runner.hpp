#pragma once

// Executes one configured task, writes its CSV/JSON outputs and a manifest.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "nhsi/config.hpp"
#include "nhsi/gbz.hpp"
#include "nhsi/intersect.hpp"
#include "nhsi/parallel.hpp"
#include "nhsi/spectra.hpp"
#include "nhsi/topology.hpp"

#ifndef NHSI_VERSION
#define NHSI_VERSION "0.0.0"
#endif

namespace nhsi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Errors that reject the input rather than signal a numerical failure.
inline bool is_validation_error(ErrorKind k) {
    switch (k) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::InvalidArgument:
    case ErrorKind::AllZeroHops:
    case ErrorKind::DegenerateModel:
    case ErrorKind::QVanishesOnCircle:
    case ErrorKind::TooSmallL:
    case ErrorKind::TooLargeL: return true;
    default: return false;
    }
}

/// `prefix` naming a directory (existing, or ending in '/') places files
/// inside it; otherwise files are named "<prefix>_<name>".
inline std::filesystem::path output_path(const std::string& prefix, const std::string& name) {
    namespace fs = std::filesystem;
    if (prefix.empty()) throw Error(ErrorKind::ConfigInvalid, "no output prefix given");
    if (prefix.back() == '/' || fs::is_directory(prefix)) return fs::path(prefix) / name;
    return fs::path(prefix + "_" + name);
}

inline json warnings_json(const Warnings& w) {
    json out = json::array();
    for (const auto& x : w) out.push_back({{"kind", std::string(to_string(x.kind))}, {"detail", x.detail}});
    return out;
}

inline json intersection_json(const SelfIntersection& si, const NfoldReport* nfold = nullptr) {
    json ks = json::array(), bands = json::array();
    for (const auto& s : si.solutions) {
        ks.push_back(s.k);
        bands.push_back(s.band);
    }
    json j{{"reE0", si.E0.real()},
           {"imE0", si.E0.imag()},
           {"n", si.n},
           {"kSolutions", ks},
           {"bands", bands},
           {"matchedAgbzPhases", si.matched_agbz_phases}};
    if (si.has_local_structure) {
        j["wMin"] = si.w_min;
        j["wMax"] = si.w_max;
        j["inwardCount"] = si.inward_count;
        j["orderingIndices"] = {si.ordering_indices.low, si.ordering_indices.high};
    } else {
        j["wMin"] = j["wMax"] = j["inwardCount"] = j["orderingIndices"] = nullptr;
    }
    if (nfold)
        j["nfoldCondition"] = {{"pass", nfold->pass},
                               {"expected", {nfold->expected.low, nfold->expected.high}},
                               {"observed", {nfold->observed.low, nfold->observed.high}}};
    return j;
}

struct RunOutcome {
    int exit_code = kExitOk;
    json manifest;
};

class Runner {
public:
    Runner(const RunConfig& cfg, std::string prefix) : cfg_(cfg), prefix_(std::move(prefix)) {}

    RunOutcome run() {
        const auto start = std::chrono::steady_clock::now();
        RunOutcome out;
        json manifest{{"tool", "nhsi"},
                      {"version", NHSI_VERSION},
                      {"schemaVersion", kSchemaVersion},
                      {"task", to_string(cfg_.task)},
                      {"config", cfg_.echo},
                      {"threads", max_threads()}};
        try {
            dispatch();
            manifest["status"] = "ok";
        } catch (const Error& e) {
            out.exit_code = is_validation_error(e.kind()) ? kExitInvalid : kExitNumerical;
            manifest["status"] = "error";
            manifest["error"] = {{"kind", std::string(to_string(e.kind()))}, {"detail", e.detail()}};
        }
        manifest["exitCode"] = out.exit_code;
        manifest["summary"] = summary_;
        manifest["warnings"] = warnings_json(warnings_);
        manifest["outputs"] = outputs_;
        manifest["wallTimeSeconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; }, false);
        out.manifest = std::move(manifest);
        return out;
    }

private:
    void write(const std::string& name, const std::function<void(std::ostream&)>& body, bool record = true) {
        auto path = output_path(prefix_, name);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error(ErrorKind::ConfigInvalid, "cannot write '" + path.string() + "'");
        body(os);
        if (record) outputs_.push_back(path.filename().string());
    }

    void write_json(const std::string& name, const json& j) {
        write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }

    AgbzOptions agbz_options() const {
        AgbzOptions o;
        o.tie_tol = cfg_.tol.tie_tol;
        o.dedup_tol = cfg_.tol.dedup_tol;
        o.residual_tol = cfg_.tol.residual_tol;
        return o;
    }

    IntersectOptions intersect_options() const {
        IntersectOptions o;
        o.tol_E = cfg_.tol.tol_E;
        o.newton.residual_tol = cfg_.tol.residual_tol;
        return o;
    }

    std::vector<AgbzPoint> sample_agbz(const CharPoly& cp) const {
        auto grid = default_theta_grid(cfg_.params.thetaGrid);
        return agbz_sample_theta(cp, grid, agbz_options());
    }

    void dispatch() {
        const auto& p = cfg_.params;
        const Model& m = cfg_.model;
        switch (cfg_.task) {
        case Task::Spectrum: {
            auto s = pbc_spectrum(m, p.numK);
            append(s.warnings);
            write("pbc.csv", [&](std::ostream& os) { write_pbc_csv(os, s); });
            json closed = json::array();
            for (const auto& b : s.bands) closed.push_back(b.closed);
            summary_ = {{"bands", s.bands.size()}, {"samples", s.samples()}, {"closed", closed}};
            break;
        }
        case Task::Obc: {
            auto fin = obc_finite(m, p.L, p.maxL);
            summary_ = {{"L", p.L}, {"finiteCount", fin.values.size()}};
            std::optional<ObcSpectrum> thermo;
            if (p.thermodynamic) {
                CharPoly cp(m);
                std::vector<cplx> betas;
                for (const auto& pt : gbz_extract(sample_agbz(cp), cp)) betas.push_back(pt.beta);
                thermo = obc_thermodynamic(m, betas);
                summary_["thermodynamicCount"] = thermo->values.size();
                summary_["hausdorffDistance"] = hausdorff_distance(fin.values, thermo->values);
            }
            write("obc.csv", [&](std::ostream& os) {
                write_obc_csv(os, fin);
                if (thermo) write_obc_csv(os, *thermo, false);
            });
            break;
        }
        case Task::Agbz: {
            CharPoly cp(m);
            auto pts = sample_agbz(cp);
            write("agbz.csv", [&](std::ostream& os) { write_agbz_csv(os, pts); });
            std::map<std::string, int> labels;
            for (const auto& pt : pts) ++labels[to_string(pt.label)];
            summary_ = {{"points", pts.size()}, {"labels", labels}};
            if (p.implicit) {
                try {
                    auto curve = agbz_implicit(cp);
                    write("agbz_implicit.json", [&](std::ostream& os) { write_implicit_json(os, curve); });
                    summary_["implicitTerms"] = curve.F.terms().size();
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::DegreeBudgetExceeded && e.kind() != ErrorKind::IdenticallyZero) throw;
                    warnings_.push_back({e.kind(), "implicit curve skipped: " + e.detail()});
                }
            }
            break;
        }
        case Task::Gbz: {
            CharPoly cp(m);
            auto pts = gbz_extract(sample_agbz(cp), cp);
            write("gbz.csv", [&](std::ostream& os) { write_agbz_csv(os, pts); });
            summary_ = {{"points", pts.size()}, {"label", {cp.pole_order(), cp.pole_order() + 1}}};
            break;
        }
        case Task::WindingRaster: {
            CharPoly cp(m);
            Bbox box = p.bbox ? Bbox{(*p.bbox)[0], (*p.bbox)[1], (*p.bbox)[2], (*p.bbox)[3]}
                              : spectrum_bbox(pbc_spectrum(m, p.numK), p.margin);
            auto r = winding_raster(cp, box, p.resolution[0], p.resolution[1], cfg_.tol.guard_tol);
            write("winding.csv", [&](std::ostream& os) { write_raster_csv(os, r); });
            std::set<int> values;
            std::size_t undefined = 0;
            for (const auto& v : r.values) {
                if (v) values.insert(*v);
                else ++undefined;
            }
            summary_ = {{"values", values},
                        {"undefinedCells", undefined},
                        {"bbox", {box.re_min, box.re_max, box.im_min, box.im_max}}};
            break;
        }
        case Task::Intersections: {
            auto res = find_intersections(m, p.numK, intersect_options());
            append(res.warnings);
            json list = json::array();
            bool all_pass = true;
            for (auto& si : res.points) {
                auto rep = with_local_structure(si);
                all_pass = all_pass && rep.pass;
                list.push_back(intersection_json(si, &rep));
            }
            write_json("intersections.json", {{"intersections", list}});
            std::vector<int> mult;
            for (const auto& si : res.points) mult.push_back(si.n);
            summary_ = {{"count", res.points.size()}, {"multiplicities", mult},
                        {"nfoldCondition", all_pass ? "PASS" : "FAIL"}};
            break;
        }
        case Task::Verify: {
            auto rep = verify_correspondence(m, p.numK, intersect_options());
            append(rep.warnings);
            json list = json::array();
            bool nfold_pass = true;
            for (auto& si : rep.intersections) {
                auto nr = with_local_structure(si);
                nfold_pass = nfold_pass && nr.pass;
                list.push_back(intersection_json(si, &nr));
            }
            json agbz = json::array();
            for (const auto& a : rep.agbz_points) agbz.push_back({{"phi", a.phi}, {"reE", a.E.real()}, {"imE", a.E.imag()}});
            json pairs = json::array();
            for (const auto& [s, a] : rep.matches) pairs.push_back({s, a});
            write_json("verify.json", {{"correspondence", rep.pass ? "PASS" : "FAIL"},
                                       {"intersections", list},
                                       {"agbzBzPoints", agbz},
                                       {"matches", pairs},
                                       {"violations", rep.violations}});
            summary_ = {{"correspondence", rep.pass ? "PASS" : "FAIL"},
                        {"matchedPairs", rep.matches.size()},
                        {"intersections", rep.intersections.size()},
                        {"agbzBzPoints", rep.agbz_points.size()},
                        {"nfoldCondition", nfold_pass ? "PASS" : "FAIL"}};
            break;
        }
        case Task::NfoldGenerate: {
            const auto& spec = *cfg_.nfold;
            json hops = json::array();
            for (const auto& [n, t] : m.entry(0, 0).terms()) hops.push_back({n, t.real(), t.imag()});
            auto ks = nfold_k_solutions(spec.n, spec.phi);
            write_json("nfold.json", {{"model", {{"type", "one_band"}, {"hops", hops}}},
                                      {"n", spec.n},
                                      {"phi", spec.phi},
                                      {"E0", {0.0, 0.0}},
                                      {"kSolutions", ks}});
            summary_ = {{"n", spec.n}, {"terms", hops.size()}};
            break;
        }
        }
    }

    NfoldReport with_local_structure(SelfIntersection& si) {
        try {
            auto ls = local_structure(cfg_.model, si, cfg_.params.localRadius);
            attach_local_structure(si, ls, CharPoly(cfg_.model).pole_order());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RadiusUnderflow) throw;
            warnings_.push_back({e.kind(), e.detail()});
        }
        return verify_nfold_condition(cfg_.model, si);
    }

    void append(const Warnings& w) { warnings_.insert(warnings_.end(), w.begin(), w.end()); }

    const RunConfig& cfg_;
    std::string prefix_;
    json summary_ = json::object();
    Warnings warnings_;
    std::vector<std::string> outputs_;
};

inline RunOutcome run(const RunConfig& cfg, const std::string& prefix) { return Runner(cfg, prefix).run(); }

} // namespace nhsi
