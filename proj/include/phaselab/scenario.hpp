// scenario.hpp — configuration-driven scenario runner: schema-v1 JSON configs,
// dispatch into the physics modules, machine-readable CSV/JSON reports.

#pragma once

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "phaselab/berry.hpp"
#include "phaselab/cyclic.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/families.hpp"
#include "phaselab/optics.hpp"
#include "phaselab/wilczek_zee.hpp"

namespace phaselab {

inline constexpr const char* artifact_version = "1.0.0";
inline constexpr int config_schema_version = 1;

enum class ScenarioKind {
    berry_cone,
    berry_custom_loop,
    aa_precession,
    aa_vs_berry_sweep,
    wz_quadrupole,
    pancharatnam_chain,
};

struct ScenarioKindInfo {
    ScenarioKind kind;
    const char* name;
    const char* description;
};

inline const std::vector<ScenarioKindInfo>& scenario_kinds() {
    static const std::vector<ScenarioKindInfo> table = {
        {ScenarioKind::berry_cone, "berry-cone",
         "spin in a field direction sweeping a cone: discrete/connection Berry phases per level "
         "vs the solid-angle law, optional adiabatic sweeps"},
        {ScenarioKind::berry_custom_loop, "berry-custom-loop",
         "spin with the field tracing a geodesic polygon loop: per-level Berry phases vs the "
         "sampled solid angle"},
        {ScenarioKind::aa_precession, "aa-precession",
         "constant-field precession over one ray period: cyclic geometric phase per level vs the "
         "Bloch solid-angle law"},
        {ScenarioKind::aa_vs_berry_sweep, "aa-vs-berry-sweep",
         "cyclic geometric phase at increasing sweep times against the discrete Berry reference"},
        {ScenarioKind::wz_quadrupole, "wz-quadrupole",
         "degenerate quadrupole blocks on a cone loop: discrete holonomy and the adiabatic "
         "oracle"},
        {ScenarioKind::pancharatnam_chain, "pancharatnam-chain",
         "closed polarizer chains: projection-product phase vs -solid_angle/2 on the Poincare "
         "sphere"},
    };
    return table;
}

inline const ScenarioKindInfo* find_kind(const std::string& name) {
    for (const auto& k : scenario_kinds())
        if (name == k.name) return &k;
    return nullptr;
}

// ------------------------------- configuration --------------------------------

struct ScenarioConfig {
    std::string scenario;  // display name echoed into report rows
    ScenarioKind kind = ScenarioKind::berry_cone;
    std::string kind_name;

    double spin = 0.5;
    double kappa_b = 1.0;
    std::vector<double> thetas;  // cone colatitudes / Bloch colatitudes
    int samples = 720;
    long steps = 10000;
    double steps_per_time = 100.0;
    std::vector<double> sweep_times;
    std::vector<int> levels;  // level indices (ascending energy); empty = all
    int level = -1;           // single level for sweep rows; -1 = top
    int block = 0;
    std::vector<Vec3> loop_vertices;
    std::vector<PolarizationSpinor> chain;
    int random_chains = 0;
    std::uint64_t seed = 0;
    double cyclicity_tolerance = cyclicity_tol_default;
    double leakage_tolerance = 0.05;
    std::optional<double> max_deviation;
    std::string out;

    nlohmann::json echo;  // normalized config for report provenance

    int dim() const { return static_cast<int>(std::lround(2.0 * spin)) + 1; }
    int top_level() const { return dim() - 1; }
    int sweep_level() const { return level >= 0 ? level : top_level(); }
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;  // all validation failures, not just the first

    bool ok() const { return errors.empty() && config.has_value(); }
};

namespace detail {

inline PolarizationSpinor named_polarization(const std::string& name) {
    if (name == "H") return PolarizationSpinor::horizontal();
    if (name == "V") return PolarizationSpinor::vertical();
    if (name == "D") return PolarizationSpinor::diagonal();
    if (name == "A") return PolarizationSpinor::antidiagonal();
    if (name == "R") return PolarizationSpinor::circular_right();
    if (name == "L") return PolarizationSpinor::circular_left();
    throw contract_error("chain: unknown polarization name '" + name +
                         "' (use H,V,D,A,R,L or [re1,im1,re2,im2])");
}

inline bool is_half_integer(double s) {
    return std::abs(2.0 * s - std::round(2.0 * s)) <= 1e-9;
}

}  // namespace detail

// Parse and validate a schema-v1 config document, collecting every violation.
inline ParseResult parse_config(const std::string& text) {
    ParseResult res;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        res.errors.push_back(std::string("config is not well-formed JSON: ") + e.what());
        return res;
    }
    if (!j.is_object()) {
        res.errors.push_back("config root must be a JSON object");
        return res;
    }
    auto err = [&res](const std::string& m) { res.errors.push_back(m); };

    static const std::vector<std::string> known_keys = {
        "schema_version", "scenario", "kind", "spin", "kappa_b", "theta", "thetas",
        "samples", "steps", "steps_per_time", "sweep_times", "levels", "level", "block",
        "loop_vertices", "chain", "random_chains", "seed", "cyclicity_tolerance",
        "leakage_tolerance", "max_deviation", "out"};
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& k : known_keys)
            if (item.key() == k) { known = true; break; }
        if (!known) err("unknown key \"" + item.key() + "\"");
    }

    ScenarioConfig cfg;
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        err("missing or non-integer \"schema_version\"");
    else if (j["schema_version"].get<int>() != config_schema_version)
        err("unsupported \"schema_version\" (expected " +
            std::to_string(config_schema_version) + ")");

    if (!j.contains("kind") || !j["kind"].is_string()) {
        err("missing or non-string \"kind\"");
        return res;
    }
    const ScenarioKindInfo* info = find_kind(j["kind"].get<std::string>());
    if (!info) {
        err("unknown \"kind\" \"" + j["kind"].get<std::string>() + "\"");
        return res;
    }
    cfg.kind = info->kind;
    cfg.kind_name = info->name;
    cfg.scenario = j.value("scenario", std::string(info->name));

    auto get_num = [&](const char* key, double lo, double hi, double& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) { err(std::string("\"") + key + "\" must be a number"); return; }
        double v = j[key].get<double>();
        if (!(v >= lo && v <= hi)) {
            err(std::string("\"") + key + "\" out of range");
            return;
        }
        slot = v;
    };
    auto get_int = [&](const char* key, long lo, long hi, auto& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer()) {
            err(std::string("\"") + key + "\" must be an integer");
            return;
        }
        long v = j[key].get<long>();
        if (v < lo || v > hi) {
            err(std::string("\"") + key + "\" out of range");
            return;
        }
        slot = static_cast<std::remove_reference_t<decltype(slot)>>(v);
    };

    get_num("spin", 0.5, 4.0, cfg.spin);
    if (j.contains("spin") && j["spin"].is_number() && !detail::is_half_integer(cfg.spin))
        err("\"spin\" must be a half-integer");
    get_num("kappa_b", 1e-9, 1e9, cfg.kappa_b);
    get_int("samples", 3, 2000000, cfg.samples);
    get_int("steps", 1, 100000000, cfg.steps);
    get_num("steps_per_time", 1e-6, 1e9, cfg.steps_per_time);
    get_int("block", 0, 64, cfg.block);
    get_int("random_chains", 0, 100000, cfg.random_chains);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            err("\"seed\" must be an unsigned integer");
        else
            cfg.seed = j["seed"].get<std::uint64_t>();
    }
    get_num("cyclicity_tolerance", 0.0, 1.0, cfg.cyclicity_tolerance);
    get_num("leakage_tolerance", 0.0, 1.0, cfg.leakage_tolerance);
    if (j.contains("max_deviation")) {
        double v = -1;
        get_num("max_deviation", 0.0, 1e9, v);
        if (v >= 0) cfg.max_deviation = v;
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) err("\"out\" must be a string");
        else cfg.out = j["out"].get<std::string>();
    }

    if (j.contains("theta") && j.contains("thetas"))
        err("give either \"theta\" or \"thetas\", not both");
    if (j.contains("theta")) {
        double t = -1;
        get_num("theta", 1e-9, pi - 1e-9, t);
        if (t > 0) cfg.thetas = {t};
    }
    if (j.contains("thetas")) {
        if (!j["thetas"].is_array() || j["thetas"].empty())
            err("\"thetas\" must be a non-empty array");
        else
            for (const auto& v : j["thetas"]) {
                if (!v.is_number() || !(v.get<double>() > 0 && v.get<double>() < pi)) {
                    err("\"thetas\" entries must lie in (0, pi)");
                    break;
                }
                cfg.thetas.push_back(v.get<double>());
            }
    }

    if (j.contains("sweep_times")) {
        if (!j["sweep_times"].is_array() || j["sweep_times"].empty())
            err("\"sweep_times\" must be a non-empty array");
        else
            for (const auto& v : j["sweep_times"]) {
                if (!v.is_number() || !(v.get<double>() > 0)) {
                    err("\"sweep_times\" entries must be positive numbers");
                    break;
                }
                cfg.sweep_times.push_back(v.get<double>());
            }
    }

    if (j.contains("levels")) {
        if (!j["levels"].is_array() || j["levels"].empty())
            err("\"levels\" must be a non-empty array");
        else
            for (const auto& v : j["levels"]) {
                if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() >= cfg.dim()) {
                    err("\"levels\" entries must be level indices in [0, 2s]");
                    break;
                }
                cfg.levels.push_back(v.get<int>());
            }
    }
    get_int("level", 0, 8, cfg.level);
    if (cfg.level >= cfg.dim()) err("\"level\" exceeds the top level index 2s");

    if (j.contains("loop_vertices")) {
        if (!j["loop_vertices"].is_array() || j["loop_vertices"].size() < 3)
            err("\"loop_vertices\" must list at least 3 [x,y,z] vertices");
        else
            for (const auto& v : j["loop_vertices"]) {
                if (!v.is_array() || v.size() != 3 || !v[0].is_number()) {
                    err("\"loop_vertices\" entries must be [x,y,z]");
                    break;
                }
                Vec3 p(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
                if (p.norm() < 1e-9) {
                    err("\"loop_vertices\" entries must be nonzero vectors");
                    break;
                }
                cfg.loop_vertices.push_back(p.normalized());
            }
    }

    if (j.contains("chain")) {
        if (!j["chain"].is_array() || j["chain"].empty())
            err("\"chain\" must be a non-empty array");
        else
            for (const auto& v : j["chain"]) {
                try {
                    if (v.is_string())
                        cfg.chain.push_back(detail::named_polarization(v.get<std::string>()));
                    else if (v.is_array() && v.size() == 4)
                        cfg.chain.push_back(PolarizationSpinor(
                            cplx(v[0].get<double>(), v[1].get<double>()),
                            cplx(v[2].get<double>(), v[3].get<double>())));
                    else
                        throw contract_error("chain entries must be names or [re1,im1,re2,im2]");
                } catch (const std::exception& e) {
                    err(std::string("\"chain\": ") + e.what());
                    break;
                }
            }
    }

    // Kind-specific requirements.
    switch (cfg.kind) {
        case ScenarioKind::berry_cone:
        case ScenarioKind::aa_precession:
            if (cfg.thetas.empty()) err("\"theta\" or \"thetas\" is required for this kind");
            break;
        case ScenarioKind::aa_vs_berry_sweep:
        case ScenarioKind::wz_quadrupole:
            if (cfg.thetas.size() != 1) err("exactly one \"theta\" is required for this kind");
            if (cfg.sweep_times.empty() && cfg.kind == ScenarioKind::aa_vs_berry_sweep)
                err("\"sweep_times\" is required for this kind");
            break;
        case ScenarioKind::berry_custom_loop:
            if (cfg.loop_vertices.size() < 3) err("\"loop_vertices\" is required for this kind");
            else if (cfg.samples < static_cast<int>(3 * cfg.loop_vertices.size()))
                err("\"samples\" must be at least 3 per loop vertex");
            break;
        case ScenarioKind::pancharatnam_chain:
            if (cfg.chain.empty()) err("\"chain\" is required for this kind");
            break;
    }
    if (cfg.kind == ScenarioKind::wz_quadrupole && !j.contains("spin")) cfg.spin = 1.5;
    if (cfg.levels.empty())
        for (int l = 0; l < cfg.dim(); ++l) cfg.levels.push_back(l);

    if (!res.errors.empty()) return res;
    cfg.echo = j;
    res.config = std::move(cfg);
    return res;
}

// ---------------------------------- reports -----------------------------------

struct ReportRow {
    std::string scenario, kind, level, notes;
    std::optional<long> samples, steps;
    std::optional<double> sweep_time;
    std::optional<double> measured_phase, predicted_phase, deviation, fidelity;
    bool failed = false;
};

struct RunReport {
    ScenarioConfig config;
    std::vector<ReportRow> rows;
    std::string generated_at;  // the only field excluded from byte-for-byte comparisons

    bool any_failed() const {
        for (const auto& r : rows)
            if (r.failed) return true;
        return false;
    }
    double max_reported_deviation() const {
        double m = 0.0;
        for (const auto& r : rows)
            if (r.deviation) m = std::max(m, *r.deviation);
        return m;
    }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline const char* csv_header() {
    return "scenario,kind,level,samples,steps,sweep_time,measured_phase,predicted_phase,"
           "deviation,fidelity,notes";
}

inline void emit_csv(const RunReport& report, std::ostream& os) {
    os << csv_header() << "\n";
    auto cell_d = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    auto cell_l = [](const std::optional<long>& v) {
        return v ? std::to_string(*v) : std::string();
    };
    auto sanitize = [](std::string s) {
        for (char& c : s)
            if (c == ',' || c == '\n') c = ';';
        return s;
    };
    for (const auto& r : report.rows) {
        os << sanitize(r.scenario) << ',' << sanitize(r.kind) << ',' << sanitize(r.level) << ','
           << cell_l(r.samples) << ',' << cell_l(r.steps) << ',' << cell_d(r.sweep_time) << ','
           << cell_d(r.measured_phase) << ',' << cell_d(r.predicted_phase) << ','
           << cell_d(r.deviation) << ',' << cell_d(r.fidelity) << ',' << sanitize(r.notes)
           << "\n";
    }
}

inline nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["schema_version"] = config_schema_version;
    j["scenario"] = report.config.scenario;
    j["kind"] = report.config.kind_name;
    j["provenance"] = {
        {"artifact_version", artifact_version},
        {"generated_at", report.generated_at},
        {"seed", report.config.seed},
        {"conventions",
         {{"phase_branch", "(-pi, pi]"},
          {"hbar", 1.0},
          {"solid_angle_orientation", "right-hand rule, outward normal"},
          {"poincare_pole", "(1,0) spinor maps to +z"},
          {"inner_product", "conjugate-first"}}},
        {"tolerances",
         {{"cyclicity", report.config.cyclicity_tolerance},
          {"leakage", report.config.leakage_tolerance}}},
    };
    j["config"] = report.config.echo;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["scenario"] = r.scenario;
        row["kind"] = r.kind;
        row["level"] = r.level;
        if (r.samples) row["samples"] = *r.samples;
        if (r.steps) row["steps"] = *r.steps;
        if (r.sweep_time) row["sweep_time"] = *r.sweep_time;
        if (r.measured_phase) row["measured_phase"] = *r.measured_phase;
        if (r.predicted_phase) row["predicted_phase"] = *r.predicted_phase;
        if (r.deviation) row["deviation"] = *r.deviation;
        if (r.fidelity) row["fidelity"] = *r.fidelity;
        row["notes"] = r.notes;
        row["failed"] = r.failed;
        j["rows"].push_back(std::move(row));
    }
    return j;
}

inline void emit_report(const RunReport& report, const std::string& format, std::ostream& os) {
    if (format == "csv") emit_csv(report, os);
    else if (format == "json") os << report_to_json(report).dump(2) << "\n";
    else throw contract_error("emit_report: format must be csv or json");
}

inline void save_report(const RunReport& report, const std::string& format,
                        const std::string& path) {
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs) throw io_error("save_report: cannot open '" + path + "' for writing", path);
    emit_report(report, format, ofs);
    if (!ofs.good()) throw io_error("save_report: write to '" + path + "' failed", path);
}

// --------------------------------- execution ----------------------------------

namespace detail {

inline const char* error_name(const std::exception& e) {
    if (dynamic_cast<const undefined_phase_error*>(&e)) return "undefined-phase";
    if (dynamic_cast<const no_unique_geodesic_error*>(&e)) return "no-unique-geodesic";
    if (dynamic_cast<const degeneracy_splitting_error*>(&e)) return "degeneracy-splitting";
    if (dynamic_cast<const degeneracy_error*>(&e)) return "degeneracy";
    if (dynamic_cast<const undersampled_loop_error*>(&e)) return "undersampled-loop";
    if (dynamic_cast<const nonadiabatic_leakage_error*>(&e)) return "non-adiabatic-leakage";
    if (dynamic_cast<const noncyclic_error*>(&e)) return "non-cyclic";
    if (dynamic_cast<const full_extinction_error*>(&e)) return "full-extinction";
    if (dynamic_cast<const structure_violation_error*>(&e)) return "structure-violation";
    if (dynamic_cast<const io_error*>(&e)) return "io";
    if (dynamic_cast<const contract_error*>(&e)) return "contract-violation";
    return "runtime";
}

inline std::string format_level_n(double n) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%+g", n);
    return buf;
}

// Run row jobs (pure, independent) on up to `jobs` workers; the output order
// is fixed by the job index regardless of scheduling.
inline std::vector<ReportRow> run_jobs(const std::vector<std::function<ReportRow()>>& jobs_list,
                                       int jobs) {
    std::vector<ReportRow> rows(jobs_list.size());
    if (jobs <= 1 || jobs_list.size() <= 1) {
        for (std::size_t i = 0; i < jobs_list.size(); ++i) rows[i] = jobs_list[i]();
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs_list.size()) return;
            rows[i] = jobs_list[i]();
        }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(jobs, static_cast<int>(jobs_list.size()));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

inline ReportRow base_row(const ScenarioConfig& cfg) {
    ReportRow r;
    r.scenario = cfg.scenario;
    r.kind = cfg.kind_name;
    return r;
}

// Wrap a physics row computation: module errors become flagged rows carrying
// the module's error name, never silent values.
inline std::function<ReportRow()> guarded(const ScenarioConfig& cfg,
                                          std::function<ReportRow()> fn) {
    return [&cfg, fn = std::move(fn)]() -> ReportRow {
        try {
            return fn();
        } catch (const std::exception& e) {
            ReportRow r = base_row(cfg);
            r.failed = true;
            r.notes = std::string("error=") + error_name(e) + ": " + e.what();
            return r;
        }
    };
}

inline void fill_prediction(ReportRow& r, double measured, double predicted_raw) {
    // Predictions are reported on the branch nearest the measured value so
    // that deviation = |measured - predicted| is recomputable from the row.
    r.measured_phase = measured;
    r.predicted_phase = align_branch(predicted_raw, measured);
    r.deviation = std::abs(measured - *r.predicted_phase);
}

// ------------------------------ kind pipelines --------------------------------

inline std::vector<std::function<ReportRow()>> jobs_berry_cone(const ScenarioConfig& cfg) {
    std::vector<std::function<ReportRow()>> jobs;
    auto family = zeeman_family(cfg.spin, cfg.kappa_b);
    for (double theta : cfg.thetas) {
        auto frames = std::make_shared<FrameField>(
            build_frames(family, cone_loop(theta, cfg.samples), GaugeRule::parallel_transport));
        double omega = two_pi * (1.0 - std::cos(theta));
        for (int level : cfg.levels) {
            jobs.push_back(guarded(cfg, [&cfg, frames, theta, omega, level]() {
                ReportRow r = base_row(cfg);
                double n = n_of_level_index(cfg.spin, level);
                BerryPhaseResult disc = berry_phase_discrete(*frames, level);
                BerryPhaseResult conn = berry_phase_connection(*frames, level);
                r.level = format_level_n(n);
                r.samples = cfg.samples;
                fill_prediction(r, disc.phase, -n * omega);
                r.notes = "theta=" + format_double(theta) +
                          ";method=discrete;connection_phase=" + format_double(conn.phase) +
                          ";winding=" + std::to_string(disc.winding);
                return r;
            }));
        }
        if (!cfg.sweep_times.empty()) {
            int level = cfg.sweep_level();
            for (double t : cfg.sweep_times) {
                jobs.push_back(guarded(cfg, [&cfg, frames, theta, omega, level, t]() {
                    ReportRow r = base_row(cfg);
                    double n = n_of_level_index(cfg.spin, level);
                    long steps = std::max<long>(1000, std::lround(cfg.steps_per_time * t));
                    PhaseDecomposition d = berry_phase_adiabatic_numeric(
                        frames->family, frames->path, level, t, static_cast<int>(steps),
                        cfg.leakage_tolerance);
                    r.level = format_level_n(n);
                    r.samples = cfg.samples;
                    r.steps = steps;
                    r.sweep_time = t;
                    fill_prediction(r, d.geometric, -n * omega);
                    r.notes = "theta=" + format_double(theta) +
                              ";method=adiabatic;dynamical=" + format_double(d.dynamical);
                    return r;
                }));
            }
        }
    }
    return jobs;
}

inline std::vector<std::function<ReportRow()>> jobs_berry_custom_loop(
    const ScenarioConfig& cfg) {
    std::vector<std::function<ReportRow()>> jobs;
    auto family = zeeman_family(cfg.spin, cfg.kappa_b);
    ParameterPath path = polygon_loop(cfg.loop_vertices, cfg.samples);
    std::vector<Vec3> pts;
    pts.reserve(path.samples());
    for (const Param& p : path.points) pts.push_back(param_to_vec3(p));
    double omega = sampled_loop_solid_angle(pts);
    auto frames = std::make_shared<FrameField>(
        build_frames(family, path, GaugeRule::parallel_transport));
    for (int level : cfg.levels) {
        jobs.push_back(guarded(cfg, [&cfg, frames, omega, level]() {
            ReportRow r = base_row(cfg);
            double n = n_of_level_index(cfg.spin, level);
            BerryPhaseResult disc = berry_phase_discrete(*frames, level);
            r.level = format_level_n(n);
            r.samples = static_cast<long>(frames->samples() - 1);
            fill_prediction(r, disc.phase, -n * omega);
            r.notes = "solid_angle=" + format_double(omega) + ";method=discrete";
            return r;
        }));
    }
    return jobs;
}

inline std::vector<std::function<ReportRow()>> jobs_aa_precession(const ScenarioConfig& cfg) {
    std::vector<std::function<ReportRow()>> jobs;
    SpinOperators ops = spin_operators(cfg.spin);
    auto family = zeeman_family(cfg.spin, cfg.kappa_b);
    double period = two_pi / cfg.kappa_b;  // ray period of precession about z
    ParameterPath path = constant_path(vec3_to_param(Vec3::UnitZ()), period);
    for (double theta : cfg.thetas) {
        Mat rot = hermitian_exp_unitary(ops.sy, theta);  // e^{-i theta Sy}
        for (int level : cfg.levels) {
            jobs.push_back(guarded(cfg, [&cfg, ops, family, path, rot, theta, level]() {
                ReportRow r = base_row(cfg);
                double n = n_of_level_index(cfg.spin, level);
                Vec psi0 = rot * sz_eigenstate(ops, n);
                Trajectory traj =
                    evolve(family, path, psi0, static_cast<int>(cfg.steps));
                PhaseDecomposition d = aa_phase(traj, cfg.cyclicity_tolerance);
                r.level = format_level_n(n);
                r.steps = cfg.steps;
                r.sweep_time = path.duration();
                r.fidelity = std::abs(inner_product(traj.initial(), traj.final()));
                fill_prediction(r, d.geometric, -n * two_pi * (1.0 - std::cos(theta)));
                r.notes = "theta=" + format_double(theta) +
                          ";total=" + format_double(wrap_angle(d.total)) +
                          ";dynamical=" + format_double(d.dynamical);
                return r;
            }));
        }
    }
    return jobs;
}

inline std::vector<std::function<ReportRow()>> jobs_aa_vs_berry(const ScenarioConfig& cfg) {
    std::vector<std::function<ReportRow()>> jobs;
    auto family = zeeman_family(cfg.spin, cfg.kappa_b);
    double theta = cfg.thetas.front();
    auto path = std::make_shared<ParameterPath>(cone_loop(theta, cfg.samples));
    int level = cfg.sweep_level();
    double n = n_of_level_index(cfg.spin, level);
    double omega = two_pi * (1.0 - std::cos(theta));

    auto frames = std::make_shared<FrameField>(
        build_frames(family, *path, GaugeRule::parallel_transport));
    double berry_ref = berry_phase_discrete(*frames, level).phase;

    for (double t : cfg.sweep_times) {
        jobs.push_back(guarded(cfg, [&cfg, family, path, frames, level, n, omega, berry_ref,
                                     t]() {
            ReportRow r = base_row(cfg);
            long steps = std::max<long>(1000, std::lround(cfg.steps_per_time * t));
            Vec psi0 = frames->vectors.front().col(level);
            Trajectory traj =
                evolve(family, path->retimed(t), psi0, static_cast<int>(steps));
            r.level = format_level_n(n);
            r.samples = cfg.samples;
            r.steps = steps;
            r.sweep_time = t;
            r.fidelity = std::abs(inner_product(traj.initial(), traj.final()));
            PhaseDecomposition d = aa_phase(traj, cfg.leakage_tolerance);
            fill_prediction(r, wrap_angle(d.geometric), -n * omega);
            r.notes = "berry_ref=" + format_double(wrap_angle(berry_ref)) +
                      ";dev_vs_ref=" + format_double(circular_distance(d.geometric, berry_ref));
            return r;
        }));
    }
    return jobs;
}

inline std::vector<std::function<ReportRow()>> jobs_wz_quadrupole(const ScenarioConfig& cfg) {
    std::vector<std::function<ReportRow()>> jobs;
    auto family = quadrupole_family(cfg.spin, cfg.kappa_b);
    double theta = cfg.thetas.front();
    auto path = std::make_shared<ParameterPath>(cone_loop(theta, cfg.samples));
    auto discrete = std::make_shared<HolonomyMatrix>(
        wz_holonomy_discrete(build_degenerate_frames(family, *path, cfg.block)));

    auto eigenphases_note = [](const Mat& u) {
        Eigen::ComplexEigenSolver<Mat> es(u);
        std::vector<double> ph;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            ph.push_back(principal_arg(es.eigenvalues()[i]));
        std::sort(ph.begin(), ph.end());
        std::string s = "eigenphases=";
        for (std::size_t i = 0; i < ph.size(); ++i)
            s += (i ? "|" : "") + format_double(ph[i]);
        return s;
    };

    jobs.push_back(guarded(cfg, [&cfg, discrete, eigenphases_note]() {
        ReportRow r = base_row(cfg);
        r.level = "block" + std::to_string(cfg.block) + "(d=" +
                  std::to_string(discrete->dim()) + ")";
        r.samples = cfg.samples;
        const Mat& d = discrete->matrix;
        r.measured_phase = principal_arg(d.determinant());
        double unit_defect =
            operator_norm(d.adjoint() * d - Mat::Identity(d.rows(), d.cols()));
        r.notes = "method=discrete;" + eigenphases_note(d) +
                  ";unitarity_defect=" + format_double(unit_defect);
        return r;
    }));
    for (double t : cfg.sweep_times) {
        jobs.push_back(guarded(cfg, [&cfg, family, path, discrete, eigenphases_note, t]() {
            ReportRow r = base_row(cfg);
            long steps = std::max<long>(1000, std::lround(cfg.steps_per_time * t));
            HolonomyMatrix oracle = wz_holonomy_adiabatic_oracle(
                family, *path, cfg.block, t, static_cast<int>(steps), cfg.leakage_tolerance);
            r.level = "block" + std::to_string(cfg.block) + "(d=" +
                      std::to_string(oracle.dim()) + ")";
            r.samples = cfg.samples;
            r.steps = steps;
            r.sweep_time = t;
            r.measured_phase = principal_arg(oracle.matrix.determinant());
            r.fidelity = 1.0 - oracle.leakage;
            r.notes = "method=adiabatic-oracle;" + eigenphases_note(oracle.matrix) +
                      ";opnorm_dist_to_discrete=" +
                      format_double(operator_norm(oracle.matrix - discrete->matrix)) +
                      ";leakage=" + format_double(oracle.leakage);
            return r;
        }));
    }
    return jobs;
}

inline std::vector<std::function<ReportRow()>> jobs_pancharatnam(const ScenarioConfig& cfg) {
    std::vector<std::function<ReportRow()>> jobs;

    auto chain_row = [&cfg](const std::vector<PolarizationSpinor>& pols, std::string label) {
        return guarded(cfg, [&cfg, pols, label = std::move(label)]() {
            ReportRow r = base_row(cfg);
            PolarizerChain chain{pols, true};
            ChainPhaseResult res = chain_phase(chain, pols.front());
            r.level = label;
            r.samples = static_cast<long>(pols.size());
            r.fidelity = res.transmitted_fraction;
            fill_prediction(r, res.decomposition.geometric, res.predicted_phase);
            r.notes = "solid_angle=" + format_double(res.solid_angle) +
                      (res.polygon_degenerate ? ";polygon=degenerate" : "");
            return r;
        });
    };

    jobs.push_back(chain_row(cfg.chain, "chain"));

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_spinor = [&]() {
        for (;;) {
            cplx a(gauss(rng), gauss(rng)), b(gauss(rng), gauss(rng));
            if (std::sqrt(std::norm(a) + std::norm(b)) > 1e-6) return PolarizationSpinor(a, b);
        }
    };
    for (int i = 0; i < cfg.random_chains; ++i) {
        std::vector<PolarizationSpinor> pols;
        for (int attempt = 0; attempt < 1000 && pols.empty(); ++attempt) {
            std::size_t nv = 3 + static_cast<std::size_t>(rng() % 4);  // 3..6 vertices
            std::vector<PolarizationSpinor> cand;
            for (std::size_t k = 0; k < nv; ++k) cand.push_back(random_spinor());
            bool ok = true;
            for (std::size_t k = 0; k < nv && ok; ++k) {
                double ov = std::abs(
                    inner_product(cand[k].vec(), cand[(k + 1) % nv].vec()));
                ok = ov > 0.2;  // keep consecutive projections far from extinction
            }
            std::vector<Vec3> pts;
            for (const auto& p : cand) pts.push_back(to_poincare(p));
            if (ok && polygon_solid_angle(pts).degenerate) ok = false;
            if (ok) pols = std::move(cand);
        }
        if (pols.empty())
            throw contract_error("pancharatnam-chain: random chain generation stalled");
        jobs.push_back(chain_row(pols, "random" + std::to_string(i)));
    }
    return jobs;
}

}  // namespace detail

// Every scenario kind maps to exactly one pipeline; fails loudly if a kind is
// added without one.
inline std::vector<std::function<ReportRow()>> build_jobs(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
        case ScenarioKind::berry_cone: return detail::jobs_berry_cone(cfg);
        case ScenarioKind::berry_custom_loop: return detail::jobs_berry_custom_loop(cfg);
        case ScenarioKind::aa_precession: return detail::jobs_aa_precession(cfg);
        case ScenarioKind::aa_vs_berry_sweep: return detail::jobs_aa_vs_berry(cfg);
        case ScenarioKind::wz_quadrupole: return detail::jobs_wz_quadrupole(cfg);
        case ScenarioKind::pancharatnam_chain: return detail::jobs_pancharatnam(cfg);
    }
    throw std::logic_error("build_jobs: scenario kind has no pipeline");
}

// Startup self-check: every declared kind must dispatch to a pipeline.
inline void verify_dispatch_table() {
    for (const auto& info : scenario_kinds()) {
        switch (info.kind) {
            case ScenarioKind::berry_cone:
            case ScenarioKind::berry_custom_loop:
            case ScenarioKind::aa_precession:
            case ScenarioKind::aa_vs_berry_sweep:
            case ScenarioKind::wz_quadrupole:
            case ScenarioKind::pancharatnam_chain:
                continue;
        }
        throw std::logic_error(std::string("scenario kind without pipeline: ") + info.name);
    }
}

inline RunReport run_scenario(const ScenarioConfig& cfg, int jobs = 1) {
    verify_dispatch_table();
    RunReport report;
    report.config = cfg;
    report.generated_at = utc_timestamp();
    report.rows = detail::run_jobs(build_jobs(cfg), jobs);
    return report;
}

}  // namespace phaselab
