#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "noavqe/adapt.hpp"
#include "noavqe/ansatz.hpp"
#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"
#include "noavqe/io.hpp"
#include "noavqe/noization.hpp"
#include "noavqe/oracle.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/simulator.hpp"
#include "noavqe/vqe.hpp"

namespace noavqe {

enum class Method { Vqe, Noization, NoaVqe };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::Vqe: return "vqe";
    case Method::Noization: return "noization";
    case Method::NoaVqe: return "noa-vqe";
    }
    return "?";
}

inline const std::vector<double> kDefaultRatioGrid{0.01, 0.03, 0.1, 0.3, 1.0};

struct ExperimentConfig {
    std::string name = "experiment";
    HubbardSpec model;
    Method method = Method::Vqe;
    std::string ansatz = "fsim"; // unused by noa-vqe
    int k_steps = 1;
    int max_ops = 10;
    bool noise_enabled = false;
    double noise_ratio = 0.0;
    ShotBudget budget = ShotBudget::exact();
    RdmMode rdm_mode = RdmMode::Exact;
    long long rdm_shots = 0;
    bool spin_resolved = true;
    std::vector<std::uint64_t> seeds{0};
    int procedure_repeats = 1;
    std::vector<double> ratio_grid = kDefaultRatioGrid;

    NoiseModel noise() const {
        if (!noise_enabled || noise_ratio == 0.0) return NoiseModel::none();
        return scaled_reference_noise(noise_ratio);
    }

    /// Budget with k_steps set for the method (K for NOizing runs, 1 for direct VQE).
    ShotBudget effective_budget() const {
        ShotBudget b = budget;
        b.k_steps = method == Method::Vqe ? 1 : k_steps;
        return b;
    }

    /// Per-evaluation shots of a direct run with the same total budget.
    long long direct_shots_per_evaluation() const {
        ShotBudget b = budget;
        b.k_steps = 1;
        return b.shots_per_evaluation();
    }
};

namespace detail {

using io::json;

[[noreturn]] inline void field_error(const std::string &field, const std::string &what) {
    throw ConfigError("config field '" + field + "': " + what);
}

inline void reject_unknown(const json &j, const std::string &where, const std::set<std::string> &known) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) field_error(where + it.key(), "unknown key");
}

template <class T> T get_field(const json &j, const std::string &key, const std::string &where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        field_error(where + key, j.contains(key) ? "wrong type" : "missing");
    }
}

template <class T> T get_or(const json &j, const std::string &key, const std::string &where, T fallback) {
    if (!j.contains(key)) return fallback;
    return get_field<T>(j, key, where);
}

inline long long get_count(const json &j, const std::string &key, const std::string &where) {
    const json &v = j.at(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d != std::floor(d) || d > 9.0e18) field_error(where + key, "must be an integer count");
        return static_cast<long long>(d);
    }
    field_error(where + key, "wrong type");
}

} // namespace detail

inline HubbardSpec parse_model(const io::json &j, const std::string &where = "model.") {
    using namespace detail;
    if (!j.is_object()) field_error(where.substr(0, where.size() - 1), "must be an object");
    reject_unknown(j, where, {"n_sites", "t", "u", "mu", "geometry"});
    HubbardSpec s;
    s.n_sites = get_field<int>(j, "n_sites", where);
    s.t = get_or<double>(j, "t", where, 1.0);
    s.u = get_field<double>(j, "u", where);
    if (j.contains("mu")) s.mu = get_field<double>(j, "mu", where);
    try {
        s.geometry = geometry_from_string(get_or<std::string>(j, "geometry", where, "chain"));
        s.validate();
    } catch (const ConfigError &e) {
        field_error(where.substr(0, where.size() - 1), e.what());
    }
    return s;
}

/// Reads a model from either a bare model object or a config holding a "model" key.
inline HubbardSpec parse_model_document(const io::json &j) {
    if (j.contains("model")) return parse_model(j.at("model"));
    return parse_model(j, "");
}

inline ExperimentConfig parse_config(const io::json &j) {
    using namespace detail;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, "", {"name", "description", "model", "method", "ansatz", "K", "max_ops", "noise", "shots", "rdm",
                           "spin_resolved", "seeds", "procedure_repeats", "r_grid"});
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", "", "experiment");
    if (c.name.empty() || c.name.find_first_of("/\\ ") != std::string::npos) {
        field_error("name", "must be non-empty without spaces or slashes");
    }
    if (!j.contains("model")) field_error("model", "missing");
    c.model = parse_model(j.at("model"));

    const std::string method = get_field<std::string>(j, "method", "");
    if (method == "vqe") c.method = Method::Vqe;
    else if (method == "noization") c.method = Method::Noization;
    else if (method == "noa-vqe") c.method = Method::NoaVqe;
    else field_error("method", "expected vqe | noization | noa-vqe, got '" + method + "'");

    if (c.method == Method::NoaVqe) {
        if (j.contains("ansatz")) field_error("ansatz", "not used by noa-vqe (the circuit is grown adaptively)");
    } else {
        c.ansatz = get_field<std::string>(j, "ansatz", "");
        try {
            (void)build_ansatz(c.ansatz, 2 * c.model.n_sites);
        } catch (const ConfigError &e) {
            field_error("ansatz", e.what());
        }
    }
    if (c.method == Method::Vqe) {
        if (j.contains("K") && get_field<int>(j, "K", "") != 1) field_error("K", "direct vqe runs have K = 1");
    } else {
        c.k_steps = get_field<int>(j, "K", "");
        if (c.k_steps < 1) field_error("K", "must be >= 1");
    }
    if (c.method == Method::NoaVqe) {
        c.max_ops = get_or<int>(j, "max_ops", "", 10);
        if (c.max_ops < 0) field_error("max_ops", "must be >= 0");
    } else if (j.contains("max_ops")) {
        field_error("max_ops", "only valid for method noa-vqe");
    }

    if (j.contains("noise")) {
        const json &n = j.at("noise");
        if (!n.is_object()) field_error("noise", "must be an object");
        reject_unknown(n, "noise.", {"enabled", "r"});
        c.noise_enabled = get_field<bool>(n, "enabled", "noise.");
        c.noise_ratio = get_or<double>(n, "r", "noise.", c.noise_enabled ? 1.0 : 0.0);
        if (!(c.noise_ratio >= 0.0) || c.noise_ratio * kReferenceEps2 > 0.8) field_error("noise.r", "out of range");
    }

    if (!j.contains("shots")) field_error("shots", "missing");
    {
        const json &s = j.at("shots");
        if (!s.is_object()) field_error("shots", "must be an object");
        reject_unknown(s, "shots.", {"mode", "total", "n_iter", "n_repeats"});
        const std::string mode = get_field<std::string>(s, "mode", "shots.");
        c.budget.n_iter = get_or<int>(s, "n_iter", "shots.", 1000);
        c.budget.n_repeats = get_or<int>(s, "n_repeats", "shots.", 1);
        if (c.budget.n_iter < 1) field_error("shots.n_iter", "must be >= 1");
        if (c.budget.n_repeats < 1) field_error("shots.n_repeats", "must be >= 1");
        if (mode == "exact") {
            c.budget.exact_mode = true;
            if (s.contains("total")) field_error("shots.total", "not used in exact mode");
        } else if (mode == "sampled") {
            c.budget.exact_mode = false;
            if (!s.contains("total")) field_error("shots.total", "missing");
            c.budget.total = get_count(s, "total", "shots.");
            if (c.budget.total < 1) field_error("shots.total", "must be positive");
        } else {
            field_error("shots.mode", "expected exact | sampled, got '" + mode + "'");
        }
    }

    if (j.contains("rdm")) {
        const json &r = j.at("rdm");
        if (!r.is_object()) field_error("rdm", "must be an object");
        reject_unknown(r, "rdm.", {"mode", "shots"});
        const std::string mode = get_or<std::string>(r, "mode", "rdm.", "exact");
        if (mode == "exact") c.rdm_mode = RdmMode::Exact;
        else if (mode == "sampled") c.rdm_mode = RdmMode::Sampled;
        else field_error("rdm.mode", "expected exact | sampled");
        c.rdm_shots = r.contains("shots") ? get_count(r, "shots", "rdm.") : 0;
        if (c.rdm_shots < 0) field_error("rdm.shots", "must be >= 0");
        if (c.rdm_mode == RdmMode::Sampled && c.rdm_shots == 0 && c.budget.exact_mode) {
            field_error("rdm.shots", "required for a sampled 1-RDM when shots.mode is exact");
        }
    }
    if (c.method == Method::Vqe && j.contains("rdm")) field_error("rdm", "direct vqe runs measure no 1-RDM");
    c.spin_resolved = get_or<bool>(j, "spin_resolved", "", true);

    if (j.contains("seeds")) {
        const json &s = j.at("seeds");
        if (!s.is_array() || s.empty()) field_error("seeds", "must be a non-empty array of integers");
        c.seeds.clear();
        for (const auto &v : s) {
            if (!v.is_number_integer() || v.get<long long>() < 0) field_error("seeds", "entries must be non-negative integers");
            c.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    c.procedure_repeats = get_or<int>(j, "procedure_repeats", "", 1);
    if (c.procedure_repeats < 1) field_error("procedure_repeats", "must be >= 1");

    if (j.contains("r_grid")) {
        const json &g = j.at("r_grid");
        if (!g.is_array() || g.empty()) field_error("r_grid", "must be a non-empty array");
        c.ratio_grid.clear();
        for (const auto &v : g) {
            if (!v.is_number() || v.get<double>() < 0.0) field_error("r_grid", "entries must be numbers >= 0");
            c.ratio_grid.push_back(v.get<double>());
        }
    }

    // Sampled budgets must cover every Pauli term of the starting Hamiltonian.
    if (!c.budget.exact_mode) {
        const std::size_t terms = jordan_wigner(build_hubbard(c.model)).size();
        const long long per = c.effective_budget().shots_per_evaluation();
        if (per < static_cast<long long>(terms)) {
            field_error("shots.total", std::to_string(per) + " shots per evaluation cannot cover " +
                                           std::to_string(terms) + " Pauli terms");
        }
    }
    return c;
}

inline io::json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return io::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path &path) { return parse_config(read_json_file(path)); }

inline io::json to_json(const ExperimentConfig &c) {
    io::json j{{"name", c.name}, {"model", io::to_json(c.model)}, {"method", to_string(c.method)}};
    if (c.method != Method::NoaVqe) j["ansatz"] = c.ansatz;
    j["K"] = c.k_steps;
    if (c.method == Method::NoaVqe) j["max_ops"] = c.max_ops;
    j["noise"] = {{"enabled", c.noise_enabled}, {"r", c.noise_ratio}, {"model", io::to_json(c.noise())}};
    j["shots"] = io::to_json(c.effective_budget());
    j["rdm"] = {{"mode", c.rdm_mode == RdmMode::Exact ? "exact" : "sampled"}, {"shots", c.rdm_shots}};
    j["spin_resolved"] = c.spin_resolved;
    j["seeds"] = c.seeds;
    j["procedure_repeats"] = c.procedure_repeats;
    j["r_grid"] = c.ratio_grid;
    return j;
}

/// Relative error/variance metrics over repeated procedures.
struct MetricsReport {
    double e0 = 0.0;
    std::vector<double> energies;
    double mean_energy = 0.0;
    double err = 0.0;   // mean |E - E0| / |E0|
    double var = 0.0;   // mean ((E - <E>) / E0)^2
    double merit = 0.0; // sqrt(err^2 + var)
};

inline MetricsReport compute_metrics(const std::vector<double> &energies, double e0) {
    if (energies.empty()) throw ConfigError("compute_metrics: no energies");
    if (e0 == 0.0) throw DomainError("compute_metrics: relative metrics need a nonzero E0");
    MetricsReport r;
    r.e0 = e0;
    r.energies = energies;
    const double n = static_cast<double>(energies.size());
    for (double e : energies) r.mean_energy += e / n;
    for (double e : energies) {
        r.err += std::abs((e - e0) / e0) / n;
        const double d = (e - r.mean_energy) / e0;
        r.var += d * d / n;
    }
    r.merit = std::sqrt(r.err * r.err + r.var);
    return r;
}

inline io::json to_json(const MetricsReport &m) {
    return {{"E0", m.e0}, {"mean_energy", m.mean_energy}, {"err", m.err},
            {"var", m.var}, {"merit", m.merit},       {"energies", m.energies}};
}

/// One execution of the configured pipeline.
struct RunRecord {
    std::uint64_t base_seed = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    double energy = 0.0;
    NoizationTrace trace; // direct VQE runs hold a single step
};

struct ExperimentResult {
    ExperimentConfig config;
    MetricsReport report;
    std::vector<RunRecord> runs;
    double e0 = 0.0;
};

inline constexpr double kVariationalSlack = 1e-9;

namespace detail {

inline NoizationTrace run_direct(const FermionTensors &h, const CircuitTemplate &c, const ShotBudget &budget,
                                 const NoiseModel &noise, std::uint64_t seed) {
    NoizationTrace t;
    t.method = "vqe";
    const PauliSum pauli = jordan_wigner(h);
    NoizationStep st;
    st.vqe = run_vqe(pauli, c, budget, noise, seed);
    st.energy = st.vqe.best_energy;
    st.one_norm = one_norm(pauli);
    st.term_count = pauli.size();
    st.weights = weight_distribution(pauli);
    st.rdm = measure_1rdm(simulate(c, st.vqe.best_params, noise));
    st.noons = natural_orbital_transform(st.rdm).noons;
    st.correlation_entropy = correlation_entropy(st.rdm);
    st.rotation = OrbitalRotation::identity(h.m);
    st.cumulative_rotation = st.rotation;
    t.steps.push_back(std::move(st));
    t.final_tensors = h;
    return t;
}

} // namespace detail

/// Runs every (seed, repeat) of the config and aggregates the final energies.
/// Noiseless exact runs are checked against the oracle energy (variational bound).
inline ExperimentResult run_experiment(const ExperimentConfig &cfg, std::uint64_t seed_offset = 0) {
    ExperimentResult out;
    out.config = cfg;
    const FermionTensors h = build_hubbard(cfg.model);
    out.e0 = oracle::ground_energy(h);
    const NoiseModel noise = cfg.noise();
    const ShotBudget budget = cfg.effective_budget();
    NoizationOptions opt;
    opt.rdm_mode = cfg.rdm_mode;
    opt.rdm_shots = cfg.rdm_shots;
    opt.spin_resolved = cfg.spin_resolved;
    const bool exact = budget.exact_mode && !noise.active();
    std::vector<double> energies;
    for (std::uint64_t base : cfg.seeds)
        for (int rep = 0; rep < cfg.procedure_repeats; ++rep) {
            RunRecord r;
            r.base_seed = base + seed_offset;
            r.repeat = rep;
            r.seed = mix_seed(r.base_seed, static_cast<std::uint64_t>(rep));
            switch (cfg.method) {
            case Method::Vqe:
                r.trace = detail::run_direct(h, build_ansatz(cfg.ansatz, h.m), budget, noise, r.seed);
                break;
            case Method::Noization:
                r.trace = noization_loop(h, build_ansatz(cfg.ansatz, h.m), cfg.k_steps, budget, noise, r.seed, opt);
                break;
            case Method::NoaVqe:
                r.trace = noa_vqe(h, cfg.k_steps, cfg.max_ops, budget, noise, r.seed, opt);
                break;
            }
            r.energy = r.trace.final_energy();
            if (exact)
                for (const auto &st : r.trace.steps)
                    if (st.energy < out.e0 - kVariationalSlack) {
                        throw ConsistencyError("run '" + cfg.name + "': energy " + std::to_string(st.energy) +
                                               " below the exact ground energy " + std::to_string(out.e0));
                    }
            energies.push_back(r.energy);
            out.runs.push_back(std::move(r));
        }
    out.report = compute_metrics(energies, out.e0);
    return out;
}

// ---------------------------------------------------------------------------
// Artifacts

inline constexpr const char *kCsvVersion = "# noavqe-csv v1";

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path &path, const std::string &table, const std::string &header) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << kCsvVersion << ' ' << table << '\n' << header << '\n';
    f.precision(std::numeric_limits<double>::max_digits10);
    return f;
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << text;
}

} // namespace detail

inline io::json to_json(const ExperimentResult &r) {
    io::json runs = io::json::array();
    for (const auto &run : r.runs) {
        runs.push_back({{"base_seed", run.base_seed},
                        {"repeat", run.repeat},
                        {"seed", run.seed},
                        {"energy", run.energy},
                        {"trace", io::to_json(run.trace)}});
    }
    return {{"config", to_json(r.config)},
            {"E0", r.e0},
            {"direct_shots_per_evaluation", r.config.direct_shots_per_evaluation()},
            {"report", to_json(r.report)},
            {"runs", runs}};
}

/// Writes <name>.json plus the energy/one-norm/weight/orbital CSV tables; returns the written paths.
inline std::vector<std::filesystem::path> write_artifacts(const ExperimentResult &r, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const std::string base = r.config.name;
    std::vector<std::filesystem::path> paths;

    paths.push_back(dir / (base + ".json"));
    detail::write_text(paths.back(), to_json(r).dump(2) + "\n");

    paths.push_back(dir / (base + "_energy_vs_step.csv"));
    {
        auto f = detail::open_csv(paths.back(), "energy_vs_step",
                                  "run,seed,step,energy,relative_error,correlation_entropy,E0");
        for (std::size_t i = 0; i < r.runs.size(); ++i)
            for (const auto &st : r.runs[i].trace.steps)
                f << i << ',' << r.runs[i].seed << ',' << st.step << ',' << st.energy << ','
                  << std::abs((st.energy - r.e0) / r.e0) << ',' << st.correlation_entropy << ',' << r.e0 << '\n';
    }

    paths.push_back(dir / (base + "_one_norm_vs_step.csv"));
    {
        auto f = detail::open_csv(paths.back(), "one_norm_vs_step", "run,seed,step,one_norm,term_count");
        for (std::size_t i = 0; i < r.runs.size(); ++i)
            for (const auto &st : r.runs[i].trace.steps)
                f << i << ',' << r.runs[i].seed << ',' << st.step << ',' << st.one_norm << ',' << st.term_count << '\n';
    }

    paths.push_back(dir / (base + "_weights.csv"));
    {
        auto f = detail::open_csv(paths.back(), "weight_distribution", "run,step,rank,weight");
        for (std::size_t i = 0; i < r.runs.size(); ++i)
            for (const auto &st : r.runs[i].trace.steps)
                for (std::size_t k = 0; k < st.weights.size(); ++k)
                    f << i << ',' << st.step << ',' << k << ',' << st.weights[k] << '\n';
    }

    paths.push_back(dir / (base + "_orbitals.csv"));
    {
        auto f = detail::open_csv(paths.back(), "orbitals", "run,step,orbital,site,spin,re,im,abs2");
        for (std::size_t i = 0; i < r.runs.size(); ++i)
            for (const auto &st : r.runs[i].trace.steps) {
                const CMatrix &v = st.cumulative_rotation.v;
                for (Eigen::Index col = 0; col < v.cols(); ++col)
                    for (Eigen::Index p = 0; p < v.rows(); ++p)
                        f << i << ',' << st.step << ',' << col << ',' << p / 2 << ',' << (p % 2 ? "down" : "up") << ','
                          << v(p, col).real() << ',' << v(p, col).imag() << ',' << std::norm(v(p, col)) << '\n';
            }
    }

    paths.push_back(dir / (base + "_metrics.csv"));
    {
        auto f = detail::open_csv(paths.back(), "metrics", "name,method,r,E0,mean_energy,err,var,merit,runs");
        f << base << ',' << to_string(r.config.method) << ',' << r.config.noise_ratio << ',' << r.e0 << ','
          << r.report.mean_energy << ',' << r.report.err << ',' << r.report.var << ',' << r.report.merit << ','
          << r.runs.size() << '\n';
    }
    return paths;
}

// ---------------------------------------------------------------------------
// Noise-ratio trade-off

struct TradeoffRow {
    double r = 0.0;
    MetricsReport a;
    MetricsReport b;
};

struct TradeoffTable {
    std::string name_a, name_b;
    double e0 = 0.0;
    std::vector<TradeoffRow> rows;
};

inline bool same_model(const HubbardSpec &a, const HubbardSpec &b) {
    return a.n_sites == b.n_sites && a.t == b.t && a.u == b.u &&
           a.chemical_potential() == b.chemical_potential() && a.geometry == b.geometry;
}

/// Merit of both configs at every noise ratio of cfg_a's grid (r = 0 means noiseless).
inline TradeoffTable compare_tradeoff(const ExperimentConfig &cfg_a, const ExperimentConfig &cfg_b,
                                      std::uint64_t seed_offset = 0) {
    if (!same_model(cfg_a.model, cfg_b.model)) throw ConfigError("compare: the two configs use different models");
    TradeoffTable t;
    t.name_a = cfg_a.name;
    t.name_b = cfg_b.name;
    for (double r : cfg_a.ratio_grid) {
        ExperimentConfig a = cfg_a, b = cfg_b;
        a.noise_enabled = b.noise_enabled = r > 0.0;
        a.noise_ratio = b.noise_ratio = r;
        TradeoffRow row;
        row.r = r;
        const ExperimentResult ra = run_experiment(a, seed_offset);
        const ExperimentResult rb = run_experiment(b, seed_offset);
        row.a = ra.report;
        row.b = rb.report;
        t.e0 = ra.e0;
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline io::json to_json(const TradeoffTable &t) {
    io::json rows = io::json::array();
    for (const auto &r : t.rows) rows.push_back({{"r", r.r}, {t.name_a, to_json(r.a)}, {t.name_b, to_json(r.b)}});
    return {{"a", t.name_a}, {"b", t.name_b}, {"E0", t.e0}, {"rows", rows}};
}

inline std::vector<std::filesystem::path> write_tradeoff(const TradeoffTable &t, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const std::string base = t.name_a + "_vs_" + t.name_b;
    std::vector<std::filesystem::path> paths{dir / (base + "_tradeoff.csv"), dir / (base + "_tradeoff.json")};
    {
        auto f = detail::open_csv(paths[0], "merit_vs_r", "r,config,err,var,merit,mean_energy,E0");
        for (const auto &row : t.rows) {
            f << row.r << ',' << t.name_a << ',' << row.a.err << ',' << row.a.var << ',' << row.a.merit << ','
              << row.a.mean_energy << ',' << t.e0 << '\n';
            f << row.r << ',' << t.name_b << ',' << row.b.err << ',' << row.b.var << ',' << row.b.merit << ','
              << row.b.mean_energy << ',' << t.e0 << '\n';
        }
    }
    detail::write_text(paths[1], to_json(t).dump(2) + "\n");
    return paths;
}

} // namespace noavqe
