// Command-line runner for NOization / NOA-VQE experiments on Hubbard models.
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "noavqe/noavqe.hpp"

namespace fs = std::filesystem;
using namespace noavqe;

namespace {

constexpr const char *kOutputEnv = "NOAVQE_OUTPUT_DIR";

fs::path output_dir() {
    const char *env = std::getenv(kOutputEnv);
    return (env && *env) ? fs::path(env) : fs::path("results");
}

void print_report(const ExperimentResult &r) {
    std::cout << "experiment " << r.config.name << " (" << to_string(r.config.method) << ")\n"
              << "  E0 (exact)        " << r.e0 << "\n"
              << "  runs              " << r.runs.size() << "\n"
              << "  shots/evaluation  ";
    if (r.config.budget.exact_mode) std::cout << "exact\n";
    else {
        std::cout << r.config.effective_budget().shots_per_evaluation() << " (direct "
                  << r.config.direct_shots_per_evaluation() << ")\n";
    }
    std::cout << "  mean energy       " << r.report.mean_energy << "\n"
              << "  err               " << r.report.err << "\n"
              << "  var               " << r.report.var << "\n"
              << "  merit             " << r.report.merit << "\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        std::cout << "  run " << i << " seed " << r.runs[i].seed << ":";
        for (const auto &st : r.runs[i].trace.steps) std::cout << ' ' << st.energy;
        if (r.runs[i].trace.early_stopped) std::cout << " (early stop)";
        std::cout << '\n';
    }
}

int cmd_run(const std::string &path, std::uint64_t offset) {
    const ExperimentConfig cfg = load_config(path);
    const ExperimentResult r = run_experiment(cfg, offset);
    print_report(r);
    for (const auto &p : write_artifacts(r, output_dir())) std::cout << "  wrote " << p.string() << '\n';
    return 0;
}

int cmd_compare(const std::string &a, const std::string &b, std::uint64_t offset) {
    const ExperimentConfig ca = load_config(a), cb = load_config(b);
    const TradeoffTable t = compare_tradeoff(ca, cb, offset);
    std::cout << "E0 " << t.e0 << "\n"
              << std::setw(8) << "r" << std::setw(22) << ca.name << std::setw(22) << cb.name << '\n';
    for (const auto &row : t.rows)
        std::cout << std::setw(8) << row.r << std::setw(22) << row.a.merit << std::setw(22) << row.b.merit << '\n';
    for (const auto &p : write_tradeoff(t, output_dir())) std::cout << "wrote " << p.string() << '\n';
    return 0;
}

int cmd_oracle(const std::string &path) {
    const HubbardSpec spec = parse_model_document(read_json_file(path));
    const FermionTensors h = build_hubbard(spec);
    const CMatrix op = oracle::assemble_fermionic(h);
    const oracle::GroundState gs = oracle::exact_ground_state(op);
    const oracle::GroundState half = oracle::exact_ground_state(op, spec.n_sites);
    const NaturalOrbitals no = natural_orbital_transform(OneRdm{oracle::exact_1rdm(half.state)});
    io::json out{{"model", io::to_json(spec)},
                 {"ground_energy", gs.energy},
                 {"half_filling_energy", half.energy},
                 {"noons", no.noons},
                 {"natural_orbitals", io::to_json(no.rotation.v)}};
    std::cout << std::setprecision(12) << out.dump(2) << '\n';
    return 0;
}

int cmd_dump(const std::string &path, bool as_json) {
    const HubbardSpec spec = parse_model_document(read_json_file(path));
    const PauliSum p = jordan_wigner(build_hubbard(spec));
    if (as_json) {
        std::cout << io::to_json(p).dump(2) << '\n';
        return 0;
    }
    std::cout << "# m=" << p.m << " terms=" << p.size() << " one_norm=" << one_norm(p) << " offset=" << p.offset
              << '\n';
    std::cout << std::setprecision(12);
    for (const auto &t : p.terms) std::cout << std::setw(18) << t.coeff << "  " << t.string.str() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"NOization / NOA-VQE experiment runner (output directory from $" + std::string(kOutputEnv) +
                 ", default ./results)"};
    app.require_subcommand(1);
    std::uint64_t offset = 0;
    app.add_option("--seed-offset", offset, "Added to every configured seed (CI sharding)");

    std::string cfg, cfg_b;
    bool as_json = false;
    auto *run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("config", cfg, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto *cmp = app.add_subcommand("compare", "Merit vs noise ratio for two configs");
    cmp->add_option("config_a", cfg, "First config")->required()->check(CLI::ExistingFile);
    cmp->add_option("config_b", cfg_b, "Second config")->required()->check(CLI::ExistingFile);
    auto *orc = app.add_subcommand("oracle", "Exact ground energy and natural orbitals of a model");
    orc->add_option("model", cfg, "Model or experiment config")->required()->check(CLI::ExistingFile);
    auto *dump = app.add_subcommand("dump-hamiltonian", "Print the Jordan-Wigner Pauli terms of a model");
    dump->add_option("model", cfg, "Model or experiment config")->required()->check(CLI::ExistingFile);
    dump->add_flag("--json", as_json, "Emit JSON instead of a table");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(cfg, offset);
        if (*cmp) return cmd_compare(cfg, cfg_b, offset);
        if (*orc) return cmd_oracle(cfg);
        if (*dump) return cmd_dump(cfg, as_json);
    } catch (const ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
