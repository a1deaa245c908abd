// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <noavqe/noavqe.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace noavqe;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    double budget_s = 0.0; // wall-clock limit, 0 for none
};

FermionTensors hubbard(int n, double u) {
    HubbardSpec s;
    s.n_sites = n;
    s.u = u;
    if (n == 4) s.geometry = Geometry::SquarePlaquette;
    return build_hubbard(s);
}

std::string fmt(const char *f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

CMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cplx(n(rng), n(rng));
    return a;
}

QuantumState random_pure(int m, std::mt19937_64 &rng) {
    CVector v = gaussian(Eigen::Index{1} << m, 1, rng).col(0);
    return QuantumState::from_amplitudes(v / v.norm());
}

QuantumState random_mixed(int m, std::mt19937_64 &rng) {
    const Eigen::Index dim = Eigen::Index{1} << m;
    const CMatrix a = gaussian(dim, dim, rng);
    CMatrix rho = a * a.adjoint();
    return QuantumState::from_density(rho / rho.trace().real());
}

double ed_energy(const FermionTensors &h) { return oracle::ground_energy(h); }

Outcome c1() {
    const double e = ed_energy(hubbard(2, 1.0));
    const double want = (1.0 - std::sqrt(17.0)) / 2.0 - 1.0;
    return {std::abs(e - want) <= 1e-9, "E0 = " + fmt("%.12f", e) + ", closed form " + fmt("%.12f", want), 1.0};
}

Outcome c2() {
    const PauliSum h = jordan_wigner(hubbard(2, 1.0));
    std::ifstream in(std::string(NOAVQE_FIXTURE_DIR) + "/golden.json");
    const io::json g = io::json::parse(in).at("jordan_wigner_dimer_u1");
    std::vector<std::pair<double, std::string>> got, want;
    for (const auto &t : h.terms) got.emplace_back(t.coeff, t.string.str());
    for (const auto &t : g["terms"]) want.emplace_back(t[0].get<double>(), t[1].get<std::string>());
    std::sort(got.begin(), got.end(), [](auto &a, auto &b) { return a.second < b.second; });
    std::sort(want.begin(), want.end(), [](auto &a, auto &b) { return a.second < b.second; });
    std::multiset<double> mags;
    for (const auto &t : h.terms) mags.insert(std::abs(t.coeff));
    const std::multiset<double> expected{0.25, 0.25, 0.5, 0.5, 0.5, 0.5};
    const bool ok = h.size() == 6 && mags == expected && one_norm(h) == 2.5 && got == want;
    return {ok, std::to_string(h.size()) + " terms, one-norm " + fmt("%.6g", one_norm(h)) +
                    (got == want ? ", strings match fixture" : ", strings differ from fixture"),
            0.0};
}

Outcome c3() {
    double worst = 0.0;
    for (int n : {2, 4})
        for (double u : {0.0, 1.0}) {
            const FermionTensors h = hubbard(n, u);
            worst = std::max(worst, (oracle::assemble_fermionic(h) - oracle::assemble_pauli(jordan_wigner(h)))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
    return {worst <= 1e-10, "max entrywise difference " + fmt("%.3e", worst), 5.0};
}

Outcome c4() {
    const NoizationTrace t =
        noization_loop(hubbard(2, 0.0), build_product(4), 3, ShotBudget::exact(1000, 10), NoiseModel::none(), 7);
    const double e = t.final_energy();
    return {std::abs(e + 2.0) <= 1e-4, "final energy " + fmt("%.8f", e) + " after " +
                                           std::to_string(t.steps.size()) + " steps (target -2)",
            120.0};
}

Outcome c5() {
    const FermionTensors h = hubbard(2, 1.0);
    const NoizationTrace t = noization_loop(h, build_fsim(4), 4, ShotBudget::exact(1000, 10), NoiseModel::none(), 7);
    const double e = t.final_energy(), e0 = ed_energy(h);
    return {e <= -2.49 && e >= e0 - 1e-9, "final energy " + fmt("%.8f", e) + ", E0 " + fmt("%.8f", e0), 120.0};
}

Outcome c6() {
    bool ok = true;
    std::ostringstream d;
    for (int n : {2, 4})
        for (double u : {0.0, 1.0})
            for (const char *name : {"product", "fsim"}) {
                NoizationOptions opt;
                opt.early_stop = 0.0;
                const NoizationTrace t = noization_loop(hubbard(n, u), build_ansatz(name, 2 * n), 4,
                                                        ShotBudget::exact(1000, 10), NoiseModel::none(), 7, opt);
                double worst = -1e300;
                for (std::size_t k = 1; k < t.steps.size(); ++k)
                    worst = std::max(worst, t.steps[k].energy - t.steps[k - 1].energy);
                if (worst > 1e-6) ok = false;
                d << (n == 2 ? "dimer" : "plaquette") << " U=" << u << ' ' << name << " max rise "
                  << fmt("%.2e", worst) << "; ";
            }
    return {ok, d.str(), 900.0};
}

Outcome c7() {
    std::mt19937_64 rng(2024);
    double worst = 1e300;
    auto check = [&](const QuantumState &s) {
        const CMatrix d = oracle::exact_1rdm(s);
        const Eigen::SelfAdjointEigenSolver<CMatrix> es(d);
        const CMatrix noons = es.eigenvalues().cast<cplx>().asDiagonal();
        worst = std::min(worst, correlation_entropy(d) - correlation_entropy(noons));
    };
    for (int i = 0; i < 200; ++i) check(random_pure(4, rng));
    for (int i = 0; i < 50; ++i) check(random_mixed(4, rng));
    return {worst >= -1e-10, "min S_corr(D) - S_corr(NOONs) = " + fmt("%.3e", worst), 30.0};
}

Outcome c8() {
    const FermionTensors h = hubbard(2, 1.0);
    const auto gs = oracle::exact_ground_state(oracle::assemble_fermionic(h), 2);
    const NaturalOrbitals no = natural_orbital_transform({oracle::exact_1rdm(gs.state)});
    const double s = 1.0 / std::sqrt(2.0);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < 4; ++j) {
        const int spin = std::abs(no.rotation.v(spin_orbital(0, 0), j)) > 0.5 ? 0 : 1;
        const cplx a = no.rotation.v(spin_orbital(0, spin), j), b = no.rotation.v(spin_orbital(1, spin), j);
        // strip the column phase, then compare with (1, +-1)/sqrt(2)
        const cplx ph = std::abs(a) > 0 ? std::conj(a) / std::abs(a) : cplx(1.0);
        const double sign = (b * ph).real() >= 0 ? 1.0 : -1.0;
        worst = std::max({worst, std::abs(a * ph - s), std::abs(b * ph - sign * s),
                          std::abs(no.rotation.v(spin_orbital(0, 1 - spin), j)),
                          std::abs(no.rotation.v(spin_orbital(1, 1 - spin), j))});
    }
    return {worst <= 1e-8, "max deviation from (1,+-1)/sqrt2 " + fmt("%.3e", worst), 1.0};
}

Outcome c9() {
    std::mt19937_64 rng(99);
    const PauliSum h = jordan_wigner(hubbard(2, 1.0));
    const OperatorPool pool = build_pool(4);
    const double step = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const QuantumState s = random_pure(4, rng);
        const auto g = pool_gradients(s, h, pool);
        for (std::size_t k = 0; k < pool.size(); ++k) {
            QuantumState up = s, down = s;
            apply_gate(up, pauli_rotation(pool.generators[k], step), NoiseModel::none());
            apply_gate(down, pauli_rotation(pool.generators[k], -step), NoiseModel::none());
            const double fd = (expectation(up, h) - expectation(down, h)) / (2 * step);
            worst = std::max(worst, std::abs(g[k] - std::abs(fd)));
        }
    }
    return {worst <= 1e-6, "max |gradient - FD| over " + std::to_string(pool.size()) + " generators " +
                               fmt("%.3e", worst),
            60.0};
}

Outcome c10() {
    double errs[2];
    for (int u = 0; u < 2; ++u) {
        const ExperimentConfig cfg = load_config(std::string(NOAVQE_EXPERIMENT_DIR) + "/adaptive_plaquette_u" +
                                                 std::to_string(u) + "_noa_vqe.json");
        errs[u] = run_experiment(cfg).report.err;
    }
    return {errs[0] <= 1e-2 && errs[1] <= 2e-2,
            "relative error U=0 " + fmt("%.3e", errs[0]) + ", U=1 " + fmt("%.3e", errs[1]), 1800.0};
}

Outcome c11() {
    const FermionTensors f = hubbard(2, 1.0);
    const PauliSum h = jordan_wigner(f);
    const QuantumState gs =
        QuantumState::from_amplitudes(oracle::exact_ground_state(oracle::assemble_fermionic(f), 2).state);
    const auto alloc = allocate_shots(h, 10'000);
    std::vector<double> xs;
    for (std::uint64_t seed = 0; seed < 100; ++seed) xs.push_back(sampled_expectation(gs, h, alloc, seed));
    double mean = 0.0;
    for (double x : xs) mean += x / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean) / (xs.size() - 1);
    const double bound = 1.2 * one_norm(h) / 100.0;
    return {std::sqrt(var) <= bound, "std " + fmt("%.5f", std::sqrt(var)) + " vs bound " + fmt("%.3f", bound), 60.0};
}

Outcome c12() {
    const FermionTensors h = hubbard(2, 1.0);
    const double before = one_norm(jordan_wigner(h));
    const NoizationTrace t = noization_loop(h, build_fsim(4), 3, ShotBudget::exact(1000, 10), NoiseModel::none(), 7);
    const double after = one_norm(jordan_wigner(t.final_tensors));
    return {after <= 2.5 * before, "one-norm " + fmt("%.4f", before) + " -> " + fmt("%.4f", after) + " (ratio " +
                                       fmt("%.3f", after / before) + ")",
            0.0};
}

Outcome c13() {
    const NoiseModel n = rb_to_depolarizing(0.0016, 0.006);
    const bool ok = std::abs(n.p1 - 0.0024) <= 1e-15 && std::abs(n.p2 - 0.0037571) <= 1e-7;
    return {ok, "p1 " + fmt("%.10f", n.p1) + ", p2 " + fmt("%.10f", n.p2), 0.0};
}

Outcome c14() {
    const std::string dir = NOAVQE_EXPERIMENT_DIR;
    const ExperimentConfig a = load_config(dir + "/tradeoff_dimer_u1_noization_fsim_5e7.json");
    const ExperimentConfig b = load_config(dir + "/tradeoff_dimer_u1_direct_ldca_5e7.json");
    const TradeoffTable t = compare_tradeoff(a, b);
    bool ok = true;
    std::ostringstream d;
    for (const auto &row : t.rows) {
        const bool row_ok = row.a.merit <= row.b.merit;
        ok = ok && row_ok;
        d << "r=" << row.r << " noization " << fmt("%.4e", row.a.merit) << " ldca " << fmt("%.4e", row.b.merit)
          << (row_ok ? "" : " (violated)") << "; ";
    }
    const double lo = t.rows.front().b.merit, hi = t.rows.back().b.merit;
    const bool growth = hi >= 2.0 * lo;
    d << "ldca merit ratio r=" << t.rows.back().r << "/r=" << t.rows.front().r << " = " << fmt("%.3f", hi / lo);
    return {ok && growth, d.str(), 7200.0};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"oracle ground truth", c1},
    {"Jordan-Wigner golden terms", c2},
    {"dual operator assembly", c3},
    {"product ansatz NOization, free dimer", c4},
    {"fSim ceiling, interacting dimer", c5},
    {"monotone NOization energies", c6},
    {"correlation entropy minimized by NOs", c7},
    {"dimer natural orbitals", c8},
    {"pool gradient vs finite differences", c9},
    {"NOA-VQE plaquette accuracy", c10},
    {"shot-noise bound", c11},
    {"one-norm growth", c12},
    {"RB to depolarizing conversion", c13},
    {"noise-ratio trade-off trend", c14},
};

} // namespace

int main(int argc, char **argv) {
    std::set<int> skip, only;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const int n = std::stoi(argv[i + 1]);
        if (flag == "--skip") skip.insert(n);
        else if (flag == "--only") only.insert(n);
        else {
            std::fprintf(stderr, "usage: acceptance [--skip N]... [--only N]...\n");
            return 2;
        }
    }
    int failures = 0;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (skip.count(id) || (!only.empty() && !only.count(id))) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = kCriteria[i].second();
        } catch (const std::exception &e) {
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && o.budget_s > 0.0 && secs > o.budget_s) {
            o.pass = false;
            o.detail += "; over time limit of " + fmt("%.0f", o.budget_s) + " s";
        }
        if (!o.pass) ++failures;
        std::printf("[%s] criterion %d: %s | %s | %.2f s\n", o.pass ? "PASS" : "FAIL", id,
                    kCriteria[i].first.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
