#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"
#include "noavqe/noization.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/vqe.hpp"

namespace noavqe::io {

using json = nlohmann::ordered_json;

/// {"m": .., "offset": .., "terms": [[coeff, "XZYI"], ...]}, letter q acting on qubit q.
inline json to_json(const PauliSum &p) {
    json terms = json::array();
    for (const auto &t : p.terms) terms.push_back(json::array({t.coeff, t.string.str()}));
    return {{"m", p.m}, {"offset", p.offset}, {"one_norm", one_norm(p)}, {"terms", terms}};
}

inline PauliSum pauli_sum_from_json(const json &j) {
    PauliSum p;
    p.m = j.at("m").get<int>();
    p.offset = j.value("offset", 0.0);
    for (const auto &t : j.at("terms")) {
        PauliString s = PauliString::parse(t.at(1).get<std::string>());
        if (s.m != p.m) throw ConfigError("Pauli term '" + s.str() + "' does not match m");
        p.terms.push_back({t.at(0).get<double>(), s});
    }
    return p;
}

/// Complex matrix as {"re": [[...]], "im": [[...]]}.
inline json to_json(const CMatrix &a) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        json rr = json::array(), ii = json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            rr.push_back(a(r, c).real());
            ii.push_back(a(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    return {{"re", re}, {"im", im}};
}

inline json to_json(const HubbardSpec &s) {
    return {{"n_sites", s.n_sites},
            {"t", s.t},
            {"u", s.u},
            {"mu", s.chemical_potential()},
            {"geometry", to_string(s.geometry)}};
}

inline json to_json(const NoiseModel &n) { return {{"enabled", n.enabled}, {"p1", n.p1}, {"p2", n.p2}}; }

inline json to_json(const ShotBudget &b) {
    return {{"exact_mode", b.exact_mode},
            {"total", b.total},
            {"n_iter", b.n_iter},
            {"n_repeats", b.n_repeats},
            {"k_steps", b.k_steps},
            {"shots_per_evaluation", b.shots_per_evaluation()}};
}

inline json to_json(const VqeResult &r) {
    return {{"method", r.method},
            {"best_energy", r.best_energy},
            {"sampled", r.sampled},
            {"evaluations_used", r.evaluations_used},
            {"best_params", r.best_params},
            {"restart_energies", r.restart_energies},
            {"trace", r.trace}};
}

inline json to_json(const NoizationStep &s) {
    json j{{"step", s.step},
           {"energy", s.energy},
           {"one_norm", s.one_norm},
           {"term_count", s.term_count},
           {"weights", s.weights},
           {"noons", s.noons},
           {"orbital_slots", s.orbital_slots},
           {"correlation_entropy", s.correlation_entropy},
           {"rdm", to_json(s.rdm.d)},
           {"rotation", to_json(s.rotation.v)},
           {"cumulative_rotation", to_json(s.cumulative_rotation.v)},
           {"vqe", to_json(s.vqe)}};
    if (!s.operators.empty() || s.reference_energy != 0.0) {
        j["adapt"] = {{"reference_energy", s.reference_energy},
                      {"operators", s.operators},
                      {"max_gradients", s.max_gradients},
                      {"energies", s.adapt_energies}};
    }
    return j;
}

inline json to_json(const NoizationTrace &t) {
    json steps = json::array();
    for (const auto &s : t.steps) steps.push_back(to_json(s));
    return {{"method", t.method}, {"early_stopped", t.early_stopped}, {"final_energy", t.final_energy()},
            {"steps", steps}};
}

} // namespace noavqe::io
