#include "krein/report.hpp"

namespace krein {

using nlohmann::json;

json cv_to_json(const CharacteristicValue& cv) {
    json k = json::array();
    for (const auto& [p, m] : cv.Kcounts) k.push_back({p, m});
    return {{"lambda0", cv.lambda0},
            {"geo_mult", cv.geo_mult},
            {"alg_mult", cv.alg_mult},
            {"branch_ids", cv.branch_ids},
            {"Kcounts", k},
            {"kappa", {cv.kappa_plus, cv.kappa_minus}},
            {"Z", {cv.Zdown_left, cv.Zdown_right, cv.Zup_left, cv.Zup_right}}};
}

json quadratic_to_json(const QuadraticCounts& q) {
    json j = {{"n_r", q.n_r},
              {"n_i", q.n_i},
              {"n_c", q.n_c},
              {"z", q.z},
              {"n_M", q.n_M},
              {"n_r_plus", q.n_r_plus},
              {"n_r_minus", q.n_r_minus},
              {"n_r_plus_left", q.n_r_plus_left},
              {"nsum_residual", q.residual_nsum},
              {"LM5_residual", q.residual_LM5},
              {"symmetric", q.symmetric},
              {"notes", q.notes}};
    j["LM2_residual"] = q.residual_LM2 ? json(*q.residual_LM2) : json(nullptr);
    j["LM3_residual"] = q.residual_LM3 ? json(*q.residual_LM3) : json(nullptr);
    return j;
}

json report_to_json(const IndexReport& r) {
    json j;
    j["pencil"] = r.pencil ? problem_to_json(*r.pencil) : json(nullptr);
    j["K"] = r.K;
    j["Z_inf"] = {r.Z_minus_inf, r.Z_plus_inf};
    j["Z_inf_table"] = r.Z_inf_table ? json{r.Z_inf_table->first, r.Z_inf_table->second} : json(nullptr);
    j["n_L0"] = r.n_L0;
    j["Z0"] = {r.Z0_minus, r.Z0_plus};
    json cvs = json::array();
    for (const auto& cv : r.cvs) cvs.push_back(cv_to_json(cv));
    j["cvs"] = cvs;
    j["sums"] = {{"sign_kappa", r.sum_sign_kappa}, {"kappa", r.sum_kappa}};
    j["eq1_residual"] = r.residual_eq1;
    j["eq2_residual"] = r.residual_eq2;
    j["kernel_residuals"] = r.kernel_residuals;
    json lc = json::array();
    for (const auto& c : r.local_checks) lc.push_back({{"lambda1", c.lambda1}, {"lambda2", c.lambda2}, {"residual", c.residual}});
    j["local_checks"] = lc;
    j["quadratic"] = r.quadratic ? quadratic_to_json(*r.quadratic) : json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

json verify_summary(const IndexReport& r) {
    json lc = json::array();
    for (const auto& c : r.local_checks) lc.push_back(c.residual);
    json j = {{"eq1_residual", r.residual_eq1},
              {"eq2_residual", r.residual_eq2},
              {"kernel_residuals", r.kernel_residuals},
              {"local_residuals", lc}};
    if (r.quadratic) {
        j["nsum_residual"] = r.quadratic->residual_nsum;
        j["LM5_residual"] = r.quadratic->residual_LM5;
        if (r.quadratic->residual_LM2) j["LM2_residual"] = *r.quadratic->residual_LM2;
        if (r.quadratic->residual_LM3) j["LM3_residual"] = *r.quadratic->residual_LM3;
    }
    j["ok"] = all_residuals_zero(r);
    return j;
}

bool all_residuals_zero(const IndexReport& r) {
    if (r.residual_eq1 != 0 || r.residual_eq2 != 0) return false;
    for (int k : r.kernel_residuals)
        if (k != 0) return false;
    for (const auto& c : r.local_checks)
        if (c.residual != 0) return false;
    if (r.quadratic) {
        const auto& q = *r.quadratic;
        if (q.residual_nsum != 0 || q.residual_LM5 != 0) return false;
        if (q.residual_LM2 && *q.residual_LM2 != 0) return false;
        if (q.residual_LM3 && *q.residual_LM3 != 0) return false;
    }
    return true;
}

HamiltonianReport analyze_hamiltonian(const HamiltonianProblem& problem) {
    HamiltonianReport h;
    h.spectrum = jl_spectrum(problem);
    h.theorem1 = theorem1_check(problem);
    if (problem.blocks()) {
        try {
            h.theorem2 = theorem2_bound(problem);
        } catch (const UnsupportedError& e) {
            h.theorem2_skipped = e.what();
        }
    } else {
        h.theorem2_skipped = "no canonical blocks";
    }
    return h;
}

json hamiltonian_to_json(const HamiltonianProblem& problem, const HamiltonianReport& h) {
    json eig = json::array();
    for (const auto& r : h.spectrum.eigenvalues)
        eig.push_back({{"re", r.value.real()}, {"im", r.value.imag()}, {"mult", r.multiplicity}});
    json im = json::array();
    for (const auto& v : h.spectrum.imaginary) {
        json e = {{"lambda", v.lambda},
                  {"geo_mult", v.geo_mult},
                  {"alg_mult", v.alg_mult},
                  {"kappa", {v.kappa_plus, v.kappa_minus}}};
        e["kappa_K"] = v.kappa_K ? json(*v.kappa_K) : json(nullptr);
        im.push_back(e);
    }
    json spec = {{"eigenvalues", eig},
                 {"k_r", h.spectrum.k_r},
                 {"k_c", h.spectrum.k_c},
                 {"n_uns", h.spectrum.n_uns},
                 {"k_i_minus", h.spectrum.k_i_minus},
                 {"zero_mult", h.spectrum.zero_mult},
                 {"imaginary", im},
                 {"reflection_ok", h.spectrum.reflection_ok},
                 {"full_symmetry", h.spectrum.full_symmetry},
                 {"warnings", h.spectrum.warnings}};
    json t1 = {{"applicable", h.theorem1.applicable}, {"reason", h.theorem1.reason}};
    if (h.theorem1.applicable) {
        t1["k_r"] = h.theorem1.k_r;
        t1["k_c"] = h.theorem1.k_c;
        t1["n_L"] = h.theorem1.n_L;
        t1["n_D"] = h.theorem1.n_D;
        t1["k_i_minus"] = h.theorem1.k_i_minus;
        t1["residual"] = h.theorem1.residual;
    }
    json t2 = nullptr;
    if (h.theorem2)
        t2 = {{"lower_bound", h.theorem2->lower_bound},
              {"k_r", h.theorem2->k_r},
              {"n_uns", h.theorem2->n_uns},
              {"holds", h.theorem2->holds}};
    else if (h.theorem2_skipped)
        t2 = {{"skipped", *h.theorem2_skipped}};
    return {{"problem", problem_to_json(problem)},
            {"K_condition", problem.condition_J()},
            {"hamiltonian", {{"spectrum", spec}, {"theorem1", t1}, {"theorem2", t2}}}};
}

std::string dump_json(const json& doc, int indent) { return doc.dump(indent < 0 ? -1 : indent) + "\n"; }

}  // namespace krein
