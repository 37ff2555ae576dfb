#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "krein/hamiltonian.hpp"
#include "krein/index_counts.hpp"

namespace krein {

nlohmann::json cv_to_json(const CharacteristicValue& cv);
nlohmann::json quadratic_to_json(const QuadraticCounts& q);
/// Full analysis report; the "pencil" member is a loadable problem document.
nlohmann::json report_to_json(const IndexReport& report);

/// Residual fields only, plus "ok".
nlohmann::json verify_summary(const IndexReport& report);
/// True when every residual in the report is zero.
bool all_residuals_zero(const IndexReport& report);

struct HamiltonianReport {
    JLSpectrum spectrum;
    Theorem1Result theorem1;
    std::optional<Theorem2Result> theorem2;
    std::optional<std::string> theorem2_skipped;
};

HamiltonianReport analyze_hamiltonian(const HamiltonianProblem& problem);
nlohmann::json hamiltonian_to_json(const HamiltonianProblem& problem, const HamiltonianReport& report);

/// Canonical text: sorted keys, compact when indent < 0, trailing newline.
std::string dump_json(const nlohmann::json& doc, int indent = -1);

}  // namespace krein
