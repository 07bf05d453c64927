#pragma once

#include "anomalylab/model.hpp"
#include "anomalylab/modeoracle.hpp"
#include "anomalylab/noether.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace anomalylab {

inline constexpr const char* kToolVersion = "0.3.0";

using Json = nlohmann::ordered_json;

/// "classically anomalous" or "not anomalous".
const char* classification(const FamilyReport& family);

/// Charge-level value of a constant central density: 2 pi R times it.
std::string charge_level(const JetExpr& density, const std::string& radius);

Json conventions_json();
std::string conventions_text();

Json to_json(const DistExpr& d);
Json to_json(const BracketClosure& c, const std::string& radius);
Json to_json(const FamilyReport& f, const std::string& radius);
Json to_json(const OracleReport& r, double tol);
Json to_json(const std::vector<Violation>& violations);

/// Full report document: tool version, model, parameters, conventions,
/// families, cross brackets, oracle summaries.
Json report_json(const Model& model, const AnomalyReport& report, const std::vector<OracleReport>& oracle,
                 double tol);
std::string report_text(const Model& model, const AnomalyReport& report, const std::vector<OracleReport>& oracle,
                        double tol);

std::string oracle_text(const OracleReport& r, double tol);
std::string closure_text(const BracketClosure& c, const std::string& radius);

}  // namespace anomalylab
