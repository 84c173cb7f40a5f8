#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "kmslab/linalg.hpp"

namespace kmslab {

// Deterministic JSON writer: object keys in sorted order, floating-point
// values with 17 significant digits, so identical inputs produce
// byte-identical reports.
void write_json(std::ostream& os, const nlohmann::json& j, int indent = 0);

std::string json_to_string(const nlohmann::json& j);

nlohmann::json real_matrix_to_json(const RealMatrix& m);
nlohmann::json real_vector_to_json(const RealVector& v);

// One verification entry: the mathematical claim checked, the measured
// residual, and the gate it must pass.
nlohmann::json check_entry(const std::string& name, const std::string& claim,
                           double residual, double tol);

}  // namespace kmslab
