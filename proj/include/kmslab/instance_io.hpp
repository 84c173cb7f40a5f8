#pragma once

#include <string>

#include <json.hpp>

#include "kmslab/catalog.hpp"

namespace kmslab {

// Parse/validation failure with the offending key path in the message.
struct InstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// On-disk instance document, format tag "kms-lab/1".
struct InstanceDoc {
    Instance inst;
    std::optional<double> beta;
    std::optional<TraceVector> trace;
};

InstanceDoc parse_instance(const nlohmann::json& j);
InstanceDoc load_instance(const std::string& path);
nlohmann::json serialize_instance(const InstanceDoc& doc);

// Word files: JSON array of {"left": [...], "right": [...]}; each module
// vector is either {"basis": {"w":..,"row":..,"col":..}} or
// {"blocks": {"<w>": [[[re,im],...],...]}}.
std::vector<MonomialWord> parse_words(const nlohmann::json& j, const Correspondence& x);
std::vector<MonomialWord> load_words(const std::string& path, const Correspondence& x);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace kmslab
