#include "kmslab/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace kmslab {

using nlohmann::json;

namespace {

void write_number(std::ostream& os, double x) {
    if (std::isnan(x)) {
        os << "\"nan\"";
        return;
    }
    if (std::isinf(x)) {
        os << (x > 0 ? "\"infinity\"" : "\"-infinity\"");
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf;
}

void write_string(std::ostream& os, const std::string& s) {
    os << json(s).dump();  // reuse the library's escaping
}

}  // namespace

void write_json(std::ostream& os, const json& j, int indent) {
    const std::string pad(static_cast<size_t>(indent), ' ');
    const std::string pad2(static_cast<size_t>(indent + 2), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            // nlohmann objects iterate in sorted key order already; keep a
            // map to make the determinism explicit.
            std::map<std::string, const json*> sorted;
            for (auto it = j.begin(); it != j.end(); ++it) sorted[it.key()] = &it.value();
            os << "{\n";
            bool first = true;
            for (const auto& [key, val] : sorted) {
                if (!first) os << ",\n";
                first = false;
                os << pad2;
                write_string(os, key);
                os << ": ";
                write_json(os, *val, indent + 2);
            }
            os << "\n" << pad << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[";
            bool first = true;
            for (const auto& el : j) {
                if (!first) os << ", ";
                first = false;
                write_json(os, el, indent + 2);
            }
            os << "]";
            return;
        }
        case json::value_t::string:
            write_string(os, j.get<std::string>());
            return;
        case json::value_t::boolean:
            os << (j.get<bool>() ? "true" : "false");
            return;
        case json::value_t::number_integer:
            os << j.get<int64_t>();
            return;
        case json::value_t::number_unsigned:
            os << j.get<uint64_t>();
            return;
        case json::value_t::number_float:
            write_number(os, j.get<double>());
            return;
        default:
            os << "null";
            return;
    }
}

std::string json_to_string(const json& j) {
    std::ostringstream os;
    write_json(os, j);
    os << "\n";
    return os.str();
}

json real_matrix_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json real_vector_to_json(const RealVector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json check_entry(const std::string& name, const std::string& claim, double residual,
                 double tol) {
    json e;
    e["name"] = name;
    e["claim"] = claim;
    e["residual"] = residual;
    e["tol"] = tol;
    e["pass"] = residual <= tol;
    return e;
}

}  // namespace kmslab
