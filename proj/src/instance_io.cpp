#include "kmslab/instance_io.hpp"

#include <fstream>

namespace kmslab {

using nlohmann::json;

nlohmann::json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw InstanceError(where + ": expected a non-empty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            throw InstanceError(where + ": ragged rows");
        for (int c = 0; c < cols; ++c) {
            const auto& cell = j[i][c];
            if (cell.is_number()) {
                m(i, c) = cdouble(cell.get<double>(), 0.0);
            } else if (cell.is_array() && cell.size() == 2) {
                m(i, c) = cdouble(cell[0].get<double>(), cell[1].get<double>());
            } else {
                throw InstanceError(where + ": entries must be numbers or [re, im]");
            }
        }
    }
    return m;
}

namespace {

std::pair<int, int> parse_slot_key(const std::string& key) {
    // "(w,v)"
    if (key.size() < 5 || key.front() != '(' || key.back() != ')')
        throw InstanceError("generator.slots: bad key '" + key + "' (expected \"(w,v)\")");
    const auto comma = key.find(',');
    if (comma == std::string::npos)
        throw InstanceError("generator.slots: bad key '" + key + "'");
    try {
        const int w = std::stoi(key.substr(1, comma - 1));
        const int v = std::stoi(key.substr(comma + 1, key.size() - comma - 2));
        return {w, v};
    } catch (const std::exception&) {
        throw InstanceError("generator.slots: bad key '" + key + "'");
    }
}

}  // namespace

InstanceDoc parse_instance(const json& j) {
    if (!j.is_object()) throw InstanceError("instance: top level must be an object");
    if (!j.contains("format") || j["format"] != "kms-lab/1")
        throw InstanceError("format: missing or unsupported (expected \"kms-lab/1\")");

    if (!j.contains("algebra") || !j["algebra"].contains("block_dims"))
        throw InstanceError("algebra.block_dims: missing");
    std::vector<int> dims;
    for (const auto& d : j["algebra"]["block_dims"]) {
        if (!d.is_number_integer() || d.get<int>() < 1)
            throw InstanceError("algebra.block_dims: entries must be integers >= 1");
        dims.push_back(d.get<int>());
    }
    BlockAlgebra algebra;
    try {
        algebra = BlockAlgebra(dims);
    } catch (const std::exception& e) {
        throw InstanceError(std::string("algebra.block_dims: ") + e.what());
    }
    const int nv = algebra.num_blocks();

    if (!j.contains("module") || !j["module"].contains("mult"))
        throw InstanceError("module.mult: missing");
    const auto& jm = j["module"]["mult"];
    if (static_cast<int>(jm.size()) != nv)
        throw InstanceError("module.mult: expected " + std::to_string(nv) + " rows");
    Eigen::MatrixXi mult(nv, nv);
    for (int w = 0; w < nv; ++w) {
        if (static_cast<int>(jm[w].size()) != nv)
            throw InstanceError("module.mult: row " + std::to_string(w) + " has wrong length");
        for (int v = 0; v < nv; ++v) {
            if (!jm[w][v].is_number_integer() || jm[w][v].get<int>() < 0)
                throw InstanceError("module.mult: entries must be integers >= 0");
            mult(w, v) = jm[w][v].get<int>();
        }
    }

    InstanceDoc doc;
    try {
        doc.inst.x = Correspondence(algebra, mult);
    } catch (const std::exception& e) {
        throw InstanceError(std::string("module.mult: ") + e.what());
    }

    doc.inst.d = Generator::zero(doc.inst.x);
    if (j.contains("generator")) {
        if (!j["generator"].contains("slots"))
            throw InstanceError("generator.slots: missing");
        for (const auto& [key, val] : j["generator"]["slots"].items()) {
            const auto [w, v] = parse_slot_key(key);
            if (w < 0 || w >= nv || v < 0 || v >= nv)
                throw InstanceError("generator.slots: key " + key + " out of range");
            if (doc.inst.x.mult(w, v) == 0)
                throw InstanceError("generator.slots: slot " + key +
                                    " has zero multiplicity");
            Matrix m = matrix_from_json(val, "generator.slots" + key);
            if (m.rows() != doc.inst.x.mult(w, v) || m.cols() != doc.inst.x.mult(w, v))
                throw InstanceError("generator.slots" + key + ": expected size " +
                                    std::to_string(doc.inst.x.mult(w, v)));
            if (!is_hermitian(m))
                throw InstanceError("generator.slots" + key + ": not Hermitian");
            doc.inst.d.slot(w, v) = std::move(m);
        }
    }
    try {
        doc.inst.d.validate(doc.inst.x);
    } catch (const std::exception& e) {
        throw InstanceError(std::string("generator: ") + e.what());
    }

    if (j.contains("coeff_dynamics")) {
        if (!j["coeff_dynamics"].contains("H"))
            throw InstanceError("coeff_dynamics.H: missing");
        const auto& jh = j["coeff_dynamics"]["H"];
        if (static_cast<int>(jh.size()) != nv)
            throw InstanceError("coeff_dynamics.H: expected one matrix per block");
        CoeffDynamics h;
        for (int v = 0; v < nv; ++v) {
            Matrix m = matrix_from_json(jh[v], "coeff_dynamics.H[" + std::to_string(v) + "]");
            if (m.rows() != algebra.dim(v) || m.cols() != algebra.dim(v))
                throw InstanceError("coeff_dynamics.H[" + std::to_string(v) +
                                    "]: wrong size");
            if (!is_hermitian(m))
                throw InstanceError("coeff_dynamics.H[" + std::to_string(v) +
                                    "]: not Hermitian");
            h.h.push_back(std::move(m));
        }
        doc.inst.h = std::move(h);
    }

    if (j.contains("beta")) {
        if (!j["beta"].is_number()) throw InstanceError("beta: must be a number");
        doc.beta = j["beta"].get<double>();
    }
    if (j.contains("trace")) {
        if (!j["trace"].contains("t")) throw InstanceError("trace.t: missing");
        const auto& jt = j["trace"]["t"];
        if (static_cast<int>(jt.size()) != nv)
            throw InstanceError("trace.t: expected one entry per block");
        RealVector t(nv);
        for (int v = 0; v < nv; ++v) {
            if (!jt[v].is_number() || jt[v].get<double>() < 0.0)
                throw InstanceError("trace.t: entries must be numbers >= 0");
            t[v] = jt[v].get<double>();
        }
        doc.trace = TraceVector(t);
    }
    return doc;
}

InstanceDoc load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open instance file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InstanceError(path + ": " + e.what());
    }
    return parse_instance(j);
}

json serialize_instance(const InstanceDoc& doc) {
    json j;
    j["format"] = "kms-lab/1";
    j["algebra"]["block_dims"] = doc.inst.x.algebra.block_dims;
    json mult = json::array();
    const int nv = doc.inst.x.num_blocks();
    for (int w = 0; w < nv; ++w) {
        json row = json::array();
        for (int v = 0; v < nv; ++v) row.push_back(doc.inst.x.mult(w, v));
        mult.push_back(std::move(row));
    }
    j["module"]["mult"] = std::move(mult);
    json slots = json::object();
    for (int w = 0; w < nv; ++w)
        for (int v = 0; v < nv; ++v)
            if (doc.inst.x.mult(w, v) > 0)
                slots["(" + std::to_string(w) + "," + std::to_string(v) + ")"] =
                    matrix_to_json(doc.inst.d.slot(w, v));
    j["generator"]["slots"] = std::move(slots);
    if (doc.inst.h) {
        json hh = json::array();
        for (const Matrix& m : doc.inst.h->h) hh.push_back(matrix_to_json(m));
        j["coeff_dynamics"]["H"] = std::move(hh);
    }
    if (doc.beta) j["beta"] = *doc.beta;
    if (doc.trace) {
        json t = json::array();
        for (int v = 0; v < doc.trace->num_blocks(); ++v) t.push_back(doc.trace->t[v]);
        j["trace"]["t"] = std::move(t);
    }
    return j;
}

namespace {

ModuleVector vector_from_json(const json& j, const Correspondence& x,
                              const std::string& where) {
    ModuleVector out = ModuleVector::zero(x);
    if (j.contains("basis")) {
        const auto& b = j["basis"];
        const int w = b.at("w").get<int>();
        const int row = b.at("row").get<int>();
        const int col = b.at("col").get<int>();
        if (w < 0 || w >= x.num_blocks() || row < 0 || row >= x.k(w) || col < 0 ||
            col >= x.dim(w))
            throw InstanceError(where + ".basis: index out of range");
        out.blocks[w](row, col) = 1.0;
        return out;
    }
    if (j.contains("blocks")) {
        for (const auto& [key, val] : j["blocks"].items()) {
            int w = -1;
            try {
                w = std::stoi(key);
            } catch (const std::exception&) {
                throw InstanceError(where + ".blocks: bad block key '" + key + "'");
            }
            if (w < 0 || w >= x.num_blocks())
                throw InstanceError(where + ".blocks: block out of range");
            Matrix m = matrix_from_json(val, where + ".blocks." + key);
            if (m.rows() != x.k(w) || m.cols() != x.dim(w))
                throw InstanceError(where + ".blocks." + key + ": expected " +
                                    std::to_string(x.k(w)) + "x" +
                                    std::to_string(x.dim(w)));
            out.blocks[w] = std::move(m);
        }
        return out;
    }
    throw InstanceError(where + ": expected \"basis\" or \"blocks\"");
}

}  // namespace

std::vector<MonomialWord> parse_words(const json& j, const Correspondence& x) {
    if (!j.is_array()) throw InstanceError("words: top level must be an array");
    std::vector<MonomialWord> out;
    int idx = 0;
    for (const auto& jw : j) {
        const std::string where = "words[" + std::to_string(idx++) + "]";
        MonomialWord w;
        if (jw.contains("left"))
            for (const auto& jv : jw["left"])
                w.left.push_back(vector_from_json(jv, x, where + ".left"));
        if (jw.contains("right"))
            for (const auto& jv : jw["right"])
                w.right.push_back(vector_from_json(jv, x, where + ".right"));
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<MonomialWord> load_words(const std::string& path, const Correspondence& x) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open word file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InstanceError(path + ": " + e.what());
    }
    return parse_words(j, x);
}

}  // namespace kmslab
