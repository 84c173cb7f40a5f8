#pragma once

#include <ostream>

#include "kmslab/instance_io.hpp"
#include "kmslab/report.hpp"

namespace kmslab {

// Exit codes shared by the CLI: 0 success, 1 input error, 2 the answer is
// mathematically empty (no critical beta / no state), 3 a verification
// gate failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitEmpty = 2;
inline constexpr int kExitGate = 3;

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::string summary;  // human-readable, goes to stderr
};

struct SolveOptions {
    double beta = 0.0;
    SolveTarget target = SolveTarget::toeplitz;
    double tol = kDefaultTol;
};

struct VerifyOptions {
    std::optional<double> beta;  // default: critical beta
    uint64_t seed = 0;
    int max_degree = 3;
    int fock_level = 6;
    int dimension_cap = 10000;
    int pairs = 60;
    bool negative_control = false;
    double tol = kDefaultTol;
};

CommandResult run_critical_beta(const InstanceDoc& doc, double tol = 1e-8);
CommandResult run_solve(const InstanceDoc& doc, const SolveOptions& opt);
CommandResult run_evaluate(const InstanceDoc& doc, double beta,
                           const std::vector<MonomialWord>& words,
                           double tol = kDefaultTol);
CommandResult run_verify(const InstanceDoc& doc, const VerifyOptions& opt);

}  // namespace kmslab
