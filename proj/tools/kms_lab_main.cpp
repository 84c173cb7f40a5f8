#include <iostream>

#include <CLI11.hpp>

#include "kmslab/commands.hpp"

namespace {

int emit(const kmslab::CommandResult& res) {
    kmslab::write_json(std::cout, res.report);
    std::cout << "\n";
    std::cerr << res.summary << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KMS equilibrium states of quasi-free dynamics on Toeplitz-Pimsner "
                 "algebras over finite-dimensional coefficient algebras"};
    app.require_subcommand(1);

    std::string instance_path;
    std::string words_path;
    double beta = 0.0;
    double tol = 1e-8;
    std::string target = "toeplitz";
    uint64_t seed = 0;
    int max_degree = 3;
    int fock_level = 6;
    int cap_dimension = 10000;
    bool negative_control = false;

    auto* cb = app.add_subcommand("critical-beta",
                                  "Critical inverse temperature of the transfer operator");
    cb->add_option("instance", instance_path, "instance file (kms-lab/1)")->required();
    cb->add_option("--tol", tol, "radius tolerance at the critical point");

    auto* sv = app.add_subcommand("solve", "Subinvariant or invariant state at a given beta");
    sv->add_option("instance", instance_path)->required();
    auto* sv_beta = sv->add_option("--beta", beta, "inverse temperature");
    sv->add_option("--target", target, "toeplitz (subinvariant) or pimsner (invariant)")
        ->check(CLI::IsMember({"toeplitz", "pimsner"}));
    sv->add_option("--tol", tol, "solver tolerance");

    auto* ev = app.add_subcommand("evaluate", "Evaluate the state on monomial words");
    ev->add_option("instance", instance_path)->required();
    auto* ev_beta = ev->add_option("--beta", beta, "inverse temperature");
    ev->add_option("--words", words_path, "word file (JSON)")->required();

    auto* vf = app.add_subcommand("verify", "Run the randomized verification suites");
    vf->add_option("instance", instance_path)->required();
    auto* vf_beta = vf->add_option("--beta", beta, "inverse temperature");
    vf->add_option("--seed", seed, "randomization seed")->required();
    vf->add_option("--max-degree", max_degree, "max word degree");
    vf->add_option("--fock-level", fock_level, "Fock truncation level");
    vf->add_option("--cap-dimension", cap_dimension, "Fock dimension cap");
    vf->add_flag("--negative-control", negative_control,
                 "inject a non-subinvariant trace; gates must fail");

    CLI11_PARSE(app, argc, argv);

    try {
        const kmslab::InstanceDoc doc = kmslab::load_instance(instance_path);
        if (cb->parsed()) return emit(kmslab::run_critical_beta(doc, tol));
        if (sv->parsed()) {
            kmslab::SolveOptions opt;
            if (sv_beta->count()) {
                opt.beta = beta;
            } else if (doc.beta) {
                opt.beta = *doc.beta;
            } else {
                std::cerr << "error: --beta required (no beta in instance file)\n";
                return kmslab::kExitInput;
            }
            opt.target = target == "pimsner" ? kmslab::SolveTarget::pimsner
                                             : kmslab::SolveTarget::toeplitz;
            return emit(kmslab::run_solve(doc, opt));
        }
        if (ev->parsed()) {
            double b;
            if (ev_beta->count()) {
                b = beta;
            } else if (doc.beta) {
                b = *doc.beta;
            } else {
                std::cerr << "error: --beta required (no beta in instance file)\n";
                return kmslab::kExitInput;
            }
            const auto words = kmslab::load_words(words_path, doc.inst.x);
            return emit(kmslab::run_evaluate(doc, b, words));
        }
        if (vf->parsed()) {
            kmslab::VerifyOptions opt;
            if (vf_beta->count()) opt.beta = beta;
            opt.seed = seed;
            opt.max_degree = max_degree;
            opt.fock_level = fock_level;
            opt.dimension_cap = cap_dimension;
            opt.negative_control = negative_control;
            return emit(kmslab::run_verify(doc, opt));
        }
    } catch (const kmslab::InstanceError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kmslab::kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kmslab::kExitInput;
    }
    return kmslab::kExitInput;
}
