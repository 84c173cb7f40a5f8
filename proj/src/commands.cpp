#include "kmslab/commands.hpp"

#include <cmath>
#include <sstream>

#include "kmslab/fock.hpp"

namespace kmslab {

using nlohmann::json;

namespace {

json base_report(const char* command, const InstanceDoc& doc) {
    json r;
    r["format"] = "kms-lab/1-report";
    r["command"] = command;
    r["input"] = serialize_instance(doc);
    r["checks"] = json::array();
    return r;
}

bool all_checks_pass(const json& r) {
    for (const auto& c : r["checks"])
        if (!c["pass"].get<bool>()) return false;
    return true;
}

json trace_json(const TraceVector& t) { return real_vector_to_json(t.t); }

// Resolve the trace used by evaluate/verify: explicit file trace, else the
// invariant solution, else the subinvariant LP solution.
std::optional<TraceVector> resolve_trace(const InstanceDoc& doc, const TransferMatrix& zm,
                                         const RealVector* nw, double tol) {
    if (doc.trace) return doc.trace;
    if (auto inv = invariant_solver(zm, doc.inst.x.algebra, tol, nw)) return inv;
    return subinvariant_solver(zm, doc.inst.x.algebra, tol, nw);
}

}  // namespace

CommandResult run_critical_beta(const InstanceDoc& doc, double tol) {
    CommandResult out;
    out.report = base_report("critical-beta", doc);
    out.report["tol"] = tol;

    std::optional<double> beta_c;
    try {
        beta_c = critical_beta(doc.inst.x, doc.inst.d, tol);
    } catch (const std::invalid_argument& e) {
        out.exit_code = kExitInput;
        out.report["error"] = e.what();
        out.summary = std::string("error: ") + e.what();
        return out;
    }
    if (!beta_c) {
        out.exit_code = kExitEmpty;
        out.report["beta_critical"] = nullptr;
        out.report["message"] = "r(Z(beta)) < 1 for all beta >= 0";
        out.summary = "no critical inverse temperature: r(Z(beta)) < 1 for all beta >= 0";
        return out;
    }
    const TransferMatrix zm = transfer_matrix(doc.inst.x, doc.inst.d, *beta_c);
    const SpectralResult sp = spectral_radius(zm.z);
    out.report["beta_critical"] = *beta_c;
    out.report["spectral_radius_at_beta"] = sp.radius;
    out.report["spectral_radius_bounds"] = json::array({sp.lower, sp.upper});
    out.report["transfer_matrix"] = real_matrix_to_json(zm.z);
    if (sp.left_perron)
        out.report["perron_left_eigenvector"] = real_vector_to_json(*sp.left_perron);
    out.report["checks"].push_back(
        check_entry("critical-radius", "spectral radius of the transfer matrix equals 1",
                    std::abs(sp.radius - 1.0), std::max(tol, 1e-7)));
    std::ostringstream s;
    s.precision(10);
    s << "beta_c = " << *beta_c << " with r(Z(beta_c)) = " << sp.radius;
    out.summary = s.str();
    return out;
}

CommandResult run_solve(const InstanceDoc& doc, const SolveOptions& opt) {
    CommandResult out;
    out.report = base_report("solve", doc);
    out.report["beta"] = opt.beta;
    out.report["target"] = opt.target == SolveTarget::toeplitz ? "toeplitz" : "pimsner";

    const bool twisted = doc.inst.h && !doc.inst.h->is_trivial();
    try {
        const TransferMatrix zm = transfer_matrix(doc.inst.x, doc.inst.d, opt.beta);
        out.report["transfer_matrix"] = real_matrix_to_json(zm.z);
        RealVector nw;
        const RealVector* nwp = nullptr;
        if (twisted) {
            nw.resize(doc.inst.x.num_blocks());
            for (int v = 0; v < doc.inst.x.num_blocks(); ++v)
                nw[v] = hermitian_exp(doc.inst.h->h[v], -opt.beta).trace().real();
            nwp = &nw;
        }
        const auto sol = opt.target == SolveTarget::toeplitz
                             ? subinvariant_solver(zm, doc.inst.x.algebra, opt.tol, nwp)
                             : invariant_solver(zm, doc.inst.x.algebra, opt.tol, nwp);
        if (!sol) {
            out.exit_code = kExitEmpty;
            out.report["solution"] = nullptr;
            out.summary = opt.target == SolveTarget::toeplitz
                              ? "no subinvariant state at this beta"
                              : "no invariant state at this beta";
            return out;
        }
        out.report["solution"] = trace_json(*sol);
        const double sub_viol = std::max(0.0, subinvariance_violation(zm, *sol));
        const double inv_viol = invariance_violation(zm, *sol);
        out.report["checks"].push_back(check_entry(
            "subinvariance", "transfer image of the trace stays below the trace",
            sub_viol, opt.tol));
        if (opt.target == SolveTarget::pimsner)
            out.report["checks"].push_back(check_entry(
                "invariance", "the trace is a fixed point of the transfer operator",
                inv_viol, opt.tol));
        out.report["descends_to_cuntz_pimsner"] = inv_viol <= opt.tol;

        const WoldDecomposition w =
            wold_decompose(*sol, zm, doc.inst.x.algebra, std::max(opt.tol, sub_viol * 2));
        out.report["wold"]["tau_finite"] = trace_json(w.tau_finite);
        out.report["wold"]["tau_infinite"] = trace_json(w.tau_infinite);
        out.report["wold"]["tau0"] = trace_json(w.tau0);
        out.report["wold"]["lambda_finite"] = w.lambda_finite;
        const KmsState st =
            make_kms_state(doc.inst.x, doc.inst.d, opt.beta, *sol, 10 * opt.tol);
        out.report["type"] = to_string(classify_type(st, doc.inst.x.algebra));

        std::ostringstream s;
        s << "state found; type " << out.report["type"].get<std::string>();
        out.summary = s.str();
        out.exit_code = all_checks_pass(out.report) ? kExitOk : kExitGate;
    } catch (const std::invalid_argument& e) {
        out.exit_code = kExitInput;
        out.report["error"] = e.what();
        out.summary = std::string("error: ") + e.what();
    }
    return out;
}

CommandResult run_evaluate(const InstanceDoc& doc, double beta,
                           const std::vector<MonomialWord>& words, double tol) {
    CommandResult out;
    out.report = base_report("evaluate", doc);
    out.report["beta"] = beta;
    try {
        const bool twisted = doc.inst.h && !doc.inst.h->is_trivial();
        const TransferMatrix zm = transfer_matrix(doc.inst.x, doc.inst.d, beta);
        RealVector nw;
        const RealVector* nwp = nullptr;
        if (twisted) {
            nw.resize(doc.inst.x.num_blocks());
            for (int v = 0; v < doc.inst.x.num_blocks(); ++v)
                nw[v] = hermitian_exp(doc.inst.h->h[v], -beta).trace().real();
            nwp = &nw;
        }
        const auto tau = resolve_trace(doc, zm, nwp, tol);
        if (!tau) {
            out.exit_code = kExitEmpty;
            out.summary = "no KMS state exists at this beta";
            return out;
        }
        out.report["trace"] = trace_json(*tau);

        json values = json::array();
        if (twisted) {
            TwistedIsometryGroup u{doc.inst.d, *doc.inst.h};
            KmsFunctional phi{beta, *doc.inst.h, tau->t};
            for (const MonomialWord& w : words) {
                const cdouble val = general_kms_eval(doc.inst.x, u, phi, w);
                values.push_back(json::array({val.real(), val.imag()}));
            }
        } else {
            const KmsState st = make_kms_state(doc.inst.x, doc.inst.d, beta, *tau, tol);
            for (const MonomialWord& w : words) {
                const cdouble val = evaluate_kms_state(doc.inst.x, st, w);
                values.push_back(json::array({val.real(), val.imag()}));
            }
        }
        out.report["values"] = std::move(values);
        out.summary = std::to_string(words.size()) + " word(s) evaluated";
    } catch (const std::invalid_argument& e) {
        out.exit_code = kExitInput;
        out.report["error"] = e.what();
        out.summary = std::string("error: ") + e.what();
    }
    return out;
}

namespace {

void kms_residual_section(const Correspondence& x, const Generator& d, const KmsState& st,
                          Rng& rng, int pairs, int max_degree, double tol, json& checks) {
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        const MonomialWord wx = random_word(rng, x, max_degree / 2 + 1, max_degree / 2);
        const MonomialWord wy = random_word(rng, x, max_degree / 2, max_degree / 2 + 1);
        const ToeplitzElement ex = ToeplitzElement::from_word(x.algebra, wx);
        const ToeplitzElement ey = ToeplitzElement::from_word(x.algebra, wy);
        const ToeplitzElement prod = normal_product(x, ex, ey);
        const cdouble val = evaluate_kms_state(x, st, prod);
        const double res = verify_kms(x, d, st, ex, ey);
        worst = std::max(worst, res / std::max(1.0, std::abs(val)));
    }
    checks.push_back(check_entry(
        "kms-residual", "phi(xy) = phi(y gamma_{i beta}(x)) on randomized words", worst,
        tol));
}

void induced_trace_section(const Correspondence& x, const TraceVector& tau, Rng& rng,
                           json& checks) {
    double worst_theta = 0.0, worst_trace = 0.0;
    for (int rep = 0; rep < 12; ++rep) {
        const ModuleVector xi = random_module_vector(rng, x);
        const ModuleVector eta = random_module_vector(rng, x);
        const cdouble lhs = induced_trace(tau, theta(xi, eta));
        const cdouble rhs = evaluate_trace(tau, inner_product(eta, xi));
        worst_theta = std::max(worst_theta, std::abs(lhs - rhs));
        const ModuleOperator s = random_module_operator(rng, x);
        const ModuleOperator t = random_module_operator(rng, x);
        const double scale = std::max(1.0, s.norm() * t.norm());
        worst_trace = std::max(
            worst_trace, std::abs(induced_trace(tau, s * t) - induced_trace(tau, t * s)) /
                             scale);
    }
    checks.push_back(check_entry("induced-trace-theta",
                                 "Tr_tau(theta_{xi,eta}) = tau(<eta,xi>)", worst_theta,
                                 1e-11));
    checks.push_back(check_entry("induced-trace-tracial",
                                 "Tr_tau(ST) = Tr_tau(TS)", worst_trace, 1e-11));
}

void stages_section(const Correspondence& x, const Generator& d, double beta,
                    const TraceVector& tau, Rng& rng, json& checks) {
    double worst = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        const ModuleOperator s = random_positive_module_operator(rng, x);
        const BimoduleOperator t = random_positive_bimodule_operator(rng, x);
        const cdouble lhs = induced_trace(tau, tensor_operator(x, x, s, t));
        const TraceVector tau_t = induced_trace_functional(tau, t, x);
        const cdouble rhs = induced_trace(tau_t, s);
        const double scale = std::max(1.0, std::abs(rhs));
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    checks.push_back(check_entry(
        "induction-in-stages",
        "induced trace through a tensor product factors through the stage trace", worst,
        1e-11));

    const TransferMatrix zm = transfer_matrix(x, d, beta);
    const Correspondence xx = tensor(x, x);
    Generator dd;
    dd.slots = bimodule_tensor_sum(x, x, d.as_bimodule_operator(x),
                                  d.as_bimodule_operator(x))
                   .slots;
    const TransferMatrix zm2 = transfer_matrix(xx, dd, beta);
    const double comp = (zm2.z - zm.z * zm.z).norm() /
                        std::max(1.0, (zm.z * zm.z).norm());
    checks.push_back(check_entry(
        "transfer-composition", "transfer matrix of the squared module is Z(beta)^2",
        comp, 1e-11));
}

void wold_section(const Correspondence& x, const TransferMatrix& zm,
                  const TraceVector& tau, double tol, json& checks, json& report) {
    const WoldDecomposition w = wold_decompose(tau, zm, x.algebra, tol);
    const double sum_res =
        (w.tau_finite.t + w.tau_infinite.t - tau.t).lpNorm<Eigen::Infinity>();
    const double fix_res =
        (zm.z.transpose() * w.tau_infinite.t - w.tau_infinite.t).lpNorm<Eigen::Infinity>();
    RealVector series = RealVector::Zero(tau.t.size());
    RealVector term = w.tau0.t;
    for (int n = 0; n < 20000 && term.lpNorm<1>() > 1e-14; ++n) {
        series += term;
        term = zm.z.transpose() * term;
    }
    const double series_res = (series - w.tau_finite.t).lpNorm<Eigen::Infinity>();
    checks.push_back(check_entry("wold-sum", "finite and infinite parts sum to the trace",
                                 sum_res, tol));
    checks.push_back(check_entry("wold-fixed-point",
                                 "infinite part is transfer-invariant", fix_res, tol));
    checks.push_back(check_entry("wold-series",
                                 "finite part is the series over transfer iterates",
                                 series_res, tol));
    report["wold"]["lambda_finite"] = w.lambda_finite;
}

void fock_section(const Correspondence& x, const Generator& d, double beta,
                  const TraceVector& tau, int level, int cap, Rng& rng, json& checks) {
    const TransferMatrix zm = transfer_matrix(x, d, beta);
    const SpectralResult sp = spectral_radius(zm.z);
    if (sp.radius >= 1.0 - 1e-9) return;  // finite-type machinery only
    const FockTruncation f = build_fock(x, level, cap);
    RealVector t0 = tau.t - zm.z.transpose() * tau.t;
    for (int v = 0; v < t0.size(); ++v) t0[v] = std::max(0.0, t0[v]);
    const TraceVector tau0(t0);
    const FockState st = make_fock_state(f, d, beta, tau0);
    const TailBound tb = tail_bound(zm, tau0, x.algebra, level);
    const KmsState alg = make_kms_state(x, d, beta, tau, 1e-6);

    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const MonomialWord w = random_word(rng, x, 2, 2);
        const cdouble spatial = fock_state_eval(f, st, word_matrix(f, w));
        const cdouble algebraic = evaluate_kms_state(x, alg, w);
        worst = std::max(worst, std::abs(spatial - algebraic));
    }
    checks.push_back(check_entry(
        "fock-cross-validation",
        "truncated Fock evaluation matches the two-point formula within the tail bound",
        worst, std::max(tb.bound, 1e-9)));
}

void weights_section(const Correspondence& x, const Generator& d,
                     const CoeffDynamics& h, double beta, Rng& rng, json& checks) {
    TwistedIsometryGroup u{d, h};
    RealVector nw(x.num_blocks());
    for (int v = 0; v < x.num_blocks(); ++v)
        nw[v] = hermitian_exp(h.h[v], -beta).trace().real();
    KmsFunctional phi;
    phi.beta = beta;
    phi.dynamics = h;
    phi.c = RealVector::Zero(x.num_blocks());
    for (int v = 0; v < x.num_blocks(); ++v) phi.c[v] = 1.0 / (nw.sum());

    double rt = 0.0;
    try {
        const InducedWeight k = induce_weight(x, phi, u);
        const KmsFunctional back = restrict_weight(x, k, u);
        rt = (back.c - phi.c).lpNorm<Eigen::Infinity>();
    } catch (const std::exception&) {
        rt = 1.0;
    }
    checks.push_back(check_entry("weight-roundtrip",
                                 "restriction inverts weight induction", rt, 1e-9));

    const double stages = weight_stages_check(x, x, u, u, phi, rng, 4);
    checks.push_back(check_entry("weight-stages",
                                 "weight induction in stages through a tensor product",
                                 stages, 1e-9));
}

void moment_section(const Correspondence& x, const KmsState& st, json& checks) {
    std::vector<MonomialWord> words = basis_words(x, 2);
    if (words.size() > 40) words.resize(40);
    const double min_eig = moment_matrix_min_eig(x, kms_evaluator(x, st), words);
    checks.push_back(check_entry("moment-psd",
                                 "Gram matrix of low-degree words is positive "
                                 "semidefinite (negated minimum eigenvalue)",
                                 std::max(0.0, -min_eig), 1e-9));
}

}  // namespace

CommandResult run_verify(const InstanceDoc& doc, const VerifyOptions& opt) {
    CommandResult out;
    out.report = base_report("verify", doc);
    out.report["seed"] = opt.seed;
    out.report["max_degree"] = opt.max_degree;
    out.report["fock_level"] = opt.fock_level;
    out.report["negative_control"] = opt.negative_control;

    try {
        const Correspondence& x = doc.inst.x;
        const Generator& d = doc.inst.d;
        const bool twisted = doc.inst.h && !doc.inst.h->is_trivial();

        double beta;
        if (opt.beta) {
            beta = *opt.beta;
        } else if (doc.beta) {
            beta = *doc.beta;
        } else {
            const auto bc = critical_beta(x, d);
            if (!bc) {
                out.exit_code = kExitEmpty;
                out.summary = "no beta supplied and no critical beta exists";
                return out;
            }
            beta = *bc;
        }
        if (opt.negative_control) beta *= 0.5;
        out.report["beta"] = beta;

        const TransferMatrix zm = transfer_matrix(x, d, beta);
        std::optional<TraceVector> tau;
        if (opt.negative_control) {
            tau = TraceVector::uniform_state(x.algebra);
        } else {
            tau = resolve_trace(doc, zm, nullptr, opt.tol);
        }
        if (!tau) {
            out.exit_code = kExitEmpty;
            out.summary = "no KMS state exists at this beta";
            return out;
        }
        out.report["trace"] = trace_json(*tau);
        json& checks = out.report["checks"];

        const double sub_viol = std::max(0.0, subinvariance_violation(zm, *tau));
        checks.push_back(check_entry(
            "subinvariance", "transfer image of the trace stays below the trace",
            sub_viol, opt.tol));

        Rng rng(opt.seed);
        const KmsState st = make_kms_state(x, d, beta, *tau, opt.tol, false);
        kms_residual_section(x, d, st, rng, opt.pairs, opt.max_degree, 1e-9, checks);
        induced_trace_section(x, *tau, rng, checks);
        stages_section(x, d, beta, *tau, rng, checks);
        if (sub_viol <= opt.tol) wold_section(x, zm, *tau, 1e-9, checks, out.report);
        if (!twisted) {
            try {
                fock_section(x, d, beta, *tau, opt.fock_level, opt.dimension_cap, rng,
                             checks);
            } catch (const std::invalid_argument&) {
                // dimension cap or infinite type; skipped
            }
        }
        if (twisted) weights_section(x, d, *doc.inst.h, beta, rng, checks);
        moment_section(x, st, checks);

        out.exit_code = all_checks_pass(out.report) ? kExitOk : kExitGate;
        int n_pass = 0, n_total = 0;
        for (const auto& c : out.report["checks"]) {
            ++n_total;
            if (c["pass"].get<bool>()) ++n_pass;
        }
        std::ostringstream s;
        s << n_pass << "/" << n_total << " verification gates passed";
        out.summary = s.str();
    } catch (const std::invalid_argument& e) {
        out.exit_code = kExitInput;
        out.report["error"] = e.what();
        out.summary = std::string("error: ") + e.what();
    }
    return out;
}

}  // namespace kmslab
