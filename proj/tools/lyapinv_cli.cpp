// lyapinv-cli: batch front end for the lyapinv library.
//
//   lyapinv-cli [global flags] <jack|jmat|lyap|verify-main|repro-paper> [flags]
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or config error,
// 3 numeric degeneracy.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace lyapinv;
using namespace lyapinv::cli;

namespace {

enum ExitCode { kPass = 0, kVerificationFailure = 1, kUsage = 2, kDegenerate = 3 };

std::vector<std::string> with_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const auto extra = config_arguments(read_config_file(path), args);
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

int run(int argc, char** argv) {
    CLI::App app{"Random Lyapunov exponents, invariant subspaces and Haar-averaged characteristic polynomials"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    std::string format = "json", out_path, config_path;
    bool strict = false, no_timestamp = false;
    app.add_option("--seed", common.seed, "Master seed for all random streams");
    app.add_option("--workers", common.workers, "Worker threads for Monte Carlo loops")->check(CLI::Range(1u, 256u));
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out_path, "Write the report here instead of stdout");
    app.add_flag("--strict", strict, "Reject runs without an explicit seed");
    app.add_flag("--no-timestamp", no_timestamp, "Omit wall-clock time from the report");
    app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

    JackOptions jack;
    auto* jack_cmd = app.add_subcommand("jack", "Jack polynomial P_lambda in the monomial basis");
    jack_cmd->add_option("--partition", jack.partition, "Parts, e.g. 3,1")->required();
    jack_cmd->add_option("--alpha", jack.alpha, "Jack parameter (rational)");
    jack_cmd->add_option("--nvars", jack.nvars, "Number of variables");

    JmatOptions jmat;
    auto* jmat_cmd = app.add_subcommand("jmat", "Haar-averaged characteristic polynomial J(B1, B2; u)");
    jmat_cmd->add_option("--k", jmat.k, "Size of B1");
    jmat_cmd->add_option("--n", jmat.n, "Total size k + size of B2");
    jmat_cmd->add_option("--b1", jmat.b1, "Matrix spec for B1");
    jmat_cmd->add_option("--b2", jmat.b2, "Matrix spec for B2");
    jmat_cmd->add_option("--u", jmat.u, "Comma list of u values");
    jmat_cmd->add_option("--nsamples", jmat.nsamples, "Monte Carlo samples (0 to skip)");
    jmat_cmd->add_option("--paper-example", jmat.paper_example, "4-2 or 6-2");

    LyapOptions lyap;
    auto* lyap_cmd = app.add_subcommand("lyap", "Lyapunov spectrum by QR and by Grassmannian averages");
    lyap_cmd->add_option("--model", lyap.model, "point:<M> | left:<M> | twosided:<d list>")->required();
    lyap_cmd->add_option("--n", lyap.n, "Dimension (needed for randsv specs)");
    lyap_cmd->add_option("--m", lyap.m, "Number of factors in the product");
    lyap_cmd->add_option("--k", lyap.k, "Comma list of k (default 1..n-1)");
    lyap_cmd->add_option("--nsamples", lyap.nsamples, "Grassmannian Monte Carlo samples");

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify-main", "Mean-exponent inequality against its Haar right-hand side");
    verify_cmd->add_option("--model", verify.model, "left:<M> | twosided:<d list>")->required();
    verify_cmd->add_option("--n", verify.n, "Dimension (needed for randsv specs)");
    verify_cmd->add_option("--k", verify.k, "Comma list of k (default 1..n-1)");
    verify_cmd->add_option("--nsamples", verify.nsamples, "Monte Carlo samples per estimator");

    ReproOptions repro;
    auto* repro_cmd = app.add_subcommand("repro-paper", "Golden checks of the closed-form examples");
    repro_cmd->add_flag("--mc-confirm", repro.mc_confirm, "Add Monte Carlo confirmations");
    repro_cmd->add_option("--nsamples", repro.nsamples, "Samples for --mc-confirm");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = with_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    if (strict && app.count("--seed") == 0) throw UsageError("--strict requires an explicit --seed");

    const auto start = std::chrono::steady_clock::now();
    Report rep;
    if (*jack_cmd) rep = cmd_jack(jack);
    else if (*jmat_cmd) rep = cmd_jmat(jmat, common);
    else if (*lyap_cmd) rep = cmd_lyap(lyap, common);
    else if (*verify_cmd) rep = cmd_verify_main(verify, common);
    else rep = cmd_repro_paper(repro, common);
    if (!no_timestamp)
        rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string text = format == "csv" ? to_csv(rep) : to_json(rep).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw UsageError("cannot write '" + out_path + "'");
        f << text;
    }
    const Verdict v = rep.overall();
    if (v == Verdict::Fail) std::cerr << "verification failed\n";
    return v == Verdict::Fail ? kVerificationFailure : kPass;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const DegenerateMatrix& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const NonGenericSpectrum& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
