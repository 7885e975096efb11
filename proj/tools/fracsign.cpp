#include "CLI11.hpp"

#include "fracsign/errors.hpp"
#include "fracsign/problem_spec.hpp"
#include "fracsign/special.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

// Exit codes: 0 all verdicts pass, 2 a verdict failed, 1 usage or spec error.

namespace {

using fracsign::spec::to_shortest;

struct CommonFlags {
    std::string spec_path;
    std::string out_path;
    std::size_t n = 0; // 0 keeps the spec's n
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl, bool needs_spec = true) {
    auto* opt = cmd->add_option("--spec", fl.spec_path, "problem spec (JSON)");
    if (needs_spec) opt->required();
    cmd->add_option("--out", fl.out_path, "output file path");
    cmd->add_option("--n", fl.n, "override the spec's grid node count");
    cmd->add_flag("--quiet", fl.quiet, "suppress progress lines");
}

void write_text(const CommonFlags& fl, const std::string& text, const char* what) {
    if (fl.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(fl.out_path, std::ios::binary);
    if (!out) throw fracsign::SpecError("cannot write to \"" + fl.out_path + "\"");
    out << text;
    if (!fl.quiet)
        std::printf("wrote %s %s\n", what, fl.out_path.c_str());
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

// Report JSON goes to --out when given, otherwise stdout.  The timing field
// is appended last so reports stay comparable after stripping it.
int emit_report(const CommonFlags& fl, fracsign::spec::Json report, bool pass,
                double ms) {
    report["timing_ms"] = ms;
    write_text(fl, report.dump(2) + "\n", "report");
    return pass ? 0 : 2;
}

std::string trajectory_csv(const fracsign::GridFunction& x) {
    // Singular-node rows are skipped: the sample there is not finite, the
    // slot holds the power coefficient reported in the JSON diagnostics.
    std::string csv = "t,x\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.is_singular_node(i)) continue;
        csv += to_shortest(x.grid.node(i));
        csv += ',';
        csv += to_shortest(x[i]);
        csv += '\n';
    }
    return csv;
}

int cmd_ml(double alpha, double beta, double z) {
    const double v = fracsign::special::mittag_leffler(alpha, beta, z);
    const double av = std::abs(v);
    if (v == 0.0 || (av >= 1e-4 && av < 1e15))
        std::printf("%.10f\n", v);
    else
        std::printf("%.10e\n", v);
    return 0;
}

int cmd_solve(const CommonFlags& fl) {
    const auto s = fracsign::spec::load_spec(fl.spec_path);
    const auto run = fracsign::spec::run_solve(s, fl.n);
    write_text(fl, trajectory_csv(run.x), "trajectory");
    if (!fl.quiet && !fl.out_path.empty()) {
        std::printf("method %s", run.method.c_str());
        if (run.used_series)
            std::printf(", %zu levels, last term %s", run.levels,
                        to_shortest(run.last_term).c_str());
        if (run.terminal_gap >= 0.0)
            std::printf(", terminal gap %s", to_shortest(run.terminal_gap).c_str());
        std::printf("\n");
    }
    return 0;
}

int cmd_check_sign(const CommonFlags& fl) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = fracsign::spec::load_spec(fl.spec_path);
    auto rr = fracsign::spec::run_check_sign(s, fl.n);
    return emit_report(fl, std::move(rr.report), rr.pass, elapsed_ms(t0));
}

int cmd_bernoulli(const CommonFlags& fl) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = fracsign::spec::load_spec(fl.spec_path);
    auto rr = fracsign::spec::run_bernoulli(s);

    if (!fl.out_path.empty()) {
        // full per-point margins; the report itself goes to stdout
        std::string csv = "alpha,lambda,t,margin\n";
        const auto steps = [](const fracsign::sign_analysis::SweepRange& r) {
            return static_cast<std::size_t>((r.max - r.min) / r.step + 0.5) + 1;
        };
        const auto value = [](const fracsign::sign_analysis::SweepRange& r,
                              std::size_t i) {
            return std::min(r.min + static_cast<double>(i) * r.step, r.max);
        };
        for (std::size_t ia = 0; ia < steps(s.alphas); ++ia)
            for (std::size_t il = 0; il < steps(s.lambdas); ++il)
                for (std::size_t it = 0; it < steps(s.ts); ++it) {
                    const double al = value(s.alphas, ia);
                    const double lm = value(s.lambdas, il);
                    const double tt = value(s.ts, it);
                    csv += to_shortest(al) + ',' + to_shortest(lm) + ',' +
                           to_shortest(tt) + ',' +
                           to_shortest(fracsign::sign_analysis::bernoulli_margin(
                               al, lm, tt)) +
                           '\n';
                }
        std::ofstream out(fl.out_path, std::ios::binary);
        if (!out)
            throw fracsign::SpecError("cannot write to \"" + fl.out_path + "\"");
        out << csv;
        if (!fl.quiet) std::printf("wrote margins %s\n", fl.out_path.c_str());
    }

    auto report = std::move(rr.report);
    report["timing_ms"] = elapsed_ms(t0);
    if (!fl.quiet) std::fputs((report.dump(2) + "\n").c_str(), stdout);
    return rr.pass ? 0 : 2;
}

int cmd_herglotz_verify(const CommonFlags& fl) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = fracsign::spec::load_spec(fl.spec_path);
    auto rr = fracsign::spec::run_herglotz_verify(s, fl.n);
    return emit_report(fl, std::move(rr.report), rr.pass, elapsed_ms(t0));
}

int cmd_herglotz_optimize(const CommonFlags& fl) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = fracsign::spec::load_spec(fl.spec_path);
    auto run = fracsign::spec::run_herglotz_optimize(s, fl.n);

    if (!fl.out_path.empty()) {
        std::string csv = "t,u,x,z\n";
        const auto& c = run.candidate;
        for (std::size_t i = 0; i < c.u.size(); ++i) {
            csv += to_shortest(c.u.grid.node(i)) + ',' + to_shortest(c.u[i]) +
                   ',' + to_shortest(c.x[i]) + ',' + to_shortest(c.z[i]) + '\n';
        }
        std::ofstream out(fl.out_path, std::ios::binary);
        if (!out)
            throw fracsign::SpecError("cannot write to \"" + fl.out_path + "\"");
        out << csv;
        if (!fl.quiet) std::printf("wrote candidate %s\n", fl.out_path.c_str());
    }

    auto report = std::move(run.report);
    report["timing_ms"] = elapsed_ms(t0);
    if (!fl.quiet) std::fputs((report.dump(2) + "\n").c_str(), stdout);
    return run.pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracsign: sign-aware solvers and optimality checks for "
                 "fractional linear dynamics"};
    app.require_subcommand(1);

    double ml_alpha = 0.0, ml_beta = 1.0, ml_z = 0.0;
    auto* ml = app.add_subcommand("ml", "evaluate the two-parameter E_{a,b}(z)");
    ml->add_option("--alpha", ml_alpha, "first parameter, > 0")->required();
    ml->add_option("--beta", ml_beta, "second parameter (default 1)");
    ml->add_option("--z", ml_z, "argument")->required();

    CommonFlags solve_fl, sign_fl, bern_fl, hv_fl, ho_fl;
    auto* solve = app.add_subcommand("solve", "solve an IVP, write t,x CSV");
    add_common(solve, solve_fl);
    auto* sign = app.add_subcommand("check-sign", "solve and verify the sign law");
    add_common(sign, sign_fl);
    auto* bern = app.add_subcommand(
        "bernoulli", "sweep the curved-over-chord margin; --out adds a full CSV");
    add_common(bern, bern_fl);

    auto* hg = app.add_subcommand("herglotz", "variational pipeline");
    hg->require_subcommand(1);
    auto* hv = hg->add_subcommand("verify", "check optimality of the spec's u_init");
    add_common(hv, hv_fl);
    auto* ho = hg->add_subcommand(
        "optimize", "descend from u_init; --out writes the t,u,x,z candidate CSV");
    add_common(ho, ho_fl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (ml->parsed()) return cmd_ml(ml_alpha, ml_beta, ml_z);
        if (solve->parsed()) return cmd_solve(solve_fl);
        if (sign->parsed()) return cmd_check_sign(sign_fl);
        if (bern->parsed()) return cmd_bernoulli(bern_fl);
        if (hv->parsed()) return cmd_herglotz_verify(hv_fl);
        if (ho->parsed()) return cmd_herglotz_optimize(ho_fl);
    } catch (const fracsign::Error& e) {
        std::fprintf(stderr, "fracsign: %s\n", e.what());
        return 1;
    }
    return 1;
}
