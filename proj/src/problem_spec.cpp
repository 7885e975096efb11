#include "fracsign/problem_spec.hpp"

#include "fracsign/errors.hpp"
#include "fracsign/frac_ops.hpp"
#include "fracsign/solvers.hpp"
#include "fracsign/special.hpp"
#include "fracsign/version.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

namespace fracsign::spec {

namespace {

Kind kind_from(const std::string& s) {
    if (s == "caputo_ivp") return Kind::caputo_ivp;
    if (s == "right_rl_ivp") return Kind::right_rl_ivp;
    if (s == "nonlinear_ivp") return Kind::nonlinear_ivp;
    if (s == "herglotz") return Kind::herglotz;
    if (s == "bernoulli_sweep") return Kind::bernoulli_sweep;
    throw SpecError("unknown kind \"" + s + "\"");
}

double get_number(const Json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number())
        throw SpecError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

double get_number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? get_number(j, key) : fallback;
}

std::size_t get_count(const Json& j, const char* key, std::size_t fallback,
                      std::size_t min_value) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
        throw SpecError(std::string("\"") + key + "\" must be an integer >= " +
                        std::to_string(min_value));
    return v.get<std::size_t>();
}

// Expression fields are parsed eagerly so a bad formula is reported with
// its field name at load time, not mid-solve.
expr::Expression get_expr(const Json& j, const char* key, const char* vars) {
    const auto& v = j.at(key);
    if (!v.is_string())
        throw SpecError(std::string("\"") + key + "\" must be an expression string");
    try {
        return expr::parse(v.get<std::string>(), vars);
    } catch (const ParseError& e) {
        throw SpecError(std::string("field \"") + key + "\": " + e.what());
    }
}

void require(const Json& j, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (!j.contains(k))
            throw SpecError(std::string("missing required key \"") + k + "\"");
}

void reject_unknown(const Json& j, Kind kind,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return key == k;
            }) == allowed.end())
            throw SpecError("key \"" + key + "\" is not part of a " +
                            std::string(to_string(kind)) + " spec");
    }
}

void read_interval(const Json& j, ProblemSpec& s) {
    const auto& iv = j.at("interval");
    if (!iv.is_object())
        throw SpecError("\"interval\" must be an object {a, b}");
    reject_unknown(iv, s.kind, {"a", "b"});
    require(iv, {"a", "b"});
    s.a = get_number(iv, "a");
    s.b = get_number(iv, "b");
    if (!std::isfinite(s.a) || !std::isfinite(s.b) || !(s.b > s.a))
        throw SpecError("\"interval\" must satisfy a < b");
}

void read_alpha(const Json& j, ProblemSpec& s, bool allow_one) {
    s.alpha = get_number(j, "alpha");
    const bool ok = s.alpha > 0.0 && (allow_one ? s.alpha <= 1.0 : s.alpha < 1.0);
    if (!std::isfinite(s.alpha) || !ok)
        throw SpecError(std::string("\"alpha\" must lie in ") +
                        (allow_one ? "(0, 1]" : "(0, 1)"));
}

sign_analysis::SweepRange read_range(const Json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
        !v[1].is_number() || !v[2].is_number())
        throw SpecError(std::string("\"") + key + "\" must be [min, max, step]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::function<double(double)> fn_of_t(const expr::Expression& e) {
    return [e](double t) { return e.evaluate({.t = t}); };
}

Json sign_json(const char* name, const sign_analysis::SignReport& r) {
    Json out;
    out["name"] = name;
    out["verdict"] = sign_analysis::to_string(r.verdict);
    out["min_value"] = r.min_value;
    out["argmin"] = r.argmin;
    out["checked"] = r.checked;
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

Json report_shell(const ProblemSpec& s) {
    Json out;
    out["tool"] = "fracsign";
    out["version"] = kVersion;
    out["kind"] = to_string(s.kind);
    out["spec"] = s.raw;
    return out;
}

herglotz::CandidateSolution initial_candidate(const ProblemSpec& s,
                                              const UniformGrid& g) {
    GridFunction u = s.u_init.empty()
                         ? GridFunction(g)
                         : GridFunction::sample(g, fn_of_t(s.u_init));
    return herglotz::candidate_from_control(s.hg, u);
}

// Shared tail of verify and optimize: residual, second-order check,
// multiplier sign, and the order-one classical forms.  gate_differential is
// off for descent output: the time derivative in the differential form
// turns node-scale control noise into O(noise/h), so only the integral form
// is a meaningful gate there.
void append_verification(const ProblemSpec& s, const herglotz::CandidateSolution& cand,
                         double el_tol, bool gate_differential, Json& out,
                         bool& pass) {
    const auto adj = herglotz::solve_adjoint(s.hg, cand, {s.tol, s.j_max});
    const auto el = herglotz::el_residual(s.hg, cand, adj, s.delta, el_tol);
    const auto leg = herglotz::legendre_check(s.hg, cand);

    bool negative = true;
    for (std::size_t i = 0; i < adj.p.size(); ++i)
        if (!adj.p.is_singular_node(i) && !(adj.p[i] < 0.0)) negative = false;

    out["objective"] = cand.objective;
    out["adjoint"] = Json{{"negative", negative}, {"terminal_gap", adj.terminal_gap}};
    out["el"] = Json{{"sup", el.sup}, {"delta", el.delta}, {"tol", el_tol},
                     {"pass", el.pass}};
    out["legendre"] = Json{{"min", leg.min_value}, {"argmin", leg.argmin},
                           {"pass", leg.pass}};
    pass = el.pass && leg.pass && negative;

    if (s.hg.alpha == 1.0) {
        const auto cl = herglotz::classical_conditions(s.hg, cand, s.delta, el_tol);
        const bool cl_pass = gate_differential
                                 ? cl.pass
                                 : cl.integral_sup <= el_tol;
        out["classical"] = Json{{"integral_sup", cl.integral_sup},
                                {"differential_sup", cl.differential_sup},
                                {"differential_gated", gate_differential},
                                {"pass", cl_pass}};
        pass = pass && cl_pass;
    }
}

} // namespace

const char* to_string(Kind k) {
    switch (k) {
        case Kind::caputo_ivp: return "caputo_ivp";
        case Kind::right_rl_ivp: return "right_rl_ivp";
        case Kind::nonlinear_ivp: return "nonlinear_ivp";
        case Kind::herglotz: return "herglotz";
        default: return "bernoulli_sweep";
    }
}

ProblemSpec parse_spec(const Json& j) {
    if (!j.is_object()) throw SpecError("spec must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw SpecError("missing required key \"kind\"");

    ProblemSpec s;
    s.kind = kind_from(j.at("kind").get<std::string>());
    s.raw = j;

    switch (s.kind) {
        case Kind::caputo_ivp: {
            reject_unknown(j, s.kind,
                           {"kind", "alpha", "interval", "x_a", "lambda", "g",
                            "forcing", "n", "method", "tol", "j_max"});
            require(j, {"alpha", "interval", "x_a"});
            read_alpha(j, s, true);
            read_interval(j, s);
            s.x_a = get_number(j, "x_a");
            s.has_lambda = j.contains("lambda");
            if (s.has_lambda == j.contains("g"))
                throw SpecError("caputo_ivp needs exactly one of \"lambda\" or \"g\"");
            if (s.has_lambda)
                s.lambda = get_number(j, "lambda");
            else
                s.g = get_expr(j, "g", "t");
            if (j.contains("forcing")) s.forcing = get_expr(j, "forcing", "t");
            if (j.contains("method")) {
                s.method = j.at("method").get<std::string>();
                static const std::set<std::string> methods{
                    "auto", "vcf", "resolvent", "implicit", "pc"};
                if (!methods.count(s.method))
                    throw SpecError("\"method\" must be one of auto, vcf, "
                                    "resolvent, implicit, pc");
            }
            break;
        }
        case Kind::right_rl_ivp: {
            reject_unknown(j, s.kind,
                           {"kind", "alpha", "interval", "x_b", "g", "n", "tol",
                            "j_max"});
            require(j, {"alpha", "interval", "x_b", "g"});
            read_alpha(j, s, false);
            read_interval(j, s);
            s.x_b = get_number(j, "x_b");
            s.g = get_expr(j, "g", "t");
            break;
        }
        case Kind::nonlinear_ivp: {
            reject_unknown(j, s.kind, {"kind", "alpha", "interval", "x_a", "f", "n"});
            require(j, {"alpha", "interval", "x_a", "f"});
            read_alpha(j, s, true);
            read_interval(j, s);
            s.x_a = get_number(j, "x_a");
            s.f = get_expr(j, "f", "tx");
            break;
        }
        case Kind::herglotz: {
            reject_unknown(j, s.kind,
                           {"kind", "alpha", "interval", "x_a", "z_a", "L", "d2L",
                            "d3L", "d4L", "d33L", "u_init", "n", "delta", "el_tol",
                            "tol", "j_max", "gtol", "max_iterations"});
            require(j, {"alpha", "interval", "x_a", "z_a", "L", "d2L", "d3L",
                        "d4L", "d33L"});
            read_alpha(j, s, true);
            read_interval(j, s);
            s.hg.alpha = s.alpha;
            s.hg.a = s.a;
            s.hg.b = s.b;
            s.hg.x_a = s.x_a = get_number(j, "x_a");
            s.hg.z_a = get_number(j, "z_a");
            s.hg.L = get_expr(j, "L", "txuz");
            s.hg.d2L = get_expr(j, "d2L", "txuz");
            s.hg.d3L = get_expr(j, "d3L", "txuz");
            s.hg.d4L = get_expr(j, "d4L", "txuz");
            s.hg.d33L = get_expr(j, "d33L", "txuz");
            if (j.contains("u_init")) s.u_init = get_expr(j, "u_init", "t");
            s.delta = get_number_or(j, "delta", -1.0);
            if (j.contains("el_tol")) {
                s.el_tol = get_number(j, "el_tol");
                if (!(*s.el_tol > 0.0))
                    throw SpecError("\"el_tol\" must be positive");
            }
            s.gtol = get_number_or(j, "gtol", 1e-6);
            s.max_iterations = get_count(j, "max_iterations", 5000, 1);
            break;
        }
        case Kind::bernoulli_sweep: {
            reject_unknown(j, s.kind,
                           {"kind", "alpha_range", "lambda_range", "t_range"});
            require(j, {"alpha_range", "lambda_range", "t_range"});
            s.alphas = read_range(j, "alpha_range");
            s.lambdas = read_range(j, "lambda_range");
            s.ts = read_range(j, "t_range");
            break;
        }
    }

    if (s.kind != Kind::bernoulli_sweep) {
        s.n = get_count(j, "n", 2048, 2);
        s.tol = get_number_or(j, "tol", 1e-10);
        if (!(s.tol > 0.0)) throw SpecError("\"tol\" must be positive");
        s.j_max = get_count(j, "j_max", 60, 1);
    }
    return s;
}

ProblemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file \"" + path + "\"");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError("spec file \"" + path + "\" is not valid JSON: " + e.what());
    }
    return parse_spec(j);
}

SolveRun run_solve(const ProblemSpec& s, std::size_t n_override) {
    const std::size_t n = n_override ? n_override : s.n;
    SolveRun out;

    switch (s.kind) {
        case Kind::caputo_ivp: {
            std::string method = s.method;
            if (method == "auto") method = s.has_lambda ? "vcf" : "resolvent";
            if (!s.forcing.empty() && method != "vcf" && method != "pc")
                throw SpecError("\"forcing\" is only supported by the vcf and pc routes");

            if (method == "vcf") {
                if (!s.has_lambda)
                    throw SpecError("the vcf route needs a constant \"lambda\"");
                solvers::ConstantLinearIVP p;
                p.alpha = s.alpha;
                p.a = s.a;
                p.b = s.b;
                p.x_a = s.x_a;
                p.lambda = s.lambda;
                if (!s.forcing.empty()) p.forcing = fn_of_t(s.forcing);
                out.x = solvers::solve_vcf(p, n);
            } else if (method == "pc") {
                solvers::NonlinearIVP p;
                p.alpha = s.alpha;
                p.a = s.a;
                p.b = s.b;
                p.x_a = s.x_a;
                const double lam = s.lambda;
                const bool constant = s.has_lambda;
                const expr::Expression gg = s.g, ff = s.forcing;
                p.f = [lam, constant, gg, ff](double t, double x) {
                    const double c = constant ? lam : gg.evaluate({.t = t});
                    return c * x + (ff.empty() ? 0.0 : ff.evaluate({.t = t}));
                };
                out.x = solvers::predictor_corrector(p, n);
            } else {
                solvers::VariableLinearIVP p;
                p.alpha = s.alpha;
                p.a = s.a;
                p.b = s.b;
                p.x_a = s.x_a;
                const double lam = s.lambda;
                p.g = s.has_lambda ? std::function<double(double)>(
                                         [lam](double) { return lam; })
                                   : fn_of_t(s.g);
                if (method == "implicit") {
                    out.x = solvers::solve_linear_implicit(p, n);
                } else {
                    auto sol = solvers::solve_resolvent(p, n, {s.tol, s.j_max});
                    out.x = std::move(sol.x);
                    out.used_series = true;
                    out.levels = sol.levels;
                    out.last_term = sol.last_term;
                }
            }
            out.method = method;
            return out;
        }
        case Kind::right_rl_ivp: {
            solvers::RightTerminalIVP p;
            p.alpha = s.alpha;
            p.a = s.a;
            p.b = s.b;
            p.x_b = s.x_b;
            p.g = fn_of_t(s.g);
            auto sol = solvers::solve_right_series(p, n, {s.tol, s.j_max});
            out.x = std::move(sol.x);
            out.method = "right_series";
            out.used_series = true;
            out.levels = sol.levels;
            out.last_term = sol.last_term;
            const auto w = frac_ops::right_frac_integral(out.x, 1.0 - s.alpha);
            out.terminal_gap = std::abs(w.values[w.size() - 1] - s.x_b);
            return out;
        }
        case Kind::nonlinear_ivp: {
            solvers::NonlinearIVP p;
            p.alpha = s.alpha;
            p.a = s.a;
            p.b = s.b;
            p.x_a = s.x_a;
            const expr::Expression ff = s.f;
            p.f = [ff](double t, double x) { return ff.evaluate({.t = t, .x = x}); };
            out.x = solvers::predictor_corrector(p, n);
            out.method = "pc";
            return out;
        }
        default:
            throw SpecError(std::string("kind ") + to_string(s.kind) +
                            " does not describe a trajectory solve");
    }
}

ReportRun run_check_sign(const ProblemSpec& s, std::size_t n_override) {
    ReportRun rr;
    rr.report = report_shell(s);
    Json checks = Json::array();

    switch (s.kind) {
        case Kind::caputo_ivp:
        case Kind::right_rl_ivp: {
            auto run = run_solve(s, n_override);
            // The theorems guarantee a fixed sign, inherited from the datum;
            // normalize so one positivity check covers both orientations.
            const double datum = s.kind == Kind::caputo_ivp ? s.x_a : s.x_b;
            GridFunction x = run.x;
            if (datum < 0.0)
                for (double& v : x.values) v = -v;
            auto rep = sign_analysis::check_positive(x);
            if (datum < 0.0)
                rep.note = rep.note.empty() ? "checked on -x (negative datum)"
                                            : rep.note;
            checks.push_back(sign_json("fixed_sign", rep));
            rr.pass = rep.verdict != sign_analysis::Verdict::violated;

            Json diag;
            diag["method"] = run.method;
            if (run.used_series) {
                diag["levels"] = run.levels;
                diag["last_term"] = run.last_term;
            }
            if (s.kind == Kind::right_rl_ivp) {
                const bool ok = run.terminal_gap <= 1e-6;
                checks.push_back(Json{{"name", "terminal_weight"},
                                      {"gap", run.terminal_gap},
                                      {"pass", ok}});
                rr.pass = rr.pass && ok;
            }
            rr.report["checks"] = std::move(checks);
            rr.report["diagnostics"] = std::move(diag);
            rr.report["pass"] = rr.pass;
            return rr;
        }
        case Kind::nonlinear_ivp: {
            const std::size_t n = n_override ? n_override : s.n;
            const expr::Expression ff = s.f;
            auto rep = sign_analysis::check_nonlinear_positive(
                [ff](double t, double x) { return ff.evaluate({.t = t, .x = x}); },
                s.x_a, s.alpha, UniformGrid(s.a, s.b, n));
            checks.push_back(sign_json("zero_barrier", rep));
            rr.pass = rep.verdict != sign_analysis::Verdict::violated;
            rr.report["checks"] = std::move(checks);
            rr.report["pass"] = rr.pass;
            return rr;
        }
        default:
            throw SpecError(std::string("check-sign does not apply to kind ") +
                            to_string(s.kind));
    }
}

ReportRun run_bernoulli(const ProblemSpec& s) {
    if (s.kind != Kind::bernoulli_sweep)
        throw SpecError("bernoulli needs a bernoulli_sweep spec");

    const auto rep = sign_analysis::bernoulli_sweep(s.alphas, s.lambdas, s.ts);
    ReportRun rr;
    rr.pass = rep.worst_margin >= -1e-10;
    rr.report = report_shell(s);
    rr.report["worst_margin"] = rep.worst_margin;
    rr.report["at"] = Json{{"alpha", rep.alpha}, {"lambda", rep.lambda}, {"t", rep.t}};
    rr.report["evaluated"] = rep.evaluated;
    rr.report["overflowed"] = rep.overflowed;
    rr.report["pass"] = rr.pass;
    return rr;
}

ReportRun run_herglotz_verify(const ProblemSpec& s, std::size_t n_override) {
    if (s.kind != Kind::herglotz)
        throw SpecError("herglotz verify needs a herglotz spec");
    herglotz::validate_partials(s.hg);

    const std::size_t n = n_override ? n_override : s.n;
    const auto cand = initial_candidate(s, UniformGrid(s.a, s.b, n));

    ReportRun rr;
    rr.report = report_shell(s);
    rr.report["n"] = n;
    append_verification(s, cand, s.el_tol.value_or(5e-3), true, rr.report, rr.pass);
    rr.report["pass"] = rr.pass;
    return rr;
}

OptimizeRun run_herglotz_optimize(const ProblemSpec& s, std::size_t n_override) {
    if (s.kind != Kind::herglotz)
        throw SpecError("herglotz optimize needs a herglotz spec");
    herglotz::validate_partials(s.hg);

    const std::size_t n = n_override ? n_override : s.n;
    const UniformGrid grid(s.a, s.b, n);
    GridFunction u0 = s.u_init.empty() ? GridFunction(grid)
                                       : GridFunction::sample(grid, fn_of_t(s.u_init));

    herglotz::MinimizeOptions opts;
    opts.gtol = s.gtol;
    opts.max_iterations = s.max_iterations;
    auto res = herglotz::direct_minimize(s.hg, u0, opts);

    OptimizeRun orr;
    orr.report = report_shell(s);
    orr.report["n"] = n;
    orr.report["optimizer"] = Json{{"iterations", res.iterations},
                                   {"converged", res.converged},
                                   {"grad_norm", res.grad_norm}};
    if (!res.note.empty()) orr.report["optimizer"]["note"] = res.note;

    // The descent result carries discretization noise the EL-exact
    // candidates do not, hence the looser default residual gate.
    append_verification(s, res.candidate, s.el_tol.value_or(5e-2), false,
                        orr.report, orr.pass);
    orr.report["pass"] = orr.pass;
    orr.candidate = std::move(res.candidate);
    return orr;
}

std::string to_shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

} // namespace fracsign::spec
