// bjlab: command-line front end for the bouncing Jacobi field / Jacobi-Toda / Allen-Cahn lab.

#include "bjlab/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace bjlab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitUsage = 64;

/// Bad flags or input files.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string profile_arg;
    Json profile;
    int n = 3;
    double eps = 0.035;
    std::vector<double> sweep;
    std::string grid = "512xauto";
    Index ns = 512;
    Index nt = 0;  // 0: proportional to 1 / eps
    double tau = 0.5;
    Index jt_grid = 0;
    Index geodesic_grid = 512;
    int sweep_seeds = 0;
    std::uint64_t seed = 0;
    bool skip_index = false;
    std::string out;
    bool svg = false;
    std::string in;
    int threads = 1;

    std::vector<double> epsilons() const { return sweep.empty() ? std::vector<double>{eps} : sweep; }

    Json to_json() const {
        return {{"subcommand", subcommand}, {"profile", profile},         {"n", n},
                {"epsilons", epsilons()},   {"grid", {ns, nt}},            {"tau", tau},
                {"jt_grid", jt_grid},       {"geodesic_grid", geodesic_grid}, {"sweep_seeds", sweep_seeds},
                {"seed", seed},             {"skip_index", skip_index},    {"svg", svg},
                {"in", in},                 {"threads", threads}};
    }
};

struct Run {
    RunConfig cfg;
    CurvatureProfile profile;
    Json results = Json::object();
    Json assertions = Json::array();
    std::vector<Plot> plots;
    std::vector<std::pair<std::string, std::string>> files;  // name, contents

    void check(const std::string& name, bool ok, const std::string& detail) {
        assertions.push_back({{"name", name}, {"passed", ok}, {"detail", detail}});
        if (!ok) std::fprintf(stderr, "assertion failed: %s (%s)\n", name.c_str(), detail.c_str());
    }
    bool failed() const {
        return std::any_of(assertions.begin(), assertions.end(), [](const Json& a) { return !a["passed"].get<bool>(); });
    }
};

std::string eps_tag(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "eps%g", eps);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void log(const char* what, double seconds) { std::fprintf(stderr, "[bjlab] %s (%.2f s)\n", what, seconds); }

template <typename F>
auto timed(const std::string& what, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    log(what.c_str(), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return r;
}

Json load_json_arg(const std::string& arg) {
    try {
        if (!arg.empty() && arg.front() == '{') return Json::parse(arg);
        std::ifstream f(arg);
        if (!f) throw ConfigError("cannot open " + arg);
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

void parse_grid(RunConfig& cfg) {
    const auto x = cfg.grid.find('x');
    try {
        const std::string a = cfg.grid.substr(0, x);
        const std::string b = x == std::string::npos ? "auto" : cfg.grid.substr(x + 1);
        cfg.ns = std::stol(a);
        cfg.nt = b == "auto" ? 0 : std::stol(b);
    } catch (const std::exception&) {
        throw ConfigError("--grid expects NsxNt, e.g. 512x192 or 512xauto");
    }
    if (cfg.ns < 16 || cfg.nt < 0 || (cfg.nt > 0 && cfg.nt < 8)) throw ConfigError("--grid too small");
}

Plot profile_plot(const CurvatureProfile& profile) {
    const Index m = 512;
    Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(m + 1, 0.0, profile.length());
    Eigen::VectorXd k = s.unaryExpr([&](double x) { return profile(x); });
    return {"curvature", "Gauss curvature along the geodesic", "s", "K", {{"K", downsample(s), downsample(k)}}};
}

Plot field_plot(const CurvatureProfile& profile, const BouncingField& f, const std::string& name) {
    auto [s, phi] = f.sample(profile, 512);
    return {name, "Bouncing Jacobi field, n = " + std::to_string(f.n()), "s", "Phi",
            {{"Phi", downsample(s), downsample(phi)}}};
}

void add_field_csv(Run& run, const BouncingField& f, const std::string& name) {
    auto [s, phi] = f.sample(run.profile, 1024);
    run.files.emplace_back(name + ".csv", csv_table({"s", "phi"}, {s, phi}));
}

// ---------------------------------------------------------------------------------------------

void cmd_constants(Run& run) {
    const auto& c = interaction_constants();
    run.results["interaction"] = to_json(c);
    run.results["correctors"] = to_json(timed("corrector integrals", [] { return corrector_integrals(); }));
    run.results["correctors"]["expected"] = {
        {"i_x", 4.0 * std::numbers::sqrt2 / 15.0}, {"i_y", -std::numbers::sqrt2 / 3.0}, {"i_z", 8.0 * std::numbers::sqrt2}};
    run.results["linearized_toda"] = to_json(linearized_toda_checks());
    Json alpha = Json::object();
    for (double e : run.cfg.epsilons()) alpha[eps_tag(e)] = lambert_alpha(e);
    run.results["alpha"] = alpha;

    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(401, -8.0, 8.0);
    Eigen::VectorXd w = x.unaryExpr([](double v) { return heteroclinic(v).w; });
    Eigen::VectorXd wp = x.unaryExpr([](double v) { return heteroclinic(v).wp; });
    run.plots.push_back({"heteroclinic", "Heteroclinic W = tanh(x / sqrt 2)", "x", "value",
                         {{"W", downsample(x), downsample(w)}, {"W'", downsample(x), downsample(wp)}}});
}

void cmd_geodesic_spectrum(Run& run) {
    GeodesicIndexOptions opts;
    opts.grid = run.cfg.geodesic_grid;
    run.results["geodesic"] = to_json(geodesic_index(run.profile, opts));
    run.plots.push_back(profile_plot(run.profile));
}

void cmd_precheck(Run& run) {
    const Verdict v = existence_precheck(run.profile, run.cfg.n);
    const double l2 = run.profile.length() * run.profile.length();
    run.results["verdict"] = to_string(v);
    run.results["pi2_n2"] = std::numbers::pi * std::numbers::pi * run.cfg.n * run.cfg.n;
    run.results["l2_sup_k"] = l2 * run.profile.sup();
    run.results["l2_inf_k"] = l2 * run.profile.inf();
}

BouncingField require_field(Run& run) {
    const Verdict v = existence_precheck(run.profile, run.cfg.n);
    if (v == Verdict::CannotExist)
        throw SolverError("no bouncing field with n = " + std::to_string(run.cfg.n) + " on this geodesic (precheck)");
    return timed("find_bjf", [&] { return find_bjf(run.profile, run.cfg.n); });
}

void cmd_find_bjf(Run& run) {
    run.results["precheck"] = to_string(existence_precheck(run.profile, run.cfg.n));
    if (run.cfg.sweep_seeds > 0) {
        auto fields = timed("sweep_bjf", [&] {
            return sweep_bjf(run.profile, run.cfg.n, run.cfg.sweep_seeds, run.cfg.seed);
        });
        if (fields.empty()) throw SolverError("find-bjf: no critical point reached from any seed");
        Json arr = Json::array();
        for (std::size_t k = 0; k < fields.size(); ++k) {
            arr.push_back(to_json(fields[k]));
            add_field_csv(run, fields[k], "phi_" + std::to_string(k));
            run.plots.push_back(field_plot(run.profile, fields[k], "phi_" + std::to_string(k)));
        }
        run.results["fields"] = arr;
        return;
    }
    BouncingField f = require_field(run);
    run.results["field"] = to_json(f);
    add_field_csv(run, f, "phi");
    run.plots.push_back(field_plot(run.profile, f, "phi"));
}

struct FieldIndices {
    BouncingField field;
    IndexNullity bjf;
    SpectrumReport geodesic;
};

FieldIndices field_indices(Run& run) {
    FieldIndices fi{require_field(run), {}, {}};
    fi.bjf = timed("bjf_index_nullity", [&] { return bjf_index_nullity(run.profile, fi.field, true); });
    GeodesicIndexOptions gopts;
    gopts.grid = run.cfg.geodesic_grid;
    fi.geodesic = geodesic_index(run.profile, gopts);
    run.results["field"] = to_json(fi.field);
    run.results["field"]["hessian"] = to_json(fi.bjf);
    run.results["geodesic"] = to_json(fi.geodesic);
    if (fi.bjf.q_form)
        run.check("hessian index equals Q-form index", fi.bjf.q_form->neg == fi.bjf.index,
                  "Hessian " + std::to_string(fi.bjf.index) + ", Q " + std::to_string(fi.bjf.q_form->neg));
    return fi;
}

void cmd_bjf_index(Run& run) {
    FieldIndices fi = field_indices(run);
    add_field_csv(run, fi.field, "phi");
    run.plots.push_back(field_plot(run.profile, fi.field, "phi"));
}

JacobiTodaOptions jt_options(const RunConfig& cfg) {
    JacobiTodaOptions o;
    o.grid = cfg.jt_grid;
    return o;
}

Json jt_entry(Run& run, const JacobiTodaSolution& sol, const std::string& tag) {
    Json j = to_json(sol);
    j["outer_deviation"] = outer_deviation(run.profile, sol);
    j["glue_separation"] = glue_separation(sol.field, sol.epsilon);

    const Index n = sol.grid();
    Eigen::VectorXd s(n), res = jt_residual(run.profile, sol.epsilon, sol.psi);
    for (Index i = 0; i < n; ++i) s(i) = sol.s(i);
    run.files.emplace_back("jt_" + tag + ".csv", csv_table({"s", "psi", "residual"}, {s, sol.psi, res}));

    Eigen::VectorXd scaled = sol.psi / sol.alpha;
    Eigen::VectorXd phi = s.unaryExpr([&](double x) { return sol.field.phi(run.profile, x); });
    run.plots.push_back({"jt_" + tag, "Jacobi-Toda solution, eps = " + num(sol.epsilon), "s", "value",
                         {{"Psi/alpha", downsample(s), downsample(scaled)}, {"Phi", downsample(s), downsample(phi)}}});
    return j;
}

void cmd_solve_jt(Run& run, bool spectrum) {
    FieldIndices fi;
    if (spectrum) fi = field_indices(run);
    else {
        fi.field = require_field(run);
        run.results["field"] = to_json(fi.field);
    }
    Json sweep = Json::array();
    for (double eps : run.cfg.epsilons()) {
        const std::string tag = eps_tag(eps);
        auto sol = timed("solve_jacobi_toda " + tag, [&] {
            return solve_jacobi_toda(run.profile, fi.field, eps, std::nullopt, jt_options(run.cfg));
        });
        Json j = jt_entry(run, sol, tag);
        if (spectrum) {
            auto sp = timed("jt_linearized_spectrum " + tag, [&] { return jt_linearized_spectrum(run.profile, sol); });
            j["spectrum"] = to_json(sp);
            if (fi.bjf.nullity == 0) {
                const Index want = run.cfg.n + fi.bjf.index;
                run.check("jt index " + tag, sp.index == want && sp.nullity == 0,
                          "index " + std::to_string(sp.index) + ", nullity " + std::to_string(sp.nullity) +
                              ", expected " + std::to_string(want));
            }
        }
        sweep.push_back(j);
    }
    run.results["jacobi_toda"] = sweep;
}

struct AcRun {
    ACSolution solution;
    std::optional<ACSpectrum> spectrum;
    Json json;
};

AcRun ac_at(Run& run, const JacobiTodaSolution& jt, bool want_index) {
    const std::string tag = eps_tag(jt.epsilon);
    const Index nt = run.cfg.nt > 0 ? run.cfg.nt : ac_default_nt(jt.epsilon);
    StripGrid grid(TubeMetric(run.profile, run.cfg.tau), run.cfg.ns, nt);
    ACApproximation approx = build_approximation(jt, grid);
    AcRun r{timed("solve_allen_cahn " + tag, [&] { return solve_allen_cahn(approx); }), std::nullopt, {}};
    r.json = to_json(r.solution);
    if (want_index) {
        r.spectrum = timed("ac_morse_index " + tag, [&] { return ac_morse_index(r.solution); });
        r.json["spectrum"] = to_json(*r.spectrum);
    }

    const auto& z = r.solution.zeros;
    const double eps = jt.epsilon;
    Eigen::VectorXd guide = eps * r.solution.psi / std::numbers::sqrt2;
    Eigen::VectorXd neg_guide = -guide;
    run.plots.push_back({"zeroset_" + tag, "Allen-Cahn zero set, eps = " + num(eps), "s", "t",
                         {{"t+", downsample(z.s), downsample(z.t_plus)},
                          {"t-", downsample(z.s), downsample(z.t_minus)},
                          {"+eps Psi/sqrt2", downsample(z.s), downsample(guide)},
                          {"-eps Psi/sqrt2", downsample(z.s), downsample(neg_guide)}}});
    run.files.emplace_back("zeroset_" + tag + ".csv",
                           csv_table({"s", "t_minus", "t_plus", "eps_psi_over_sqrt2"}, {z.s, z.t_minus, z.t_plus, guide}));

    const StripGrid& g = r.solution.grid;
    const Index rows = g.ns() * (g.nt() + 1);
    Eigen::VectorXd cs(rows), ct(rows), cu(rows);
    for (Index i = 0, k = 0; i < g.ns(); ++i)
        for (Index j = 0; j <= g.nt(); ++j, ++k) {
            cs(k) = g.s(i);
            ct(k) = g.t(j);
            cu(k) = r.solution.u(i, j);
        }
    run.files.emplace_back("ac_" + tag + ".csv", csv_table({"s", "t", "u"}, {cs, ct, cu}));
    return r;
}

void cmd_solve_ac(Run& run) {
    BouncingField field = require_field(run);
    run.results["field"] = to_json(field);
    Json sweep = Json::array();
    for (double eps : run.cfg.epsilons()) {
        auto jt = timed("solve_jacobi_toda " + eps_tag(eps), [&] {
            return solve_jacobi_toda(run.profile, field, eps, std::nullopt, jt_options(run.cfg));
        });
        AcRun r = ac_at(run, jt, !run.cfg.skip_index);
        sweep.push_back(r.json);
    }
    run.results["allen_cahn"] = sweep;
}

void cmd_pipeline(Run& run) {
    run.results["precheck"] = to_string(existence_precheck(run.profile, run.cfg.n));
    FieldIndices fi = field_indices(run);
    const Index ind_gamma = fi.geodesic.neg_count;
    run.check("2n >= Ind(gamma)", 2 * run.cfg.n >= ind_gamma,
              "n = " + std::to_string(run.cfg.n) + ", Ind(gamma) = " + std::to_string(ind_gamma));
    if (fi.bjf.nullity != 0)
        throw SolverError("pipeline: the bouncing field is degenerate (nullity " + std::to_string(fi.bjf.nullity) +
                          "); the index identities need a non-degenerate field");

    auto audit = superadditivity_audit(run.profile, 100, run.cfg.seed);
    run.results["superadditivity"] = {{"tested", audit.tested}, {"violations", audit.violations},
                                      {"min_margin", audit.min_margin}};
    run.check("superadditivity of H", audit.tested == 100 && audit.violations == 0,
              std::to_string(audit.violations) + " violations in " + std::to_string(audit.tested) + " triples");

    add_field_csv(run, fi.field, "phi");
    run.plots.push_back(field_plot(run.profile, fi.field, "phi"));
    run.plots.push_back(profile_plot(run.profile));

    Json sweep = Json::array();
    for (double eps : run.cfg.epsilons()) {
        const std::string tag = eps_tag(eps);
        auto jt = timed("solve_jacobi_toda " + tag, [&] {
            return solve_jacobi_toda(run.profile, fi.field, eps, std::nullopt, jt_options(run.cfg));
        });
        Json entry = {{"epsilon", eps}};
        entry["jacobi_toda"] = jt_entry(run, jt, tag);
        auto sp = timed("jt_linearized_spectrum " + tag, [&] { return jt_linearized_spectrum(run.profile, jt); });
        entry["jacobi_toda"]["spectrum"] = to_json(sp);
        const Index want_jt = run.cfg.n + fi.bjf.index;
        run.check("jt index " + tag, sp.index == want_jt && sp.nullity == 0,
                  "index " + std::to_string(sp.index) + ", nullity " + std::to_string(sp.nullity) + ", n + Ind(Phi) = " +
                      std::to_string(want_jt));

        AcRun ac = ac_at(run, jt, true);
        entry["allen_cahn"] = ac.json;
        const Index want_ac = sp.index + ind_gamma;
        run.check("ac index " + tag, ac.spectrum->index == want_ac && !ac.spectrum->nullity_flag,
                  "index " + std::to_string(ac.spectrum->index) + ", jt index + Ind(gamma) = " +
                      std::to_string(want_ac) + (ac.spectrum->nullity_flag ? ", nullity flag set" : ""));
        sweep.push_back(entry);
    }
    run.results["sweep"] = sweep;
}

void cmd_report(Run& run) {
    if (run.cfg.in.empty()) throw ConfigError("report: --in FILE is required");
    Json doc = load_json_arg(run.cfg.in);
    if (!doc.contains("plots") || !doc["plots"].is_array()) throw ConfigError("report: input has no \"plots\" array");
    if (run.cfg.out.empty()) run.cfg.out = fs::path(run.cfg.in).parent_path().string();
    if (run.cfg.out.empty()) run.cfg.out = ".";
    Json rendered = Json::array();
    try {
        for (const auto& p : doc["plots"]) {
            Plot plot = plot_from_json(p);
            run.files.emplace_back(plot.name + ".svg", render_svg(plot));
            bool shared = std::all_of(plot.series.begin(), plot.series.end(),
                                      [&](const Series& s) { return s.x == plot.series.front().x; });
            if (shared) run.files.emplace_back(plot.name + ".csv", render_csv(plot));
            rendered.push_back(plot.name);
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    run.results["source"] = {{"version", doc.value("version", "")}, {"config", doc.value("config", Json::object())}};
    run.results["rendered"] = rendered;
}

// ---------------------------------------------------------------------------------------------

void finish(Run& run) {
    Json report = {{"version", kToolVersion}, {"config", run.cfg.to_json()}, {"results", run.results}};
    if (!run.assertions.empty()) report["assertions"] = run.assertions;
    if (run.cfg.subcommand != "report") {
        Json plots = Json::array();
        for (const auto& p : run.plots) plots.push_back(plot_to_json(p));
        report["plots"] = plots;
    }
    const std::string text = dump_json(report);

    if (!run.cfg.out.empty()) {
        fs::create_directories(run.cfg.out);
        const fs::path dir(run.cfg.out);
        if (run.cfg.subcommand != "report") {
            write_text((dir / (run.cfg.subcommand + ".json")).string(), text);
            for (const auto& [name, body] : run.files) write_text((dir / name).string(), body);
            if (run.cfg.svg)
                for (const auto& p : run.plots) write_text((dir / (p.name + ".svg")).string(), render_svg(p));
        } else {
            for (const auto& [name, body] : run.files) write_text((dir / name).string(), body);
        }
    }
    std::fwrite(text.data(), 1, text.size(), stdout);
}

int threads_from_env() {
    const char* env = std::getenv("BOUNCING_LAB_THREADS");
    if (env == nullptr) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("BOUNCING_LAB_THREADS must be a positive integer");
    return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bouncing Jacobi fields, the Jacobi-Toda equation and Allen-Cahn layers.\n"
                 "Reports are JSON on stdout; with --out DIR they are also written to DIR with CSV samples "
                 "(and SVG plots with --svg)."};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--profile", cfg.profile_arg,
                   "curvature profile, inline JSON or a file path; {\"length\": L, \"fourier\": {\"a0\", \"ak\", "
                   "\"bk\"}} or {\"length\": L, \"constant\": k}. Default: K = 1 + 0.2 cos s, L = 2 pi");
    app.add_option("--n", cfg.n, "number of bounce points")->capture_default_str()->check(CLI::Range(1, 64));
    app.add_option("--eps", cfg.eps, "epsilon")->capture_default_str()->check(CLI::Range(1e-6, 0.5));
    app.add_option("--sweep", cfg.sweep, "comma-separated epsilons, overrides --eps")->delimiter(',');
    app.add_option("--grid", cfg.grid, "Allen-Cahn grid NsxNt; Nt = auto scales as 1/eps (192 at eps = 0.05)")
        ->capture_default_str();
    app.add_option("--tau", cfg.tau, "tube half-width for Allen-Cahn")->capture_default_str();
    app.add_option("--jt-grid", cfg.jt_grid, "Jacobi-Toda grid size, 0 for automatic")->capture_default_str();
    app.add_option("--geodesic-grid", cfg.geodesic_grid, "grid for the geodesic Jacobi operator")->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--out", cfg.out, "output directory");
    app.add_flag("--svg", cfg.svg, "write SVG plots next to the report");

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"constants", "interaction constants, corrector identities and linearized Toda checks"},
        {"geodesic-spectrum", "index and nullity of the Jacobi operator of the geodesic"},
        {"precheck", "sufficient conditions for (non)existence of n-point bouncing fields"},
        {"find-bjf", "find a bouncing Jacobi field (or sweep random seeds)"},
        {"bjf-index", "index and nullity of a bouncing Jacobi field, cross-checked with the Q form"},
        {"solve-jt", "solve the Jacobi-Toda equation"},
        {"jt-spectrum", "solve the Jacobi-Toda equation and count negative eigenvalues of the linearization"},
        {"solve-ac", "two-layer Allen-Cahn solution on the tube"},
        {"pipeline", "end to end, asserting the index identities"},
        {"report", "re-render the plots stored in a JSON report as SVG and CSV"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        if (std::string(name) == "find-bjf")
            sub->add_option("--sweep-seeds", cfg.sweep_seeds, "random starts; 0 runs one search from uniform points");
        if (std::string(name) == "solve-ac") sub->add_flag("--skip-index", cfg.skip_index, "skip the Morse index");
        if (std::string(name) == "report") sub->add_option("--in", cfg.in, "JSON report to re-render")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    Run run;
    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        for (double e : cfg.sweep)
            if (!(e > 0.0 && e < 0.5)) throw ConfigError("--sweep values must lie in (0, 0.5)");
        parse_grid(cfg);
        cfg.threads = threads_from_env();
        Eigen::setNbThreads(cfg.threads);
        run.profile = cfg.profile_arg.empty() ? default_profile() : profile_from_json(load_json_arg(cfg.profile_arg));
        cfg.profile = profile_to_json(run.profile);
        run.cfg = cfg;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bjlab: %s\n", e.what());
        return kExitUsage;
    }

    try {
        const std::string& sc = run.cfg.subcommand;
        if (sc == "constants") cmd_constants(run);
        else if (sc == "geodesic-spectrum") cmd_geodesic_spectrum(run);
        else if (sc == "precheck") cmd_precheck(run);
        else if (sc == "find-bjf") cmd_find_bjf(run);
        else if (sc == "bjf-index") cmd_bjf_index(run);
        else if (sc == "solve-jt") cmd_solve_jt(run, false);
        else if (sc == "jt-spectrum") cmd_solve_jt(run, true);
        else if (sc == "solve-ac") cmd_solve_ac(run);
        else if (sc == "pipeline") cmd_pipeline(run);
        else if (sc == "report") cmd_report(run);
        finish(run);
    } catch (const ContinuationStall& e) {
        std::fprintf(stderr, "bjlab: %s\n", e.what());
        return kExitSolver;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "bjlab: %s\n", e.what());
        return kExitSolver;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "bjlab: %s\n", e.what());
        return kExitUsage;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "bjlab: invalid input: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bjlab: %s\n", e.what());
        return kExitSolver;
    }
    return run.failed() ? kExitAssertion : 0;
}
