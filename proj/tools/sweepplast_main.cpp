// sweepplast command-line front end.
//
// Exit codes: 0 success, 2 parse or validation failure, 3 safe-load violation,
// 4 regularity lost, 1 internal failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "sweepplast/errors.hpp"
#include "sweepplast/runner.hpp"

namespace fs = std::filesystem;
using namespace sweepplast;

namespace {

constexpr int kParse = 2, kSafeLoad = 3, kRegularity = 4;

struct Flags {
    std::string scenario;
    double dt = -1.0, t_end = -1.0, tol = -1.0;
    std::string mesh;
    std::string out = ".";
    std::string format = "csv";
};

std::vector<int> parse_meshes(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("--mesh: bad entry '" + tok + "'");
        }
        if (used != tok.size() || v < 2) throw ParseError("--mesh: bad entry '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

struct Context {
    Scenario sc;
    double dt, t_end;
    std::vector<int> meshes;
    fs::path out;
};

Context context(const Flags& f) {
    Context c;
    c.sc = load_scenario(f.scenario);
    c.dt = f.dt > 0 ? f.dt : c.sc.dt;
    c.t_end = f.t_end > 0 ? f.t_end : c.sc.t_end;
    c.meshes = f.mesh.empty() ? c.sc.meshes : parse_meshes(f.mesh);
    c.out = f.out;
    fs::create_directories(c.out);
    return c;
}

std::ofstream open_out(const Context& c, const std::string& suffix) {
    const fs::path p = c.out / (c.sc.name + suffix);
    std::ofstream os(p);
    if (!os) throw ParseError("cannot write " + p.string());
    std::cout << "wrote " << p.string() << '\n';
    return os;
}

int solve_elastic(const Flags& f) {
    auto c = context(f);
    auto p = assemble_problem(c.sc, c.meshes.size() == 1 ? c.meshes[0] : 0);
    const auto grid = time_grid(p, c.t_end, c.dt);
    std::cout << "kinematic class: " << to_string(p.dec.kinematic_class) << ", dim U = " << p.dec.basis_U.cols()
              << ", dim V = " << p.dec.basis_V.cols() << '\n';
    auto os = open_out(c, "_elastic.csv");
    write_elastic_csv(os, p, grid);
    return 0;
}

int solve_sweeping_cmd(const Flags& f) {
    auto c = context(f);
    auto p = assemble_problem(c.sc, c.meshes.size() == 1 ? c.meshes[0] : 0);
    auto tr = solve_sweeping(p, time_grid(p, c.t_end, c.dt));
    write_sweep_report(std::cout, p, tr);
    if (f.format == "svg") {
        auto os = open_out(c, "_trajectory.svg");
        write_svg(os, p, tr);
    } else {
        auto os = open_out(c, "_trajectory.csv");
        write_csv(os, tr);
    }
    return 0;
}

int write_study(const Context& c, const RefinementStudy& st) {
    std::cout << "N,h,max_omega,concentration,feasible\n";
    for (const auto& r : st.rows)
        std::cout << r.N << ',' << r.h << ',' << r.max_omega << ',' << r.concentration << ',' << r.feasible << '\n';
    std::cout << "exponent p = " << st.exponent << (st.regularity_lost ? "  regularity lost" : "") << '\n';
    auto os = open_out(c, "_refine.csv");
    write_csv(os, st);
    return st.regularity_lost ? kRegularity : 0;
}

int recover_strain_cmd(const Flags& f) {
    auto c = context(f);
    auto p = assemble_problem(c.sc);
    auto tr = solve_sweeping(p, time_grid(p, c.t_end, c.dt));
    auto rec = solve_strain(p, tr, f.tol > 0 ? f.tol : 1e-9);
    {
        auto os = open_out(c, "_strain.csv");
        write_csv(os, rec);
    }
    std::cout << "max |omega|_inf = " << rec.max_omega << '\n';
    if (!rec.all_feasible()) {
        std::cout << "strain-rate inclusion has no solution at some step: regularity lost\n";
        return kRegularity;
    }
    if (c.sc.model == ModelKind::Rod && c.meshes.size() >= 2)
        return write_study(c, refine_study(c.sc, c.meshes, c.t_end, c.dt));
    return 0;
}

int refine_cmd(const Flags& f) {
    auto c = context(f);
    if (c.meshes.size() < 2) throw ParseError("refine-study needs at least two meshes");
    return write_study(c, refine_study(c.sc, c.meshes, c.t_end, c.dt));
}

int check_cq_cmd(const Flags& f) {
    auto c = context(f);
    auto p = assemble_problem(c.sc, c.meshes.size() == 1 ? c.meshes[0] : 0);
    const double t = c.sc.cq_time >= 0 ? c.sc.cq_time : c.t_end;
    const double tol = f.tol > 0 ? f.tol : 1e-7;
    auto v = check_cq(p, t, tol);
    std::optional<SafeLoadResult> safe;
    if (!p.hardened) safe = safe_load_check(p.moving_set(), t);
    std::ostringstream report;
    report << "constraint qualifications at t = " << t << '\n';
    write_cq_report(report, v, safe ? &*safe : nullptr);
    std::cout << report.str();
    auto os = open_out(c, "_cq.txt");
    os << report.str();
    return safe && safe->status == SafeLoadStatus::Violated ? kSafeLoad : 0;
}

int plot_cmd(const Flags& f) {
    auto c = context(f);
    auto p = assemble_problem(c.sc, c.meshes.size() == 1 ? c.meshes[0] : 0);
    auto tr = solve_sweeping(p, time_grid(p, c.t_end, c.dt));
    auto os = open_out(c, "_plot.svg");
    write_svg(os, p, tr);
    return 0;
}

// Every artifact listed in the scenario; elastic, trajectory and strain when none are.
int run_cmd(const Flags& f) {
    auto c = context(f);
    std::vector<std::string> wanted = c.sc.artifacts;
    if (wanted.empty()) wanted = {"elastic", "trajectory", "strain"};
    for (const auto& a : wanted)
        if (a != "elastic" && a != "trajectory" && a != "strain" && a != "cq" && a != "plot" && a != "refine")
            throw ParseError("unknown artifact '" + a + "'");
    auto wants = [&](const char* a) { return std::find(wanted.begin(), wanted.end(), a) != wanted.end(); };

    auto p = assemble_problem(c.sc, c.meshes.size() == 1 ? c.meshes[0] : 0);
    const auto grid = time_grid(p, c.t_end, c.dt);
    if (wants("elastic")) {
        auto os = open_out(c, "_elastic.csv");
        write_elastic_csv(os, p, grid);
    }
    int code = 0;
    if (wants("cq")) {
        const double t = c.sc.cq_time >= 0 ? c.sc.cq_time : c.t_end;
        auto v = check_cq(p, t, f.tol > 0 ? f.tol : 1e-7);
        std::optional<SafeLoadResult> safe;
        if (!p.hardened) safe = safe_load_check(p.moving_set(), t);
        auto os = open_out(c, "_cq.txt");
        os << "constraint qualifications at t = " << t << '\n';
        write_cq_report(os, v, safe ? &*safe : nullptr);
        if (safe && safe->status == SafeLoadStatus::Violated) return kSafeLoad;
    }
    auto tr = solve_sweeping(p, grid);
    write_sweep_report(std::cout, p, tr);
    if (wants("trajectory")) {
        auto os = open_out(c, "_trajectory.csv");
        write_csv(os, tr);
    }
    if (wants("plot")) {
        auto os = open_out(c, "_plot.svg");
        write_svg(os, p, tr);
    }
    if (wants("strain")) {
        auto rec = solve_strain(p, tr, f.tol > 0 ? f.tol : 1e-9);
        auto os = open_out(c, "_strain.csv");
        write_csv(os, rec);
        if (!rec.all_feasible()) code = kRegularity;
    }
    if (wants("refine")) {
        if (c.meshes.size() < 2) throw ParseError("the refine artifact needs at least two meshes");
        code = std::max(code, write_study(c, refine_study(c.sc, c.meshes, c.t_end, c.dt)));
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::warn);
    CLI::App app{"Quasi-static elastoplasticity through the sweeping process"};
    app.require_subcommand(1);
    Flags flags;
    int (*handler)(const Flags&) = nullptr;

    auto add = [&](const char* name, const char* help, int (*fn)(const Flags&)) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("scenario", flags.scenario, "scenario file (.scn)")->required();
        sub->add_option("--dt", flags.dt, "time step (overrides the scenario)");
        sub->add_option("--t-end", flags.t_end, "final time (overrides the scenario)");
        sub->add_option("--mesh", flags.mesh, "element count(s), comma separated");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--format", flags.format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
        sub->add_option("--tol", flags.tol, "tolerance for feasibility tests");
        sub->callback([&handler, fn] { handler = fn; });
    };
    add("run", "every artifact the scenario requests", run_cmd);
    add("solve-elastic", "elastic stress path", solve_elastic);
    add("solve-sweeping", "stress trajectory by catch-up", solve_sweeping_cmd);
    add("recover-strain", "strain rates along the trajectory", recover_strain_cmd);
    add("check-cq", "constraint qualifications at one time", check_cq_cmd);
    add("refine-study", "strain-rate growth under mesh refinement", refine_cmd);
    add("plot", "SVG of the stress history", plot_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kParse;
    }
    try {
        return handler(flags);
    } catch (const SafeLoadViolation& e) {
        std::cerr << "safe-load violation at t = " << e.time << ": " << e.what() << '\n';
        return kSafeLoad;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    }
}
