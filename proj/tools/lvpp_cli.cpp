// lvpp: experiment driver. Writes CSV tables and VTK fields under --out.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <toml.hpp>

#include "lvpp/entropy.hpp"
#include "lvpp/error.hpp"
#include "lvpp/oracle.hpp"
#include "lvpp/problems.hpp"
#include "lvpp/schedules.hpp"
#include "lvpp/solver.hpp"
#include "lvpp/topopt.hpp"

#ifndef LVPP_GIT_HASH
#define LVPP_GIT_HASH "unknown"
#endif

namespace fs = std::filesystem;
using namespace lvpp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNonConvergence = 2;

struct ExperimentConfig {
    std::string problem = "biactive";
    std::vector<int> levels;
    std::string schedule;   // empty: per-problem default
    std::string alpha_rule; // topopt step rule
    double tol_exit = -1.0;
    double tol_newton = -1.0;
    double epsilon = -1.0;
    double theta = 0.5;
    double filter_radius = 0.02;
    double itol = 1e-2;
    double ntol = 1e-5;
    double rho = 10.0;
    int iterations = 2;
    int checkpoint = 0;
    bool lumped = false;
    bool traction = false;
    std::string out = "lvpp_out";
    std::string rates_case = "geo:2";
    int rates_k = 10;
    long seed = 0; // reserved
};

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void read_toml(const std::string& path, ExperimentConfig& c) {
    toml::table t;
    try {
        t = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "cannot parse " << path << ": " << e.description();
        throw ConfigError(os.str());
    }
    const std::map<std::string, int> known = {
        {"problem", 0}, {"levels", 0}, {"schedule", 0}, {"alpha_rule", 0}, {"tol_exit", 0},
        {"tol_newton", 0}, {"epsilon", 0}, {"theta", 0}, {"filter_radius", 0}, {"itol", 0},
        {"ntol", 0}, {"rho", 0}, {"iterations", 0}, {"checkpoint", 0}, {"lumped", 0},
        {"traction", 0}, {"out", 0}, {"case", 0}, {"k", 0}, {"seed", 0}};
    for (const auto& [key, node] : t) {
        (void)node;
        if (!known.count(std::string(key.str()))) throw ConfigError("unknown config key '" + std::string(key.str()) + "'");
    }
    auto num = [&](const char* key, double& dst) {
        if (auto v = t[key].value<double>()) dst = *v;
        else if (t.contains(key)) throw ConfigError(std::string("config key '") + key + "' must be a number");
    };
    auto integer = [&](const char* key, auto& dst) {
        if (auto v = t[key].value<int64_t>()) dst = static_cast<std::remove_reference_t<decltype(dst)>>(*v);
        else if (t.contains(key)) throw ConfigError(std::string("config key '") + key + "' must be an integer");
    };
    auto str = [&](const char* key, std::string& dst) {
        if (auto v = t[key].value<std::string>()) dst = *v;
        else if (t.contains(key)) throw ConfigError(std::string("config key '") + key + "' must be a string");
    };
    auto flag = [&](const char* key, bool& dst) {
        if (auto v = t[key].value<bool>()) dst = *v;
        else if (t.contains(key)) throw ConfigError(std::string("config key '") + key + "' must be a boolean");
    };
    str("problem", c.problem);
    str("schedule", c.schedule);
    str("alpha_rule", c.alpha_rule);
    str("out", c.out);
    str("case", c.rates_case);
    num("tol_exit", c.tol_exit);
    num("tol_newton", c.tol_newton);
    num("epsilon", c.epsilon);
    num("theta", c.theta);
    num("filter_radius", c.filter_radius);
    num("itol", c.itol);
    num("ntol", c.ntol);
    num("rho", c.rho);
    integer("iterations", c.iterations);
    integer("checkpoint", c.checkpoint);
    integer("k", c.rates_k);
    integer("seed", c.seed);
    flag("lumped", c.lumped);
    flag("traction", c.traction);
    if (t.contains("levels")) {
        c.levels.clear();
        if (auto v = t["levels"].value<int64_t>()) {
            c.levels.push_back(static_cast<int>(*v));
        } else if (auto* arr = t["levels"].as_array()) {
            for (const auto& e : *arr) {
                auto v = e.value<int64_t>();
                if (!v) throw ConfigError("config key 'levels' must hold integers");
                c.levels.push_back(static_cast<int>(*v));
            }
        } else {
            throw ConfigError("config key 'levels' must be an integer or an array");
        }
    }
}

// Flag values plus the options, so resolve() can tell which were given.
struct FlagSet {
    ExperimentConfig v;
    std::string config_path;
    std::vector<CLI::Option*> opts;
};

void add_common(CLI::App* sc, FlagSet& f) {
    auto& v = f.v;
    f.opts.push_back(sc->add_option("--problem", v.problem, "problem name"));
    f.opts.push_back(sc->add_option("--levels", v.levels, "refinement level(s)")->delimiter(','));
    f.opts.push_back(sc->add_option("--schedule", v.schedule,
                                    "step rule: fixed:A | geo:C[,r] | arith:C[:m] | fact:C | dexp:r,q | dexpc:r,q[,mu]"));
    f.opts.push_back(sc->add_option("--alpha-rule", v.alpha_rule, "step rule for topopt (default arith:25)"));
    f.opts.push_back(sc->add_option("--tol-exit", v.tol_exit, "outer stopping tolerance"));
    f.opts.push_back(sc->add_option("--tol-newton", v.tol_newton, "fixed inner Newton tolerance (default: adaptive)"));
    f.opts.push_back(sc->add_option("--epsilon", v.epsilon,
                                    "obstacle: Hessian regularization; advdiff: diffusion coefficient"));
    f.opts.push_back(sc->add_option("--theta", v.theta, "topopt volume fraction"));
    f.opts.push_back(sc->add_option("--filter-radius", v.filter_radius, "topopt Helmholtz filter radius"));
    f.opts.push_back(sc->add_option("--itol", v.itol, "topopt increment tolerance"));
    f.opts.push_back(sc->add_option("--ntol", v.ntol, "topopt eta tolerance"));
    f.opts.push_back(sc->add_option("--rho", v.rho, "advdiff latent damping"));
    f.opts.push_back(sc->add_option("--iterations", v.iterations, "advdiff proximal iterations"));
    f.opts.push_back(sc->add_option("--checkpoint", v.checkpoint, "topopt: density VTK every N iterations (0: final only)"));
    f.opts.push_back(sc->add_flag("--lumped", v.lumped, "use the lumped (P1, P1) pair"));
    f.opts.push_back(sc->add_flag("--traction", v.traction, "topopt: traction load on the right edge"));
    f.opts.push_back(sc->add_option("--out", v.out, "output directory"));
    f.opts.push_back(sc->add_option("--case", v.rates_case, "rates: schedule to tabulate"));
    f.opts.push_back(sc->add_option("--k", v.rates_k, "rates: number of steps"));
    f.opts.push_back(sc->add_option("--seed", v.seed, "reserved"));
    sc->add_option("--config", f.config_path, "TOML file; flags override its keys")->check(CLI::ExistingFile);
}

// File values first, then flags given on the command line.
ExperimentConfig resolve(const FlagSet& f) {
    if (f.config_path.empty()) return f.v;
    ExperimentConfig c;
    read_toml(f.config_path, c);
    const ExperimentConfig& v = f.v;
    auto given = [&](const char* name) {
        for (auto* o : f.opts)
            if (o->check_lname(name) && o->count() > 0) return true;
        return false;
    };
    if (given("problem")) c.problem = v.problem;
    if (given("levels")) c.levels = v.levels;
    if (given("schedule")) c.schedule = v.schedule;
    if (given("alpha-rule")) c.alpha_rule = v.alpha_rule;
    if (given("tol-exit")) c.tol_exit = v.tol_exit;
    if (given("tol-newton")) c.tol_newton = v.tol_newton;
    if (given("epsilon")) c.epsilon = v.epsilon;
    if (given("theta")) c.theta = v.theta;
    if (given("filter-radius")) c.filter_radius = v.filter_radius;
    if (given("itol")) c.itol = v.itol;
    if (given("ntol")) c.ntol = v.ntol;
    if (given("rho")) c.rho = v.rho;
    if (given("iterations")) c.iterations = v.iterations;
    if (given("checkpoint")) c.checkpoint = v.checkpoint;
    if (given("lumped")) c.lumped = v.lumped;
    if (given("traction")) c.traction = v.traction;
    if (given("out")) c.out = v.out;
    if (given("case")) c.rates_case = v.rates_case;
    if (given("k")) c.rates_k = v.rates_k;
    if (given("seed")) c.seed = v.seed;
    return c;
}

std::string default_schedule(const std::string& problem) {
    if (problem == "spherical" || problem == "constant") return "fixed:1";
    if (problem == "kkt" || problem == "strict") return "geo:1,1.1";
    if (problem == "nonsmooth") return "geo:1,1.1";
    if (problem == "strip") return "geo:1,1.2";
    return "dexp:1.5,1.5";
}

void write_header(std::ostream& os, const std::string& command, const std::vector<std::pair<std::string, std::string>>& echo) {
    os << "# lvpp " << command << "\n";
    os << "# git " << LVPP_GIT_HASH << "\n";
    for (const auto& [k, v] : echo) os << "# " << k << " = " << v << "\n";
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    return os;
}

int thread_cap() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* e = std::getenv("LVPP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(e, &end, 10);
        if (end == e || *end != '\0' || v < 1) throw ConfigError("LVPP_THREADS must be a positive integer");
        n = static_cast<int>(v);
    }
    return std::max(n, 1);
}

// Runs job(i) for each level; console text is buffered per level and printed in order.
template <class Job>
void for_each_level(std::size_t count, Job job) {
    std::vector<std::string> logs(count);
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(thread_cap()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            std::ostringstream log;
            try {
                job(i, log);
            } catch (...) {
                errors[i] = std::current_exception();
            }
            logs[i] = log.str();
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::cout << logs[i];
        if (errors[i]) std::rethrow_exception(errors[i]);
    }
    std::cout.flush();
}

// ---- obstacle ----

int run_obstacle(const ExperimentConfig& cfg) {
    const ObstacleProblem problem = obstacle_problem_by_name(cfg.problem);
    const std::string schedule_text = cfg.schedule.empty() ? default_schedule(cfg.problem) : cfg.schedule;
    StepSchedule::parse(schedule_text); // validate before any work
    const std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{4} : cfg.levels;
    ObstacleOptions opts;
    opts.pair = cfg.lumped ? ElementPair::LumpedP1 : ElementPair::BubbleP0;
    opts.tol_exit = cfg.tol_exit > 0 ? cfg.tol_exit : (cfg.problem == "spherical" ? 1e-6 : 1e-10);
    if (cfg.epsilon > 0) opts.epsilon = cfg.epsilon;
    opts.tol_newton_fixed = cfg.tol_newton;
    fs::create_directories(cfg.out);

    bool all_converged = true;
    std::vector<char> converged(levels.size(), 1);
    for_each_level(levels.size(), [&](std::size_t i, std::ostream& log) {
        const int level = levels[i];
        const std::string stem = "obstacle_" + cfg.problem + "_L" + std::to_string(level);
        const Mesh mesh = make_domain_mesh(problem.domain, level);
        ObstacleSolver solver(mesh, problem, opts);
        StepSchedule schedule = StepSchedule::parse(schedule_text);
        SolveReport rep;
        try {
            rep = solver.lvpp_obstacle(schedule);
        } catch (const NonConvergence& e) {
            log << "level " << level << ": " << e.what() << "\n";
            converged[i] = 0;
            return;
        }
        converged[i] = rep.converged;

        const std::vector<std::pair<std::string, std::string>> echo = {
            {"problem", cfg.problem}, {"level", std::to_string(level)}, {"h", g6(mesh.h)},
            {"pair", to_string(opts.pair)}, {"schedule", schedule_text}, {"tol_exit", g6(opts.tol_exit)},
            {"tol_newton", opts.tol_newton_fixed > 0 ? g6(opts.tol_newton_fixed) : "adaptive"},
            {"epsilon", g6(opts.epsilon)}};
        {
            auto os = open_out(fs::path(cfg.out) / (stem + ".csv"));
            write_header(os, "obstacle", echo);
            os << "k,alpha,inc_h1,inc_l2,newton_its,lin_solves,energy\n";
            for (const auto& r : rep.rows)
                os << r.k << ',' << g6(r.alpha) << ',' << g6(r.inc_h1) << ',' << g6(r.inc_l2) << ','
                   << r.newton_its << ',' << r.lin_solves << ',' << g6(r.energy) << '\n';
        }
        std::vector<std::pair<std::string, double>> table = {
            {"iterations", static_cast<double>(rep.rows.size())},
            {"linear_solves", static_cast<double>(rep.total_linear_solves)},
            {"converged", rep.converged ? 1.0 : 0.0},
            {"min_latent_gap", rep.min_latent_gap},
            {"max_energy_increase", rep.max_energy_increase}};
        if (opts.pair == ElementPair::BubbleP0) table.push_back({"min_cell_average", rep.min_cell_average});
        if (rep.u_error) {
            table.push_back({"u_l2_error", rep.u_error->L2});
            table.push_back({"u_h1_semi_error", rep.u_error->H1_semi});
        }
        if (rep.utilde_error) table.push_back({"utilde_l2_error", rep.utilde_error->L2});
        if (std::isfinite(rep.lambda_l2_error)) table.push_back({"lambda_l2_error", rep.lambda_l2_error});
        if (rep.kkt) {
            table.push_back({"complementarity", rep.kkt->complementarity});
            table.push_back({"primal_infeasibility", rep.kkt->primal_infeas});
            table.push_back({"dual_infeasibility", rep.kkt->dual_infeas});
        }
        {
            auto os = open_out(fs::path(cfg.out) / (stem + "_errors.csv"));
            write_header(os, "obstacle", echo);
            os << "metric,value\n";
            for (const auto& [k, v] : table) os << k << ',' << g6(v) << '\n';
        }

        VtkFields fields;
        const int nv = mesh.num_vertices();
        const auto& st = rep.state;
        fields.point_scalars["u"] = Vector(st.u.begin(), st.u.begin() + nv);
        Vector phi(nv);
        for (int v = 0; v < nv; ++v) phi[v] = problem.phi(mesh.vertices[v].x, mesh.vertices[v].y);
        fields.point_scalars["phi"] = phi;
        if (opts.pair == ElementPair::LumpedP1) {
            Vector ut(nv);
            for (int v = 0; v < nv; ++v) ut[v] = phi[v] + entropy::safe_exp(st.psi[v]);
            fields.point_scalars["psi"] = st.psi;
            fields.point_scalars["lambda"] = st.lambda;
            fields.point_scalars["utilde"] = ut;
        } else {
            Vector ut(mesh.num_cells());
            for (int c = 0; c < mesh.num_cells(); ++c) ut[c] = solver.latent_primal(st.psi, c, {1.0 / 3, 1.0 / 3, 1.0 / 3});
            fields.cell_scalars["psi"] = st.psi;
            fields.cell_scalars["lambda"] = st.lambda;
            fields.cell_scalars["utilde"] = ut;
        }
        write_vtk((fs::path(cfg.out) / (stem + ".vtk")).string(), mesh, fields);

        log << "obstacle " << cfg.problem << " level " << level << " (h = " << g6(mesh.h) << ", " << schedule_text
            << ", " << to_string(opts.pair) << ")\n";
        for (const auto& [k, v] : table) log << "  " << k << " " << g6(v) << "\n";
    });
    for (char c : converged) all_converged = all_converged && c;
    return all_converged ? kExitOk : kExitNonConvergence;
}

// ---- advdiff ----

int run_advdiff(const ExperimentConfig& cfg) {
    AdvDiffOptions opts;
    if (cfg.epsilon > 0) opts.eps_diff = cfg.epsilon;
    opts.rho = cfg.rho;
    opts.iterations = cfg.iterations;
    opts.lumped = true;
    if (cfg.tol_newton > 0) opts.newton_tol = cfg.tol_newton;
    const std::string schedule_text = cfg.schedule.empty() ? "fixed:1" : cfg.schedule;
    StepSchedule::parse(schedule_text);
    const std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{5} : cfg.levels;
    const EjBenchmark ej = eriksson_johnson_benchmark(opts.eps_diff);
    const PointFn exact = [ej](double x, double y) { return ej.value(x, y); };
    const PointFn zero = [](double, double) { return 0.0; };
    fs::create_directories(cfg.out);

    int rc = kExitOk;
    std::vector<int> codes(levels.size(), kExitOk);
    for_each_level(levels.size(), [&](std::size_t i, std::ostream& log) {
        const int level = levels[i];
        const int n = 1 << level;
        const std::string stem = "advdiff_L" + std::to_string(level);
        const Mesh mesh = rectangle_mesh(0.0, 1.0, 0.0, 1.0, n, n);
        StepSchedule schedule = StepSchedule::parse(schedule_text);
        AdvDiffReport rep;
        try {
            rep = lvpp_advection_diffusion(mesh, zero, exact, schedule, opts, exact);
        } catch (const NonConvergence& e) {
            log << "level " << level << ": " << e.what() << "\n";
            codes[i] = kExitNonConvergence;
            return;
        }
        const std::vector<std::pair<std::string, std::string>> echo = {
            {"level", std::to_string(level)}, {"n", std::to_string(n)}, {"epsilon", g6(opts.eps_diff)},
            {"schedule", schedule_text}, {"rho", g6(opts.rho)}, {"iterations", std::to_string(opts.iterations)}};
        const std::vector<std::pair<std::string, double>> table = {
            {"galerkin_min", rep.galerkin_min},
            {"galerkin_max", rep.galerkin_max},
            {"utilde_min", rep.utilde_min},
            {"utilde_max", rep.utilde_max},
            {"utilde_violations", static_cast<double>(rep.utilde_violations)},
            {"nodal_u_min", rep.nodal_u_min},
            {"nodal_u_max", rep.nodal_u_max},
            {"nodal_feasibility_gap", rep.nodal_feasibility_gap},
            {"galerkin_l2_error", rep.galerkin_l2_error},
            {"utilde_l2_error", rep.utilde_l2_error},
            {"u_l2_error", rep.u_l2_error},
            {"linear_solves", static_cast<double>(rep.total_linear_solves)}};
        {
            auto os = open_out(fs::path(cfg.out) / (stem + ".csv"));
            write_header(os, "advdiff", echo);
            os << "metric,value\n";
            for (const auto& [k, v] : table) os << k << ',' << g6(v) << '\n';
        }
        {
            auto os = open_out(fs::path(cfg.out) / (stem + "_iterations.csv"));
            write_header(os, "advdiff", echo);
            os << "k,alpha,inc_h1,inc_l2,newton_its,lin_solves,energy\n";
            for (const auto& r : rep.rows)
                os << r.k << ',' << g6(r.alpha) << ',' << g6(r.inc_h1) << ',' << g6(r.inc_l2) << ','
                   << r.newton_its << ',' << r.lin_solves << ',' << g6(r.energy) << '\n';
        }
        VtkFields fields;
        Vector ut(rep.psi.size()), ex(mesh.num_vertices());
        for (std::size_t v = 0; v < ut.size(); ++v) ut[v] = entropy::sigmoid(rep.psi[v]);
        for (int v = 0; v < mesh.num_vertices(); ++v) ex[v] = exact(mesh.vertices[v].x, mesh.vertices[v].y);
        fields.point_scalars["galerkin"] = rep.galerkin;
        fields.point_scalars["u"] = rep.u;
        fields.point_scalars["psi"] = rep.psi;
        fields.point_scalars["utilde"] = ut;
        fields.point_scalars["exact"] = ex;
        write_vtk((fs::path(cfg.out) / (stem + ".vtk")).string(), mesh, fields);

        log << "advdiff level " << level << " (" << n << "x" << n << ", eps = " << g6(opts.eps_diff) << ")\n";
        for (const auto& [k, v] : table) log << "  " << k << " " << g6(v) << "\n";
    });
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

// ---- topopt ----

int run_topopt(const ExperimentConfig& cfg) {
    const std::string rule = !cfg.alpha_rule.empty() ? cfg.alpha_rule : (!cfg.schedule.empty() ? cfg.schedule : "arith:25");
    StepSchedule::parse(rule);
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw ConfigError("--theta must lie in (0, 1)");
    if (!(cfg.filter_radius > 0.0)) throw ConfigError("--filter-radius must be positive");
    if (cfg.checkpoint < 0) throw ConfigError("--checkpoint must be >= 0");
    const std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{6} : cfg.levels;
    TopOptProblem problem;
    problem.theta = cfg.theta;
    problem.filter_radius = cfg.filter_radius;
    if (cfg.traction) problem.load.kind = LoadSpec::Kind::Traction;
    fs::create_directories(cfg.out);

    std::vector<int> codes(levels.size(), kExitOk);
    for_each_level(levels.size(), [&](std::size_t i, std::ostream& log) {
        const int level = levels[i];
        const int ny = 1 << level;
        const std::string stem = "topopt_L" + std::to_string(level);
        const Mesh mesh = cantilever_mesh(3 * ny, ny);
        const Cantilever model(mesh, problem);
        StepSchedule schedule = StepSchedule::parse(rule);
        TopOptOptions opts;
        opts.itol = cfg.itol;
        opts.ntol = cfg.ntol;
        if (cfg.checkpoint > 0) {
            opts.on_iterate = [&](const TopOptIteration& row, const Vector& rho) {
                if (row.k % cfg.checkpoint != 0) return;
                VtkFields f;
                f.cell_scalars["rho"] = rho;
                char name[64];
                std::snprintf(name, sizeof name, "%s_k%04d.vtk", stem.c_str(), row.k);
                write_vtk((fs::path(cfg.out) / name).string(), mesh, f);
            };
        }
        const TopOptResult res = topopt_solve(model, schedule, opts);
        const std::vector<std::pair<std::string, std::string>> echo = {
            {"level", std::to_string(level)}, {"mesh", std::to_string(3 * ny) + "x" + std::to_string(ny)},
            {"alpha_rule", rule}, {"theta", g6(cfg.theta)}, {"filter_radius", g6(cfg.filter_radius)},
            {"itol", g6(cfg.itol)}, {"ntol", g6(cfg.ntol)}, {"load", cfg.traction ? "traction" : "body_disk"}};
        {
            auto os = open_out(fs::path(cfg.out) / (stem + ".csv"));
            write_header(os, "topopt", echo);
            os << "k,alpha,eta,increment_l1,compliance,volume_error,shift\n";
            for (const auto& r : res.rows)
                os << r.k << ',' << g6(r.alpha) << ',' << g6(r.eta) << ',' << g6(r.increment_l1) << ','
                   << g6(r.compliance) << ',' << g6(r.volume_error) << ',' << g6(r.shift) << '\n';
        }
        VtkFields f;
        f.cell_scalars["rho"] = res.rho;
        f.cell_scalars["psi"] = res.psi;
        f.point_scalars["rho_filtered"] = res.rho_filtered;
        std::vector<Vec2> disp(mesh.num_vertices());
        for (int v = 0; v < mesh.num_vertices(); ++v) disp[v] = {res.displacement[2 * v], res.displacement[2 * v + 1]};
        f.point_vectors["displacement"] = disp;
        write_vtk((fs::path(cfg.out) / (stem + ".vtk")).string(), mesh, f);

        log << "topopt level " << level << " (" << 3 * ny << "x" << ny << ", " << rule << ")\n";
        log << "  iterations " << res.rows.size() << "\n";
        if (!res.rows.empty()) log << "  eta_1 " << g6(res.rows.front().eta) << "\n";
        log << "  compliance " << g6(res.compliance) << "\n";
        log << "  converged " << (res.converged ? 1 : 0) << "\n";
        if (!res.converged) codes[i] = kExitNonConvergence;
    });
    return *std::max_element(codes.begin(), codes.end());
}

// ---- rates ----

int run_rates(const ExperimentConfig& cfg) {
    if (cfg.rates_k < 1) throw ConfigError("--k must be >= 1");
    const std::string text = cfg.schedule.empty() ? cfg.rates_case : cfg.schedule;
    StepSchedule schedule = StepSchedule::parse(text);
    // Running sums S_1..S_(k+1); the ratio column is S_k / S_(k+1).
    std::vector<double> alpha, sums;
    double s = 0.0;
    for (int k = 1; k <= cfg.rates_k + 1; ++k) {
        alpha.push_back(schedule.next_alpha());
        s += alpha.back();
        sums.push_back(s);
    }
    fs::create_directories(cfg.out);
    std::string safe = text;
    std::replace_if(safe.begin(), safe.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)) && c != '.'; }, '_');
    auto os = open_out(fs::path(cfg.out) / ("rates_" + safe + ".csv"));
    write_header(os, "rates", {{"case", text}, {"k", std::to_string(cfg.rates_k)}});
    os << "k,alpha,partial_sum,ratio,theoretical_ratio\n";
    std::cout << "rates " << text << "\n   k        alpha  partial_sum        ratio  theoretical\n";
    double last = 0.0;
    for (int k = 1; k <= cfg.rates_k; ++k) {
        const double ratio = sums[k - 1] / sums[k];
        std::string theo = "nan";
        try {
            theo = g6(theoretical_error_ratio(schedule.spec(), k));
        } catch (const ConfigError&) {
        }
        os << k << ',' << g6(alpha[k - 1]) << ',' << g6(sums[k - 1]) << ',' << g6(ratio) << ',' << theo << '\n';
        char line[128];
        std::snprintf(line, sizeof line, "%4d %12.6g %12.6g %12.6g %12s\n", k, alpha[k - 1], sums[k - 1], ratio, theo.c_str());
        std::cout << line;
        last = ratio;
    }
    std::cout << "final ratio " << g6(last) << "\n";
    return kExitOk;
}

// ---- verify ----

int run_verify(const ExperimentConfig& cfg) {
    struct Row {
        std::string name;
        double oracle;
        double solver;
    };
    std::vector<Row> rows;
    int rc = kExitOk;

    // Scalar proximal and mirror steps on e(x) = x^2/2 + x against their defining equations.
    for (double alpha : {0.1, 1.0, 10.0}) {
        const double x = oracle::scalar_prox_step(1.0, alpha);
        rows.push_back({"prox_residual(alpha=" + g6(alpha) + ")", 0.0, alpha * (x + 1.0) + std::log(x)});
        const double m = oracle::scalar_mirror_step(1.0, alpha);
        rows.push_back({"mirror_step(alpha=" + g6(alpha) + ")", std::exp(-2.0 * alpha), m});
    }

    const auto sc = spherical_constants();
    rows.push_back({"spherical_a", 0.34898, sc.a});
    rows.push_back({"spherical_A", -0.34012, sc.A});
    const double z = -1.0 / (2.0 * std::exp(2.0));
    const double w = lambert_w_branch(z, -1);
    rows.push_back({"lambert_w(-1) identity", z, w * std::exp(w)});
    const auto roots = eriksson_johnson_roots(1e-2, 1);
    rows.push_back({"ej_r1", 100.0986, roots.r1});
    rows.push_back({"ej_r2", -0.098598, roots.r2});

    // 1D obstacle against projected SOR.
    const std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{5} : cfg.levels;
    const double c = -16.0;
    for (int level : levels) {
        const Mesh mesh = make_domain_mesh(DomainKind::Strip, level);
        ObstacleOptions o;
        o.pair = cfg.lumped ? ElementPair::LumpedP1 : ElementPair::BubbleP0;
        o.tol_exit = 1e-10;
        o.tol_newton_fixed = 1e-11;
        if (cfg.epsilon > 0) o.epsilon = cfg.epsilon;
        ObstacleSolver solver(mesh, strip_parabola_problem(c), o);
        StepSchedule schedule = StepSchedule::parse(cfg.schedule.empty() ? "geo:1,1.2" : cfg.schedule);
        SolveReport rep;
        try {
            rep = solver.lvpp_obstacle(schedule);
        } catch (const NonConvergence& e) {
            std::cout << "strip level " << level << ": " << e.what() << "\n";
            rc = kExitNonConvergence;
            continue;
        }
        const int n = (1 << level) + 1;
        const auto ps = oracle::psor_obstacle_1d(n, [c](double) { return c; }, [](double) { return 0.0; }, 1.0);
        const double h = 1.0 / (n - 1);
        double diff = 0.0;
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const auto i = static_cast<std::size_t>(std::lround(mesh.vertices[v].x / h));
            diff = std::max(diff, std::abs(rep.state.u[v] - ps.u[i]));
        }
        rows.push_back({"psor_max_nodal_diff(level=" + std::to_string(level) + ")", 10.0 * h * h, diff});
    }

    std::cout << "name                                   oracle        solver         delta\n";
    for (const auto& r : rows) {
        char line[200];
        std::snprintf(line, sizeof line, "%-34s %13.6g %13.6g %13.6g\n", r.name.c_str(), r.oracle, r.solver,
                      std::abs(r.solver - r.oracle));
        std::cout << line;
    }
    std::cout << "(psor rows: oracle column is the 10 h^2 bound, delta is not meaningful)\n";
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lvpp: latent-variable proximal Galerkin experiments"};
    app.require_subcommand(1);
    app.footer(
        "Outputs (under --out, one file set per level):\n"
        "  obstacle  obstacle_<problem>_L<level>.csv        k,alpha,inc_h1,inc_l2,newton_its,lin_solves,energy\n"
        "            obstacle_<problem>_L<level>_errors.csv metric,value\n"
        "            obstacle_<problem>_L<level>.vtk\n"
        "  advdiff   advdiff_L<level>.csv                   metric,value\n"
        "            advdiff_L<level>_iterations.csv        k,alpha,inc_h1,inc_l2,newton_its,lin_solves,energy\n"
        "  topopt    topopt_L<level>.csv                    k,alpha,eta,increment_l1,compliance,volume_error,shift\n"
        "            topopt_L<level>[_kNNNN].vtk\n"
        "  rates     rates_<case>.csv                       k,alpha,partial_sum,ratio,theoretical_ratio\n"
        "Every CSV starts with '#' lines: command, git hash, then 'key = value' config echo.\n"
        "Values are printed with 6 significant digits. LVPP_THREADS caps the number of levels run at once.\n"
        "Exit codes: 0 success, 1 configuration error, 2 solver nonconvergence.");

    FlagSet flags;
    std::map<std::string, CLI::App*> subs;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"obstacle", "obstacle problem: per-iteration CSV, error table, final-field VTK"},
        {"advdiff", "bound-preserving advection-diffusion: bound-violation report"},
        {"topopt", "cantilever compliance minimization: eta_k CSV, density VTK"},
        {"rates", "step-size rule ratio table"},
        {"verify", "oracle-vs-solver deltas"}};
    for (const auto& [name, help] : commands) {
        subs[name] = app.add_subcommand(name, help);
        add_common(subs[name], flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const ExperimentConfig cfg = resolve(flags);
        for (int l : cfg.levels)
            if (l < 0 || l > 12) throw ConfigError("--levels entries must lie in [0, 12]");
        if (subs["obstacle"]->parsed()) return run_obstacle(cfg);
        if (subs["advdiff"]->parsed()) return run_advdiff(cfg);
        if (subs["topopt"]->parsed()) return run_topopt(cfg);
        if (subs["rates"]->parsed()) return run_rates(cfg);
        if (subs["verify"]->parsed()) return run_verify(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "lvpp: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonConvergence& e) {
        std::cerr << "lvpp: no convergence: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const LinearSolveError& e) {
        std::cerr << "lvpp: linear solve failed: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "lvpp: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
