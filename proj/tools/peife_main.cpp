// Experiment driver: convergence studies, Parareal iteration traces,
// cost-growth measurements and solution snapshots, configured from JSON
// and/or command-line flags.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "peife/peife.hpp"

namespace {

using nlohmann::json;

std::vector<int> parse_int_list(const std::string& s, char sep) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + sep) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw CLI::ValidationError("empty integer list: " + s);
    return out;
}

std::vector<std::vector<int>> parse_grid_list(const std::string& s) {
    std::vector<std::vector<int>> out;
    std::string cur;
    for (char c : s + ',') {
        if (c == ',') {
            if (!cur.empty()) out.push_back(parse_int_list(cur, 'x'));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw CLI::ValidationError("empty grid list: " + s);
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s + ',') {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

void load_json_config(const std::string& path, peife::ExperimentConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    json j;
    is >> j;
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get("problem", cfg.problem);
    get("alpha", cfg.alpha);
    get("freq", cfg.freq);
    get("method", cfg.method);
    get("stages", cfg.stages);
    get("p", cfg.p);
    get("q", cfg.q);
    get("n", cfg.n_coarse);
    get("k_max", cfg.k_max);
    get("tol", cfg.tol);
    get("workers", cfg.workers);
    get("quad_points", cfg.quad_points);
    get("outdir", cfg.outdir);
    get("reference", cfg.reference);
    get("perf_repeats", cfg.perf_repeats);
    if (j.contains("m")) {
        if (j["m"].is_array())
            cfg.m_fine = j["m"].get<std::vector<int>>();
        else
            cfg.m_fine = {j["m"].get<int>()};
    }
    if (j.contains("nt")) {
        if (j["nt"].is_array())
            cfg.nt = j["nt"].get<std::vector<int>>();
        else
            cfg.nt = {j["nt"].get<int>()};
    }
    if (j.contains("times")) cfg.times = j["times"].get<std::vector<double>>();
    if (j.contains("grids")) {
        cfg.grids.clear();
        for (const auto& e : j["grids"]) {
            if (e.is_string())
                cfg.grids.push_back(parse_int_list(e.get<std::string>(), 'x'));
            else if (e.is_array())
                cfg.grids.push_back(e.get<std::vector<int>>());
            else
                cfg.grids.push_back({e.get<int>()});
        }
    }
}

struct CliOverrides {
    std::string config, problem, method, reference, outdir, grids, m_list, nt_list, times;
    double alpha = -1, freq = -1, tol = -1;
    int stages = -1, p = -1, q = -1, n = -1, kmax = -1, workers = -1, qpts = -1, repeats = -1;
    int seed = 0; // reserved; no stochastic components today
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--problem", o.problem, "ex1d | ex2d | ex3d | oscillating");
    cmd->add_option("--alpha", o.alpha, "oscillating diffusion coefficient");
    cmd->add_option("--freq", o.freq, "oscillating source frequency");
    cmd->add_option("--method", o.method, "eife | peife");
    cmd->add_option("--stages,-s", o.stages, "stage count for eife");
    cmd->add_option("-p", o.p, "coarse propagator stages");
    cmd->add_option("-q", o.q, "fine propagator stages");
    cmd->add_option("--grids,--grid", o.grids, "cells per direction, e.g. 8x4,16x8,32x16");
    cmd->add_option("-n,--n", o.n, "coarse interval count N");
    cmd->add_option("-m,--m", o.m_list, "fine substeps per interval M (list for temporal studies)");
    cmd->add_option("--nt", o.nt_list, "eife step counts (list for temporal studies)");
    cmd->add_option("--kmax", o.kmax, "Parareal iteration budget");
    cmd->add_option("--tol", o.tol, "Parareal increment tolerance (0 = budget only)");
    cmd->add_option("--workers", o.workers, "worker pool size (default: PEIFE_WORKERS, then hardware)");
    cmd->add_option("--qpts", o.qpts, "Gauss points per direction");
    cmd->add_option("--outdir", o.outdir, "output directory");
    cmd->add_option("--times", o.times, "snapshot times, e.g. 0,0.25,0.5");
    cmd->add_option("--reference", o.reference, "exact | self");
    cmd->add_option("--repeats", o.repeats, "perf timing repeats");
    cmd->add_option("--seed", o.seed, "reserved for future stochastic components")->group("");
}

peife::ExperimentConfig build_config(const CliOverrides& o) {
    peife::ExperimentConfig cfg;
    if (!o.config.empty()) load_json_config(o.config, cfg);
    if (!o.problem.empty()) cfg.problem = o.problem;
    if (o.alpha >= 0) cfg.alpha = o.alpha;
    if (o.freq >= 0) cfg.freq = o.freq;
    if (!o.method.empty()) cfg.method = o.method;
    if (o.stages > 0) cfg.stages = o.stages;
    if (o.p > 0) cfg.p = o.p;
    if (o.q > 0) cfg.q = o.q;
    if (o.n > 0) cfg.n_coarse = o.n;
    if (o.kmax >= 0) cfg.k_max = o.kmax;
    if (o.tol >= 0) cfg.tol = o.tol;
    if (o.workers > 0) cfg.workers = o.workers;
    if (o.qpts > 0) cfg.quad_points = o.qpts;
    if (o.repeats > 0) cfg.perf_repeats = o.repeats;
    if (!o.outdir.empty()) cfg.outdir = o.outdir;
    if (!o.reference.empty()) cfg.reference = o.reference;
    if (!o.grids.empty()) cfg.grids = parse_grid_list(o.grids);
    if (!o.m_list.empty()) cfg.m_fine = parse_int_list(o.m_list, ',');
    if (!o.nt_list.empty()) cfg.nt = parse_int_list(o.nt_list, ',');
    if (!o.times.empty()) cfg.times = parse_double_list(o.times);
    return cfg;
}

void write_and_echo(const peife::ExperimentConfig& cfg, const std::string& name,
                    const std::string& content) {
    const auto dir = peife::ensure_outdir(cfg);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << content;
    std::cout << content;
    std::cerr << "wrote " << (dir / name).string() << "\n";
}

int cmd_run(const peife::ExperimentConfig& cfg_in) {
    peife::ExperimentConfig cfg = cfg_in;
    cfg.study = "temporal"; // single level of the temporal axis
    if (cfg.grids.size() != 1) throw std::runtime_error("run: needs exactly one --grid");
    if (cfg.method == "eife")
        cfg.nt = {cfg.nt.at(0)};
    else
        cfg.m_fine = {cfg.m_fine.at(0)};
    const peife::ProblemSpec prob = peife::config_problem(cfg);
    if (!prob.has_exact()) cfg.reference = "self";
    const auto rows = peife::run_convergence_study(cfg);
    std::ostringstream os;
    peife::write_convergence_csv(os, rows);
    write_and_echo(cfg, "single_run.csv", os.str());
    return 0;
}

int cmd_converge(const peife::ExperimentConfig& cfg_in, const std::string& axis) {
    peife::ExperimentConfig cfg = cfg_in;
    cfg.study = axis;
    const auto rows = peife::run_convergence_study(cfg);
    std::ostringstream os;
    peife::write_convergence_csv(os, rows);
    write_and_echo(cfg, "converge.csv", os.str());
    return 0;
}

int cmd_trace(const peife::ExperimentConfig& cfg_in) {
    peife::ExperimentConfig cfg = cfg_in;
    cfg.study = "parareal-trace";
    const auto rows = peife::run_parareal_trace(cfg);
    std::ostringstream os;
    peife::write_trace_csv(os, rows);
    write_and_echo(cfg, "trace.csv", os.str());
    for (const auto& r : rows) {
        if (r.at_plateau) {
            std::cerr << "plateau reached at k=" << r.k << "\n";
            break;
        }
    }
    return 0;
}

int cmd_perf(const peife::ExperimentConfig& cfg_in) {
    peife::ExperimentConfig cfg = cfg_in;
    cfg.study = "perf";
    const auto rows = peife::run_perf_growth(cfg);
    std::ostringstream os;
    peife::write_perf_csv(os, rows);
    write_and_echo(cfg, "perf.csv", os.str());
    return 0;
}

int cmd_snapshots(const peife::ExperimentConfig& cfg_in) {
    peife::ExperimentConfig cfg = cfg_in;
    cfg.study = "single-run";
    if (cfg.times.empty()) {
        const peife::ProblemSpec prob = peife::config_problem(cfg);
        for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) cfg.times.push_back(prob.t0 + f * prob.duration);
    }
    peife::emit_snapshots(cfg);
    std::cerr << "wrote " << cfg.times.size() << " snapshot files to " << cfg.outdir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel-in-time exponential integrator FEM for linear parabolic problems"};
    app.require_subcommand(1);

    CliOverrides o;
    std::string axis = "spatial";

    auto* run = app.add_subcommand("run", "single solve, errors at the terminal time");
    auto* conv = app.add_subcommand("converge", "spatial or temporal refinement study");
    conv->add_option("--axis", axis, "spatial | temporal")->check(CLI::IsMember({"spatial", "temporal"}));
    auto* trace = app.add_subcommand("trace", "error vs Parareal iteration");
    auto* perf = app.add_subcommand("perf", "cost growth across grid refinements");
    auto* snaps = app.add_subcommand("snapshots", "solution fields at selected times");
    for (auto* cmd : {run, conv, trace, perf, snaps}) add_common_flags(cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        const peife::ExperimentConfig cfg = build_config(o);
        if (run->parsed()) return cmd_run(cfg);
        if (conv->parsed()) return cmd_converge(cfg, axis);
        if (trace->parsed()) return cmd_trace(cfg);
        if (perf->parsed()) return cmd_perf(cfg);
        if (snaps->parsed()) return cmd_snapshots(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
