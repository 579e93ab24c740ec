// Command-line front end: generation, analysis, simulation, schedulability
// sweeps, exclusive-count tables, soundness campaigns and plotting.
//
// Exit codes: 0 success, 1 soundness counterexample found, 2 invalid input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "leftrs/analysis.hpp"
#include "leftrs/baselines.hpp"
#include "leftrs/harness.hpp"
#include "leftrs/model.hpp"
#include "leftrs/sim.hpp"
#include "leftrs/taskgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("cannot write " + path);
    f << text;
}

leftrs::SystemSpec load_system(const std::string& path) {
    leftrs::SystemSpec sys = leftrs::system_from_json(read_file(path));
    auto problems = leftrs::validate(sys);
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid system " << path << ":";
        for (const auto& p : problems)
            os << "\n  " << p;
        throw std::invalid_argument(os.str());
    }
    return sys;
}

json result_to_json(const leftrs::SystemSpec& sys,
                    const leftrs::AnalysisResult& res) {
    json jt = json::array();
    for (size_t i = 0; i < res.tasks.size(); ++i) {
        const leftrs::TaskBounds& tb = res.tasks[i];
        jt.push_back({{"task", sys.tasks[i].id},
                      {"R_us", tb.R},
                      {"E_us", tb.E},
                      {"B_us", tb.B},
                      {"F_us", tb.F},
                      {"schedulable", tb.schedulable}});
    }
    return json{{"tasks", jt},
                {"schedulable", res.schedulable},
                {"iterations", res.iterations},
                {"converged", res.converged}};
}

leftrs::GenConfig config_from_json(const json& j) {
    leftrs::GenConfig cfg;
    if (j.contains("M")) cfg.M = j["M"];
    if (j.contains("N")) cfg.N = j["N"];
    if (j.contains("util_per_task_slot")) cfg.util_per_task_slot = j["util_per_task_slot"];
    if (j.contains("period_min_us")) cfg.period_min = j["period_min_us"];
    if (j.contains("period_max_us")) cfg.period_max = j["period_max_us"];
    if (j.contains("rsf")) cfg.rsf = j["rsf"];
    if (j.contains("K")) cfg.K = j["K"];
    if (j.contains("A")) cfg.A = j["A"];
    if (j.contains("cs_min_us")) cfg.cs_min = j["cs_min_us"];
    if (j.contains("cs_max_us")) cfg.cs_max = j["cs_max_us"];
    if (j.contains("f_max")) cfg.f_max = j["f_max"];
    if (j.contains("seed")) cfg.seed = j["seed"];
    return cfg;
}

std::vector<leftrs::Protocol> parse_protocols(const std::string& list) {
    std::vector<leftrs::Protocol> out;
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty())
            out.push_back(leftrs::protocol_from_name(token));
    if (out.empty())
        throw std::invalid_argument("no protocols given");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LEFT-RS toolkit: fault-tolerant resource-sharing analysis, "
                 "simulation and experiments"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int systems_per_point = 200;
    bool paper_scale = false;
    std::string protocols_flag = "leftrs,msrpft,msrpft-of,checkpointing";
    int workers = 0;
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--systems-per-point", systems_per_point,
                   "systems per sweep point");
    app.add_flag("--paper-scale", paper_scale,
                 "1000 systems per point instead of 200");
    app.add_option("--protocols", protocols_flag,
                   "comma-separated protocol list");
    app.add_option("--jobs", workers, "worker threads (0: all cores)");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic system");
    int gM = 10, gN = 5, gK = 0, gA = 10, gF = 3;
    double gRsf = 0.5, gSlot = 0.04;
    leftrs::usecs gLmin = 1, gLmax = 100, gTmin = 1000, gTmax = 1000000;
    std::string gen_out;
    gen->add_option("-M,--cores", gM, "core count");
    gen->add_option("-N,--tasks-per-core", gN, "tasks per core");
    gen->add_option("--rsf", gRsf, "resource sharing factor");
    gen->add_option("-K,--resources", gK, "resource count (0: K = M)");
    gen->add_option("-A,--max-accesses", gA, "max accesses per task/resource");
    gen->add_option("--cs-min", gLmin, "min critical section (us)");
    gen->add_option("--cs-max", gLmax, "max critical section (us)");
    gen->add_option("--period-min", gTmin, "min period (us)");
    gen->add_option("--period-max", gTmax, "max period (us)");
    gen->add_option("--util-slot", gSlot, "utilisation per task slot");
    gen->add_option("-f,--f-max", gF, "max fault budget");
    gen->add_option("-o,--output", gen_out, "output file (default: stdout)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "worst-case response times");
    std::string an_system, an_protocol = "leftrs", an_out;
    leftrs::OverheadModel overheads;
    analyze->add_option("system", an_system, "SystemSpec JSON file")
        ->required();
    analyze->add_option("--protocol", an_protocol,
                        "leftrs|msrpft|msrpft-of|checkpointing");
    analyze->add_option("--o-wrap", overheads.o_wrap, "O_wrap (us)");
    analyze->add_option("--o-replica", overheads.o_replica, "O_replica (us)");
    analyze->add_option("--o-self-wrap", overheads.o_self_wrap,
                        "O_self_wrap (us)");
    analyze->add_option("-o,--output", an_out, "result JSON file");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "discrete-event run");
    std::string sm_system, sm_protocol = "leftrs", sm_pattern = "synchronous";
    std::string sm_faults, sm_trace_out, sm_summary_out;
    leftrs::usecs sm_horizon = 0;
    simulate_cmd->add_option("system", sm_system, "SystemSpec JSON file")
        ->required();
    simulate_cmd->add_option("--protocol", sm_protocol,
                             "leftrs|checkpointing");
    simulate_cmd->add_option("--pattern", sm_pattern,
                             "synchronous|sporadic");
    simulate_cmd->add_option("--faults", sm_faults,
                             "fault schedule: integer seed or scripted file");
    simulate_cmd->add_option("--horizon-us", sm_horizon, "simulation horizon");
    simulate_cmd->add_option("--trace-out", sm_trace_out,
                             "trace file (default: stdout)");
    simulate_cmd->add_option("--summary-out", sm_summary_out,
                             "summary JSON (default: <out-dir>/sim_summary.json)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "schedulability sweep");
    std::string sw_param = "M", sw_config, sw_prefix = "sweep";
    sweep_cmd->add_option("--param", sw_param, "M|N|rsf|L|A|f");
    sweep_cmd->add_option("--config", sw_config,
                          "JSON file overriding the sweep configuration");
    sweep_cmd->add_option("--prefix", sw_prefix, "output file prefix");

    // table
    auto* table_cmd = app.add_subcommand(
        "table", "exclusive schedulability counts (MSRP-FT vs LEFT-RS)");
    std::string tb_param = "f", tb_config, tb_prefix = "table";
    table_cmd->add_option("--param", tb_param, "M|N|rsf|L|A|f");
    table_cmd->add_option("--config", tb_config, "sweep config JSON");
    table_cmd->add_option("--prefix", tb_prefix, "output file prefix");

    // sound
    auto* sound_cmd = app.add_subcommand(
        "sound", "simulation-based soundness campaign");
    int sd_systems = 20, sd_seeds = 20;
    bool sd_small = false;
    sound_cmd->add_option("--systems", sd_systems,
                          "schedulable systems to check");
    sound_cmd->add_option("--seeds", sd_seeds, "simulation seeds per system");
    sound_cmd->add_flag("--small", sd_small,
                        "also run the exhaustive small-instance probe");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render a sweep CSV... or run "
                                                "a sweep and plot it");
    std::string pl_param = "M", pl_config, pl_out;
    plot_cmd->add_option("--param", pl_param, "M|N|rsf|L|A|f");
    plot_cmd->add_option("--config", pl_config, "sweep config JSON");
    plot_cmd->add_option("-o,--output", pl_out, "SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fs::create_directories(out_dir);

        auto make_sweep_config = [&](const std::string& param,
                                     const std::string& cfg_file) {
            leftrs::SweepConfig sc;
            sc.param = leftrs::sweep_param_from_name(param);
            sc.master_seed = seed;
            sc.systems_per_point = paper_scale ? 1000 : systems_per_point;
            sc.protocols = parse_protocols(protocols_flag);
            sc.overheads = overheads;
            sc.workers = workers;
            if (!cfg_file.empty()) {
                json j = json::parse(read_file(cfg_file));
                if (j.contains("base"))
                    sc.base = config_from_json(j["base"]);
                if (j.contains("param"))
                    sc.param = leftrs::sweep_param_from_name(j["param"]);
                if (j.contains("values"))
                    sc.values = j["values"].get<std::vector<double>>();
                if (j.contains("systems_per_point"))
                    sc.systems_per_point = j["systems_per_point"];
                if (j.contains("protocols")) {
                    sc.protocols.clear();
                    for (const auto& p : j["protocols"])
                        sc.protocols.push_back(
                            leftrs::protocol_from_name(p.get<std::string>()));
                }
                if (j.contains("master_seed"))
                    sc.master_seed = j["master_seed"];
            }
            return sc;
        };

        if (*gen) {
            leftrs::GenConfig cfg;
            cfg.M = gM;
            cfg.N = gN;
            cfg.rsf = gRsf;
            cfg.K = gK;
            cfg.A = gA;
            cfg.cs_min = gLmin;
            cfg.cs_max = gLmax;
            cfg.period_min = gTmin;
            cfg.period_max = gTmax;
            cfg.util_per_task_slot = gSlot;
            cfg.f_max = gF;
            cfg.seed = seed;
            leftrs::Generated g = leftrs::generate(cfg);
            std::string text = leftrs::system_to_json(g.system);
            if (gen_out.empty())
                std::cout << text << '\n';
            else
                write_file(gen_out, text);
            if (g.stats.clamped_tasks > 0)
                std::cerr << "note: " << g.stats.clamped_tasks
                          << " task(s) clamped to C=0, slack "
                          << g.stats.clamp_slack << '\n';
            return 0;
        }

        if (*analyze) {
            leftrs::SystemSpec sys = load_system(an_system);
            leftrs::AnalysisResult res = leftrs::response_time_baseline(
                sys, leftrs::protocol_from_name(an_protocol), overheads);
            json j = result_to_json(sys, res);
            if (an_out.empty())
                an_out = (fs::path(out_dir) / "analysis.json").string();
            write_file(an_out, j.dump(2) + "\n");
            std::cout << (res.schedulable ? "schedulable" : "unschedulable")
                      << " protocol=" << an_protocol
                      << " iterations=" << res.iterations << " result="
                      << an_out << '\n';
            return 0;
        }

        if (*simulate_cmd) {
            leftrs::SystemSpec sys = load_system(sm_system);
            leftrs::SimProtocol proto =
                sm_protocol == "checkpointing"
                    ? leftrs::SimProtocol::Checkpointing
                    : leftrs::SimProtocol::LeftRs;
            if (sm_protocol != "checkpointing" && sm_protocol != "leftrs")
                throw std::invalid_argument("simulate: unknown protocol " +
                                            sm_protocol);
            leftrs::ReleasePattern pattern =
                sm_pattern == "sporadic"
                    ? leftrs::ReleasePattern::sporadic(seed)
                    : leftrs::ReleasePattern::synchronous_periodic();
            if (sm_pattern != "sporadic" && sm_pattern != "synchronous")
                throw std::invalid_argument("simulate: unknown pattern " +
                                            sm_pattern);

            leftrs::FaultSchedule faults = leftrs::FaultSchedule::none();
            if (!sm_faults.empty()) {
                bool numeric = !sm_faults.empty() &&
                               sm_faults.find_first_not_of("0123456789") ==
                                   std::string::npos;
                if (numeric) {
                    faults = leftrs::FaultSchedule::randomized(
                        std::stoull(sm_faults));
                } else {
                    // scripted file: one line per fault,
                    // "task release segment attempt"
                    std::istringstream is(read_file(sm_faults));
                    std::vector<leftrs::ScriptedFault> list;
                    leftrs::ScriptedFault f;
                    while (is >> f.task >> f.release >> f.segment >> f.attempt)
                        list.push_back(f);
                    faults = leftrs::FaultSchedule::scripted(list);
                }
            }

            leftrs::SimOptions opt;
            opt.horizon = sm_horizon;
            leftrs::SimTrace trace =
                leftrs::simulate(sys, proto, pattern, faults, opt);

            std::string text = leftrs::trace_to_text(trace);
            if (sm_trace_out.empty())
                std::cout << text;
            else
                write_file(sm_trace_out, text);

            json jjobs = json::array();
            for (const leftrs::JobOutcome& j : trace.jobs)
                jjobs.push_back({{"task", j.task},
                                 {"release_index", j.release_index},
                                 {"release_us", j.release},
                                 {"completed", j.completed},
                                 {"response_us",
                                  j.completed ? j.response() : -1},
                                 {"missed", j.missed}});
            json summary{{"jobs", jjobs},
                         {"deadline_missed", trace.deadline_missed},
                         {"in_flight_at_horizon", trace.in_flight_at_horizon}};
            if (sm_summary_out.empty())
                sm_summary_out =
                    (fs::path(out_dir) / "sim_summary.json").string();
            write_file(sm_summary_out, summary.dump(2) + "\n");
            return 0;
        }

        if (*sweep_cmd || *table_cmd || *plot_cmd) {
            std::string param = *sweep_cmd ? sw_param
                                : *table_cmd ? tb_param : pl_param;
            std::string cfg_file = *sweep_cmd ? sw_config
                                   : *table_cmd ? tb_config : pl_config;
            leftrs::SweepConfig sc = make_sweep_config(param, cfg_file);
            leftrs::SchedulabilityCurve curve = leftrs::sweep(sc);

            std::string prefix = *sweep_cmd ? sw_prefix : tb_prefix;
            if (*sweep_cmd) {
                std::string base =
                    (fs::path(out_dir) / (prefix + "_" + param)).string();
                write_file(base + ".csv", leftrs::curve_to_csv(curve));
                write_file(base + "_exclusive.csv",
                           leftrs::exclusive_to_csv(curve));
                std::cout << "wrote " << base << ".csv and " << base
                          << "_exclusive.csv\n";
            } else if (*table_cmd) {
                std::string base =
                    (fs::path(out_dir) / (prefix + "_" + param)).string();
                write_file(base + ".csv", leftrs::exclusive_to_csv(curve));
                std::cout << leftrs::exclusive_to_csv(curve);
            } else {
                if (pl_out.empty())
                    pl_out = (fs::path(out_dir) / ("plot_" + param + ".svg"))
                                 .string();
                leftrs::plot(curve, pl_out);
                std::cout << "wrote " << pl_out << '\n';
            }
            return 0;
        }

        if (*sound_cmd) {
            leftrs::GenConfig base;
            base.seed = seed;
            leftrs::SoundnessReport report = leftrs::soundness_campaign(
                base, sd_systems, sd_seeds, sd_small, seed, workers);
            std::cout << "systems examined: " << report.systems_examined
                      << "\nschedulable systems simulated: "
                      << report.systems_checked
                      << "\nsimulation runs: " << report.simulation_runs
                      << "\nviolations: " << report.violations.size() << '\n';
            if (report.probe_checked)
                std::cout << "small-instance probe: "
                          << (report.probe_ok ? "ok" : "FAILED") << '\n';
            for (const auto& v : report.violations)
                std::cout << "VIOLATION seed=" << v.system_seed
                          << " task=" << v.task << " release="
                          << v.release_index << " response=" << v.response
                          << "us bound=" << v.bound << "us\n";
            return report.clean() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
