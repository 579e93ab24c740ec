#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leftrs/analysis.hpp"
#include "leftrs/baselines.hpp"
#include "leftrs/harness.hpp"
#include "leftrs/model.hpp"
#include "leftrs/sim.hpp"
#include "leftrs/taskgen.hpp"

namespace py = pybind11;
using namespace leftrs;

namespace {

py::dict result_to_dict(const SystemSpec& sys, const AnalysisResult& res) {
    py::list tasks;
    for (size_t i = 0; i < res.tasks.size(); ++i) {
        const TaskBounds& tb = res.tasks[i];
        py::dict d;
        d["task"] = sys.tasks[i].id;
        d["R_us"] = tb.R;
        d["E_us"] = tb.E;
        d["B_us"] = tb.B;
        d["F_us"] = tb.F;
        d["schedulable"] = tb.schedulable;
        tasks.append(d);
    }
    py::dict out;
    out["tasks"] = tasks;
    out["schedulable"] = res.schedulable;
    out["iterations"] = res.iterations;
    out["converged"] = res.converged;
    return out;
}

} // namespace

PYBIND11_MODULE(pyleftrs, m) {
    m.doc() = "Fault-tolerant multiprocessor resource sharing: response-time "
              "analysis, protocol simulation and experiment helpers";

    m.def("validate",
          [](const std::string& system_json) {
              return validate(system_from_json(system_json));
          },
          py::arg("system_json"),
          "Invariant violations of a SystemSpec JSON document (empty list "
          "when well-formed)");

    m.def("generate",
          [](int M, int N, double rsf, int K, int A, usecs cs_min,
             usecs cs_max, int f_max, std::uint64_t seed) {
              GenConfig cfg;
              cfg.M = M;
              cfg.N = N;
              cfg.rsf = rsf;
              cfg.K = K;
              cfg.A = A;
              cfg.cs_min = cs_min;
              cfg.cs_max = cs_max;
              cfg.f_max = f_max;
              cfg.seed = seed;
              return system_to_json(generate(cfg).system);
          },
          py::arg("M") = 10, py::arg("N") = 5, py::arg("rsf") = 0.5,
          py::arg("K") = 0, py::arg("A") = 10, py::arg("cs_min") = 1,
          py::arg("cs_max") = 100, py::arg("f_max") = 3, py::arg("seed") = 1,
          "Generate a synthetic system; returns its JSON");

    m.def("uunifast",
          [](int n, double u_total, std::uint64_t seed) {
              Rng rng(seed);
              return uunifast(n, u_total, rng);
          },
          py::arg("n"), py::arg("u_total"), py::arg("seed") = 1);

    m.def("analyze",
          [](const std::string& system_json, const std::string& protocol,
             usecs o_wrap, usecs o_replica, usecs o_self_wrap) {
              SystemSpec sys = system_from_json(system_json);
              OverheadModel om{o_wrap, o_replica, o_self_wrap};
              AnalysisResult res = response_time_baseline(
                  sys, protocol_from_name(protocol), om);
              return result_to_dict(sys, res);
          },
          py::arg("system_json"), py::arg("protocol") = "leftrs",
          py::arg("o_wrap") = 1, py::arg("o_replica") = 6,
          py::arg("o_self_wrap") = 1,
          "Worst-case response times under the selected protocol");

    m.def("simulate",
          [](const std::string& system_json, const std::string& protocol,
             const std::string& pattern, std::uint64_t seed, usecs horizon,
             std::uint64_t fault_seed,
             const std::vector<std::tuple<int, int, int, int>>& faults) {
              SystemSpec sys = system_from_json(system_json);
              SimProtocol proto = protocol == "checkpointing"
                                      ? SimProtocol::Checkpointing
                                      : SimProtocol::LeftRs;
              ReleasePattern rp = pattern == "sporadic"
                                      ? ReleasePattern::sporadic(seed)
                                      : ReleasePattern::synchronous_periodic();
              FaultSchedule fs = FaultSchedule::none();
              if (!faults.empty()) {
                  std::vector<ScriptedFault> list;
                  for (const auto& [t, r, s, a] : faults)
                      list.push_back({t, r, s, a});
                  fs = FaultSchedule::scripted(list);
              } else if (fault_seed != 0) {
                  fs = FaultSchedule::randomized(fault_seed);
              }
              SimOptions opt;
              opt.horizon = horizon;
              SimTrace tr = simulate(sys, proto, rp, fs, opt);
              py::list jobs;
              for (const JobOutcome& j : tr.jobs) {
                  py::dict d;
                  d["task"] = j.task;
                  d["release_index"] = j.release_index;
                  d["release_us"] = j.release;
                  d["completed"] = j.completed;
                  d["response_us"] = j.completed ? j.response() : -1;
                  d["missed"] = j.missed;
                  jobs.append(d);
              }
              py::dict out;
              out["jobs"] = jobs;
              out["deadline_missed"] = tr.deadline_missed;
              out["in_flight_at_horizon"] = tr.in_flight_at_horizon;
              out["trace"] = trace_to_text(tr);
              return out;
          },
          py::arg("system_json"), py::arg("protocol") = "leftrs",
          py::arg("pattern") = "synchronous", py::arg("seed") = 1,
          py::arg("horizon_us") = 0, py::arg("fault_seed") = 0,
          py::arg("faults") = std::vector<std::tuple<int, int, int, int>>{},
          "Discrete-event simulation; scripted faults are (task, release, "
          "segment, attempt) tuples");

    m.def("msrpft_access",
          [](std::int64_t n_i, std::vector<std::int64_t> remote, usecs c) {
              return msrpft_access(n_i, std::move(remote), c);
          },
          py::arg("n_i"), py::arg("remote_ns"), py::arg("c"));

    m.def("msrpft_overhead",
          [](std::int64_t m, usecs o_wrap, usecs o_replica, usecs o_self_wrap) {
              return msrpft_overhead(m, {o_wrap, o_replica, o_self_wrap});
          },
          py::arg("m"), py::arg("o_wrap") = 1, py::arg("o_replica") = 6,
          py::arg("o_self_wrap") = 1);

    m.def("checkpointing_access", &checkpointing_access, py::arg("n_i"),
          py::arg("remote_ns"), py::arg("c"));

    m.def("worst_case_probe",
          [](std::int64_t n_i, const std::vector<std::int64_t>& n_preds,
             usecs c) {
              SystemSpec sys = probe_instance(n_i, n_preds, c);
              return worst_case_probe(
                  sys, static_cast<int>(n_preds.size()), 0);
          },
          py::arg("n_i"), py::arg("n_preds"), py::arg("c") = 4,
          "Exhaustive worst-case access duration of a single-request probe "
          "instance");
}
