#ifndef LEFTRS_ANALYSIS_DETAIL_HPP
#define LEFTRS_ANALYSIS_DETAIL_HPP

#include <cstdint>
#include <vector>

#include "leftrs/analysis.hpp"
#include "leftrs/baselines.hpp"
#include "leftrs/model.hpp"

// Shared internals of the holistic analyses. The remote-request lists are
// kept run-compressed: all requests of one remote task carry the same
// execution count, so a (value, count) pair per task stands in for what
// can be tens of thousands of identical entries.

namespace leftrs::detail {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return (a + b - 1) / b;
}

struct Run {
    std::int64_t n = 0;     // per-request execution count
    std::int64_t count = 0; // number of requests with this count
};

// Static description of one remote task's requests to one resource.
struct RemoteSource {
    int task_index;          // position in SystemSpec::tasks
    std::int64_t n;          // f_j + 1
    std::int64_t per_release; // N^x_j
    usecs period;
};

struct LocalDemand {
    std::int64_t own = 0;                      // N^x_i
    std::vector<std::pair<int, std::int64_t>> hp; // (lhp index, N^x_h)
};

struct ArrivalCandidate {
    int resource = 0;
    std::int64_t alpha = 0; // max n^x_l over llp requesters
};

struct Prepared {
    const SystemSpec* sys = nullptr;
    int n_tasks = 0;
    int n_resources = 0;
    std::vector<std::vector<int>> lhp;        // per task, indices
    std::vector<std::vector<int>> llp;
    std::vector<std::vector<LocalDemand>> demand;       // [task][resource]
    std::vector<std::vector<std::vector<RemoteSource>>> sources; // [res][core], sorted by n desc
    std::vector<bool> global;                 // used on >= 2 cores
    std::vector<std::vector<ArrivalCandidate>> arrival; // per task: F^A(i)

    explicit Prepared(const SystemSpec& system);
};

// xi^x_k as runs, non-increasing in n. `out` is a scratch buffer.
void xi_runs(const Prepared& prep, int resource, int core, usecs Ri,
             const ResponseEstimates& R_of, std::vector<Run>& out);

std::int64_t local_request_count(const Prepared& prep, int task_index,
                                 int resource, usecs Ri);

struct ResourceCharge {
    std::int64_t n_local = 0;
    std::int64_t remote = 0;  // |E^x_i|
    std::int64_t syn = 0;     // Syn^x_i
};

ResourceCharge leftrs_resource_charge(const Prepared& prep, int task_index,
                                      int resource, usecs Ri,
                                      const ResponseEstimates& R_of);

usecs protocol_resource_term(const Prepared& prep, Protocol proto,
                             const OverheadModel& model, int task_index,
                             usecs Ri, const ResponseEstimates& R_of);

usecs protocol_arrival_blocking(const Prepared& prep, Protocol proto,
                                const OverheadModel& model, int task_index,
                                usecs Ri, const ResponseEstimates& R_of);

usecs protocol_fault_term(const Prepared& prep, Protocol proto,
                          int task_index);

AnalysisResult run_holistic(const SystemSpec& system, Protocol proto,
                            const OverheadModel& model);

} // namespace leftrs::detail

#endif
