#ifndef LEFTRS_ANALYSIS_HPP
#define LEFTRS_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "leftrs/model.hpp"

namespace leftrs {

// Per-task response-time bounds. R is the fixed point of
//
//   R_i = C_i + E_i + B_i + F_i + sum_{h in lhp(i)} ceil(R_i/T_h)(C_h + F_h)
//
// where E_i is the resource-access term, B_i the arrival blocking and F_i
// the fault-tolerance term.
struct TaskBounds {
    usecs R = 0;
    usecs E = 0;
    usecs B = 0;
    usecs F = 0;
    bool schedulable = false; // R <= D
};

struct AnalysisResult {
    std::vector<TaskBounds> tasks; // parallel to SystemSpec::tasks
    bool schedulable = false;      // all tasks schedulable
    int iterations = 0;
    bool converged = true;         // false only when the iteration cap hit
};

// xi^x_{i,k}: the requests from one remote core that can delay task i's
// local requests for resource x, as a non-increasing list of per-request
// execution counts, together with the per-core cap N^x_{i,k}.
struct RemoteRequestList {
    std::vector<std::int64_t> entries; // sorted non-increasing
    std::int64_t cap = 0;              // min(N^x_{i,local}, |entries|)
};

// E^x_i: the multiset of remote execution counts charged against task i's
// local requests, pooled over all remote cores (first `cap` entries each).
struct BlockingSet {
    std::vector<std::int64_t> entries;
};

// R estimates for every task, parallel to SystemSpec::tasks. The holistic
// iteration feeds the current iterate; standalone callers can pass any
// non-negative estimates.
using ResponseEstimates = std::vector<usecs>;

// Requests task j can place on resource x within a window of R_i + R_j:
// ceil((R_i+R_j)/T_j) releases ("back-to-back hit"), N^x_j requests each,
// every request charged n^x_j = f_j + 1 executions.
std::vector<std::int64_t> eta(const SystemSpec& system, int task_j,
                              int resource_x, usecs Ri, usecs Rj);

// N^x_{i,local}: requests to x from task i plus preempting requests from
// lhp(i) during R_i.
std::int64_t n_local(const SystemSpec& system, int task_i, int resource_x,
                     usecs Ri);

RemoteRequestList remote_requests(const SystemSpec& system, int task_i,
                                  int resource_x, int core_k, usecs Ri,
                                  const ResponseEstimates& R_of);

BlockingSet blocking_set(const SystemSpec& system, int task_i, int resource_x,
                         usecs Ri, const ResponseEstimates& R_of);

// Syn^x_i = min(#{e in set : e > 1}, n_local): one synchronisation unit per
// remote request that may fault, at most one per local request.
std::int64_t syn_overhead(const BlockingSet& set, std::int64_t n_local);

// E_i = sum_x (N^x_local + |E^x| + Syn^x) * c^x
usecs resource_term(const SystemSpec& system, int task_i, usecs Ri,
                    const ResponseEstimates& R_of);

// B_i: worst one-off blocking by a lower-priority local task holding a
// global resource or a local resource with ceiling >= P_i.
usecs arrival_blocking(const SystemSpec& system, int task_i, usecs Ri,
                       const ResponseEstimates& R_of);

// F_i = f_i * max(C_i, max{c^x accessed}); each fault re-executes at most
// the longest segment.
usecs fault_term(const SystemSpec& system, int task_i);

// Holistic fixed point over all tasks. Starts from R_i = C_i + F_i,
// recomputes the whole system until stable; a task exceeding its deadline
// stops the iteration and makes the system unschedulable. Never loops
// forever: a 10000-pass cap reports non-convergence as unschedulable.
AnalysisResult response_time(const SystemSpec& system);

} // namespace leftrs

#endif
