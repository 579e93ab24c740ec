#ifndef LEFTRS_TASKGEN_HPP
#define LEFTRS_TASKGEN_HPP

#include <cstdint>
#include <vector>

#include "leftrs/model.hpp"
#include "leftrs/rng.hpp"

namespace leftrs {

// Synthetic-system generator configuration. Defaults reproduce the common
// evaluation setup: 10 cores, 5 tasks per core, half the tasks sharing,
// one resource per core.
struct GenConfig {
    int M = 10;                      // cores
    int N = 5;                       // tasks per core
    double util_per_task_slot = 0.04; // U_total = slot * M * N
    usecs period_min = 1000;         // 1 ms
    usecs period_max = 1000000;      // 1000 ms, log-uniform
    double rsf = 0.5;                // resource-sharing factor
    int K = 0;                       // resource count; 0 means K = M
    int A = 10;                      // max accesses per (task, resource)
    usecs cs_min = 1;                // critical-section length range
    usecs cs_max = 100;
    int f_max = 3;                   // per-task fault budget upper bound
    std::uint64_t seed = 1;

    int resource_count() const { return K > 0 ? K : M; }
};

struct GenStats {
    int clamped_tasks = 0;   // tasks whose C was clamped to 0
    int redraws = 0;         // access-set redraws taken before clamping
    double clamp_slack = 0;  // extra utilisation introduced by clamping
};

struct Generated {
    SystemSpec system;
    GenStats stats;
};

// UUniFast: n positive utilisations summing to u_total (within fp error).
// Throws std::invalid_argument on n < 1 or u_total <= 0.
std::vector<double> uunifast(int n, double u_total, Rng& rng);

// Deterministic given (cfg, cfg.seed). The result always passes validate().
// Throws std::invalid_argument on an infeasible or ill-formed config.
Generated generate(const GenConfig& cfg);

} // namespace leftrs

#endif
