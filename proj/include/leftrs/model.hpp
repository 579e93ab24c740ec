#ifndef LEFTRS_MODEL_HPP
#define LEFTRS_MODEL_HPP

#include <map>
#include <string>
#include <vector>

#include "leftrs/types.hpp"

namespace leftrs {

// A shared resource: id is its index, c the critical-section length.
struct ResourceSpec {
    int id = 0;
    usecs c = 1;

    friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

// One sporadic task. Priorities are explicit: the generator assigns them
// (deadline-monotonic) but the analyses never re-derive them, so a loaded
// system is analysed exactly as specified.
struct TaskSpec {
    int id = 0;
    int core = 0;
    usecs C = 0;       // pure WCET, critical sections excluded
    usecs T = 1;       // period / minimum inter-arrival
    usecs D = 1;       // constrained deadline, D <= T
    int priority = 0;  // larger value = higher priority, unique per core
    int f = 0;         // maximum transient faults per release
    std::map<int, int> accesses; // resource id -> requests per release

    int requests_to(int resource_id) const {
        auto it = accesses.find(resource_id);
        return it == accesses.end() ? 0 : it->second;
    }

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct SystemSpec {
    int num_cores = 1;
    std::vector<TaskSpec> tasks;
    std::vector<ResourceSpec> resources;

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

// Total execution count charged to a single request: the request's fault
// budget plus the one successful execution. Every request of a task is
// charged the task's full per-release budget, n = f + 1; faults may
// concentrate on any one request, and charging all protocols identically
// keeps comparisons fair.
struct RequestCharge {
    std::int64_t n = 1;
    int resource = 0;
    int task = 0;
};

// Returns one description per violated invariant; empty means well-formed.
// Violations are data, not failures.
std::vector<std::string> validate(const SystemSpec& system);

// Same-core tasks with strictly higher / lower priority than task i.
// Remote tasks appear in neither. Throws std::out_of_range on a bad id.
std::vector<int> lhp(const SystemSpec& system, int task_id);
std::vector<int> llp(const SystemSpec& system, int task_id);

// Throws std::invalid_argument if the task does not access the resource.
RequestCharge request_charge(const TaskSpec& task, int resource_id);

// JSON serialization; round-trips losslessly.
std::string system_to_json(const SystemSpec& system, int indent = 2);
SystemSpec system_from_json(const std::string& text);

} // namespace leftrs

#endif
