#include "leftrs/analysis.hpp"

#include <algorithm>
#include <stdexcept>

#include "analysis_detail.hpp"

namespace leftrs {

namespace {

int task_index_of(const SystemSpec& sys, int task_id) {
    for (int i = 0; i < static_cast<int>(sys.tasks.size()); ++i)
        if (sys.tasks[i].id == task_id)
            return i;
    throw std::out_of_range("unknown task id " + std::to_string(task_id));
}

} // namespace

std::vector<std::int64_t> eta(const SystemSpec& system, int task_j,
                              int resource_x, usecs Ri, usecs Rj) {
    const TaskSpec& t = system.tasks[task_index_of(system, task_j)];
    std::int64_t per_release = t.requests_to(resource_x);
    if (per_release == 0)
        return {};
    std::int64_t releases = detail::ceil_div(Ri + Rj, t.T);
    std::vector<std::int64_t> out(
        static_cast<size_t>(releases * per_release),
        static_cast<std::int64_t>(t.f) + 1);
    return out;
}

std::int64_t n_local(const SystemSpec& system, int task_i, int resource_x,
                     usecs Ri) {
    detail::Prepared prep(system);
    return detail::local_request_count(prep, task_index_of(system, task_i),
                                       resource_x, Ri);
}

RemoteRequestList remote_requests(const SystemSpec& system, int task_i,
                                  int resource_x, int core_k, usecs Ri,
                                  const ResponseEstimates& R_of) {
    detail::Prepared prep(system);
    int idx = task_index_of(system, task_i);
    std::vector<detail::Run> runs;
    detail::xi_runs(prep, resource_x, core_k, Ri, R_of, runs);
    RemoteRequestList out;
    for (const detail::Run& r : runs)
        out.entries.insert(out.entries.end(), static_cast<size_t>(r.count),
                           r.n);
    std::int64_t local = detail::local_request_count(prep, idx, resource_x, Ri);
    out.cap = std::min<std::int64_t>(local,
                                     static_cast<std::int64_t>(out.entries.size()));
    return out;
}

BlockingSet blocking_set(const SystemSpec& system, int task_i, int resource_x,
                         usecs Ri, const ResponseEstimates& R_of) {
    detail::Prepared prep(system);
    int idx = task_index_of(system, task_i);
    std::int64_t local = detail::local_request_count(prep, idx, resource_x, Ri);
    BlockingSet out;
    std::vector<detail::Run> runs;
    const int my_core = system.tasks[idx].core;
    for (int k = 0; k < system.num_cores; ++k) {
        if (k == my_core)
            continue;
        detail::xi_runs(prep, resource_x, k, Ri, R_of, runs);
        std::int64_t total = 0;
        for (const detail::Run& r : runs)
            total += r.count;
        std::int64_t cap = std::min(local, total);
        for (const detail::Run& r : runs) {
            if (cap <= 0)
                break;
            std::int64_t take = std::min(r.count, cap);
            out.entries.insert(out.entries.end(), static_cast<size_t>(take),
                               r.n);
            cap -= take;
        }
    }
    return out;
}

std::int64_t syn_overhead(const BlockingSet& set, std::int64_t n_local) {
    std::int64_t gt1 = 0;
    for (std::int64_t e : set.entries)
        if (e > 1)
            ++gt1;
    return std::min(gt1, n_local);
}

usecs resource_term(const SystemSpec& system, int task_i, usecs Ri,
                    const ResponseEstimates& R_of) {
    detail::Prepared prep(system);
    return detail::protocol_resource_term(prep, Protocol::LeftRs, {},
                                          task_index_of(system, task_i), Ri,
                                          R_of);
}

usecs arrival_blocking(const SystemSpec& system, int task_i, usecs Ri,
                       const ResponseEstimates& R_of) {
    detail::Prepared prep(system);
    return detail::protocol_arrival_blocking(prep, Protocol::LeftRs, {},
                                             task_index_of(system, task_i),
                                             Ri, R_of);
}

usecs fault_term(const SystemSpec& system, int task_i) {
    detail::Prepared prep(system);
    return detail::protocol_fault_term(prep, Protocol::LeftRs,
                                       task_index_of(system, task_i));
}

AnalysisResult response_time(const SystemSpec& system) {
    return detail::run_holistic(system, Protocol::LeftRs, {});
}

} // namespace leftrs
