#include "analysis_detail.hpp"

#include <algorithm>
#include <stdexcept>

namespace leftrs::detail {

namespace {

constexpr int kIterationCap = 10000;

// number of entries > 1 among the first `cap` of a non-increasing run list
std::int64_t count_gt1_capped(const std::vector<Run>& runs, std::int64_t cap) {
    std::int64_t taken = 0, gt1 = 0;
    for (const Run& r : runs) {
        if (taken >= cap)
            break;
        std::int64_t take = std::min(r.count, cap - taken);
        if (r.n > 1)
            gt1 += take;
        taken += take;
    }
    return gt1;
}

std::int64_t total_count(const std::vector<Run>& runs) {
    std::int64_t s = 0;
    for (const Run& r : runs)
        s += r.count;
    return s;
}

// value of the idx-th entry (0-based) of a run list, or 0 if out of range
std::int64_t entry_at(const std::vector<Run>& runs, std::int64_t idx) {
    for (const Run& r : runs) {
        if (idx < r.count)
            return r.n;
        idx -= r.count;
    }
    return 0;
}

} // namespace

Prepared::Prepared(const SystemSpec& system) : sys(&system) {
    n_tasks = static_cast<int>(system.tasks.size());
    n_resources = static_cast<int>(system.resources.size());

    lhp.resize(n_tasks);
    llp.resize(n_tasks);
    for (int i = 0; i < n_tasks; ++i) {
        const TaskSpec& ti = system.tasks[i];
        for (int j = 0; j < n_tasks; ++j) {
            if (j == i || system.tasks[j].core != ti.core)
                continue;
            if (system.tasks[j].priority > ti.priority)
                lhp[i].push_back(j);
            else
                llp[i].push_back(j);
        }
    }

    demand.assign(n_tasks, std::vector<LocalDemand>(n_resources));
    for (int i = 0; i < n_tasks; ++i) {
        for (int x = 0; x < n_resources; ++x) {
            LocalDemand& d = demand[i][x];
            d.own = sys->tasks[i].requests_to(x);
            for (int h : lhp[i]) {
                std::int64_t nh = sys->tasks[h].requests_to(x);
                if (nh > 0)
                    d.hp.emplace_back(h, nh);
            }
        }
    }

    sources.assign(n_resources,
                   std::vector<std::vector<RemoteSource>>(system.num_cores));
    std::vector<std::vector<int>> user_cores(n_resources);
    for (int j = 0; j < n_tasks; ++j) {
        const TaskSpec& tj = system.tasks[j];
        for (const auto& [x, count] : tj.accesses) {
            if (count <= 0)
                continue;
            RemoteSource src;
            src.task_index = j;
            src.n = static_cast<std::int64_t>(tj.f) + 1;
            src.per_release = count;
            src.period = tj.T;
            sources[x][tj.core].push_back(src);
            user_cores[x].push_back(tj.core);
        }
    }
    for (auto& per_core : sources)
        for (auto& v : per_core)
            std::sort(v.begin(), v.end(),
                      [](const RemoteSource& a, const RemoteSource& b) {
                          if (a.n != b.n)
                              return a.n > b.n;
                          return a.task_index < b.task_index;
                      });

    global.assign(n_resources, false);
    std::vector<int> ceiling(n_resources, 0); // max priority among users
    std::vector<int> one_core(n_resources, -1);
    for (int x = 0; x < n_resources; ++x) {
        for (int c : user_cores[x]) {
            if (one_core[x] == -1)
                one_core[x] = c;
            else if (one_core[x] != c)
                global[x] = true;
        }
    }
    for (int j = 0; j < n_tasks; ++j)
        for (const auto& [x, count] : sys->tasks[j].accesses)
            if (count > 0)
                ceiling[x] = std::max(ceiling[x], sys->tasks[j].priority);

    // F^A(i): resources some llp(i) task requests, provided the resource is
    // global (non-preemptive access) or its ceiling reaches P_i
    arrival.resize(n_tasks);
    for (int i = 0; i < n_tasks; ++i) {
        const TaskSpec& ti = sys->tasks[i];
        for (int x = 0; x < n_resources; ++x) {
            std::int64_t alpha = 0;
            for (int l : llp[i])
                if (sys->tasks[l].requests_to(x) > 0)
                    alpha = std::max(alpha,
                                     static_cast<std::int64_t>(sys->tasks[l].f) + 1);
            if (alpha == 0)
                continue;
            if (!global[x] && ceiling[x] < ti.priority)
                continue;
            arrival[i].push_back({x, alpha});
        }
    }
}

void xi_runs(const Prepared& prep, int resource, int core, usecs Ri,
             const ResponseEstimates& R_of, std::vector<Run>& out) {
    out.clear();
    for (const RemoteSource& src : prep.sources[resource][core]) {
        std::int64_t releases =
            ceil_div(Ri + R_of[src.task_index], src.period);
        std::int64_t count = releases * src.per_release;
        if (count > 0)
            out.push_back({src.n, count});
    }
}

std::int64_t local_request_count(const Prepared& prep, int task_index,
                                 int resource, usecs Ri) {
    const LocalDemand& d = prep.demand[task_index][resource];
    std::int64_t total = d.own;
    for (const auto& [h, nh] : d.hp)
        total += ceil_div(Ri, prep.sys->tasks[h].T) * nh;
    return total;
}

ResourceCharge leftrs_resource_charge(const Prepared& prep, int task_index,
                                      int resource, usecs Ri,
                                      const ResponseEstimates& R_of) {
    ResourceCharge rc;
    rc.n_local = local_request_count(prep, task_index, resource, Ri);
    if (rc.n_local == 0)
        return rc;

    const int my_core = prep.sys->tasks[task_index].core;
    std::int64_t gt1 = 0;
    std::vector<Run> runs;
    for (int k = 0; k < prep.sys->num_cores; ++k) {
        if (k == my_core)
            continue;
        xi_runs(prep, resource, k, Ri, R_of, runs);
        std::int64_t cap = std::min(rc.n_local, total_count(runs));
        rc.remote += cap;
        gt1 += count_gt1_capped(runs, cap);
    }
    rc.syn = std::min(gt1, rc.n_local);
    return rc;
}

namespace {

// access cost of one local request, given the remote execution counts that
// can precede it (at most one per remote core)
usecs request_cost(Protocol proto, const OverheadModel& model,
                   std::vector<std::int64_t>& remote_ns, std::int64_t n_own,
                   usecs c) {
    switch (proto) {
    case Protocol::LeftRs: {
        std::int64_t m = static_cast<std::int64_t>(remote_ns.size());
        std::int64_t syn = 0;
        for (std::int64_t n : remote_ns)
            if (n > 1) {
                syn = 1;
                break;
            }
        return (n_own + m + syn) * c;
    }
    case Protocol::Checkpointing: {
        std::int64_t total = n_own;
        for (std::int64_t n : remote_ns)
            total += n;
        return total * c;
    }
    case Protocol::MsrpFt:
    case Protocol::MsrpFtOf: {
        usecs cost = msrpft_access(n_own, remote_ns, c);
        if (proto == Protocol::MsrpFt)
            cost += msrpft_overhead(
                static_cast<std::int64_t>(remote_ns.size()), model);
        return cost;
    }
    }
    return 0;
}

} // namespace

usecs protocol_resource_term(const Prepared& prep, Protocol proto,
                             const OverheadModel& model, int task_index,
                             usecs Ri, const ResponseEstimates& R_of) {
    const SystemSpec& sys = *prep.sys;
    const int my_core = sys.tasks[task_index].core;
    usecs total = 0;

    if (proto == Protocol::LeftRs) {
        for (int x = 0; x < prep.n_resources; ++x) {
            ResourceCharge rc =
                leftrs_resource_charge(prep, task_index, x, Ri, R_of);
            total += (rc.n_local + rc.remote + rc.syn) * sys.resources[x].c;
        }
        return total;
    }

    // The helping and checkpointing analyses charge each local request
    // individually: the p-th local request is delayed by the p-th largest
    // remote request of each core, consuming the xi lists exactly like the
    // pooled construction above. Stretches of requests that share the same
    // per-core values are costed once and multiplied.
    std::vector<std::vector<Run>> runs(sys.num_cores);
    std::vector<std::int64_t> caps(sys.num_cores);
    std::vector<std::int64_t> bounds;
    std::vector<std::int64_t> remote_ns;

    for (int x = 0; x < prep.n_resources; ++x) {
        std::int64_t n_loc = local_request_count(prep, task_index, x, Ri);
        if (n_loc == 0)
            continue;
        const usecs c = sys.resources[x].c;

        bounds.clear();
        bounds.push_back(0);
        bounds.push_back(n_loc);
        for (int k = 0; k < sys.num_cores; ++k) {
            if (k == my_core) {
                caps[k] = 0;
                continue;
            }
            xi_runs(prep, x, k, Ri, R_of, runs[k]);
            caps[k] = std::min(n_loc, total_count(runs[k]));
            std::int64_t prefix = 0;
            for (const Run& r : runs[k]) {
                prefix += r.count;
                if (prefix >= caps[k]) {
                    bounds.push_back(caps[k]);
                    break;
                }
                bounds.push_back(prefix);
            }
        }
        std::sort(bounds.begin(), bounds.end());
        bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

        for (size_t b = 0; b + 1 < bounds.size(); ++b) {
            std::int64_t lo = bounds[b];      // requests (lo, hi] 1-based
            std::int64_t hi = bounds[b + 1];
            if (lo >= n_loc)
                break;
            remote_ns.clear();
            for (int k = 0; k < sys.num_cores; ++k) {
                if (k == my_core || hi > caps[k])
                    continue;
                remote_ns.push_back(entry_at(runs[k], lo));
            }
            usecs cost = request_cost(proto, model, remote_ns, 1, c);
            total += (hi - lo) * cost;
        }
    }
    return total;
}

usecs protocol_arrival_blocking(const Prepared& prep, Protocol proto,
                                const OverheadModel& model, int task_index,
                                usecs Ri, const ResponseEstimates& R_of) {
    const SystemSpec& sys = *prep.sys;
    const int my_core = sys.tasks[task_index].core;
    usecs worst = 0;
    std::vector<Run> runs;
    std::vector<std::int64_t> beta;

    for (const ArrivalCandidate& cand : prep.arrival[task_index]) {
        const int x = cand.resource;
        const usecs c = sys.resources[x].c;
        std::int64_t n_loc = local_request_count(prep, task_index, x, Ri);

        // beta: the remote request each core can still place ahead of the
        // blocking lower-priority request, i.e. the entry just past the
        // cap already consumed by E_i
        beta.clear();
        for (int k = 0; k < sys.num_cores; ++k) {
            if (k == my_core)
                continue;
            xi_runs(prep, x, k, Ri, R_of, runs);
            std::int64_t cap = std::min(n_loc, total_count(runs));
            if (cap < total_count(runs))
                beta.push_back(entry_at(runs, cap));
        }

        usecs cost = request_cost(proto, model, beta, cand.alpha, c);
        worst = std::max(worst, cost);
    }
    return worst;
}

usecs protocol_fault_term(const Prepared& prep, Protocol proto,
                          int task_index) {
    const TaskSpec& t = prep.sys->tasks[task_index];
    if (t.f == 0)
        return 0;
    usecs longest = t.C;
    if (proto != Protocol::MsrpFt && proto != Protocol::MsrpFtOf) {
        // helpers absorb critical-section re-executions under the helping
        // protocol; elsewhere the longest segment may be a critical section
        for (const auto& [x, count] : t.accesses)
            if (count > 0)
                longest = std::max(longest, prep.sys->resources[x].c);
    }
    return static_cast<usecs>(t.f) * longest;
}

AnalysisResult run_holistic(const SystemSpec& system, Protocol proto,
                            const OverheadModel& model) {
    Prepared prep(system);
    const int n = prep.n_tasks;

    AnalysisResult res;
    res.tasks.resize(n);

    std::vector<usecs> F(n);
    ResponseEstimates R(n), R_next(n);
    for (int i = 0; i < n; ++i) {
        F[i] = protocol_fault_term(prep, proto, i);
        R[i] = system.tasks[i].C + F[i];
    }

    std::vector<usecs> E(n, 0), B(n, 0);
    bool missed = false;

    for (res.iterations = 1; res.iterations <= kIterationCap;
         ++res.iterations) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const TaskSpec& ti = system.tasks[i];
            E[i] = protocol_resource_term(prep, proto, model, i, R[i], R);
            B[i] = protocol_arrival_blocking(prep, proto, model, i, R[i], R);
            usecs interference = 0;
            for (int h : prep.lhp[i])
                interference += ceil_div(R[i], system.tasks[h].T) *
                                (system.tasks[h].C + F[h]);
            R_next[i] = ti.C + E[i] + B[i] + F[i] + interference;
            if (R_next[i] != R[i])
                changed = true;
            if (R_next[i] > ti.D)
                missed = true;
        }
        R.swap(R_next);
        if (missed || !changed)
            break;
    }

    if (res.iterations > kIterationCap) {
        res.iterations = kIterationCap;
        res.converged = false;
    }

    for (int i = 0; i < n; ++i) {
        TaskBounds& tb = res.tasks[i];
        tb.R = R[i];
        tb.E = E[i];
        tb.B = B[i];
        tb.F = F[i];
        tb.schedulable = R[i] <= system.tasks[i].D;
    }
    res.schedulable = res.converged && !missed;
    for (const TaskBounds& tb : res.tasks)
        res.schedulable = res.schedulable && tb.schedulable;
    return res;
}

} // namespace leftrs::detail
