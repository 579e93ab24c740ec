#include "leftrs/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace leftrs {

namespace {

// child-stream tags; one stream per concern, plus one per task index
constexpr std::uint64_t kStreamUunifast = 1;
constexpr std::uint64_t kStreamSharing = 2;
constexpr std::uint64_t kStreamResources = 3;
constexpr std::uint64_t kStreamTaskBase = 0x1000;

void check_config(const GenConfig& cfg) {
    if (cfg.M < 1 || cfg.N < 1)
        throw std::invalid_argument("generate: M and N must be >= 1");
    if (cfg.rsf < 0.0 || cfg.rsf > 1.0)
        throw std::invalid_argument("generate: rsf outside [0, 1]");
    if (cfg.period_min < 1 || cfg.period_max < cfg.period_min)
        throw std::invalid_argument("generate: bad period range");
    if (cfg.cs_min < 1 || cfg.cs_max < cfg.cs_min)
        throw std::invalid_argument("generate: bad critical-section range");
    if (cfg.A < 1)
        throw std::invalid_argument("generate: A must be >= 1");
    if (cfg.f_max < 0)
        throw std::invalid_argument("generate: f_max must be >= 0");
    if (cfg.util_per_task_slot <= 0.0)
        throw std::invalid_argument("generate: utilisation slot must be > 0");
}

usecs draw_log_uniform_period(Rng& rng, usecs lo, usecs hi) {
    if (lo == hi)
        return lo;
    double e = rng.next_double();
    double v = std::exp(std::log(static_cast<double>(lo)) +
                        e * (std::log(static_cast<double>(hi)) -
                             std::log(static_cast<double>(lo))));
    usecs p = static_cast<usecs>(std::llround(v));
    return std::clamp(p, lo, hi);
}

// uniform subset of `size` elements out of 0..k-1 (partial Fisher-Yates)
std::vector<int> draw_subset(Rng& rng, int k, int size) {
    std::vector<int> pool(k);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < size; ++i) {
        int j = static_cast<int>(rng.uniform_int(i, k - 1));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

std::vector<double> uunifast(int n, double u_total, Rng& rng) {
    if (n < 1)
        throw std::invalid_argument("uunifast: n must be >= 1");
    if (u_total <= 0.0)
        throw std::invalid_argument("uunifast: u_total must be > 0");
    std::vector<double> u(n);
    double sum = u_total;
    for (int i = 1; i < n; ++i) {
        double next = sum * std::pow(rng.next_double(),
                                     1.0 / static_cast<double>(n - i));
        u[i - 1] = sum - next;
        sum = next;
    }
    u[n - 1] = sum;
    return u;
}

Generated generate(const GenConfig& cfg) {
    check_config(cfg);

    const int n_tasks = cfg.M * cfg.N;
    const int n_res = cfg.resource_count();
    const double u_total = cfg.util_per_task_slot * n_tasks;
    Rng root(cfg.seed);

    Generated out;
    SystemSpec& sys = out.system;
    sys.num_cores = cfg.M;

    // resource lengths
    {
        Rng res_rng = root.child(kStreamResources);
        for (int x = 0; x < n_res; ++x) {
            ResourceSpec r;
            r.id = x;
            r.c = res_rng.uniform_int(cfg.cs_min, cfg.cs_max);
            sys.resources.push_back(r);
        }
    }

    // utilisations and which tasks share
    Rng uu_rng = root.child(kStreamUunifast);
    std::vector<double> util = uunifast(n_tasks, u_total, uu_rng);

    const int n_sharing = static_cast<int>(cfg.rsf * n_tasks);
    Rng share_rng = root.child(kStreamSharing);
    std::vector<int> sharing = draw_subset(share_rng, n_tasks, n_sharing);
    std::vector<bool> shares(n_tasks, false);
    for (int i : sharing)
        shares[i] = true;

    // per-task parameters
    sys.tasks.resize(n_tasks);
    for (int i = 0; i < n_tasks; ++i) {
        Rng trng = root.child(kStreamTaskBase + static_cast<std::uint64_t>(i));
        TaskSpec& t = sys.tasks[i];
        t.id = i;
        t.T = draw_log_uniform_period(trng, cfg.period_min, cfg.period_max);
        t.D = t.T; // implicit deadlines
        t.f = static_cast<int>(trng.uniform_int(0, cfg.f_max));

        const double budget = util[i] * static_cast<double>(t.T);
        const usecs budget_us = static_cast<usecs>(std::llround(budget));

        if (shares[i]) {
            // Draw the access set; redraw while the critical sections
            // exceed the task's execution budget. When no draw fits, keep
            // the lightest one seen and clamp C to 0.
            usecs best_total = -1;
            std::map<int, int> best_acc;
            for (int attempt = 0; attempt < 100; ++attempt) {
                int size = static_cast<int>(trng.uniform_int(1, n_res));
                std::map<int, int> acc;
                usecs cs_total = 0;
                for (int x : draw_subset(trng, n_res, size)) {
                    int count = static_cast<int>(trng.uniform_int(1, cfg.A));
                    acc[x] = count;
                    cs_total += static_cast<usecs>(count) * sys.resources[x].c;
                }
                if (best_total < 0 || cs_total < best_total) {
                    best_total = cs_total;
                    best_acc = std::move(acc);
                }
                if (best_total <= budget_us)
                    break;
                ++out.stats.redraws;
            }
            t.accesses = std::move(best_acc);
            if (best_total > budget_us) {
                ++out.stats.clamped_tasks;
                out.stats.clamp_slack +=
                    static_cast<double>(best_total - budget_us) /
                    static_cast<double>(t.T);
                t.C = 0;
            } else {
                t.C = budget_us - best_total;
            }
        } else {
            t.C = budget_us;
        }
    }

    // worst-fit partitioning on total utilisation, at most N tasks per core
    {
        std::vector<double> load(cfg.M, 0.0);
        std::vector<int> count(cfg.M, 0);
        for (TaskSpec& t : sys.tasks) {
            usecs cs_total = 0;
            for (const auto& [x, cnt] : t.accesses)
                cs_total += static_cast<usecs>(cnt) * sys.resources[x].c;
            double u = static_cast<double>(t.C + cs_total) /
                       static_cast<double>(t.T);
            int best = -1;
            for (int k = 0; k < cfg.M; ++k) {
                if (count[k] >= cfg.N)
                    continue;
                if (best < 0 || load[k] < load[best])
                    best = k;
            }
            if (best < 0)
                throw std::invalid_argument("generate: no core with capacity");
            t.core = best;
            load[best] += u;
            ++count[best];
        }
    }

    // deadline-monotonic priorities, unique per core; shorter deadline gets
    // the larger value, ties broken towards the lower task id
    for (int k = 0; k < cfg.M; ++k) {
        std::vector<int> ids;
        for (const TaskSpec& t : sys.tasks)
            if (t.core == k)
                ids.push_back(t.id);
        std::sort(ids.begin(), ids.end(), [&sys](int a, int b) {
            if (sys.tasks[a].D != sys.tasks[b].D)
                return sys.tasks[a].D < sys.tasks[b].D;
            return a < b;
        });
        int p = static_cast<int>(ids.size());
        for (int id : ids)
            sys.tasks[id].priority = p--;
    }

    return out;
}

} // namespace leftrs
