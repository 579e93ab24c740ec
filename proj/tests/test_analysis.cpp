#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "leftrs/analysis.hpp"
#include "leftrs/model.hpp"
#include "leftrs/rng.hpp"
#include "leftrs/taskgen.hpp"
#include "test_util.hpp"

using namespace leftrs;
using namespace leftrs::testutil;

// Naive reference implementation, straight from the defining equations with
// every list materialized entry by entry. Kept deliberately independent of
// the library's run-compressed path.
namespace oracle {

std::int64_t cdiv(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::vector<std::int64_t> eta(const SystemSpec& s, int j, int x, usecs Ri,
                              usecs Rj) {
    const TaskSpec* t = nullptr;
    for (const TaskSpec& u : s.tasks)
        if (u.id == j)
            t = &u;
    std::vector<std::int64_t> out;
    std::int64_t n_req = t->requests_to(x);
    if (n_req == 0)
        return out;
    std::int64_t windows = cdiv(Ri + Rj, t->T);
    for (std::int64_t q = 0; q < windows * n_req; ++q)
        out.push_back(t->f + 1);
    return out;
}

std::int64_t n_local(const SystemSpec& s, int i, int x, usecs Ri) {
    const TaskSpec& me = s.tasks[i];
    std::int64_t total = me.requests_to(x);
    for (const TaskSpec& h : s.tasks)
        if (h.core == me.core && h.priority > me.priority)
            total += cdiv(Ri, h.T) * h.requests_to(x);
    return total;
}

std::vector<std::int64_t> xi(const SystemSpec& s, int i, int x, int core,
                             usecs Ri, const std::vector<usecs>& R_of) {
    std::vector<std::int64_t> out;
    for (size_t j = 0; j < s.tasks.size(); ++j) {
        if (s.tasks[j].core != core)
            continue;
        auto part = oracle::eta(s, s.tasks[j].id, x, Ri, R_of[j]);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end(), std::greater<std::int64_t>());
    return out;
}

std::vector<std::int64_t> blocking(const SystemSpec& s, int i, int x,
                                   usecs Ri, const std::vector<usecs>& R_of) {
    std::vector<std::int64_t> out;
    std::int64_t local = oracle::n_local(s, i, x, Ri);
    for (int k = 0; k < s.num_cores; ++k) {
        if (k == s.tasks[i].core)
            continue;
        auto list = xi(s, i, x, k, Ri, R_of);
        std::int64_t cap =
            std::min<std::int64_t>(local, static_cast<std::int64_t>(list.size()));
        for (std::int64_t p = 0; p < cap; ++p)
            out.push_back(list[static_cast<size_t>(p)]);
    }
    return out;
}

usecs E(const SystemSpec& s, int i, usecs Ri, const std::vector<usecs>& R_of) {
    usecs total = 0;
    for (const ResourceSpec& r : s.resources) {
        std::int64_t local = oracle::n_local(s, i, r.id, Ri);
        auto set = blocking(s, i, r.id, Ri, R_of);
        std::int64_t gt1 = 0;
        for (auto e : set)
            if (e > 1)
                ++gt1;
        std::int64_t syn = std::min(gt1, local);
        total += (local + static_cast<std::int64_t>(set.size()) + syn) * r.c;
    }
    return total;
}

usecs B(const SystemSpec& s, int i, usecs Ri, const std::vector<usecs>& R_of) {
    const TaskSpec& me = s.tasks[i];
    usecs worst = 0;
    for (const ResourceSpec& r : s.resources) {
        int x = r.id;
        std::int64_t alpha = 0;
        for (const TaskSpec& l : s.tasks)
            if (l.core == me.core && l.priority < me.priority &&
                l.requests_to(x) > 0)
                alpha = std::max<std::int64_t>(alpha, l.f + 1);
        if (alpha == 0)
            continue;
        // global, or local ceiling at least P_i
        std::set<int> cores;
        int ceiling = 0;
        for (const TaskSpec& u : s.tasks)
            if (u.requests_to(x) > 0) {
                cores.insert(u.core);
                ceiling = std::max(ceiling, u.priority);
            }
        if (cores.size() < 2 && ceiling < me.priority)
            continue;
        std::int64_t local = oracle::n_local(s, i, x, Ri);
        std::vector<std::int64_t> beta;
        for (int k = 0; k < s.num_cores; ++k) {
            if (k == me.core)
                continue;
            auto list = xi(s, i, x, k, Ri, R_of);
            std::int64_t cap = std::min<std::int64_t>(
                local, static_cast<std::int64_t>(list.size()));
            if (cap + 1 <= static_cast<std::int64_t>(list.size()))
                beta.push_back(list[static_cast<size_t>(cap)]);
        }
        bool any_gt1 = std::any_of(beta.begin(), beta.end(),
                                   [](std::int64_t n) { return n > 1; });
        usecs cost =
            (alpha + static_cast<std::int64_t>(beta.size()) + (any_gt1 ? 1 : 0)) *
            r.c;
        worst = std::max(worst, cost);
    }
    return worst;
}

} // namespace oracle

TEST_CASE("eta: matches the window formula") {
    SUBCASE("three requests, one window, n = 2") {
        SystemSpec s = system(2, {{0, 1}},
                              {task(0, 0, 1, 100, 1, 1, {{0, 3}}),
                               task(1, 1, 1, 100, 1, 0, {{0, 1}})});
        auto e = eta(s, 0, 0, 30, 20);
        CHECK(e == std::vector<std::int64_t>{2, 2, 2});
    }
    SUBCASE("no requests, empty list") {
        SystemSpec s = system(1, {{0, 1}}, {task(0, 0, 1, 100, 1, 2)});
        CHECK(eta(s, 0, 0, 50, 50).empty());
    }
    SUBCASE("back-to-back: two windows") {
        SystemSpec s = system(1, {{0, 1}}, {task(0, 0, 1, 10, 1, 0, {{0, 1}})});
        CHECK(eta(s, 0, 0, 10, 10) == std::vector<std::int64_t>{1, 1});
    }
}

TEST_CASE("n_local: own plus preempting requests") {
    SUBCASE("no higher-priority tasks") {
        SystemSpec s = system(1, {{0, 1}}, {task(0, 0, 1, 100, 1, 0, {{0, 4}})});
        CHECK(n_local(s, 0, 0, 50) == 4);
    }
    SUBCASE("one preemptor, three windows") {
        SystemSpec s = system(1, {{0, 1}},
                              {task(0, 0, 1, 100, 1, 0, {{0, 2}}),
                               task(1, 0, 1, 10, 2, 0, {{0, 1}})});
        CHECK(n_local(s, 0, 0, 25) == 2 + 3);
    }
    SUBCASE("no local demand") {
        SystemSpec s = system(1, {{0, 1}},
                              {task(0, 0, 1, 100, 1, 0), task(1, 0, 1, 10, 2, 0)});
        CHECK(n_local(s, 0, 0, 25) == 0);
    }
}

TEST_CASE("blocking_set: per-core caps select the largest entries") {
    SUBCASE("no remote requests") {
        SystemSpec s = system(2, {{0, 1}}, {task(0, 0, 1, 100, 1, 0, {{0, 1}}),
                                            task(1, 1, 1, 100, 1, 0)});
        CHECK(blocking_set(s, 0, 0, 10, {10, 10}).entries.empty());
    }
    SUBCASE("one remote core, cap 1, head of the sorted list") {
        SystemSpec s = system(2, {{0, 1}},
                              {task(0, 0, 1, 1000, 1, 0, {{0, 1}}),
                               task(1, 1, 1, 1000, 2, 2, {{0, 1}}),
                               task(2, 1, 1, 1000, 1, 0, {{0, 1}})});
        auto bs = blocking_set(s, 0, 0, 10, {10, 10, 10});
        CHECK(bs.entries == std::vector<std::int64_t>{3});
    }
    SUBCASE("two remote cores with caps 1 and 2") {
        SystemSpec s = system(3, {{0, 1}},
                              {task(0, 0, 1, 1000, 1, 0, {{0, 2}}),
                               task(1, 1, 1, 1000, 1, 1, {{0, 1}}),
                               task(2, 2, 1, 1000, 1, 0, {{0, 2}})});
        auto bs = blocking_set(s, 0, 0, 10, {10, 10, 10});
        std::sort(bs.entries.begin(), bs.entries.end(),
                  std::greater<std::int64_t>());
        CHECK(bs.entries == std::vector<std::int64_t>{2, 1, 1});
    }
}

TEST_CASE("syn_overhead") {
    CHECK(syn_overhead({{1, 1, 1}}, 3) == 0);
    CHECK(syn_overhead({{3, 2, 1}}, 5) == 2);
    CHECK(syn_overhead({{4, 4, 4}}, 2) == 2);
}

TEST_CASE("resource_term: aggregate unit counts") {
    SUBCASE("no demand anywhere") {
        SystemSpec s = system(2, {{0, 1}},
                              {task(0, 0, 5, 100, 1, 0), task(1, 1, 5, 100, 1, 0)});
        CHECK(resource_term(s, 0, 10, {10, 10}) == 0);
    }
    SUBCASE("one local request against one faulty remote request") {
        SystemSpec s = system(2, {{0, 1}},
                              {task(0, 0, 0, 1000, 1, 0, {{0, 1}}),
                               task(1, 1, 0, 1000, 1, 5, {{0, 1}})});
        CHECK(resource_term(s, 0, 10, {10, 10}) == 3); // 1 + |{6}| + syn
    }
    SUBCASE("two local requests, fault-free remotes, c = 5") {
        SystemSpec s = system(2, {{0, 5}},
                              {task(0, 0, 0, 1000, 1, 0, {{0, 2}}),
                               task(1, 1, 0, 1000, 1, 0, {{0, 2}})});
        CHECK(resource_term(s, 0, 10, {10, 10}) == 20); // (2 + 2 + 0) * 5
    }
}

TEST_CASE("arrival_blocking") {
    SUBCASE("no blocking-capable resource") {
        SystemSpec s = system(1, {{0, 2}},
                              {task(0, 0, 1, 100, 2, 0), task(1, 0, 1, 100, 1, 0)});
        CHECK(arrival_blocking(s, 0, 10, {10, 10}) == 0);
    }
    SUBCASE("lower-priority holder with one fault, no remote leftovers") {
        SystemSpec s = system(1, {{0, 2}},
                              {task(0, 0, 1, 100, 2, 0, {{0, 1}}),
                               task(1, 0, 1, 100, 1, 1, {{0, 1}})});
        CHECK(arrival_blocking(s, 0, 10, {10, 10}) == 2 * 2); // alpha = 2
    }
    SUBCASE("remote leftover with n = 3 adds its unit and the sync unit") {
        SystemSpec s = system(2, {{0, 7}},
                              {task(0, 0, 1, 1000, 2, 0),
                               task(1, 0, 1, 1000, 1, 0, {{0, 1}}),
                               task(2, 1, 1, 1000, 1, 2, {{0, 1}})});
        // alpha = 1, N_local = 0 so beta takes the first remote entry (3)
        CHECK(arrival_blocking(s, 0, 10, {10, 10, 10}) == (1 + 1 + 1) * 7);
    }
}

TEST_CASE("fault_term: longest segment rule") {
    SystemSpec s = system(1, {{0, 2}, {1, 10}},
                          {task(0, 0, 5, 100, 3, 0, {{0, 1}}),
                           task(1, 0, 5, 100, 2, 3, {{0, 2}}),
                           task(2, 0, 1, 100, 1, 2, {{1, 1}})});
    CHECK(fault_term(s, 0) == 0);
    CHECK(fault_term(s, 1) == 15); // 3 * max(5, 2)
    CHECK(fault_term(s, 2) == 20); // 2 * max(1, 10)
}

TEST_CASE("response_time: single task collapses to C * (1 + f)") {
    SystemSpec s = system(1, {}, {task(0, 0, 10, 100, 1, 3)});
    AnalysisResult r = response_time(s);
    CHECK(r.tasks[0].R == 40);
    CHECK(r.schedulable);
    CHECK(r.converged);
}

TEST_CASE("response_time: the crafted two-core request charges 3 units") {
    // one resource with c = 1; remote budget allows five faults
    SystemSpec s = system(2, {{0, 1}},
                          {task(0, 0, 3, 1000, 1, 5, {{0, 1}}),
                           task(1, 1, 2, 1000, 1, 0, {{0, 1}})});
    AnalysisResult r = response_time(s);
    // per-request worst case for task 1: 1 local + 1 remote + 1 sync
    CHECK(r.tasks[1].E == 3);
    CHECK(r.tasks[1].R >= r.tasks[1].E + s.tasks[1].C);
}

TEST_CASE("response_time: unschedulable when a deadline is exceeded") {
    SystemSpec s = system(1, {},
                          {task(0, 0, 60, 100, 2, 0), task(1, 0, 50, 100, 1, 0)});
    AnalysisResult r = response_time(s);
    CHECK(!r.schedulable);
    CHECK(r.converged); // terminated deliberately, not capped
}

TEST_CASE("library terms equal the naive materialized oracle") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GenConfig cfg;
        cfg.M = 2 + static_cast<int>(seed % 3);
        cfg.N = 2 + static_cast<int>(seed % 3);
        cfg.rsf = 0.7;
        cfg.A = 3;
        cfg.f_max = 4;
        cfg.cs_max = 20;
        cfg.seed = seed;
        SystemSpec s = generate(cfg).system;

        Rng rng(seed * 17);
        std::vector<usecs> R_of;
        for (const TaskSpec& t : s.tasks)
            R_of.push_back(rng.uniform_int(0, 2 * t.T));

        for (size_t i = 0; i < s.tasks.size(); ++i) {
            usecs Ri = R_of[i];
            INFO("seed ", seed, " task ", i);
            CHECK(resource_term(s, static_cast<int>(i), Ri, R_of) ==
                  oracle::E(s, static_cast<int>(i), Ri, R_of));
            CHECK(arrival_blocking(s, static_cast<int>(i), Ri, R_of) ==
                  oracle::B(s, static_cast<int>(i), Ri, R_of));
            for (const ResourceSpec& r : s.resources) {
                CHECK(n_local(s, static_cast<int>(i), r.id, Ri) ==
                      oracle::n_local(s, static_cast<int>(i), r.id, Ri));
                auto lib = blocking_set(s, static_cast<int>(i), r.id, Ri, R_of)
                               .entries;
                auto ref = oracle::blocking(s, static_cast<int>(i), r.id, Ri,
                                            R_of);
                std::sort(lib.begin(), lib.end());
                std::sort(ref.begin(), ref.end());
                CHECK(lib == ref);
            }
        }
    }
}

TEST_CASE("fixed point: iterates are monotone and match response_time") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GenConfig cfg;
        cfg.M = 2;
        cfg.N = 3;
        cfg.rsf = 0.6;
        cfg.A = 2;
        cfg.f_max = 2;
        cfg.cs_max = 30;
        cfg.seed = seed;
        SystemSpec s = generate(cfg).system;
        const int n = static_cast<int>(s.tasks.size());

        std::vector<usecs> R(n), F(n);
        for (int i = 0; i < n; ++i) {
            F[i] = fault_term(s, i);
            R[i] = s.tasks[i].C + F[i];
        }
        bool done = false, miss = false;
        while (!done && !miss) {
            std::vector<usecs> next(n);
            done = true;
            for (int i = 0; i < n; ++i) {
                usecs interference = 0;
                for (int h : lhp(s, s.tasks[i].id)) {
                    const TaskSpec* th = nullptr;
                    for (const TaskSpec& u : s.tasks)
                        if (u.id == h)
                            th = &u;
                    std::int64_t idx = th - s.tasks.data();
                    interference += oracle::cdiv(R[i], th->T) *
                                    (th->C + F[static_cast<size_t>(idx)]);
                }
                next[i] = s.tasks[i].C + resource_term(s, i, R[i], R) +
                          arrival_blocking(s, i, R[i], R) + F[i] +
                          interference;
                CHECK(next[i] >= R[i]); // monotone
                if (next[i] != R[i])
                    done = false;
                if (next[i] > s.tasks[i].D)
                    miss = true;
            }
            R = next;
        }

        AnalysisResult lib = response_time(s);
        INFO("seed ", seed);
        CHECK(lib.schedulable == !miss);
        if (!miss)
            for (int i = 0; i < n; ++i)
                CHECK(lib.tasks[i].R == R[i]);
    }
}

TEST_CASE("corollary: remote blocking size ignores fault counts") {
    GenConfig cfg;
    cfg.M = 3;
    cfg.N = 3;
    cfg.rsf = 0.8;
    cfg.A = 3;
    cfg.f_max = 3;
    cfg.seed = 8;
    SystemSpec s = generate(cfg).system;
    std::vector<usecs> R_of;
    for (const TaskSpec& t : s.tasks)
        R_of.push_back(t.T);

    for (size_t i = 0; i < s.tasks.size(); ++i) {
        for (size_t j = 0; j < s.tasks.size(); ++j) {
            if (s.tasks[j].core == s.tasks[i].core)
                continue;
            SystemSpec bumped = s;
            bumped.tasks[j].f += 1;
            for (const ResourceSpec& r : s.resources) {
                usecs Ri = R_of[i];
                auto before = blocking_set(s, static_cast<int>(i), r.id, Ri, R_of);
                auto after =
                    blocking_set(bumped, static_cast<int>(i), r.id, Ri, R_of);
                CHECK(before.entries.size() == after.entries.size());
                std::int64_t local =
                    n_local(s, static_cast<int>(i), r.id, Ri);
                std::int64_t d = syn_overhead(after, local) -
                                 syn_overhead(before, local);
                CHECK(d >= 0);
                CHECK(d <= local);
            }
        }
    }
}

TEST_CASE("single-request caps: (n+m+1)c in general, (n+m)c fault-free") {
    for (int m = 0; m <= 3; ++m) {
        for (int fi = 0; fi <= 2; ++fi) {
            const usecs c = 4;
            SystemSpec s;
            s.num_cores = m + 1;
            s.resources.push_back({0, c});
            for (int p = 0; p < m; ++p) {
                TaskSpec t = task(p, p, 0, 1000000, 1, 2, {{0, 1}});
                s.tasks.push_back(t);
            }
            s.tasks.push_back(task(m, m, 0, 1000000, 1, fi, {{0, 1}}));
            AnalysisResult r = response_time(s);
            std::int64_t n_i = fi + 1;
            // remote budgets allow faults, so the sync unit is charged
            usecs cap = (n_i + m + (m > 0 ? 1 : 0)) * c;
            CHECK(r.tasks[static_cast<size_t>(m)].R == cap);

            // fault-free predecessors drop the sync unit
            SystemSpec s0 = s;
            for (int p = 0; p < m; ++p)
                s0.tasks[static_cast<size_t>(p)].f = 0;
            AnalysisResult r0 = response_time(s0);
            CHECK(r0.tasks[static_cast<size_t>(m)].R == (n_i + m) * c);
        }
    }
}

TEST_CASE("response_time is deterministic") {
    GenConfig cfg;
    cfg.seed = 55;
    SystemSpec s = generate(cfg).system;
    AnalysisResult a = response_time(s);
    AnalysisResult b = response_time(s);
    REQUIRE(a.tasks.size() == b.tasks.size());
    for (size_t i = 0; i < a.tasks.size(); ++i) {
        CHECK(a.tasks[i].R == b.tasks[i].R);
        CHECK(a.tasks[i].E == b.tasks[i].E);
        CHECK(a.tasks[i].B == b.tasks[i].B);
    }
    CHECK(a.schedulable == b.schedulable);
}

TEST_CASE("schedulable tasks satisfy R >= C + E + B + F") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        SystemSpec s = generate(cfg).system;
        AnalysisResult r = response_time(s);
        if (!r.schedulable)
            continue;
        for (size_t i = 0; i < s.tasks.size(); ++i)
            CHECK(r.tasks[i].R >=
                  s.tasks[i].C + r.tasks[i].E + r.tasks[i].B + r.tasks[i].F);
    }
}
