#include "leftrs/sim.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "leftrs/rng.hpp"

namespace leftrs {

const char* sim_event_name(SimEventKind kind) {
    switch (kind) {
    case SimEventKind::Release: return "release";
    case SimEventKind::StartNormal: return "start_normal";
    case SimEventKind::CheckpointPass: return "checkpoint_pass";
    case SimEventKind::CheckpointFail: return "checkpoint_fail";
    case SimEventKind::RequestResource: return "request_resource";
    case SimEventKind::EnterSync: return "enter_sync";
    case SimEventKind::StartCsAttempt: return "start_cs_attempt";
    case SimEventKind::CsFault: return "cs_fault";
    case SimEventKind::CsSuccessWait: return "cs_success_wait";
    case SimEventKind::ResourceUpdate: return "resource_update";
    case SimEventKind::DataInducedRestart: return "data_induced_restart";
    case SimEventKind::LeaveFifo: return "leave_fifo";
    case SimEventKind::ResumeNormal: return "resume_normal";
    case SimEventKind::Complete: return "complete";
    case SimEventKind::DeadlineMiss: return "deadline_miss";
    }
    return "?";
}

FaultSchedule FaultSchedule::scripted(std::vector<ScriptedFault> faults) {
    FaultSchedule fs;
    fs.mode = Mode::Scripted;
    fs.faults = std::move(faults);
    return fs;
}

FaultSchedule FaultSchedule::randomized(std::uint64_t seed) {
    FaultSchedule fs;
    fs.mode = Mode::Randomized;
    fs.seed = seed;
    return fs;
}

ReleasePattern ReleasePattern::sporadic(std::uint64_t seed) {
    ReleasePattern rp;
    rp.kind = Kind::Sporadic;
    rp.seed = seed;
    return rp;
}

ReleasePattern ReleasePattern::scripted(std::vector<usecs> offsets) {
    ReleasePattern rp;
    rp.kind = Kind::Scripted;
    rp.offsets = std::move(offsets);
    return rp;
}

std::string trace_to_text(const SimTrace& trace) {
    std::ostringstream os;
    for (const SimEvent& e : trace.events) {
        os << e.time << ' ' << sim_event_name(e.kind) << ' ' << e.task << ' ';
        if (e.resource >= 0)
            os << e.resource;
        else
            os << '-';
        os << ' ' << e.attempt << '\n';
    }
    return os.str();
}

namespace {

constexpr usecs kInf = std::numeric_limits<usecs>::max();

struct Segment {
    int resource = -1; // -1: normal section
    usecs length = 0;
};

struct Job {
    int task_idx = 0;
    int release_idx = 0;
    usecs release = 0;
    usecs deadline = 0;
    int seg = 0;
    usecs remaining = 0;      // remaining work of the current normal/local attempt
    bool slice_active = false;
    usecs slice_start = 0;
    std::vector<int> completions;
    std::vector<int> pending; // randomized faults waiting per segment
    int faults_used = 0;
    bool in_global = false;
    bool holds_local = false;
    bool done = false;
    bool missed = false;
    usecs completion_time = -1;
    int ver = 0;
};

enum class MemSt { Syncing, Spinning, Executing, FaultPending, SuccessPending };

struct Member {
    int job = -1;
    MemSt st = MemSt::Executing;
    usecs sync_until = 0;
    usecs att_start = 0;
    usecs att_end = 0;
    usecs wake = -1; // unset
    int attempt_no = 0;
};

struct Ev {
    usecs t = 0;
    int phase = 0; // 0 attempt end, 1 segment end, 2 release, 3 deadline
    int a = 0;     // job index (phases 0,1,3) or task index (phase 2)
    int b = 0;     // resource (phase 0) or release index (phase 2)
    int ver = 0;

    bool operator>(const Ev& o) const {
        if (t != o.t) return t > o.t;
        if (phase != o.phase) return phase > o.phase;
        if (a != o.a) return a > o.a;
        return b > o.b;
    }
};

class Simulator {
public:
    Simulator(const SystemSpec& sys, SimProtocol proto,
              const ReleasePattern& rel, const FaultSchedule& fs,
              const SimOptions& opt)
        : sys_(sys), proto_(proto), rel_(rel), fs_(fs), opt_(opt) {
        prepare();
    }

    SimTrace run();

private:
    const SystemSpec& sys_;
    SimProtocol proto_;
    ReleasePattern rel_;
    FaultSchedule fs_;
    SimOptions opt_;

    usecs horizon_ = 0;
    int n_tasks_ = 0;

    std::vector<std::vector<Segment>> body_;   // per task
    std::vector<usecs> body_len_;              // per task, total length
    std::vector<bool> res_global_;
    std::vector<int> res_ceiling_;             // max user priority
    std::vector<usecs> res_c_;
    std::set<std::array<int, 4>> scripted_;    // (task id, release, seg, attempt)

    std::vector<Job> jobs_;
    std::vector<std::vector<Member>> queue_;   // per resource
    std::vector<std::vector<int>> ready_;      // per core, job indices
    std::vector<int> runner_;                  // per core, job index or -1
    std::vector<usecs> next_release_;          // per task
    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> heap_;

    SimTrace trace_;

    void prepare();
    void emit(usecs t, SimEventKind k, int job, int resource = -1,
              int attempt = 0) {
        if (opt_.record_events)
            trace_.events.push_back(
                {t, k, sys_.tasks[jobs_[job].task_idx].id, resource, attempt});
    }

    usecs effective_priority(const Job& j) const {
        if (j.in_global)
            return kInf;
        const TaskSpec& t = sys_.tasks[j.task_idx];
        if (j.holds_local)
            return std::max<usecs>(t.priority,
                                   res_ceiling_[body_[j.task_idx][j.seg].resource]);
        return t.priority;
    }

    bool fault_check(Job& j, int completion_idx) {
        if (fs_.mode == FaultSchedule::Mode::Scripted) {
            return scripted_.count({sys_.tasks[j.task_idx].id, j.release_idx,
                                    j.seg, completion_idx}) > 0;
        }
        if (j.pending[j.seg] > 0) {
            --j.pending[j.seg];
            return true;
        }
        return false;
    }

    void schedule_attempt_end(int job, int resource, usecs t) {
        heap_.push({t, 0, job, resource, ++jobs_[job].ver});
    }

    void start_attempt(Member& m, int resource, usecs t) {
        m.st = MemSt::Executing;
        m.att_start = t;
        m.att_end = t + res_c_[resource];
        m.wake = -1;
        ++m.attempt_no;
        schedule_attempt_end(m.job, resource, m.att_end);
        emit(t, SimEventKind::StartCsAttempt, m.job, resource, m.attempt_no);
    }

    void complete_job(int job, usecs t) {
        Job& j = jobs_[job];
        j.done = true;
        j.completion_time = t;
        if (t > j.deadline)
            j.missed = true;
        ++j.ver;
        emit(t, SimEventKind::Complete, job);
        int core = sys_.tasks[j.task_idx].core;
        auto& rl = ready_[core];
        rl.erase(std::remove(rl.begin(), rl.end(), job), rl.end());
        if (runner_[core] == job)
            runner_[core] = -1;
    }

    // move to the next segment; completes the job when none remain
    void advance_segment(int job, usecs t, std::vector<int>& dirty) {
        Job& j = jobs_[job];
        ++j.seg;
        j.remaining = 0;
        if (j.seg >= static_cast<int>(body_[j.task_idx].size())) {
            complete_job(job, t);
        }
        dirty.push_back(sys_.tasks[j.task_idx].core);
    }

    void resolve_leftrs(int x, usecs t, std::vector<int>& dirty);
    void resolve_ckpt(int x, usecs t, std::vector<int>& dirty);
    void join_queue(int job, int x, usecs t);
    void do_release(int task_idx, int release_idx, usecs t,
                    std::vector<int>& dirty);
    void dispatch(usecs t, const std::vector<int>& dirty);
};

void Simulator::prepare() {
    n_tasks_ = static_cast<int>(sys_.tasks.size());
    {
        auto problems = validate(sys_);
        if (!problems.empty())
            throw std::invalid_argument("simulate: invalid system: " +
                                        problems.front());
    }

    res_global_.assign(sys_.resources.size(), false);
    res_ceiling_.assign(sys_.resources.size(), 0);
    res_c_.assign(sys_.resources.size(), 0);
    std::vector<int> one_core(sys_.resources.size(), -1);
    for (const ResourceSpec& r : sys_.resources)
        res_c_[r.id] = r.c;
    for (const TaskSpec& t : sys_.tasks) {
        for (const auto& [x, count] : t.accesses) {
            if (count <= 0)
                continue;
            if (one_core[x] == -1)
                one_core[x] = t.core;
            else if (one_core[x] != t.core)
                res_global_[x] = true;
            res_ceiling_[x] = std::max(res_ceiling_[x], t.priority);
        }
    }

    // body: the requests first, in resource order, then one normal section
    body_.resize(n_tasks_);
    body_len_.assign(n_tasks_, 0);
    for (int i = 0; i < n_tasks_; ++i) {
        const TaskSpec& t = sys_.tasks[i];
        for (const auto& [x, count] : t.accesses)
            for (int k = 0; k < count; ++k)
                body_[i].push_back({x, res_c_[x]});
        if (t.C > 0)
            body_[i].push_back({-1, t.C});
        for (const Segment& s : body_[i])
            body_len_[i] += s.length;
    }

    if (fs_.mode == FaultSchedule::Mode::Scripted) {
        std::map<std::pair<int, int>, int> per_release;
        for (const ScriptedFault& f : fs_.faults) {
            if (f.attempt < 1)
                throw std::invalid_argument(
                    "fault schedule: attempt index must be >= 1");
            int idx = -1;
            for (int i = 0; i < n_tasks_; ++i)
                if (sys_.tasks[i].id == f.task)
                    idx = i;
            if (idx < 0)
                throw std::invalid_argument("fault schedule: unknown task " +
                                            std::to_string(f.task));
            if (f.segment < 0 ||
                f.segment >= static_cast<int>(body_[idx].size()))
                throw std::invalid_argument(
                    "fault schedule: segment out of range for task " +
                    std::to_string(f.task));
            int& used = per_release[{f.task, f.release}];
            if (++used > sys_.tasks[idx].f)
                throw std::invalid_argument(
                    "fault schedule: more faults than f for task " +
                    std::to_string(f.task));
            scripted_.insert({f.task, f.release, f.segment, f.attempt});
        }
    }

    usecs max_t = 1;
    for (const TaskSpec& t : sys_.tasks)
        max_t = std::max(max_t, t.T);
    horizon_ = opt_.horizon > 0 ? opt_.horizon : 2 * max_t;

    if (rel_.kind == ReleasePattern::Kind::Scripted &&
        rel_.offsets.size() != static_cast<size_t>(n_tasks_))
        throw std::invalid_argument(
            "release pattern: need one offset per task");

    queue_.resize(sys_.resources.size());
    ready_.resize(sys_.num_cores);
    runner_.assign(sys_.num_cores, -1);
    next_release_.assign(n_tasks_, 0);
}

void Simulator::do_release(int task_idx, int release_idx, usecs t,
                           std::vector<int>& dirty) {
    const TaskSpec& task = sys_.tasks[task_idx];
    int job = static_cast<int>(jobs_.size());
    jobs_.push_back({});
    Job& j = jobs_.back();
    j.task_idx = task_idx;
    j.release_idx = release_idx;
    j.release = t;
    j.deadline = t + task.D;
    j.completions.assign(body_[task_idx].size(), 0);
    j.pending.assign(body_[task_idx].size(), 0);
    emit(t, SimEventKind::Release, job);

    if (fs_.mode == FaultSchedule::Mode::Randomized && task.f > 0 &&
        body_len_[task_idx] > 0) {
        Rng r = Rng(fs_.seed)
                    .child(static_cast<std::uint64_t>(task.id))
                    .child(static_cast<std::uint64_t>(release_idx));
        int k = static_cast<int>(r.uniform_int(0, task.f));
        for (int q = 0; q < k; ++q) {
            usecs pick = r.uniform_int(0, body_len_[task_idx] - 1);
            for (size_t s = 0; s < body_[task_idx].size(); ++s) {
                if (pick < body_[task_idx][s].length) {
                    ++j.pending[s];
                    break;
                }
                pick -= body_[task_idx][s].length;
            }
        }
    }

    heap_.push({j.deadline, 3, job, 0, 0});

    if (body_[task_idx].empty()) {
        complete_job(job, t);
    } else {
        ready_[task.core].push_back(job);
        dirty.push_back(task.core);
    }

    // schedule the task's next release
    usecs next = -1;
    if (rel_.kind == ReleasePattern::Kind::SynchronousPeriodic) {
        next = t + task.T;
    } else if (rel_.kind == ReleasePattern::Kind::Sporadic) {
        Rng r = Rng(rel_.seed)
                    .child(static_cast<std::uint64_t>(task.id))
                    .child(static_cast<std::uint64_t>(release_idx));
        next = t + task.T + r.uniform_int(0, task.T);
    }
    if (next >= 0 && next < horizon_)
        heap_.push({next, 2, task_idx, release_idx + 1, 0});
}

void Simulator::join_queue(int job, int x, usecs t) {
    Job& j = jobs_[job];
    emit(t, SimEventKind::RequestResource, job, x);
    j.in_global = true;
    auto& q = queue_[x];

    Member m;
    m.job = job;

    if (proto_ == SimProtocol::Checkpointing) {
        bool front = q.empty();
        m.st = MemSt::Spinning;
        q.push_back(m);
        if (front)
            start_attempt(q.back(), x, t);
        return;
    }

    bool start_now = true;
    if (!q.empty()) {
        const Member& head = q.front();
        bool head_mid = head.st == MemSt::Executing && head.att_start < t &&
                        t < head.att_end;
        if (head_mid && !opt_.fault_mode_off) {
            // the synchronisation period is skipped only when no preceding
            // task can fault any more
            bool preds_exhausted = true;
            for (const Member& p : q) {
                const Job& pj = jobs_[p.job];
                if (sys_.tasks[pj.task_idx].f - pj.faults_used > 0) {
                    preds_exhausted = false;
                    break;
                }
            }
            if (!preds_exhausted) {
                m.st = MemSt::Syncing;
                m.sync_until = head.att_end;
                emit(t, SimEventKind::EnterSync, job, x);
                start_now = false;
            }
        }
    }
    q.push_back(m);
    if (start_now)
        start_attempt(q.back(), x, t);
}

void Simulator::resolve_leftrs(int x, usecs t, std::vector<int>& dirty) {
    auto& q = queue_[x];

    // outcomes of attempts ending now
    for (Member& m : q) {
        if (m.st != MemSt::Executing || m.att_end != t)
            continue;
        Job& j = jobs_[m.job];
        int idx = ++j.completions[j.seg];
        if (fault_check(j, idx)) {
            ++j.faults_used;
            m.st = MemSt::FaultPending;
            m.wake = -1;
            emit(t, SimEventKind::CsFault, m.job, x, m.attempt_no);
        } else {
            m.st = MemSt::SuccessPending;
            emit(t, SimEventKind::CsSuccessWait, m.job, x, m.attempt_no);
        }
    }

    // the front-most successful member may update once every preceding
    // member has faulted in its current execution; any success ahead of it
    // would itself be the candidate, so only the first one needs checking
    int winner = -1;
    for (size_t i = 0; i < q.size(); ++i) {
        if (q[i].st == MemSt::SuccessPending) {
            bool eligible = true;
            for (size_t p = 0; p < i; ++p)
                if (q[p].st != MemSt::FaultPending) {
                    eligible = false;
                    break;
                }
            if (eligible)
                winner = static_cast<int>(i);
            break;
        }
    }

    if (winner >= 0) {
        Member w = q[static_cast<size_t>(winner)];
        q.erase(q.begin() + winner);
        emit(t, SimEventKind::ResourceUpdate, w.job, x, w.attempt_no);
        emit(t, SimEventKind::LeaveFifo, w.job, x);
        jobs_[w.job].in_global = false;
        advance_segment(w.job, t, dirty);

        // the update stales every remaining copy: aborted and completed
        // attempts restart with the fresh value, fault retries coincide
        for (Member& m : q) {
            switch (m.st) {
            case MemSt::Executing: // mid-attempt: abort
                ++jobs_[m.job].ver;
                emit(t, SimEventKind::DataInducedRestart, m.job, x);
                start_attempt(m, x, t);
                break;
            case MemSt::SuccessPending: // stale result discarded
                emit(t, SimEventKind::DataInducedRestart, m.job, x);
                start_attempt(m, x, t);
                break;
            case MemSt::FaultPending:
                start_attempt(m, x, t);
                break;
            case MemSt::Syncing:
                start_attempt(m, x, t);
                break;
            case MemSt::Spinning:
                break;
            }
        }
        return;
    }

    // no update this tick: released sync waiters start, fault retries wait
    // for every attempt that was in flight when the fault hit
    usecs max_end = 0;
    for (const Member& m : q)
        if (m.st == MemSt::Executing && m.att_end > t)
            max_end = std::max(max_end, m.att_end);

    for (Member& m : q) {
        if (m.st == MemSt::FaultPending) {
            if (m.wake < 0)
                m.wake = max_end > 0 ? max_end : t;
            if (m.wake <= t)
                start_attempt(m, x, t);
        } else if (m.st == MemSt::Syncing && m.sync_until <= t) {
            start_attempt(m, x, t);
        }
    }
}

void Simulator::resolve_ckpt(int x, usecs t, std::vector<int>& dirty) {
    auto& q = queue_[x];
    if (q.empty())
        return;
    Member& h = q.front();
    if (h.st != MemSt::Executing || h.att_end != t)
        return;
    Job& j = jobs_[h.job];
    int idx = ++j.completions[j.seg];
    if (fault_check(j, idx)) {
        ++j.faults_used;
        emit(t, SimEventKind::CsFault, h.job, x, h.attempt_no);
        start_attempt(h, x, t); // re-execute while holding the lock
        return;
    }
    emit(t, SimEventKind::ResourceUpdate, h.job, x, h.attempt_no);
    emit(t, SimEventKind::LeaveFifo, h.job, x);
    jobs_[h.job].in_global = false;
    advance_segment(h.job, t, dirty);
    q.erase(q.begin());
    if (!q.empty())
        start_attempt(q.front(), x, t);
}

void Simulator::dispatch(usecs t, const std::vector<int>& dirty) {
    std::vector<int> joins;
    std::vector<int> cores(dirty);
    std::sort(cores.begin(), cores.end());
    cores.erase(std::unique(cores.begin(), cores.end()), cores.end());

    for (int core : cores) {
        // highest effective priority wins; the incumbent keeps the core on
        // ties, earlier releases of the same task run first
        int best = -1;
        for (int cand : ready_[core]) {
            if (jobs_[cand].done)
                continue;
            if (best < 0) {
                best = cand;
                continue;
            }
            const Job& a = jobs_[cand];
            const Job& b = jobs_[best];
            usecs ea = effective_priority(a), eb = effective_priority(b);
            bool better;
            if (ea != eb)
                better = ea > eb;
            else if ((cand == runner_[core]) != (best == runner_[core]))
                better = cand == runner_[core];
            else if (a.holds_local != b.holds_local)
                better = a.holds_local;
            else if (a.task_idx == b.task_idx)
                better = a.release_idx < b.release_idx;
            else
                better = sys_.tasks[a.task_idx].id < sys_.tasks[b.task_idx].id;
            if (better)
                best = cand;
        }

        if (runner_[core] != best && runner_[core] >= 0) {
            Job& old = jobs_[runner_[core]];
            if (old.slice_active) {
                old.remaining -= t - old.slice_start;
                old.slice_active = false;
                ++old.ver;
            }
        }
        runner_[core] = best;
        if (best < 0)
            continue;

        Job& j = jobs_[best];
        if (j.done || j.in_global)
            continue;
        const Segment& s = body_[j.task_idx][j.seg];
        if (s.resource >= 0 && res_global_[s.resource]) {
            joins.push_back(best);
            continue;
        }
        if (!j.slice_active) {
            bool fresh = j.remaining == 0;
            if (fresh) {
                j.remaining = s.length;
                if (s.resource >= 0) {
                    j.holds_local = true;
                    emit(t, SimEventKind::StartCsAttempt, best, s.resource,
                         j.completions[j.seg] + 1);
                } else {
                    emit(t, SimEventKind::StartNormal, best);
                }
            } else if (s.resource < 0) {
                emit(t, SimEventKind::ResumeNormal, best);
            }
            j.slice_active = true;
            j.slice_start = t;
            heap_.push({t + j.remaining, 1, best, 0, ++j.ver});
        }
    }

    std::sort(joins.begin(), joins.end(), [this](int a, int b) {
        return sys_.tasks[jobs_[a].task_idx].id <
               sys_.tasks[jobs_[b].task_idx].id;
    });
    for (int job : joins)
        join_queue(job, body_[jobs_[job].task_idx][jobs_[job].seg].resource,
                   t);
}

SimTrace Simulator::run() {
    std::vector<int> dirty;

    // initial releases
    for (int i = 0; i < n_tasks_; ++i) {
        usecs first = 0;
        if (rel_.kind == ReleasePattern::Kind::Scripted)
            first = rel_.offsets[static_cast<size_t>(i)];
        if (first < horizon_)
            heap_.push({first, 2, i, 0, 0});
    }

    while (!heap_.empty() && heap_.top().t <= horizon_) {
        const usecs t = heap_.top().t;

        std::vector<int> res_ticks;
        std::vector<int> seg_ends;
        std::vector<std::pair<int, int>> releases; // (task idx, release idx)
        std::vector<int> deadline_checks;
        dirty.clear();

        while (!heap_.empty() && heap_.top().t == t) {
            Ev ev = heap_.top();
            heap_.pop();
            switch (ev.phase) {
            case 0:
                if (ev.ver == jobs_[ev.a].ver)
                    res_ticks.push_back(ev.b);
                break;
            case 1:
                if (ev.ver == jobs_[ev.a].ver)
                    seg_ends.push_back(ev.a);
                break;
            case 2:
                releases.emplace_back(ev.a, ev.b);
                break;
            case 3:
                deadline_checks.push_back(ev.a);
                break;
            }
        }

        // 1. resource rounds: updates, restarts, retries
        std::sort(res_ticks.begin(), res_ticks.end());
        res_ticks.erase(std::unique(res_ticks.begin(), res_ticks.end()),
                        res_ticks.end());
        for (int x : res_ticks) {
            if (proto_ == SimProtocol::LeftRs)
                resolve_leftrs(x, t, dirty);
            else
                resolve_ckpt(x, t, dirty);
        }

        // 2. normal / local critical-section segment ends
        std::sort(seg_ends.begin(), seg_ends.end(), [this](int a, int b) {
            return sys_.tasks[jobs_[a].task_idx].id <
                   sys_.tasks[jobs_[b].task_idx].id;
        });
        for (int job : seg_ends) {
            Job& j = jobs_[job];
            j.slice_active = false;
            j.remaining = 0;
            const Segment& s = body_[j.task_idx][j.seg];
            int idx = ++j.completions[j.seg];
            if (fault_check(j, idx)) {
                ++j.faults_used;
                emit(t, SimEventKind::CheckpointFail, job, s.resource, idx);
                // roll back to the checkpoint at the segment start
                dirty.push_back(sys_.tasks[j.task_idx].core);
            } else {
                emit(t, SimEventKind::CheckpointPass, job, s.resource, idx);
                j.holds_local = false;
                advance_segment(job, t, dirty);
            }
        }

        // 3. releases
        std::sort(releases.begin(), releases.end(),
                  [this](const auto& a, const auto& b) {
                      return sys_.tasks[a.first].id < sys_.tasks[b.first].id;
                  });
        for (const auto& [task_idx, release_idx] : releases)
            do_release(task_idx, release_idx, t, dirty);

        // 4. deadlines
        for (int job : deadline_checks) {
            Job& j = jobs_[job];
            if (!j.done && !j.missed) {
                j.missed = true;
                emit(t, SimEventKind::DeadlineMiss, job);
                trace_.deadline_missed = true;
            }
        }

        // 5. scheduler
        dispatch(t, dirty);
    }

    for (const Job& j : jobs_) {
        JobOutcome o;
        o.task = sys_.tasks[j.task_idx].id;
        o.release_index = j.release_idx;
        o.release = j.release;
        o.completed = j.done;
        o.completion = j.completion_time;
        o.missed = j.missed;
        trace_.jobs.push_back(o);
        if (!j.done)
            trace_.in_flight_at_horizon = true;
        if (j.missed)
            trace_.deadline_missed = true;
    }
    return trace_;
}

} // namespace

SimTrace simulate(const SystemSpec& system, SimProtocol protocol,
                  const ReleasePattern& releases, const FaultSchedule& faults,
                  const SimOptions& options) {
    Simulator sim(system, protocol, releases, faults, options);
    return sim.run();
}

namespace {

// one fault-decision point: a completed execution that succeeded while the
// task still had budget; a sibling run may fault it instead
struct DecisionPoint {
    usecs time;
    int task;     // task id
    int attempt;  // completion index
    bool operator<(const DecisionPoint& o) const {
        if (time != o.time)
            return time < o.time;
        if (task != o.task)
            return task < o.task;
        return attempt < o.attempt;
    }
};

struct ProbeRun {
    usecs access = -1;
    usecs access_end = -1; // absolute time of the observer's update
    std::vector<DecisionPoint> successes; // with budget left, in time order
};

ProbeRun probe_run(const SystemSpec& system, int observer_id, int resource_x,
                   const std::vector<usecs>& offsets,
                   const std::vector<ScriptedFault>& faults, usecs horizon,
                   const std::map<int, int>& budget) {
    SimOptions opt;
    opt.horizon = horizon;
    opt.record_events = true;
    SimTrace tr = simulate(system, SimProtocol::LeftRs,
                           ReleasePattern::scripted(offsets),
                           FaultSchedule::scripted(faults), opt);

    ProbeRun out;
    std::map<int, int> completions, faults_seen;
    usecs req = -1;
    for (const SimEvent& e : tr.events) {
        if (e.resource != resource_x)
            continue;
        bool fault = e.kind == SimEventKind::CsFault ||
                     e.kind == SimEventKind::CheckpointFail;
        bool success = e.kind == SimEventKind::CsSuccessWait ||
                       e.kind == SimEventKind::CheckpointPass;
        if (fault || success) {
            int idx = ++completions[e.task];
            if (fault)
                ++faults_seen[e.task];
            else if (faults_seen[e.task] < budget.at(e.task))
                out.successes.push_back({e.time, e.task, idx});
        }
        if (e.task == observer_id) {
            if ((e.kind == SimEventKind::RequestResource ||
                 e.kind == SimEventKind::StartCsAttempt) &&
                req < 0)
                req = e.time;
            if ((e.kind == SimEventKind::ResourceUpdate ||
                 e.kind == SimEventKind::CheckpointPass) &&
                out.access < 0 && req >= 0) {
                out.access = e.time - req;
                out.access_end = e.time;
            }
        }
    }
    if (out.access < 0)
        throw std::logic_error("worst_case_probe: access did not finish");
    return out;
}

} // namespace

usecs worst_case_probe(const SystemSpec& system, int task_i, int resource_x,
                       std::int64_t fault_space_bound) {
    // collect the requesters; the instance must be small and flat
    std::vector<int> requesters; // task indices
    int observer = -1;
    std::set<int> cores;
    std::map<int, int> budget; // task id -> f
    for (int i = 0; i < static_cast<int>(system.tasks.size()); ++i) {
        const TaskSpec& t = system.tasks[i];
        if (t.requests_to(resource_x) == 0) {
            if (!t.accesses.empty())
                throw std::invalid_argument(
                    "worst_case_probe: tasks must access only the probed resource");
            continue;
        }
        if (t.accesses.size() != 1 || t.requests_to(resource_x) != 1)
            throw std::invalid_argument(
                "worst_case_probe: each requester needs exactly one request");
        if (!cores.insert(t.core).second)
            throw std::invalid_argument(
                "worst_case_probe: one requester per core");
        if (t.f + 1 > 8)
            throw std::invalid_argument("worst_case_probe: n too large");
        budget[t.id] = t.f;
        if (t.id == task_i)
            observer = i;
        else
            requesters.push_back(i);
    }
    if (observer < 0)
        throw std::invalid_argument("worst_case_probe: task does not request");
    const int m = static_cast<int>(requesters.size());
    if (m > 3)
        throw std::invalid_argument("worst_case_probe: more than 3 remote requesters");

    const usecs c = system.resources[resource_x].c;
    const usecs step = std::max<usecs>(1, c / 4);
    std::vector<usecs> deltas;
    for (usecs d = 0; d <= c; d += step)
        deltas.push_back(d);

    const int observer_id = system.tasks[observer].id;

    usecs total_n = system.tasks[observer].f + 1;
    for (int p : requesters)
        total_n += system.tasks[p].f + 1;

    // order predecessors by n so next_permutation enumerates each distinct
    // n-arrangement once
    std::sort(requesters.begin(), requesters.end(), [&system](int a, int b) {
        return system.tasks[a].f < system.tasks[b].f;
    });

    usecs worst = 0;
    std::int64_t sims = 0;

    std::vector<int> order = requesters;
    do {
        std::vector<int> gap(std::max(m, 1), 0); // chained join gaps; the
                                                 // last entry is the
                                                 // observer's gap
        for (;;) {
            std::vector<usecs> offsets(system.tasks.size(), 0);
            usecs at = 0;
            for (int p = 0; p < m; ++p) {
                if (p > 0)
                    at += deltas[static_cast<size_t>(gap[p - 1])];
                offsets[static_cast<size_t>(order[p])] = at;
            }
            usecs obs_at =
                m > 0 ? at + deltas[static_cast<size_t>(gap[m - 1])] : 0;
            offsets[static_cast<size_t>(observer)] = obs_at;
            usecs horizon = obs_at + (total_n * (m + 2) + m + 3) * c + 16;

            // every admissible fault placement, enumerated lazily: a node's
            // children add one fault at a success point occurring after the
            // node's last injected fault, so each placement is visited once
            struct Node {
                std::vector<ScriptedFault> faults;
                DecisionPoint last{-1, -1, -1};
            };
            std::vector<Node> stack{{}};
            while (!stack.empty()) {
                Node node = std::move(stack.back());
                stack.pop_back();
                if (++sims > fault_space_bound)
                    throw std::invalid_argument(
                        "worst_case_probe: search space exceeds bound");
                ProbeRun run = probe_run(system, observer_id, resource_x,
                                         offsets, node.faults, horizon,
                                         budget);
                worst = std::max(worst, run.access);
                for (const DecisionPoint& p : run.successes) {
                    if (!(node.last < p))
                        continue;
                    // a fault after the observer's own update cannot
                    // lengthen its access any more
                    if (p.time > run.access_end)
                        continue;
                    Node child;
                    child.faults = node.faults;
                    child.faults.push_back({p.task, 0, 0, p.attempt});
                    child.last = p;
                    stack.push_back(std::move(child));
                }
            }

            // next gap combination
            bool more = false;
            for (int p = 0; p < m; ++p) {
                if (gap[p] + 1 < static_cast<int>(deltas.size())) {
                    ++gap[p];
                    for (int r = 0; r < p; ++r)
                        gap[r] = 0;
                    more = true;
                    break;
                }
            }
            if (!more)
                break;
        }
    } while (std::next_permutation(
        order.begin(), order.end(), [&system](int a, int b) {
            return system.tasks[a].f < system.tasks[b].f;
        }));

    return worst;
}

} // namespace leftrs
