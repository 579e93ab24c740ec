#ifndef LEFTRS_SIM_HPP
#define LEFTRS_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "leftrs/model.hpp"

namespace leftrs {

enum class SimProtocol { LeftRs, Checkpointing };

enum class SimEventKind {
    Release,
    StartNormal,
    CheckpointPass,
    CheckpointFail,
    RequestResource,
    EnterSync,
    StartCsAttempt,
    CsFault,
    CsSuccessWait,
    ResourceUpdate,
    DataInducedRestart,
    LeaveFifo,
    ResumeNormal,
    Complete,
    DeadlineMiss,
};

const char* sim_event_name(SimEventKind kind);

struct SimEvent {
    usecs time = 0;
    SimEventKind kind = SimEventKind::Release;
    int task = -1;
    int resource = -1; // -1 when not applicable
    int attempt = 0;   // 0 when not applicable
};

// Marks one completed execution attempt of one segment as faulty.
// Segments are indexed within the task body; attempt indices are 1-based
// and count completed (not aborted) attempts of that segment.
struct ScriptedFault {
    int task = 0;
    int release = 0;
    int segment = 0;
    int attempt = 1;
};

struct FaultSchedule {
    enum class Mode { Scripted, Randomized };
    Mode mode = Mode::Scripted;
    std::vector<ScriptedFault> faults; // scripted mode
    std::uint64_t seed = 0;            // randomized mode

    // Randomized: per release draw k ~ uniform[0, f_i] faults, each placed
    // on a segment picked with probability proportional to segment length
    // and consumed by that segment's next completed attempt.
    static FaultSchedule none() { return {}; }
    static FaultSchedule scripted(std::vector<ScriptedFault> faults);
    static FaultSchedule randomized(std::uint64_t seed);
};

struct ReleasePattern {
    enum class Kind { SynchronousPeriodic, Sporadic, Scripted };
    Kind kind = Kind::SynchronousPeriodic;
    std::uint64_t seed = 0;     // sporadic: inter-arrivals uniform [T, 2T]
    std::vector<usecs> offsets; // scripted: one job per task, at its offset

    static ReleasePattern synchronous_periodic() { return {}; }
    static ReleasePattern sporadic(std::uint64_t seed);
    static ReleasePattern scripted(std::vector<usecs> offsets);
};

struct JobOutcome {
    int task = 0;
    int release_index = 0;
    usecs release = 0;
    usecs completion = -1; // -1 while incomplete
    bool completed = false;
    bool missed = false;

    usecs response() const { return completed ? completion - release : -1; }
};

struct SimTrace {
    std::vector<SimEvent> events;
    std::vector<JobOutcome> jobs;
    bool deadline_missed = false;
    bool in_flight_at_horizon = false;
};

struct SimOptions {
    usecs horizon = 0;          // 0: twice the longest period
    bool record_events = true;  // off for bulk campaigns
    bool fault_mode_off = false; // disables the synchronisation period
};

// Deterministic function of all inputs. Throws std::invalid_argument on an
// invalid system or fault schedule.
SimTrace simulate(const SystemSpec& system, SimProtocol protocol,
                  const ReleasePattern& releases, const FaultSchedule& faults,
                  const SimOptions& options = {});

// Exhaustive small-instance oracle: enumerates every fault pattern within
// each requester's budget, every FIFO arrangement and all join offsets on a
// quarter-of-c grid, returning the worst observed access duration of task
// i's request to resource x. Requires a small instance (every requester of
// x holds a single request to x only, one requester per core, n <= 4,
// at most 3 remote requesters); throws std::invalid_argument otherwise or
// when the enumeration would exceed fault_space_bound simulations.
usecs worst_case_probe(const SystemSpec& system, int task_i, int resource_x,
                       std::int64_t fault_space_bound = 50'000'000);

// Line-oriented trace rendering: "time_us kind task resource attempt".
std::string trace_to_text(const SimTrace& trace);

} // namespace leftrs

#endif
