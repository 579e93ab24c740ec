#ifndef LEFTRS_BASELINES_HPP
#define LEFTRS_BASELINES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "leftrs/analysis.hpp"
#include "leftrs/model.hpp"

namespace leftrs {

enum class Protocol { LeftRs, MsrpFt, MsrpFtOf, Checkpointing };

const char* protocol_name(Protocol p);
// Parses "leftrs" / "msrpft" / "msrpft-of" / "checkpointing"; throws
// std::invalid_argument otherwise.
Protocol protocol_from_name(const std::string& name);

// Helping-mechanism coordination overheads, in microseconds. Defaults are
// the measurement-backed constants used throughout the evaluation.
struct OverheadModel {
    usecs o_wrap = 1;
    usecs o_replica = 6;
    usecs o_self_wrap = 1;

    static OverheadModel zero() { return {0, 0, 0}; }
};

// Worst-case access time of one request under the helping mechanism:
// the requester runs its n_i executions unaided while each of the m
// preceding remote requests (largest execution counts placed nearest the
// queue tail, i.e. with the fewest helpers) contributes
// ceil(n_j / (position+1)) units. Permutation-invariant in remote_ns.
usecs msrpft_access(std::int64_t n_i, std::vector<std::int64_t> remote_ns,
                    usecs c);

// O_total(m) = m * (o_wrap + o_replica) + o_self_wrap, per request.
usecs msrpft_overhead(std::int64_t m, const OverheadModel& model);

// Sequential lock-holding recovery: every preceding remote holder
// re-executes all its faults while holding the lock.
usecs checkpointing_access(std::int64_t n_i,
                           const std::vector<std::int64_t>& remote_ns,
                           usecs c);

// Same holistic fixed point as response_time(), with the per-request
// access-time and fault terms swapped for the selected protocol. The
// overhead model only affects Protocol::MsrpFt.
AnalysisResult response_time_baseline(const SystemSpec& system,
                                      Protocol protocol,
                                      const OverheadModel& model = {});

} // namespace leftrs

#endif
