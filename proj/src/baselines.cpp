#include "leftrs/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "analysis_detail.hpp"

namespace leftrs {

const char* protocol_name(Protocol p) {
    switch (p) {
    case Protocol::LeftRs:
        return "leftrs";
    case Protocol::MsrpFt:
        return "msrpft";
    case Protocol::MsrpFtOf:
        return "msrpft-of";
    case Protocol::Checkpointing:
        return "checkpointing";
    }
    return "?";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "leftrs")
        return Protocol::LeftRs;
    if (name == "msrpft")
        return Protocol::MsrpFt;
    if (name == "msrpft-of")
        return Protocol::MsrpFtOf;
    if (name == "checkpointing")
        return Protocol::Checkpointing;
    throw std::invalid_argument("unknown protocol: " + name);
}

usecs msrpft_access(std::int64_t n_i, std::vector<std::int64_t> remote_ns,
                    usecs c) {
    std::sort(remote_ns.begin(), remote_ns.end(),
              std::greater<std::int64_t>());
    std::int64_t s = 0;
    for (size_t p = 0; p < remote_ns.size(); ++p)
        s += detail::ceil_div(remote_ns[p], static_cast<std::int64_t>(p) + 2);
    return (n_i + s) * c;
}

usecs msrpft_overhead(std::int64_t m, const OverheadModel& model) {
    return m * (model.o_wrap + model.o_replica) + model.o_self_wrap;
}

usecs checkpointing_access(std::int64_t n_i,
                           const std::vector<std::int64_t>& remote_ns,
                           usecs c) {
    std::int64_t total = n_i;
    for (std::int64_t n : remote_ns)
        total += n;
    return total * c;
}

AnalysisResult response_time_baseline(const SystemSpec& system,
                                      Protocol protocol,
                                      const OverheadModel& model) {
    OverheadModel effective = model;
    if (protocol != Protocol::MsrpFt)
        effective = OverheadModel::zero();
    return detail::run_holistic(system, protocol, effective);
}

} // namespace leftrs
