#ifndef LEFTRS_HARNESS_HPP
#define LEFTRS_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "leftrs/baselines.hpp"
#include "leftrs/taskgen.hpp"

namespace leftrs {

enum class SweepParam { M, NM, Rsf, L, A, F };

const char* sweep_param_name(SweepParam p);
SweepParam sweep_param_from_name(const std::string& name);
std::vector<double> default_sweep_values(SweepParam p);

struct SweepConfig {
    GenConfig base;
    SweepParam param = SweepParam::M;
    std::vector<double> values;  // empty: default axis for param
    int systems_per_point = 200; // 1000 at paper scale
    std::vector<Protocol> protocols = {Protocol::LeftRs, Protocol::MsrpFt,
                                       Protocol::MsrpFtOf,
                                       Protocol::Checkpointing};
    OverheadModel overheads;
    std::uint64_t master_seed = 1;
    int workers = 0; // 0: hardware concurrency
};

struct PointResult {
    double value = 0;
    bool skipped = false; // generation infeasible at this point
    std::vector<int> schedulable;            // per protocol
    std::vector<std::vector<bool>> verdicts; // [protocol][system index]

    double fraction(size_t protocol_idx, int systems) const {
        return systems > 0
                   ? static_cast<double>(schedulable[protocol_idx]) / systems
                   : 0.0;
    }
};

struct SchedulabilityCurve {
    SweepParam param = SweepParam::M;
    std::vector<Protocol> protocols;
    int systems_per_point = 0;
    std::vector<PointResult> points;
};

// System k at point p uses seed mix_seed(master, p, k); results are
// aggregated in (point, system) order, so the output is byte-identical for
// any worker count.
SchedulabilityCurve sweep(const SweepConfig& cfg);

struct ExclusiveRow {
    double value = 0;
    int msrpft_only = 0; // schedulable by MSRP-FT, not by LEFT-RS
    int leftrs_only = 0;
};

// Requires the curve to carry both MSRP-FT and LEFT-RS verdicts.
std::vector<ExclusiveRow> exclusive_table(const SchedulabilityCurve& curve);

std::string curve_to_csv(const SchedulabilityCurve& curve);
std::string exclusive_to_csv(const SchedulabilityCurve& curve);

// Renders the curve as a self-contained SVG and writes the CSV alongside
// (same path with extension .csv). Throws std::runtime_error on an
// unwritable path, std::invalid_argument on an empty curve.
void plot(const SchedulabilityCurve& curve, const std::string& svg_path);
std::string curve_to_svg(const SchedulabilityCurve& curve);

struct SoundnessViolation {
    std::uint64_t system_seed = 0;
    int task = 0;
    int release_index = 0;
    usecs response = 0;
    usecs bound = 0;
};

struct SoundnessReport {
    int systems_examined = 0;   // generated systems looked at
    int systems_checked = 0;    // schedulable ones that were simulated
    int simulation_runs = 0;
    std::vector<SoundnessViolation> violations;
    bool probe_checked = false; // small-instance oracle ran
    bool probe_ok = true;

    bool clean() const { return violations.empty() && probe_ok; }
};

// Simulates analysis-schedulable systems under randomized faults and
// sporadic releases, hunting for any job whose measured response exceeds
// its analytical bound. `small` additionally sweeps the exhaustive
// worst-case probe against the single-request caps.
SoundnessReport soundness_campaign(const GenConfig& base, int n_systems,
                                   int seeds_per_system, bool small,
                                   std::uint64_t master_seed, int workers = 0);

// One-resource instance for the probe: `n_preds` single-request tasks on
// their own cores plus an observer with budget n_i - 1, all requesting
// resource 0 with length c.
SystemSpec probe_instance(std::int64_t n_i, const std::vector<std::int64_t>& n_preds,
                          usecs c);

} // namespace leftrs

#endif
