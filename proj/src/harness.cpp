#include "leftrs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "leftrs/analysis.hpp"
#include "leftrs/sim.hpp"

namespace leftrs {

const char* sweep_param_name(SweepParam p) {
    switch (p) {
    case SweepParam::M: return "M";
    case SweepParam::NM: return "N";
    case SweepParam::Rsf: return "rsf";
    case SweepParam::L: return "L";
    case SweepParam::A: return "A";
    case SweepParam::F: return "f";
    }
    return "?";
}

SweepParam sweep_param_from_name(const std::string& name) {
    if (name == "M") return SweepParam::M;
    if (name == "N" || name == "NM") return SweepParam::NM;
    if (name == "rsf") return SweepParam::Rsf;
    if (name == "L") return SweepParam::L;
    if (name == "A") return SweepParam::A;
    if (name == "f") return SweepParam::F;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

std::vector<double> default_sweep_values(SweepParam p) {
    switch (p) {
    case SweepParam::M: return {2, 4, 6, 8, 10, 12, 14, 16};
    case SweepParam::NM: return {2, 3, 4, 5, 6, 7, 8, 9};
    case SweepParam::Rsf:
        return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    case SweepParam::L: return {15, 50, 100, 150, 200, 250, 300};
    case SweepParam::A: return {1, 5, 10, 15, 20, 25, 30, 35};
    case SweepParam::F: return {0, 1, 2, 3, 4, 5, 6, 7};
    }
    return {};
}

namespace {

GenConfig apply_param(const GenConfig& base, SweepParam p, double v) {
    GenConfig cfg = base;
    switch (p) {
    case SweepParam::M:
        cfg.M = static_cast<int>(v);
        break;
    case SweepParam::NM:
        cfg.N = static_cast<int>(v);
        break;
    case SweepParam::Rsf:
        cfg.rsf = v;
        break;
    case SweepParam::L:
        cfg.cs_min = 1;
        cfg.cs_max = static_cast<usecs>(v);
        break;
    case SweepParam::A:
        cfg.A = static_cast<int>(v);
        break;
    case SweepParam::F:
        cfg.f_max = static_cast<int>(v);
        break;
    }
    return cfg;
}

int worker_count(int requested) {
    if (requested > 0)
        return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void run_parallel(int n_items, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1) {
        for (int i = 0; i < n_items; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n_items)
                    return;
                fn(i);
            }
        });
    for (auto& th : pool)
        th.join();
}

} // namespace

SchedulabilityCurve sweep(const SweepConfig& cfg) {
    if (cfg.protocols.empty())
        throw std::invalid_argument("sweep: no protocols selected");
    if (cfg.systems_per_point < 1)
        throw std::invalid_argument("sweep: systems_per_point must be >= 1");

    SchedulabilityCurve curve;
    curve.param = cfg.param;
    curve.protocols = cfg.protocols;
    curve.systems_per_point = cfg.systems_per_point;
    std::vector<double> values =
        cfg.values.empty() ? default_sweep_values(cfg.param) : cfg.values;

    const int n_points = static_cast<int>(values.size());
    const int n_protos = static_cast<int>(cfg.protocols.size());
    const int per_point = cfg.systems_per_point;

    curve.points.resize(n_points);
    for (int p = 0; p < n_points; ++p) {
        PointResult& pt = curve.points[p];
        pt.value = values[p];
        pt.schedulable.assign(n_protos, 0);
        pt.verdicts.assign(n_protos,
                           std::vector<bool>(per_point, false));
        // infeasible configurations surface identically for every seed;
        // probe once and skip the point
        try {
            GenConfig probe = apply_param(cfg.base, cfg.param, values[p]);
            probe.seed = mix_seed(cfg.master_seed, p, 0);
            (void)generate(probe);
        } catch (const std::invalid_argument&) {
            pt.skipped = true;
        }
    }

    const int total = n_points * per_point;
    run_parallel(total, worker_count(cfg.workers), [&](int item) {
        const int p = item / per_point;
        const int k = item % per_point;
        PointResult& pt = curve.points[p];
        if (pt.skipped)
            return;
        GenConfig gc = apply_param(cfg.base, cfg.param, pt.value);
        gc.seed = mix_seed(cfg.master_seed, p, k);
        SystemSpec sys = generate(gc).system;
        for (int q = 0; q < n_protos; ++q) {
            AnalysisResult r =
                response_time_baseline(sys, cfg.protocols[q], cfg.overheads);
            pt.verdicts[q][k] = r.schedulable;
        }
    });

    for (PointResult& pt : curve.points)
        for (int q = 0; q < n_protos; ++q)
            pt.schedulable[q] = static_cast<int>(
                std::count(pt.verdicts[q].begin(), pt.verdicts[q].end(), true));

    return curve;
}

namespace {

int protocol_index(const SchedulabilityCurve& curve, Protocol p) {
    for (size_t i = 0; i < curve.protocols.size(); ++i)
        if (curve.protocols[i] == p)
            return static_cast<int>(i);
    return -1;
}

} // namespace

std::vector<ExclusiveRow> exclusive_table(const SchedulabilityCurve& curve) {
    int im = protocol_index(curve, Protocol::MsrpFt);
    int il = protocol_index(curve, Protocol::LeftRs);
    if (im < 0 || il < 0)
        throw std::invalid_argument(
            "exclusive_table: curve must carry MSRP-FT and LEFT-RS verdicts");
    std::vector<ExclusiveRow> rows;
    for (const PointResult& pt : curve.points) {
        ExclusiveRow row;
        row.value = pt.value;
        if (!pt.skipped) {
            for (size_t k = 0; k < pt.verdicts[im].size(); ++k) {
                bool m = pt.verdicts[im][k];
                bool l = pt.verdicts[il][k];
                if (m && !l)
                    ++row.msrpft_only;
                if (l && !m)
                    ++row.leftrs_only;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string curve_to_csv(const SchedulabilityCurve& curve) {
    std::ostringstream os;
    os << "param,value,protocol,schedulable,count,fraction\n";
    const char* pname = sweep_param_name(curve.param);
    for (const PointResult& pt : curve.points) {
        for (size_t q = 0; q < curve.protocols.size(); ++q) {
            char frac[32];
            std::snprintf(frac, sizeof frac, "%.6f",
                          pt.skipped ? 0.0
                                     : pt.fraction(q, curve.systems_per_point));
            os << pname << ',' << format_value(pt.value) << ','
               << protocol_name(curve.protocols[q]) << ','
               << (pt.skipped ? 0 : pt.schedulable[q]) << ','
               << (pt.skipped ? 0 : curve.systems_per_point) << ',' << frac
               << '\n';
        }
    }
    return os.str();
}

std::string exclusive_to_csv(const SchedulabilityCurve& curve) {
    std::ostringstream os;
    os << "param,value,exclA,exclB\n";
    const char* pname = sweep_param_name(curve.param);
    for (const ExclusiveRow& row : exclusive_table(curve))
        os << pname << ',' << format_value(row.value) << ','
           << row.msrpft_only << ',' << row.leftrs_only << '\n';
    return os.str();
}

std::string curve_to_svg(const SchedulabilityCurve& curve) {
    if (curve.points.empty() || curve.protocols.empty())
        throw std::invalid_argument("plot: empty curve");

    const int width = 640, height = 440;
    const int ml = 60, mr = 20, mt = 30, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double vmin = curve.points.front().value, vmax = vmin;
    for (const PointResult& pt : curve.points) {
        vmin = std::min(vmin, pt.value);
        vmax = std::max(vmax, pt.value);
    }
    if (vmax == vmin)
        vmax = vmin + 1;

    auto sx = [&](double v) { return ml + (v - vmin) / (vmax - vmin) * pw; };
    auto sy = [&](double f) { return mt + (1.0 - f) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
       << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\""
       << ml + pw << "\" y2=\"" << mt + ph
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
       << "\" y2=\"" << mt + ph << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 10; i += 2) {
        double f = i / 10.0;
        os << "<text x=\"" << ml - 8 << "\" y=\"" << sy(f) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << format_value(f)
           << "</text>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << sy(f) << "\" x2=\""
           << ml + pw << "\" y2=\"" << sy(f)
           << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    }
    for (const PointResult& pt : curve.points)
        os << "<text x=\"" << sx(pt.value) << "\" y=\"" << mt + ph + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">"
           << format_value(pt.value) << "</text>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
       << "\" font-size=\"13\" text-anchor=\"middle\">"
       << sweep_param_name(curve.param) << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
          "16 "
       << mt + ph / 2 << ")\">schedulable fraction</text>\n";

    for (size_t q = 0; q < curve.protocols.size(); ++q) {
        const char* color = colors[q % 5];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.8\" points=\"";
        for (const PointResult& pt : curve.points) {
            if (pt.skipped)
                continue;
            os << sx(pt.value) << ','
               << sy(pt.fraction(q, curve.systems_per_point)) << ' ';
        }
        os << "\"/>\n";
        for (const PointResult& pt : curve.points) {
            if (pt.skipped)
                continue;
            os << "<circle cx=\"" << sx(pt.value) << "\" cy=\""
               << sy(pt.fraction(q, curve.systems_per_point))
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        os << "<rect x=\"" << ml + 10 << "\" y=\"" << mt + 8 + 18 * q
           << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << ml + 30 << "\" y=\"" << mt + 14 + 18 * q
           << "\" font-size=\"12\">" << protocol_name(curve.protocols[q])
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void plot(const SchedulabilityCurve& curve, const std::string& svg_path) {
    std::string svg = curve_to_svg(curve);
    {
        std::ofstream f(svg_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("plot: cannot write " + svg_path);
        f << svg;
    }
    std::string csv_path = svg_path;
    if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".svg")
        csv_path = csv_path.substr(0, csv_path.size() - 4);
    csv_path += ".csv";
    std::ofstream f(csv_path, std::ios::binary);
    if (!f)
        throw std::runtime_error("plot: cannot write " + csv_path);
    f << curve_to_csv(curve);
}

SystemSpec probe_instance(std::int64_t n_i,
                          const std::vector<std::int64_t>& n_preds, usecs c) {
    SystemSpec sys;
    sys.num_cores = static_cast<int>(n_preds.size()) + 1;
    sys.resources.push_back({0, c});
    for (size_t p = 0; p < n_preds.size(); ++p) {
        TaskSpec t;
        t.id = static_cast<int>(p);
        t.core = static_cast<int>(p);
        t.C = 0;
        t.T = t.D = 1000000000;
        t.priority = 1;
        t.f = static_cast<int>(n_preds[p] - 1);
        t.accesses[0] = 1;
        sys.tasks.push_back(t);
    }
    TaskSpec obs;
    obs.id = static_cast<int>(n_preds.size());
    obs.core = static_cast<int>(n_preds.size());
    obs.C = 0;
    obs.T = obs.D = 1000000000;
    obs.priority = 1;
    obs.f = static_cast<int>(n_i - 1);
    obs.accesses[0] = 1;
    sys.tasks.push_back(obs);
    return sys;
}

SoundnessReport soundness_campaign(const GenConfig& base, int n_systems,
                                   int seeds_per_system, bool small,
                                   std::uint64_t master_seed, int workers) {
    SoundnessReport report;

    // collect analysis-schedulable systems
    struct Item {
        SystemSpec sys;
        std::vector<usecs> bounds; // R per task index
        std::uint64_t seed;
    };
    std::vector<Item> items;
    const int attempt_cap = n_systems * 50;
    for (int k = 0; k < attempt_cap &&
                    static_cast<int>(items.size()) < n_systems;
         ++k) {
        GenConfig gc = base;
        gc.seed = mix_seed(master_seed, 0, static_cast<std::uint64_t>(k));
        SystemSpec sys = generate(gc).system;
        ++report.systems_examined;
        AnalysisResult r = response_time(sys);
        if (!r.schedulable)
            continue;
        Item item;
        item.sys = std::move(sys);
        item.seed = gc.seed;
        for (const TaskBounds& tb : r.tasks)
            item.bounds.push_back(tb.R);
        items.push_back(std::move(item));
    }
    report.systems_checked = static_cast<int>(items.size());

    const int runs = static_cast<int>(items.size()) * seeds_per_system;
    std::vector<std::vector<SoundnessViolation>> found(
        static_cast<size_t>(runs));
    run_parallel(runs, worker_count(workers), [&](int run) {
        const Item& item = items[static_cast<size_t>(run / seeds_per_system)];
        SimOptions opt;
        opt.record_events = false;
        usecs max_t = 1;
        for (const TaskSpec& t : item.sys.tasks)
            max_t = std::max(max_t, t.T);
        opt.horizon = 2 * max_t;
        SimTrace tr = simulate(
            item.sys, SimProtocol::LeftRs,
            ReleasePattern::sporadic(
                mix_seed(master_seed, 1, static_cast<std::uint64_t>(run))),
            FaultSchedule::randomized(
                mix_seed(master_seed, 2, static_cast<std::uint64_t>(run))),
            opt);
        for (const JobOutcome& job : tr.jobs) {
            usecs bound = item.bounds[static_cast<size_t>(job.task)];
            usecs seen = job.completed ? job.response()
                                       : opt.horizon - job.release;
            if (seen > bound)
                found[static_cast<size_t>(run)].push_back(
                    {item.seed, job.task, job.release_index, seen, bound});
        }
    });
    report.simulation_runs = runs;
    for (const auto& v : found)
        report.violations.insert(report.violations.end(), v.begin(), v.end());

    if (small) {
        report.probe_checked = true;
        for (std::int64_t n_i = 1; n_i <= 3 && report.probe_ok; ++n_i) {
            for (int m = 0; m <= 2 && report.probe_ok; ++m) {
                for (std::int64_t np = 1; np <= 3 && report.probe_ok; ++np) {
                    std::vector<std::int64_t> preds(
                        static_cast<size_t>(m), np);
                    SystemSpec sys = probe_instance(n_i, preds, 4);
                    usecs max_seen = worst_case_probe(sys, m, 0);
                    usecs cap = (n_i + m + 1) * 4;
                    if (np == 1)
                        cap = (n_i + m) * 4; // fault-free predecessors
                    if (max_seen > cap)
                        report.probe_ok = false;
                    if (np == 1 && max_seen != cap)
                        report.probe_ok = false;
                }
            }
        }
    }

    return report;
}

} // namespace leftrs
