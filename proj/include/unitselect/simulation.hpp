#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "unitselect/adjustment.hpp"
#include "unitselect/benefit.hpp"
#include "unitselect/model.hpp"
#include "unitselect/rng.hpp"

namespace unitselect {

/// One comparison sample: covariate-informed bounds [a,b] against the
/// baseline bounds [c,d] on the same margin.
struct SampleRecord {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

struct SimulationSummary {
    double avg_lower_gain = 0.0;   // mean(a - c)
    double avg_upper_gain = 0.0;   // mean(d - b)
    double avg_gap_baseline = 0.0; // mean(d - c)
    double avg_gap_informed = 0.0;  // mean(b - a)
    std::int64_t flips = 0;        // (a+b)(c+d) < 0
    std::int64_t narrower = 0;     // a > c or b < d, strictly
    std::int64_t n = 0;
};

// Records are kept in memory up to this study size; larger studies fold
// summaries on the fly and return no records.
inline constexpr std::int64_t kMaxRecordedSamples = 1'000'000;

/// A random stratified sample distribution over binary Z. A notional 1000
/// individuals are split into the four (x,z) cells, stratum size first; the
/// y-count of each cell is then drawn, and each per-stratum experimental
/// response rate is drawn inside that stratum's observational consistency
/// window, so the output always validates.
inline StratifiedInput gen_nondescendant(Rng& rng) {
    double t1, t2, t3, t4, size_z, size_zp;
    for (;;) {
        double tz = rng.uniform01() * 1000.0; // individuals with Z = z
        t1 = rng.uniform01() * tz;            // of those, treated
        t2 = tz - t1;
        t3 = rng.uniform01() * (1000.0 - tz); // Z = z', treated
        t4 = 1000.0 - tz - t3;
        size_z = t1 + t2;
        size_zp = t3 + t4;
        if (size_z > 0.0 && size_zp > 0.0) break; // degenerate stratum: redraw
    }
    double o1 = rng.uniform01() * t1; // treated, z, outcome y
    double o2 = rng.uniform01() * t2;
    double o3 = rng.uniform01() * t3;
    double o4 = rng.uniform01() * t4;

    StratifiedInput in;
    in.strata.resize(2);
    Stratum& sz = in.strata[0];
    sz.label = "z";
    sz.weight = size_z / 1000.0;
    sz.p_y_do_x = rng.uniform01() * t2 / size_z + o1 / size_z;
    sz.p_y_do_xp = rng.uniform01() * t1 / size_z + o2 / size_z;
    sz.obs = ObsXY{o1 / size_z, (t1 - o1) / size_z, o2 / size_z, (t2 - o2) / size_z};

    Stratum& szp = in.strata[1];
    szp.label = "z'";
    szp.weight = size_zp / 1000.0;
    szp.p_y_do_x = rng.uniform01() * t4 / size_zp + o3 / size_zp;
    szp.p_y_do_xp = rng.uniform01() * t3 / size_zp + o4 / size_zp;
    szp.obs = ObsXY{o3 / size_zp, (t3 - o3) / size_zp, o4 / size_zp, (t4 - o4) / size_zp};
    return in;
}

/// A random partial-mediator sample over binary Z: the seven conditional
/// probabilities are drawn uniformly, and the experimental quantities are
/// assembled through the back-door adjustment.
struct PartialMediatorSample {
    double p_x = 0.0;
    double p_z_given_x = 0.0;
    double p_z_given_xp = 0.0;
    double p_y_given_xz = 0.0;
    double p_y_given_xpz = 0.0;
    double p_y_given_xzp = 0.0;
    double p_y_given_xpzp = 0.0;
    PartialMediatorInput input;
};

namespace detail {

inline ObsXZY joint_from_partial_conditionals(const PartialMediatorSample& s) {
    ObsXZY j = ObsXZY::zeros(2);
    auto fill = [&j](bool x, double p_arm, double p_z, double p_y_z, double p_y_zp) {
        j.at(x, 0, true) = p_arm * p_z * p_y_z;
        j.at(x, 0, false) = p_arm * p_z * (1.0 - p_y_z);
        j.at(x, 1, true) = p_arm * (1.0 - p_z) * p_y_zp;
        j.at(x, 1, false) = p_arm * (1.0 - p_z) * (1.0 - p_y_zp);
    };
    fill(true, s.p_x, s.p_z_given_x, s.p_y_given_xz, s.p_y_given_xzp);
    fill(false, 1.0 - s.p_x, s.p_z_given_xp, s.p_y_given_xpz, s.p_y_given_xpzp);
    return j;
}

} // namespace detail

inline PartialMediatorSample gen_partial_mediator(Rng& rng) {
    PartialMediatorSample s;
    s.p_x = rng.uniform01();
    s.p_z_given_x = rng.uniform01();
    s.p_z_given_xp = rng.uniform01();
    s.p_y_given_xz = rng.uniform01();
    s.p_y_given_xpz = rng.uniform01();
    s.p_y_given_xzp = rng.uniform01();
    s.p_y_given_xpzp = rng.uniform01();
    s.input = assemble_partial_mediator(detail::joint_from_partial_conditionals(s), true);
    return s;
}

/// A random pure-mediator sample over binary Z: five conditionals drawn
/// uniformly, experimental quantities via adjustment.
struct PureMediatorSample {
    double p_x = 0.0;
    double p_z_given_x = 0.0;
    double p_z_given_xp = 0.0;
    double p_y_given_z = 0.0;
    double p_y_given_zp = 0.0;
    PureMediatorInput input;
};

inline PureMediatorSample gen_pure_mediator(Rng& rng) {
    PureMediatorSample s;
    s.p_x = rng.uniform01();
    s.p_z_given_x = rng.uniform01();
    s.p_z_given_xp = rng.uniform01();
    s.p_y_given_z = rng.uniform01();
    s.p_y_given_zp = rng.uniform01();
    ObsXZY j = ObsXZY::zeros(2);
    auto fill = [&](bool x, double p_arm, double p_z) {
        j.at(x, 0, true) = p_arm * p_z * s.p_y_given_z;
        j.at(x, 0, false) = p_arm * p_z * (1.0 - s.p_y_given_z);
        j.at(x, 1, true) = p_arm * (1.0 - p_z) * s.p_y_given_zp;
        j.at(x, 1, false) = p_arm * (1.0 - p_z) * (1.0 - s.p_y_given_zp);
    };
    fill(true, s.p_x, s.p_z_given_x);
    fill(false, 1.0 - s.p_x, s.p_z_given_xp);
    s.input = assemble_pure_mediator(j, true);
    return s;
}

/// Left-to-right fold of per-sample records into the study metrics. Studies
/// use the same fold, so re-summarizing exported records reproduces a study's
/// summary bit for bit.
inline SimulationSummary summarize(std::span<const SampleRecord> records) {
    SimulationSummary s;
    double lower_gain = 0.0, upper_gain = 0.0, gap_base = 0.0, gap_thm = 0.0;
    for (const SampleRecord& r : records) {
        lower_gain += r.a - r.c;
        upper_gain += r.d - r.b;
        gap_base += r.d - r.c;
        gap_thm += r.b - r.a;
        if ((r.a + r.b) * (r.c + r.d) < 0.0) ++s.flips;
        if (r.a > r.c + kEpsCmp || r.b < r.d - kEpsCmp) ++s.narrower;
    }
    s.n = static_cast<std::int64_t>(records.size());
    if (s.n > 0) {
        double inv = 1.0 / static_cast<double>(s.n);
        s.avg_lower_gain = lower_gain * inv;
        s.avg_upper_gain = upper_gain * inv;
        s.avg_gap_baseline = gap_base * inv;
        s.avg_gap_informed = gap_thm * inv;
    }
    return s;
}

struct StudyResult {
    SimulationSummary summary;
    std::vector<SampleRecord> records; // empty when n exceeds kMaxRecordedSamples
    std::int64_t generated = 0;        // samples drawn, including rejected ones
};

namespace detail {

inline SampleRecord study_sample(Structure structure, const BenefitVector& bv, Rng& rng) {
    BenefitBounds informed, baseline;
    switch (structure) {
    case Structure::NonDescendant: {
        StratifiedInput in = gen_nondescendant(rng);
        informed = stratified_bounds(in, bv);
        baseline = lipearl_bounds(to_baseline(in), bv);
        // Stratification can only tighten; anything else is a defect.
        if (informed.interval.lower() < baseline.interval.lower() - kEpsCmp ||
            informed.interval.upper() > baseline.interval.upper() + kEpsCmp) {
            throw std::logic_error("study_sample: stratified bounds left the baseline interval");
        }
        break;
    }
    case Structure::PartialMediator: {
        PartialMediatorSample s = gen_partial_mediator(rng);
        informed = partial_mediator_bounds(s.input, bv);
        baseline = lipearl_bounds(to_baseline(s.input), bv);
        break;
    }
    case Structure::PureMediator: {
        PureMediatorSample s = gen_pure_mediator(rng);
        informed = pure_mediator_bounds(s.input, bv);
        baseline = lipearl_bounds(to_baseline(s.input), bv);
        break;
    }
    default:
        throw std::invalid_argument("run_study: structure must have a covariate");
    }
    if (structure != Structure::NonDescendant) {
        // Mediator bounds share the baseline lower bound exactly and may only
        // lower the upper bound.
        bool lower_match = informed.sigma >= 0
                               ? informed.interval.lower() == baseline.interval.lower()
                               : informed.interval.upper() == baseline.interval.upper();
        if (!lower_match) {
            throw std::logic_error("study_sample: mediator bound moved the shared end");
        }
    }
    return SampleRecord{informed.interval.lower(), informed.interval.upper(),
                        baseline.interval.lower(), baseline.interval.upper()};
}

} // namespace detail

inline StudyResult run_study(Structure structure, std::int64_t n, const BenefitVector& bv,
                             std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("run_study: n must be nonnegative");
    Rng rng(seed);
    StudyResult out;
    bool keep = n <= kMaxRecordedSamples;
    if (keep) out.records.reserve(static_cast<std::size_t>(n));

    SimulationSummary s;
    double lower_gain = 0.0, upper_gain = 0.0, gap_base = 0.0, gap_thm = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        SampleRecord r = detail::study_sample(structure, bv, rng);
        lower_gain += r.a - r.c;
        upper_gain += r.d - r.b;
        gap_base += r.d - r.c;
        gap_thm += r.b - r.a;
        if ((r.a + r.b) * (r.c + r.d) < 0.0) ++s.flips;
        if (r.a > r.c + kEpsCmp || r.b < r.d - kEpsCmp) ++s.narrower;
        if (keep) out.records.push_back(r);
    }
    s.n = n;
    if (n > 0) {
        double inv = 1.0 / static_cast<double>(n);
        s.avg_lower_gain = lower_gain * inv;
        s.avg_upper_gain = upper_gain * inv;
        s.avg_gap_baseline = gap_base * inv;
        s.avg_gap_informed = gap_thm * inv;
    }
    out.summary = s;
    out.generated = n;
    return out;
}

/// Rejection study over partial mediators: draws are kept only when the
/// mediator actually narrowed the bounds, until n kept samples accumulate.
inline StudyResult run_study_filtered(Structure structure, std::int64_t n,
                                      const BenefitVector& bv, std::uint64_t seed) {
    if (structure != Structure::PartialMediator) {
        throw std::invalid_argument("run_study_filtered: only the partial-mediator case is "
                                    "rejection-sampled");
    }
    if (n < 0) throw std::invalid_argument("run_study_filtered: n must be nonnegative");
    Rng rng(seed);
    StudyResult out;
    bool keep = n <= kMaxRecordedSamples;
    if (keep) out.records.reserve(static_cast<std::size_t>(n));

    SimulationSummary s;
    double lower_gain = 0.0, upper_gain = 0.0, gap_base = 0.0, gap_thm = 0.0;
    std::int64_t kept = 0;
    while (kept < n) {
        SampleRecord r = detail::study_sample(structure, bv, rng);
        ++out.generated;
        if (!(r.a > r.c + kEpsCmp || r.b < r.d - kEpsCmp)) continue;
        ++kept;
        lower_gain += r.a - r.c;
        upper_gain += r.d - r.b;
        gap_base += r.d - r.c;
        gap_thm += r.b - r.a;
        if ((r.a + r.b) * (r.c + r.d) < 0.0) ++s.flips;
        ++s.narrower;
        if (keep) out.records.push_back(r);
    }
    s.n = n;
    if (n > 0) {
        double inv = 1.0 / static_cast<double>(n);
        s.avg_lower_gain = lower_gain * inv;
        s.avg_upper_gain = upper_gain * inv;
        s.avg_gap_baseline = gap_base * inv;
        s.avg_gap_informed = gap_thm * inv;
    }
    out.summary = s;
    return out;
}

// ---------------------------------------------------------------------------
// Plot-data series export.
// ---------------------------------------------------------------------------

enum class SortKey { BaselineLower, BaselineUpper };

struct SeriesRow {
    std::int64_t idx = 0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// Pick m records at random, order them by the chosen baseline bound and
/// emit rows for external plotting.
inline std::vector<SeriesRow> export_series(std::span<const SampleRecord> records, SortKey key,
                                            std::size_t m, Rng& rng) {
    std::vector<std::size_t> idx(records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (m < idx.size()) {
        // partial Fisher-Yates: the first m entries become the sample
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + rng.index_below(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(m);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
        double vl = key == SortKey::BaselineLower ? records[l].c : records[l].d;
        double vr = key == SortKey::BaselineLower ? records[r].c : records[r].d;
        return vl < vr;
    });
    std::vector<SeriesRow> rows;
    rows.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const SampleRecord& r = records[idx[i]];
        rows.push_back(SeriesRow{static_cast<std::int64_t>(i), r.a, r.b, r.c, r.d});
    }
    return rows;
}

inline std::string series_to_csv(std::span<const SeriesRow> rows) {
    std::string out = "idx,a,b,c,d\n";
    char buf[160];
    for (const SeriesRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%lld,%.6g,%.6g,%.6g,%.6g\n",
                      static_cast<long long>(r.idx), r.a, r.b, r.c, r.d);
        out += buf;
    }
    return out;
}

inline std::vector<SeriesRow> series_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "idx,a,b,c,d") {
        throw std::invalid_argument("series_from_csv: missing idx,a,b,c,d header");
    }
    std::vector<SeriesRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        SeriesRow r;
        long long idx = 0;
        if (std::sscanf(line.c_str(), "%lld,%lg,%lg,%lg,%lg", &idx, &r.a, &r.b, &r.c, &r.d) != 5) {
            throw std::invalid_argument("series_from_csv: bad row: " + line);
        }
        r.idx = idx;
        rows.push_back(r);
    }
    return rows;
}

} // namespace unitselect
