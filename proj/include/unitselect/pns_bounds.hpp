#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "unitselect/model.hpp"

namespace unitselect {

// Clamping a bound into [0,1] by more than this flags the input as inconsistent.
inline constexpr double kClampWarn = 1e-9;

/// Bounds on the c-specific PNS P(y_x, y'_{x'}), with the argument that
/// attained each end of the interval.
struct PnsBounds {
    Interval interval;
    std::string lower_term;
    std::string upper_term;
    bool clamp_warning = false;
};

namespace detail {

inline constexpr std::array<const char*, 4> kLowerTermNames = {
    "0",
    "P(y_x)-P(y_x')",
    "P(y)-P(y_x')",
    "P(y_x)-P(y)",
};

inline constexpr std::array<const char*, 5> kUpperTermNames = {
    "P(y_x)",
    "P(y'_x')",
    "P(x,y)+P(x',y')",
    "P(y_x)-P(y_x')+P(x',y)+P(x,y')",
    "mediator pair sum",
};

// Ties resolve to the first argument, so reports are deterministic.
inline std::size_t arg_max(std::span<const double> xs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] > xs[best]) best = i;
    }
    return best;
}

inline std::size_t arg_min(std::span<const double> xs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] < xs[best]) best = i;
    }
    return best;
}

// Pairwise reduction keeps accumulation error O(log n) for long stratum lists.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 4) {
        double s = 0.0;
        for (double v : xs) s += v;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct FourTerm {
    double value = 0.0;
    std::size_t index = 0;
};

inline FourTerm lower_four(double p_y_do_x, double p_y_do_xp, double p_y) {
    std::array<double, 4> args = {
        0.0,
        p_y_do_x - p_y_do_xp,
        p_y - p_y_do_xp,
        p_y_do_x - p_y,
    };
    std::size_t i = arg_max(args);
    return {args[i], i};
}

inline FourTerm upper_four(double p_y_do_x, double p_y_do_xp, const ObsXY& obs) {
    std::array<double, 4> args = {
        p_y_do_x,
        1.0 - p_y_do_xp,
        obs.p_xy + obs.p_xpyp,
        p_y_do_x - p_y_do_xp + obs.p_xpy + obs.p_xyp,
    };
    std::size_t i = arg_min(args);
    return {args[i], i};
}

inline PnsBounds finish(double lower_raw, double upper_raw, std::string lower_term,
                        std::string upper_term) {
    double lo = std::clamp(lower_raw, 0.0, 1.0);
    double hi = std::clamp(upper_raw, 0.0, 1.0);
    bool warn = std::fabs(lo - lower_raw) > kClampWarn || std::fabs(hi - upper_raw) > kClampWarn;
    if (lo > hi) {
        // Only reachable with tolerance-admitted inconsistent tables; collapse
        // to the crossing point and flag it.
        double mid = 0.5 * (lo + hi);
        warn = true;
        lo = hi = mid;
    }
    PnsBounds out;
    out.interval = Interval(lo, hi);
    out.lower_term = std::move(lower_term);
    out.upper_term = std::move(upper_term);
    out.clamp_warning = warn;
    return out;
}

// Conditional P(y-or-y' | z, x) from the joint; the caller must already hold a
// nonzero multiplier for this pair.
inline double cond_y_given_zx(const ObsXZY& obs, bool x, int z, bool y) {
    double denom = obs.p_xz(x, z);
    if (denom <= 0.0) {
        throw std::domain_error("MissingConditional: P(y|z,x) with P(x=" +
                                std::string(x ? "x" : "x'") + ",z=" + std::to_string(z) +
                                ")=0 and a nonzero mediator weight");
    }
    return obs.at(x, z, y) / denom;
}

} // namespace detail

/// Four-argument bounds from experimental and (X,Y) observational data.
inline PnsBounds pns_baseline(const BaselineInput& in) {
    Marginals m = marginals(in.obs);
    detail::FourTerm lo = detail::lower_four(in.p_y_do_x, in.p_y_do_xp, m.p_y);
    detail::FourTerm hi = detail::upper_four(in.p_y_do_x, in.p_y_do_xp, in.obs);
    return detail::finish(lo.value, hi.value, detail::kLowerTermNames[lo.index],
                          detail::kUpperTermNames[hi.index]);
}

/// Stratified bounds: the four-argument bounds applied inside each covariate
/// stratum and mixed with the stratum weights. Zero-weight strata are skipped.
inline PnsBounds pns_stratified(const StratifiedInput& in) {
    std::vector<double> lo_parts, hi_parts;
    std::string lo_terms, hi_terms;
    lo_parts.reserve(in.strata.size());
    hi_parts.reserve(in.strata.size());
    for (std::size_t i = 0; i < in.strata.size(); ++i) {
        const Stratum& s = in.strata[i];
        if (s.weight <= 0.0) continue;
        Marginals m = marginals(s.obs);
        detail::FourTerm lo = detail::lower_four(s.p_y_do_x, s.p_y_do_xp, m.p_y);
        detail::FourTerm hi = detail::upper_four(s.p_y_do_x, s.p_y_do_xp, s.obs);
        lo_parts.push_back(lo.value * s.weight);
        hi_parts.push_back(hi.value * s.weight);
        std::string tag = "z=" + (s.label.empty() ? std::to_string(i) : s.label) + ":";
        if (!lo_terms.empty()) lo_terms += "; ";
        if (!hi_terms.empty()) hi_terms += "; ";
        lo_terms += tag + detail::kLowerTermNames[lo.index];
        hi_terms += tag + detail::kUpperTermNames[hi.index];
    }
    double lower = detail::pairwise_sum(lo_parts);
    double upper = detail::pairwise_sum(hi_parts);
    return detail::finish(lower, upper, std::move(lo_terms), std::move(hi_terms));
}

/// Mediator upper-bound term when a direct X->Y edge may exist: the sum runs
/// over all ordered value pairs (z, z'), including z == z'.
inline double partial_mediator_term(const PartialMediatorInput& in) {
    const int k = in.obs.k;
    std::vector<double> parts;
    parts.reserve(static_cast<std::size_t>(k) * k);
    for (int z = 0; z < k; ++z) {
        for (int zp = 0; zp < k; ++zp) {
            double mult = std::min(in.p_z_do_x[z], in.p_z_do_xp[zp]);
            if (mult <= 0.0) continue;
            double p_y = detail::cond_y_given_zx(in.obs, true, z, true);
            double p_yp = detail::cond_y_given_zx(in.obs, false, zp, false);
            parts.push_back(std::min(p_y, p_yp) * mult);
        }
    }
    return detail::pairwise_sum(parts);
}

namespace detail {

// The mediator term can only replace the upper bound; the lower bound must
// stay exactly the baseline one, so a rounding-level crossing pins the upper
// bound to it instead of midpointing.
inline PnsBounds apply_mediator_term(PnsBounds base, double term) {
    if (term >= base.interval.upper()) return base;
    double lo = base.interval.lower();
    double hi = std::clamp(term, 0.0, 1.0);
    bool warn = base.clamp_warning || std::fabs(hi - term) > kClampWarn;
    if (hi < lo) {
        warn = warn || lo - hi > kClampWarn;
        hi = lo;
    }
    PnsBounds out;
    out.interval = Interval(lo, hi);
    out.lower_term = base.lower_term;
    out.upper_term = kUpperTermNames[4];
    out.clamp_warning = warn;
    return out;
}

} // namespace detail

inline PnsBounds pns_partial_mediator(const PartialMediatorInput& in) {
    return detail::apply_mediator_term(pns_baseline(to_baseline(in)), partial_mediator_term(in));
}

/// Mediator upper-bound term when X acts only through Z: the sum excludes
/// z == z', since a complier must switch the mediator value.
inline double pure_mediator_term(const PureMediatorInput& in) {
    const int k = in.obs.k;
    double p_x = in.obs.p_x(true);
    double p_xp = in.obs.p_x(false);
    if (p_x <= 0.0 || p_xp <= 0.0) {
        throw std::domain_error("MissingConditional: P(z|x) needs both treatment arms observed");
    }
    std::vector<double> parts;
    parts.reserve(static_cast<std::size_t>(k) * (k - 1));
    for (int z = 0; z < k; ++z) {
        for (int zp = 0; zp < k; ++zp) {
            if (zp == z) continue;
            double w_z = in.obs.p_xz(true, z) / p_x;    // P(z|x)
            double w_zp = in.obs.p_xz(false, zp) / p_xp; // P(z'|x')
            double mult = std::min(w_z, w_zp);
            if (mult <= 0.0) continue;
            double denom_z = in.obs.p_z(z);
            double denom_zp = in.obs.p_z(zp);
            if (denom_z <= 0.0 || denom_zp <= 0.0) {
                throw std::domain_error("MissingConditional: P(y|z) with P(z)=0 and a nonzero "
                                        "mediator weight");
            }
            double p_y = in.obs.p_zy(z, true) / denom_z;    // P(y|z)
            double p_yp = in.obs.p_zy(zp, false) / denom_zp; // P(y'|z')
            parts.push_back(std::min(p_y, p_yp) * mult);
        }
    }
    return detail::pairwise_sum(parts);
}

inline PnsBounds pns_pure_mediator(const PureMediatorInput& in) {
    return detail::apply_mediator_term(pns_baseline(to_baseline(in)), pure_mediator_term(in));
}

} // namespace unitselect
