#pragma once

#include <stdexcept>

#include "unitselect/model.hpp"
#include "unitselect/pns_bounds.hpp"

namespace unitselect {

/// sigma = beta - gamma - theta + delta. Its sign orients the interval; zero
/// makes the benefit a point estimate.
inline double sigma(const BenefitVector& bv) {
    return bv.beta - bv.gamma - bv.theta + bv.delta;
}

/// W = (gamma - delta) P(y_x) + delta P(y_{x'}) + theta P(y'_{x'}).
inline double compute_w(const BenefitVector& bv, double p_y_do_x, double p_y_do_xp) {
    return (bv.gamma - bv.delta) * p_y_do_x + bv.delta * p_y_do_xp +
           bv.theta * (1.0 - p_y_do_xp);
}

/// f = W + sigma * PNS; the benefit depends on the response-type distribution
/// only through the PNS.
inline double decompose(const BenefitVector& bv, double pns, double p_y_do_x,
                        double p_y_do_xp) {
    return compute_w(bv, p_y_do_x, p_y_do_xp) + sigma(bv) * pns;
}

/// Benefit interval in payoff units, with the pieces it was assembled from.
struct BenefitBounds {
    Interval interval;
    double sigma = 0.0;
    double w = 0.0;
    PnsBounds pns;
    bool is_point = false;
};

namespace detail {

inline BenefitBounds compose_bounds(const BenefitVector& bv, PnsBounds pns, double p_y_do_x,
                                    double p_y_do_xp) {
    if (!bv.finite()) throw std::invalid_argument("benefit vector entries must be finite");
    BenefitBounds out;
    out.sigma = sigma(bv);
    out.w = compute_w(bv, p_y_do_x, p_y_do_xp);
    // The payoff comparison is on user-supplied inputs, so sigma is compared
    // to zero exactly.
    if (out.sigma > 0.0) {
        out.interval = Interval(out.w + out.sigma * pns.interval.lower(),
                                out.w + out.sigma * pns.interval.upper());
    } else if (out.sigma < 0.0) {
        out.interval = Interval(out.w + out.sigma * pns.interval.upper(),
                                out.w + out.sigma * pns.interval.lower());
    } else {
        out.interval = Interval(out.w, out.w);
        out.is_point = true;
    }
    out.pns = std::move(pns);
    return out;
}

} // namespace detail

/// Benefit bounds from experimental and (X,Y) observational data alone.
inline BenefitBounds lipearl_bounds(const BaselineInput& in, const BenefitVector& bv) {
    return detail::compose_bounds(bv, pns_baseline(in), in.p_y_do_x, in.p_y_do_xp);
}

/// Benefit bounds with a non-descendant covariate: stratified PNS bounds and
/// the covariate-marginalized experimental quantities in W.
inline BenefitBounds stratified_bounds(const StratifiedInput& in, const BenefitVector& bv) {
    BaselineInput margin = to_baseline(in);
    return detail::compose_bounds(bv, pns_stratified(in), margin.p_y_do_x, margin.p_y_do_xp);
}

/// Benefit bounds with a partial mediator.
inline BenefitBounds partial_mediator_bounds(const PartialMediatorInput& in, const BenefitVector& bv) {
    return detail::compose_bounds(bv, pns_partial_mediator(in), in.p_y_do_x, in.p_y_do_xp);
}

/// Benefit bounds with a pure mediator.
inline BenefitBounds pure_mediator_bounds(const PureMediatorInput& in, const BenefitVector& bv) {
    return detail::compose_bounds(bv, pns_pure_mediator(in), in.p_y_do_x, in.p_y_do_xp);
}

enum class Decision { Positive, Negative, Ambiguous };

inline const char* decision_name(Decision d) {
    switch (d) {
    case Decision::Positive: return "positive";
    case Decision::Negative: return "negative";
    case Decision::Ambiguous: return "ambiguous";
    }
    return "?";
}

/// Both decision rules: the midpoint sign, and whether the whole interval lies
/// on one side of zero. Callers pick the rule that fits their risk posture.
struct DecisionReport {
    Decision midpoint_sign = Decision::Ambiguous;
    bool one_signed = false;
};

inline DecisionReport decide(const BenefitBounds& b) {
    DecisionReport r;
    double s = b.interval.lower() + b.interval.upper();
    if (s > kEpsCmp) {
        r.midpoint_sign = Decision::Positive;
    } else if (s < -kEpsCmp) {
        r.midpoint_sign = Decision::Negative;
    } else {
        r.midpoint_sign = Decision::Ambiguous;
    }
    r.one_signed = b.interval.lower() > kEpsCmp || b.interval.upper() < -kEpsCmp;
    return r;
}

} // namespace unitselect
