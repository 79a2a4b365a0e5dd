#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "unitselect/model.hpp"

namespace unitselect {

namespace detail {

inline void require_backdoor(bool asserted, const char* fn) {
    // Graph structure cannot be read off the data; the caller must assert the
    // back-door criterion explicitly and the assertion is echoed in reports.
    if (!asserted) {
        throw std::invalid_argument(std::string(fn) + ": back-door criterion not asserted");
    }
}

} // namespace detail

/// P(y_x) := P(y|x) under an asserted back-door criterion. Within a single
/// population the adjustment formula degenerates to conditioning.
inline double backdoor_point(const ObsXY& obs, bool treated, bool backdoor_asserted = true) {
    detail::require_backdoor(backdoor_asserted, "backdoor_point");
    double p_arm = treated ? obs.p_xy + obs.p_xyp : obs.p_xpy + obs.p_xpyp;
    if (p_arm <= 0.0) {
        throw std::domain_error(std::string("ZeroConditioningEvent: P(") +
                                (treated ? "x" : "x'") + ")=0");
    }
    return (treated ? obs.p_xy : obs.p_xpy) / p_arm;
}

/// P(z_x) := P(z|x) for every z, same assertion.
inline std::vector<double> backdoor_point(const ObsXZY& obs, bool treated,
                                          bool backdoor_asserted = true) {
    detail::require_backdoor(backdoor_asserted, "backdoor_point");
    double p_arm = obs.p_x(treated);
    if (p_arm <= 0.0) {
        throw std::domain_error(std::string("ZeroConditioningEvent: P(") +
                                (treated ? "x" : "x'") + ")=0");
    }
    std::vector<double> out(static_cast<std::size_t>(obs.k));
    for (int z = 0; z < obs.k; ++z) out[static_cast<std::size_t>(z)] = obs.p_xz(treated, z) / p_arm;
    return out;
}

/// Fill all experimental quantities of a baseline input from its
/// observational table.
inline BaselineInput assemble_baseline(const ObsXY& obs, bool backdoor_asserted) {
    detail::require_backdoor(backdoor_asserted, "assemble_baseline");
    BaselineInput in;
    in.obs = obs;
    in.p_y_do_x = backdoor_point(obs, true);
    in.p_y_do_xp = backdoor_point(obs, false);
    return in;
}

/// Fill all experimental quantities of a partial-mediator input from the
/// (X,Z,Y) joint: outcome probabilities from the (X,Y) margin, mediator
/// distributions from the (X,Z) margin.
inline PartialMediatorInput assemble_partial_mediator(const ObsXZY& obs, bool backdoor_asserted) {
    detail::require_backdoor(backdoor_asserted, "assemble_partial_mediator");
    PartialMediatorInput in;
    in.obs = obs;
    ObsXY margin = obs.xy_margin();
    in.p_y_do_x = backdoor_point(margin, true);
    in.p_y_do_xp = backdoor_point(margin, false);
    in.p_z_do_x = backdoor_point(obs, true);
    in.p_z_do_xp = backdoor_point(obs, false);
    return in;
}

inline PureMediatorInput assemble_pure_mediator(const ObsXZY& obs, bool backdoor_asserted) {
    detail::require_backdoor(backdoor_asserted, "assemble_pure_mediator");
    PureMediatorInput in;
    in.obs = obs;
    ObsXY margin = obs.xy_margin();
    in.p_y_do_x = backdoor_point(margin, true);
    in.p_y_do_xp = backdoor_point(margin, false);
    return in;
}

} // namespace unitselect
