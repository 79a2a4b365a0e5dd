#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "unitselect/model.hpp"
#include "unitselect/rng.hpp"

namespace unitselect {

/// Fully specified Markovian SCM over binary X, Y and k-valued Z, used as a
/// ground-truth oracle. Each endogenous variable has one independent latent
/// whose value indexes a canonical response function:
///
///   Baseline:        X = u_x in {0,1}; Y response r in [0,4):
///                      Y_x = bit 1 of r, Y_{x'} = bit 0.
///   NonDescendant:   Z = u_z in [0,k); X = bit z of u_x in [0,2^k);
///                      Y = bit (x*k + z) of u_y in [0,2^(2k)).
///   PartialMediator: X = u_x in {0,1}; u_z in [0,k^2) encodes the pair
///                      (Z_x = u_z / k, Z_{x'} = u_z % k);
///                      Y = bit (x*k + z) of u_y in [0,2^(2k)).
///   PureMediator:    as PartialMediator but Y = bit z of u_y in [0,2^k),
///                      so Y ignores x.
///
/// x = 1 is treatment, y = 1 the positive outcome.
struct Scm {
    Structure structure = Structure::Baseline;
    int k = 0;                // Z arity; 0 for the baseline structure
    std::vector<double> u_x;  // latent distribution for X
    std::vector<double> u_z;  // latent distribution for Z (empty for baseline)
    std::vector<double> u_y;  // latent distribution for Y's response functions
};

namespace detail {

inline int bit(std::uint32_t v, int i) { return static_cast<int>((v >> i) & 1u); }

inline std::vector<double> simplex_draw(std::size_t m, Rng& rng) {
    std::vector<double> p(m);
    for (;;) {
        double s = 0.0;
        for (double& v : p) {
            v = rng.uniform01();
            s += v;
        }
        if (s > 0.0) {
            for (double& v : p) v /= s;
            return p;
        }
    }
}

inline void check_mediator_arity(Structure s, int k) {
    if (s != Structure::Baseline && (k < 2 || k > 4)) {
        throw std::invalid_argument("sample_scm: k must be in [2,4] for covariate structures");
    }
}

} // namespace detail

inline Scm sample_scm(Structure structure, int k, Rng& rng) {
    detail::check_mediator_arity(structure, k);
    Scm scm;
    scm.structure = structure;
    switch (structure) {
    case Structure::Baseline:
        scm.k = 0;
        scm.u_x = detail::simplex_draw(2, rng);
        scm.u_y = detail::simplex_draw(4, rng);
        break;
    case Structure::NonDescendant:
        scm.k = k;
        scm.u_z = detail::simplex_draw(static_cast<std::size_t>(k), rng);
        scm.u_x = detail::simplex_draw(std::size_t{1} << k, rng);
        scm.u_y = detail::simplex_draw(std::size_t{1} << (2 * k), rng);
        break;
    case Structure::PartialMediator:
        scm.k = k;
        scm.u_x = detail::simplex_draw(2, rng);
        scm.u_z = detail::simplex_draw(static_cast<std::size_t>(k) * k, rng);
        scm.u_y = detail::simplex_draw(std::size_t{1} << (2 * k), rng);
        break;
    case Structure::PureMediator:
        scm.k = k;
        scm.u_x = detail::simplex_draw(2, rng);
        scm.u_z = detail::simplex_draw(static_cast<std::size_t>(k) * k, rng);
        scm.u_y = detail::simplex_draw(std::size_t{1} << k, rng);
        break;
    }
    return scm;
}

/// Probabilities of the four counterfactual response types of Y to X,
/// computed by exhaustive enumeration of the latent space.
struct ResponseTypeProbs {
    double complier = 0.0;     // Y_x = y,  Y_{x'} = y'
    double always_taker = 0.0; // Y_x = y,  Y_{x'} = y
    double never_taker = 0.0;  // Y_x = y', Y_{x'} = y'
    double defier = 0.0;       // Y_x = y', Y_{x'} = y

    double pns() const { return complier; }
    double sum() const { return complier + always_taker + never_taker + defier; }
};

namespace detail {

// Potential outcomes (Y_x, Y_{x'}) for one latent assignment.
template <typename Fn>
inline ResponseTypeProbs accumulate_types(Fn&& for_each_latent) {
    ResponseTypeProbs r;
    for_each_latent([&r](int y_x, int y_xp, double w) {
        if (y_x == 1 && y_xp == 0) {
            r.complier += w;
        } else if (y_x == 1 && y_xp == 1) {
            r.always_taker += w;
        } else if (y_x == 0 && y_xp == 0) {
            r.never_taker += w;
        } else {
            r.defier += w;
        }
    });
    return r;
}

} // namespace detail

inline ResponseTypeProbs exact_counterfactuals(const Scm& scm) {
    const int k = scm.k;
    switch (scm.structure) {
    case Structure::Baseline:
        return detail::accumulate_types([&](auto&& emit) {
            for (std::uint32_t r = 0; r < 4; ++r) {
                emit(detail::bit(r, 1), detail::bit(r, 0), scm.u_y[r]);
            }
        });
    case Structure::NonDescendant:
        return detail::accumulate_types([&](auto&& emit) {
            for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
                int z = static_cast<int>(uz);
                for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                    emit(detail::bit(r, k + z), detail::bit(r, z), scm.u_z[uz] * scm.u_y[r]);
                }
            }
        });
    case Structure::PartialMediator:
        return detail::accumulate_types([&](auto&& emit) {
            for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
                int z_x = static_cast<int>(uz) / k;
                int z_xp = static_cast<int>(uz) % k;
                for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                    emit(detail::bit(r, k + z_x), detail::bit(r, z_xp),
                         scm.u_z[uz] * scm.u_y[r]);
                }
            }
        });
    case Structure::PureMediator:
        return detail::accumulate_types([&](auto&& emit) {
            for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
                int z_x = static_cast<int>(uz) / k;
                int z_xp = static_cast<int>(uz) % k;
                for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                    emit(detail::bit(r, z_x), detail::bit(r, z_xp), scm.u_z[uz] * scm.u_y[r]);
                }
            }
        });
    }
    return {};
}

/// beta P(complier) + gamma P(always) + theta P(never) + delta P(defier).
inline double exact_benefit(const Scm& scm, const BenefitVector& bv) {
    ResponseTypeProbs t = exact_counterfactuals(scm);
    return bv.beta * t.complier + bv.gamma * t.always_taker + bv.theta * t.never_taker +
           bv.delta * t.defier;
}

inline BaselineInput induced_baseline(const Scm& scm) {
    if (scm.structure != Structure::Baseline) {
        throw std::invalid_argument("induced_baseline: wrong structure");
    }
    BaselineInput in;
    for (std::uint32_t r = 0; r < 4; ++r) {
        in.p_y_do_x += scm.u_y[r] * detail::bit(r, 1);
        in.p_y_do_xp += scm.u_y[r] * detail::bit(r, 0);
    }
    for (int ux = 0; ux < 2; ++ux) {
        for (std::uint32_t r = 0; r < 4; ++r) {
            double w = scm.u_x[static_cast<std::size_t>(ux)] * scm.u_y[r];
            int y = detail::bit(r, ux);
            if (ux == 1) {
                (y ? in.obs.p_xy : in.obs.p_xyp) += w;
            } else {
                (y ? in.obs.p_xpy : in.obs.p_xpyp) += w;
            }
        }
    }
    return in;
}

inline StratifiedInput induced_stratified(const Scm& scm) {
    if (scm.structure != Structure::NonDescendant) {
        throw std::invalid_argument("induced_stratified: wrong structure");
    }
    const int k = scm.k;
    StratifiedInput in;
    for (int z = 0; z < k; ++z) {
        Stratum s;
        s.label = std::to_string(z);
        s.weight = scm.u_z[static_cast<std::size_t>(z)];
        // u_x, u_y are independent of u_z, so the conditional distributions
        // inside the stratum drop the conditioning.
        for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
            s.p_y_do_x += scm.u_y[r] * detail::bit(r, k + z);
            s.p_y_do_xp += scm.u_y[r] * detail::bit(r, z);
        }
        for (std::uint32_t ux = 0; ux < scm.u_x.size(); ++ux) {
            int x = detail::bit(ux, z);
            for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                double w = scm.u_x[ux] * scm.u_y[r];
                int y = detail::bit(r, x * k + z);
                if (x == 1) {
                    (y ? s.obs.p_xy : s.obs.p_xyp) += w;
                } else {
                    (y ? s.obs.p_xpy : s.obs.p_xpyp) += w;
                }
            }
        }
        in.strata.push_back(std::move(s));
    }
    return in;
}

namespace detail {

template <bool kPure>
inline void fill_mediator_joint(const Scm& scm, ObsXZY& joint) {
    const int k = scm.k;
    for (int ux = 0; ux < 2; ++ux) {
        for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
            int z = ux == 1 ? static_cast<int>(uz) / k : static_cast<int>(uz) % k;
            for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                double w = scm.u_x[static_cast<std::size_t>(ux)] * scm.u_z[uz] * scm.u_y[r];
                int y = kPure ? bit(r, z) : bit(r, ux * k + z);
                joint.at(ux == 1, z, y == 1) += w;
            }
        }
    }
}

} // namespace detail

inline PartialMediatorInput induced_partial_mediator(const Scm& scm) {
    if (scm.structure != Structure::PartialMediator) {
        throw std::invalid_argument("induced_partial_mediator: wrong structure");
    }
    const int k = scm.k;
    PartialMediatorInput in;
    in.p_z_do_x.assign(static_cast<std::size_t>(k), 0.0);
    in.p_z_do_xp.assign(static_cast<std::size_t>(k), 0.0);
    for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
        in.p_z_do_x[static_cast<std::size_t>(uz) / k] += scm.u_z[uz];
        in.p_z_do_xp[static_cast<std::size_t>(uz) % k] += scm.u_z[uz];
        int z_x = static_cast<int>(uz) / k;
        int z_xp = static_cast<int>(uz) % k;
        for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
            double w = scm.u_z[uz] * scm.u_y[r];
            in.p_y_do_x += w * detail::bit(r, k + z_x);
            in.p_y_do_xp += w * detail::bit(r, z_xp);
        }
    }
    in.obs = ObsXZY::zeros(k);
    detail::fill_mediator_joint<false>(scm, in.obs);
    return in;
}

inline PureMediatorInput induced_pure_mediator(const Scm& scm) {
    if (scm.structure != Structure::PureMediator) {
        throw std::invalid_argument("induced_pure_mediator: wrong structure");
    }
    const int k = scm.k;
    PureMediatorInput in;
    for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
        int z_x = static_cast<int>(uz) / k;
        int z_xp = static_cast<int>(uz) % k;
        for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
            double w = scm.u_z[uz] * scm.u_y[r];
            in.p_y_do_x += w * detail::bit(r, z_x);
            in.p_y_do_xp += w * detail::bit(r, z_xp);
        }
    }
    in.obs = ObsXZY::zeros(k);
    detail::fill_mediator_joint<true>(scm, in.obs);
    return in;
}

/// Observational and experimental quantities the SCM induces, in the input
/// variant matching its structure.
inline PopulationData induced_input(const Scm& scm) {
    switch (scm.structure) {
    case Structure::Baseline: return induced_baseline(scm);
    case Structure::NonDescendant: return induced_stratified(scm);
    case Structure::PartialMediator: return induced_partial_mediator(scm);
    case Structure::PureMediator: return induced_pure_mediator(scm);
    }
    throw std::logic_error("induced_input: unreachable");
}

/// Interventional outcome probability P(y_x) or P(y_{x'}), by enumeration.
inline double interventional_outcome(const Scm& scm, bool treated) {
    const int k = scm.k;
    double p = 0.0;
    switch (scm.structure) {
    case Structure::Baseline:
        for (std::uint32_t r = 0; r < 4; ++r) {
            p += scm.u_y[r] * detail::bit(r, treated ? 1 : 0);
        }
        return p;
    case Structure::NonDescendant:
        for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
            int z = static_cast<int>(uz);
            for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                p += scm.u_z[uz] * scm.u_y[r] * detail::bit(r, (treated ? k : 0) + z);
            }
        }
        return p;
    case Structure::PartialMediator:
    case Structure::PureMediator:
        for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
            int z = treated ? static_cast<int>(uz) / k : static_cast<int>(uz) % k;
            for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
                int idx = scm.structure == Structure::PureMediator ? z : (treated ? k : 0) + z;
                p += scm.u_z[uz] * scm.u_y[r] * detail::bit(r, idx);
            }
        }
        return p;
    }
    throw std::logic_error("interventional_outcome: unreachable");
}

/// Fraction of compliers whose mediator value differs between arms. For a
/// pure mediator every complier must switch, so this returns 1 whenever the
/// complier mass is positive.
inline bool pure_mediator_compliers_switch(const Scm& scm) {
    if (scm.structure != Structure::PureMediator) {
        throw std::invalid_argument("pure_mediator_compliers_switch: wrong structure");
    }
    const int k = scm.k;
    for (std::size_t uz = 0; uz < scm.u_z.size(); ++uz) {
        int z_x = static_cast<int>(uz) / k;
        int z_xp = static_cast<int>(uz) % k;
        for (std::uint32_t r = 0; r < scm.u_y.size(); ++r) {
            bool complier = detail::bit(r, z_x) == 1 && detail::bit(r, z_xp) == 0;
            if (complier && z_x == z_xp && scm.u_z[uz] * scm.u_y[r] > 0.0) return false;
        }
    }
    return true;
}

} // namespace unitselect
