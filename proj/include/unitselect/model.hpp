#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace unitselect {

// Comparison slack for interval ordering and strict-inequality predicates.
inline constexpr double kEpsCmp = 1e-12;
// Consistency tolerance for exactly-computed inputs (generator or oracle output).
inline constexpr double kEpsSum = 1e-9;
// Default tolerance for ingested real-world tables, whose published values are
// usually rounded to a few digits.
inline constexpr double kIngestTolerance = 5e-3;

/// Closed interval [lower, upper]. lower may exceed upper by at most kEpsCmp.
class Interval {
public:
    Interval() = default;
    Interval(double lower, double upper) : lower_(lower), upper_(upper) {
        if (!(lower <= upper + kEpsCmp)) {
            throw std::invalid_argument("Interval: lower " + std::to_string(lower) +
                                        " exceeds upper " + std::to_string(upper));
        }
    }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double width() const { return upper_ - lower_; }
    double midpoint() const { return 0.5 * (lower_ + upper_); }
    bool contains(double v, double slack = 0.0) const {
        return v >= lower_ - slack && v <= upper_ + slack;
    }

private:
    double lower_ = 0.0;
    double upper_ = 0.0;
};

/// Payoffs per response type: complier, always-taker, never-taker, defier.
struct BenefitVector {
    double beta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double delta = 0.0;

    bool finite() const {
        return std::isfinite(beta) && std::isfinite(gamma) &&
               std::isfinite(theta) && std::isfinite(delta);
    }
};

/// The four structural regimes an input distribution can come from.
enum class Structure { Baseline, NonDescendant, PartialMediator, PureMediator };

inline const char* structure_name(Structure s) {
    switch (s) {
    case Structure::Baseline: return "baseline";
    case Structure::NonDescendant: return "nondescendant";
    case Structure::PartialMediator: return "partial-mediator";
    case Structure::PureMediator: return "pure-mediator";
    }
    return "?";
}

/// Joint observational table over binary treatment and outcome.
/// Cell names: p_xy = P(x,y), p_xyp = P(x,y'), p_xpy = P(x',y), p_xpyp = P(x',y').
struct ObsXY {
    double p_xy = 0.0;
    double p_xyp = 0.0;
    double p_xpy = 0.0;
    double p_xpyp = 0.0;

    double sum() const { return p_xy + p_xyp + p_xpy + p_xpyp; }
};

struct Marginals {
    double p_y = 0.0;    // P(y)
    double p_yx = 0.0;   // P(y,x)
    double p_yxp = 0.0;  // P(y,x')
    double p_ypx = 0.0;  // P(y',x)
    double p_ypxp = 0.0; // P(y',x')
    double p_x = 0.0;    // P(x)
};

inline Marginals marginals(const ObsXY& obs) {
    Marginals m;
    m.p_yx = obs.p_xy;
    m.p_yxp = obs.p_xpy;
    m.p_ypx = obs.p_xyp;
    m.p_ypxp = obs.p_xpyp;
    m.p_y = obs.p_xy + obs.p_xpy;
    m.p_x = obs.p_xy + obs.p_xyp;
    return m;
}

/// Joint observational table over (X, Z, Y) with k-valued Z.
/// Cells indexed ((x ? 1 : 0) * k + z) * 2 + (y ? 1 : 0).
struct ObsXZY {
    int k = 0;
    std::vector<double> cells;

    static ObsXZY zeros(int k) {
        ObsXZY t;
        t.k = k;
        t.cells.assign(static_cast<std::size_t>(4 * k), 0.0);
        return t;
    }

    double& at(bool x, int z, bool y) {
        return cells[static_cast<std::size_t>(((x ? 1 : 0) * k + z) * 2 + (y ? 1 : 0))];
    }
    double at(bool x, int z, bool y) const {
        return cells[static_cast<std::size_t>(((x ? 1 : 0) * k + z) * 2 + (y ? 1 : 0))];
    }

    double sum() const {
        double s = 0.0;
        for (double c : cells) s += c;
        return s;
    }
    double p_x(bool x) const {
        double s = 0.0;
        for (int z = 0; z < k; ++z) s += at(x, z, false) + at(x, z, true);
        return s;
    }
    double p_xz(bool x, int z) const { return at(x, z, false) + at(x, z, true); }
    double p_z(int z) const { return p_xz(false, z) + p_xz(true, z); }
    double p_zy(int z, bool y) const { return at(false, z, y) + at(true, z, y); }

    ObsXY xy_margin() const {
        ObsXY m;
        for (int z = 0; z < k; ++z) {
            m.p_xy += at(true, z, true);
            m.p_xyp += at(true, z, false);
            m.p_xpy += at(false, z, true);
            m.p_xpyp += at(false, z, false);
        }
        return m;
    }
};

/// Experimental outcome probabilities plus the observational (X,Y) joint.
struct BaselineInput {
    double p_y_do_x = 0.0;  // P(y_x)
    double p_y_do_xp = 0.0; // P(y_{x'})
    ObsXY obs;
};

/// One covariate stratum: weight P(z), per-stratum experimental outcome
/// probabilities and the per-stratum observational (X,Y) joint.
struct Stratum {
    std::string label;
    double weight = 0.0;
    double p_y_do_x = 0.0;
    double p_y_do_xp = 0.0;
    ObsXY obs;
};

struct StratifiedInput {
    std::vector<Stratum> strata;
};

/// Mediator on an X->Z->Y path that coexists with a direct X->Y edge.
struct PartialMediatorInput {
    double p_y_do_x = 0.0;
    double p_y_do_xp = 0.0;
    std::vector<double> p_z_do_x;  // z -> P(z_x)
    std::vector<double> p_z_do_xp; // z -> P(z_{x'})
    ObsXZY obs;
};

/// Mediator that fully transmits X's effect on Y (no direct edge).
struct PureMediatorInput {
    double p_y_do_x = 0.0;
    double p_y_do_xp = 0.0;
    ObsXZY obs;
};

using PopulationData =
    std::variant<BaselineInput, StratifiedInput, PartialMediatorInput, PureMediatorInput>;

// Collapse onto the (X,Y) margin; a left-to-right fold keeps results
// reproducible across runs.
inline BaselineInput to_baseline(const StratifiedInput& in) {
    BaselineInput b;
    for (const Stratum& s : in.strata) {
        if (s.weight <= 0.0) continue;
        b.p_y_do_x += s.weight * s.p_y_do_x;
        b.p_y_do_xp += s.weight * s.p_y_do_xp;
        b.obs.p_xy += s.weight * s.obs.p_xy;
        b.obs.p_xyp += s.weight * s.obs.p_xyp;
        b.obs.p_xpy += s.weight * s.obs.p_xpy;
        b.obs.p_xpyp += s.weight * s.obs.p_xpyp;
    }
    return b;
}

inline BaselineInput to_baseline(const PartialMediatorInput& in) {
    return BaselineInput{in.p_y_do_x, in.p_y_do_xp, in.obs.xy_margin()};
}

inline BaselineInput to_baseline(const PureMediatorInput& in) {
    return BaselineInput{in.p_y_do_x, in.p_y_do_xp, in.obs.xy_margin()};
}

enum class Constraint { NotAProbability, CellsDoNotSumToOne, TianPearlViolated };

/// First violated constraint found by validate(), with the amount of violation.
struct ValidationError {
    Constraint constraint;
    std::string quantity;
    double slack = 0.0;

    std::string message() const {
        const char* name = constraint == Constraint::NotAProbability ? "NotAProbability"
                           : constraint == Constraint::CellsDoNotSumToOne
                               ? "CellsDoNotSumToOne"
                               : "TianPearlViolated";
        return std::string(name) + ": " + quantity + " (slack " + std::to_string(slack) + ")";
    }
};

namespace detail {

inline std::optional<ValidationError> check_prob(double p, const std::string& name, double tol) {
    if (!std::isfinite(p) || p < -tol || p > 1.0 + tol) {
        double slack = !std::isfinite(p) ? p : (p < 0.0 ? -p : p - 1.0);
        return ValidationError{Constraint::NotAProbability, name, slack};
    }
    return std::nullopt;
}

inline std::optional<ValidationError> check_sum_one(double s, const std::string& name, double tol) {
    if (std::fabs(s - 1.0) > tol) {
        return ValidationError{Constraint::CellsDoNotSumToOne, name, std::fabs(s - 1.0)};
    }
    return std::nullopt;
}

// P(x,y) <= P(y_x) <= 1 - P(x,y'), for the arm named by `ctx`.
inline std::optional<ValidationError> check_tian_pearl(double p_do, double p_joint_y,
                                                       double p_joint_yp, const std::string& ctx,
                                                       double tol) {
    if (p_do < p_joint_y - tol) {
        return ValidationError{Constraint::TianPearlViolated, ctx + " below P(x,y)",
                               p_joint_y - p_do};
    }
    if (p_do > 1.0 - p_joint_yp + tol) {
        return ValidationError{Constraint::TianPearlViolated, ctx + " above 1-P(x,y')",
                               p_do - (1.0 - p_joint_yp)};
    }
    return std::nullopt;
}

inline std::optional<ValidationError> validate_xy_block(double p_y_do_x, double p_y_do_xp,
                                                        const ObsXY& obs, const std::string& ctx,
                                                        double tol) {
    if (auto e = check_prob(p_y_do_x, "P(y_x)" + ctx, tol)) return e;
    if (auto e = check_prob(p_y_do_xp, "P(y_x')" + ctx, tol)) return e;
    if (auto e = check_prob(obs.p_xy, "P(x,y)" + ctx, tol)) return e;
    if (auto e = check_prob(obs.p_xyp, "P(x,y')" + ctx, tol)) return e;
    if (auto e = check_prob(obs.p_xpy, "P(x',y)" + ctx, tol)) return e;
    if (auto e = check_prob(obs.p_xpyp, "P(x',y')" + ctx, tol)) return e;
    if (auto e = check_sum_one(obs.sum(), "P(X,Y)" + ctx, tol)) return e;
    if (auto e = check_tian_pearl(p_y_do_x, obs.p_xy, obs.p_xyp, "P(y_x)" + ctx, tol)) return e;
    if (auto e = check_tian_pearl(p_y_do_xp, obs.p_xpy, obs.p_xpyp, "P(y_x')" + ctx, tol)) return e;
    return std::nullopt;
}

} // namespace detail

inline std::optional<ValidationError> validate(const BaselineInput& in, double tol = kEpsSum) {
    return detail::validate_xy_block(in.p_y_do_x, in.p_y_do_xp, in.obs, "", tol);
}

inline std::optional<ValidationError> validate(const StratifiedInput& in, double tol = kEpsSum) {
    double wsum = 0.0;
    for (std::size_t i = 0; i < in.strata.size(); ++i) {
        const Stratum& s = in.strata[i];
        std::string ctx = "|z=" + (s.label.empty() ? std::to_string(i) : s.label);
        if (auto e = detail::check_prob(s.weight, "P(z)" + ctx, tol)) return e;
        wsum += s.weight;
        if (s.weight <= 0.0) continue; // null stratum carries no conditional data
        if (auto e = detail::validate_xy_block(s.p_y_do_x, s.p_y_do_xp, s.obs, ctx, tol)) return e;
    }
    if (auto e = detail::check_sum_one(wsum, "sum of P(z)", tol)) return e;
    return std::nullopt;
}

inline std::optional<ValidationError> validate(const PartialMediatorInput& in,
                                               double tol = kEpsSum) {
    double sx = 0.0, sxp = 0.0;
    for (std::size_t z = 0; z < in.p_z_do_x.size(); ++z) {
        if (auto e = detail::check_prob(in.p_z_do_x[z], "P(z_x), z=" + std::to_string(z), tol))
            return e;
        sx += in.p_z_do_x[z];
    }
    for (std::size_t z = 0; z < in.p_z_do_xp.size(); ++z) {
        if (auto e = detail::check_prob(in.p_z_do_xp[z], "P(z_x'), z=" + std::to_string(z), tol))
            return e;
        sxp += in.p_z_do_xp[z];
    }
    if (auto e = detail::check_sum_one(sx, "sum of P(z_x)", tol)) return e;
    if (auto e = detail::check_sum_one(sxp, "sum of P(z_x')", tol)) return e;
    for (std::size_t i = 0; i < in.obs.cells.size(); ++i) {
        if (auto e = detail::check_prob(in.obs.cells[i], "P(X,Z,Y) cell " + std::to_string(i), tol))
            return e;
    }
    if (auto e = detail::check_sum_one(in.obs.sum(), "P(X,Z,Y)", tol)) return e;
    ObsXY m = in.obs.xy_margin();
    if (auto e = detail::check_tian_pearl(in.p_y_do_x, m.p_xy, m.p_xyp, "P(y_x)", tol)) return e;
    if (auto e = detail::check_tian_pearl(in.p_y_do_xp, m.p_xpy, m.p_xpyp, "P(y_x')", tol)) return e;
    return std::nullopt;
}

inline std::optional<ValidationError> validate(const PureMediatorInput& in, double tol = kEpsSum) {
    if (auto e = detail::check_prob(in.p_y_do_x, "P(y_x)", tol)) return e;
    if (auto e = detail::check_prob(in.p_y_do_xp, "P(y_x')", tol)) return e;
    for (std::size_t i = 0; i < in.obs.cells.size(); ++i) {
        if (auto e = detail::check_prob(in.obs.cells[i], "P(X,Z,Y) cell " + std::to_string(i), tol))
            return e;
    }
    if (auto e = detail::check_sum_one(in.obs.sum(), "P(X,Z,Y)", tol)) return e;
    ObsXY m = in.obs.xy_margin();
    if (auto e = detail::check_tian_pearl(in.p_y_do_x, m.p_xy, m.p_xyp, "P(y_x)", tol)) return e;
    if (auto e = detail::check_tian_pearl(in.p_y_do_xp, m.p_xpy, m.p_xpyp, "P(y_x')", tol)) return e;
    return std::nullopt;
}

inline std::optional<ValidationError> validate(const PopulationData& in, double tol = kEpsSum) {
    return std::visit([tol](const auto& v) { return validate(v, tol); }, in);
}

template <typename Input>
inline void ensure_valid(const Input& in, double tol = kEpsSum) {
    if (auto e = validate(in, tol)) throw std::invalid_argument(e->message());
}

// ---------------------------------------------------------------------------
// Count-table ingestion. Ratios are formed once, after integer accumulation.
// ---------------------------------------------------------------------------

/// Experimental counts: outcomes under do(x) and do(x').
struct ExperimentalCountsXY {
    std::int64_t y_do_x = 0;   // outcome y under do(x)
    std::int64_t yp_do_x = 0;  // outcome y' under do(x)
    std::int64_t y_do_xp = 0;  // outcome y under do(x')
    std::int64_t yp_do_xp = 0; // outcome y' under do(x')
};

struct ObsCountsXY {
    std::int64_t xy = 0;
    std::int64_t xyp = 0;
    std::int64_t xpy = 0;
    std::int64_t xpyp = 0;

    std::int64_t total() const { return xy + xyp + xpy + xpyp; }
};

struct StratumCounts {
    std::string label;
    ExperimentalCountsXY exp;
    ObsCountsXY obs;
};

struct ObsCountsXZY {
    int k = 0;
    std::vector<std::int64_t> cells; // same index layout as ObsXZY

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : cells) t += c;
        return t;
    }
};

namespace detail {

inline void require_nonnegative(std::int64_t n, const char* what) {
    if (n < 0) throw std::invalid_argument(std::string("NegativeCount: ") + what);
}

inline double ratio(std::int64_t num, std::int64_t den, const char* what) {
    if (den == 0) throw std::invalid_argument(std::string("EmptyTable: ") + what);
    return static_cast<double>(num) / static_cast<double>(den);
}

inline ExperimentalCountsXY checked(const ExperimentalCountsXY& e) {
    require_nonnegative(e.y_do_x, "experimental do(x)");
    require_nonnegative(e.yp_do_x, "experimental do(x)");
    require_nonnegative(e.y_do_xp, "experimental do(x')");
    require_nonnegative(e.yp_do_xp, "experimental do(x')");
    return e;
}

inline ObsCountsXY checked(const ObsCountsXY& o) {
    require_nonnegative(o.xy, "observational (x,y)");
    require_nonnegative(o.xyp, "observational (x,y')");
    require_nonnegative(o.xpy, "observational (x',y)");
    require_nonnegative(o.xpyp, "observational (x',y')");
    return o;
}

inline ObsXY obs_from_counts(const ObsCountsXY& raw) {
    ObsCountsXY o = checked(raw);
    std::int64_t total = o.total();
    ObsXY t;
    t.p_xy = ratio(o.xy, total, "observational table");
    t.p_xyp = ratio(o.xyp, total, "observational table");
    t.p_xpy = ratio(o.xpy, total, "observational table");
    t.p_xpyp = ratio(o.xpyp, total, "observational table");
    return t;
}

} // namespace detail

inline BaselineInput baseline_from_counts(const ExperimentalCountsXY& exp_raw,
                                          const ObsCountsXY& obs_raw,
                                          double tol = kIngestTolerance) {
    ExperimentalCountsXY e = detail::checked(exp_raw);
    BaselineInput in;
    in.p_y_do_x = detail::ratio(e.y_do_x, e.y_do_x + e.yp_do_x, "experimental do(x) column");
    in.p_y_do_xp = detail::ratio(e.y_do_xp, e.y_do_xp + e.yp_do_xp, "experimental do(x') column");
    in.obs = detail::obs_from_counts(obs_raw);
    ensure_valid(in, tol);
    return in;
}

inline StratifiedInput stratified_from_counts(std::span<const StratumCounts> strata,
                                              double tol = kIngestTolerance) {
    if (strata.empty()) throw std::invalid_argument("EmptyTable: no strata");
    std::int64_t total = 0;
    for (const StratumCounts& s : strata) total += detail::checked(s.obs).total();
    if (total == 0) throw std::invalid_argument("EmptyTable: observational table");
    StratifiedInput in;
    for (const StratumCounts& s : strata) {
        Stratum out;
        out.label = s.label;
        out.weight = static_cast<double>(s.obs.total()) / static_cast<double>(total);
        if (s.obs.total() > 0) {
            ExperimentalCountsXY e = detail::checked(s.exp);
            out.p_y_do_x =
                detail::ratio(e.y_do_x, e.y_do_x + e.yp_do_x, "experimental do(x) stratum");
            out.p_y_do_xp =
                detail::ratio(e.y_do_xp, e.y_do_xp + e.yp_do_xp, "experimental do(x') stratum");
            out.obs = detail::obs_from_counts(s.obs);
        }
        in.strata.push_back(std::move(out));
    }
    ensure_valid(in, tol);
    return in;
}

inline ObsXZY obs_xzy_from_counts(const ObsCountsXZY& raw) {
    if (raw.k < 2 || raw.cells.size() != static_cast<std::size_t>(4 * raw.k)) {
        throw std::invalid_argument("EmptyTable: (X,Z,Y) table needs 2*k*2 cells, k >= 2");
    }
    for (auto c : raw.cells) detail::require_nonnegative(c, "observational (x,z,y)");
    std::int64_t total = raw.total();
    if (total == 0) throw std::invalid_argument("EmptyTable: observational table");
    ObsXZY t = ObsXZY::zeros(raw.k);
    for (std::size_t i = 0; i < raw.cells.size(); ++i) {
        t.cells[i] = static_cast<double>(raw.cells[i]) / static_cast<double>(total);
    }
    return t;
}

} // namespace unitselect
