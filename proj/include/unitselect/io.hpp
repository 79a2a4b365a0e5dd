#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "unitselect/adjustment.hpp"
#include "unitselect/benefit.hpp"
#include "unitselect/model.hpp"
#include "unitselect/simulation.hpp"

namespace unitselect {

/// Syntactic or structural problem in a data file. Distinct from validation
/// failures, which are probability-axiom or consistency violations.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One table row: treatment arm, optional outcome, optional covariate value,
/// and a count or probability.
struct DataEntry {
    bool x = false;
    std::optional<bool> y;
    std::optional<std::string> z;
    double value = 0.0;
    int line = 0;
};

/// A parsed data file. Tables mirror the published layout: an experimental
/// section (outcome rows per arm, or mediator rows per arm) and an
/// observational section of joint cells. Values are counts unless the file
/// says "probabilities: true".
struct DataFile {
    bool probabilities = false;
    std::vector<DataEntry> experimental;
    std::vector<DataEntry> observational;
    std::vector<std::string> z_labels; // order of first appearance

    int z_index(const std::string& label) const {
        for (std::size_t i = 0; i < z_labels.size(); ++i) {
            if (z_labels[i] == label) return static_cast<int>(i);
        }
        return -1;
    }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline bool parse_binary(const std::string& v, int line, const char* key) {
    if (v == "1") return true;
    if (v == "0") return false;
    throw ParseError("line " + std::to_string(line) + ": " + key + " must be 0 or 1, got '" + v +
                     "'");
}

inline double parse_number(const std::string& v, int line) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
    }
    if (pos != v.size()) {
        throw ParseError("line " + std::to_string(line) + ": trailing characters in '" + v + "'");
    }
    return d;
}

} // namespace detail

inline DataFile parse_data_file(std::istream& is) {
    DataFile f;
    std::vector<DataEntry>* section = nullptr;
    std::map<std::string, int> seen; // cell key -> first line
    std::string raw;
    int lineno = 0;
    bool any_section = false;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find('#'));
        std::vector<std::string> toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() == 1 && toks[0] == "experimental:") {
            section = &f.experimental;
            any_section = true;
            continue;
        }
        if (toks.size() == 1 && toks[0] == "observational:") {
            section = &f.observational;
            any_section = true;
            continue;
        }
        if (!any_section) {
            if (toks.size() == 2 && toks[0] == "probabilities:") {
                if (toks[1] == "true") {
                    f.probabilities = true;
                } else if (toks[1] == "false") {
                    f.probabilities = false;
                } else {
                    throw ParseError("line " + std::to_string(lineno) +
                                     ": probabilities must be true or false");
                }
                continue;
            }
            throw ParseError("line " + std::to_string(lineno) + ": unknown header '" + toks[0] +
                             "'");
        }
        if (section == nullptr) {
            throw ParseError("line " + std::to_string(lineno) + ": row outside any section");
        }
        DataEntry e;
        e.line = lineno;
        bool have_x = false;
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
            std::size_t eq = toks[i].find('=');
            if (eq == std::string::npos) {
                throw ParseError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                                 toks[i] + "'");
            }
            std::string key = toks[i].substr(0, eq);
            std::string val = toks[i].substr(eq + 1);
            if (key == "x") {
                e.x = detail::parse_binary(val, lineno, "x");
                have_x = true;
            } else if (key == "y") {
                e.y = detail::parse_binary(val, lineno, "y");
            } else if (key == "z") {
                if (val.empty()) {
                    throw ParseError("line " + std::to_string(lineno) + ": empty z label");
                }
                e.z = val;
                if (f.z_index(val) < 0) f.z_labels.push_back(val);
            } else {
                throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        }
        if (!have_x) {
            throw ParseError("line " + std::to_string(lineno) + ": row is missing x=");
        }
        if (!e.y && !e.z) {
            throw ParseError("line " + std::to_string(lineno) + ": row needs y= or z=");
        }
        e.value = detail::parse_number(toks.back(), lineno);
        if (!f.probabilities) {
            if (e.value != std::floor(e.value)) {
                throw ParseError("line " + std::to_string(lineno) +
                                 ": counts must be integers (use probabilities: true)");
            }
        }
        std::string key = (section == &f.experimental ? "e|" : "o|");
        key += (e.x ? "1|" : "0|");
        key += e.y ? (*e.y ? "1|" : "0|") : "-|";
        key += e.z ? *e.z : "-";
        auto [it, fresh] = seen.emplace(key, lineno);
        if (!fresh) {
            throw ParseError("line " + std::to_string(lineno) + ": duplicate of the cell on line " +
                             std::to_string(it->second));
        }
        section->push_back(std::move(e));
    }
    if (!any_section) throw ParseError("no experimental: or observational: section found");
    if (f.observational.empty()) throw ParseError("observational section is empty");
    return f;
}

inline DataFile parse_data_file_text(const std::string& text) {
    std::istringstream is(text);
    return parse_data_file(is);
}

inline DataFile load_data_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open data file: " + path);
    return parse_data_file(is);
}

// ---------------------------------------------------------------------------
// Assembly of typed inputs from a parsed file.
// ---------------------------------------------------------------------------

namespace detail {

struct CellGrid {
    // value per (x, z, y); z = -1 when absent
    std::map<std::tuple<int, int, int>, double> cells;

    void add(int x, int z, int y, double v, int line) {
        auto key = std::make_tuple(x, z, y);
        if (cells.count(key)) {
            throw ParseError("line " + std::to_string(line) + ": duplicate cell");
        }
        cells[key] = v;
    }
    std::optional<double> get(int x, int z, int y) const {
        auto it = cells.find(std::make_tuple(x, z, y));
        if (it == cells.end()) return std::nullopt;
        return it->second;
    }
    double require(int x, int z, int y, const char* what) const {
        auto v = get(x, z, y);
        if (!v) {
            throw ParseError(std::string("missing ") + what + " cell x=" + std::to_string(x) +
                             (z >= 0 ? " z#" + std::to_string(z) : "") +
                             (y >= 0 ? " y=" + std::to_string(y) : ""));
        }
        return *v;
    }
};

inline CellGrid grid_of(const std::vector<DataEntry>& entries, const DataFile& f) {
    CellGrid g;
    for (const DataEntry& e : entries) {
        int z = e.z ? f.z_index(*e.z) : -1;
        int y = e.y ? (*e.y ? 1 : 0) : -1;
        g.add(e.x ? 1 : 0, z, y, e.value, e.line);
    }
    return g;
}

inline bool entries_have_z(const std::vector<DataEntry>& entries) {
    for (const DataEntry& e : entries) {
        if (e.z) return true;
    }
    return false;
}

// Observational (x,y) margin, summing over z if present.
inline ObsXY obs_xy_from_file(const DataFile& f) {
    double total = 0.0;
    ObsXY t{};
    for (const DataEntry& e : f.observational) {
        if (!e.y) {
            throw ParseError("line " + std::to_string(e.line) +
                             ": observational rows need y=");
        }
        if (e.value < 0.0) throw std::invalid_argument("NegativeCount: observational cell");
        total += e.value;
        double& cell = e.x ? (*e.y ? t.p_xy : t.p_xyp) : (*e.y ? t.p_xpy : t.p_xpyp);
        cell += e.value;
    }
    if (f.probabilities) return t;
    if (total <= 0.0) throw std::invalid_argument("EmptyTable: observational table");
    t.p_xy /= total;
    t.p_xyp /= total;
    t.p_xpy /= total;
    t.p_xpyp /= total;
    return t;
}

inline ObsXZY obs_xzy_from_file(const DataFile& f) {
    if (f.z_labels.size() < 2) {
        throw ParseError("observational table needs a covariate z with at least two values");
    }
    int k = static_cast<int>(f.z_labels.size());
    ObsXZY t = ObsXZY::zeros(k);
    double total = 0.0;
    for (const DataEntry& e : f.observational) {
        if (!e.y || !e.z) {
            throw ParseError("line " + std::to_string(e.line) +
                             ": observational rows need x=, y= and z=");
        }
        if (e.value < 0.0) throw std::invalid_argument("NegativeCount: observational cell");
        t.at(e.x, f.z_index(*e.z), *e.y) += e.value;
        total += e.value;
    }
    if (!f.probabilities) {
        if (total <= 0.0) throw std::invalid_argument("EmptyTable: observational table");
        for (double& c : t.cells) c /= total;
    }
    return t;
}

// Experimental outcome probability P(y | do(arm)) from (x,y) rows, optionally
// per stratum (z >= 0).
inline double exp_outcome(const CellGrid& g, bool probabilities, int x, int z, double tol) {
    if (probabilities) {
        auto y1 = g.get(x, z, 1);
        auto y0 = g.get(x, z, 0);
        if (!y1) {
            throw ParseError(std::string("missing experimental y=1 row for arm x=") +
                             std::to_string(x) + (z >= 0 ? " z#" + std::to_string(z) : ""));
        }
        if (y0 && std::fabs(*y1 + *y0 - 1.0) > tol) {
            throw std::invalid_argument("CellsDoNotSumToOne: experimental arm x=" +
                                        std::to_string(x));
        }
        return *y1;
    }
    double y1 = g.require(x, z, 1, "experimental");
    double y0 = g.require(x, z, 0, "experimental");
    if (y1 < 0.0 || y0 < 0.0) throw std::invalid_argument("NegativeCount: experimental cell");
    if (y1 + y0 <= 0.0) throw std::invalid_argument("EmptyTable: experimental do() column");
    return y1 / (y1 + y0);
}

// Interventional mediator distribution from (x,z) rows without y.
inline std::vector<double> exp_mediator(const CellGrid& g, bool probabilities, int x, int k) {
    std::vector<double> out(static_cast<std::size_t>(k), 0.0);
    double total = 0.0;
    for (int z = 0; z < k; ++z) {
        auto v = g.get(x, z, -1);
        if (!v) {
            throw ParseError("missing experimental mediator row x=" + std::to_string(x) + " z#" +
                             std::to_string(z));
        }
        if (*v < 0.0) throw std::invalid_argument("NegativeCount: experimental mediator cell");
        out[static_cast<std::size_t>(z)] = *v;
        total += *v;
    }
    if (probabilities) return out;
    if (total <= 0.0) throw std::invalid_argument("EmptyTable: experimental mediator column");
    for (double& v : out) v /= total;
    return out;
}

} // namespace detail

inline StratifiedInput assemble_stratified(const DataFile& f, double tol = kIngestTolerance) {
    if (f.z_labels.size() < 2) {
        throw ParseError("stratified input needs a covariate z with at least two values");
    }
    detail::CellGrid exp = detail::grid_of(f.experimental, f);
    detail::CellGrid obs = detail::grid_of(f.observational, f);
    StratifiedInput in;
    double total = 0.0;
    std::vector<double> sums(f.z_labels.size(), 0.0);
    for (std::size_t zi = 0; zi < f.z_labels.size(); ++zi) {
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                double v = obs.require(x, static_cast<int>(zi), y, "observational");
                if (v < 0.0) throw std::invalid_argument("NegativeCount: observational cell");
                sums[zi] += v;
            }
        }
        total += sums[zi];
    }
    if (total <= 0.0) throw std::invalid_argument("EmptyTable: observational table");
    for (std::size_t zi = 0; zi < f.z_labels.size(); ++zi) {
        int z = static_cast<int>(zi);
        Stratum s;
        s.label = f.z_labels[zi];
        s.weight = f.probabilities ? sums[zi] : sums[zi] / total;
        if (sums[zi] > 0.0) {
            // cells arrive as joint mass (or counts); the stratum table is
            // conditional on z
            double denom = sums[zi];
            s.obs.p_xy = obs.require(1, z, 1, "observational") / denom;
            s.obs.p_xyp = obs.require(1, z, 0, "observational") / denom;
            s.obs.p_xpy = obs.require(0, z, 1, "observational") / denom;
            s.obs.p_xpyp = obs.require(0, z, 0, "observational") / denom;
            s.p_y_do_x = detail::exp_outcome(exp, f.probabilities, 1, z, tol);
            s.p_y_do_xp = detail::exp_outcome(exp, f.probabilities, 0, z, tol);
        }
        in.strata.push_back(std::move(s));
    }
    ensure_valid(in, tol);
    return in;
}

inline BaselineInput assemble_baseline(const DataFile& f, bool backdoor,
                                       double tol = kIngestTolerance) {
    BaselineInput in;
    if (f.experimental.empty()) {
        if (!backdoor) {
            throw ParseError("no experimental section; pass --backdoor to derive it "
                             "observationally");
        }
        in = unitselect::assemble_baseline(detail::obs_xy_from_file(f), true);
    } else if (detail::entries_have_z(f.experimental)) {
        // Per-stratum experimental rows: recombine through the strata so the
        // covariate-rounded published tables reproduce exactly.
        in = to_baseline(assemble_stratified(f, tol));
    } else {
        detail::CellGrid exp = detail::grid_of(f.experimental, f);
        in.p_y_do_x = detail::exp_outcome(exp, f.probabilities, 1, -1, tol);
        in.p_y_do_xp = detail::exp_outcome(exp, f.probabilities, 0, -1, tol);
        in.obs = detail::obs_xy_from_file(f);
    }
    ensure_valid(in, tol);
    return in;
}

inline PartialMediatorInput assemble_partial(const DataFile& f, bool backdoor,
                                             double tol = kIngestTolerance) {
    ObsXZY joint = detail::obs_xzy_from_file(f);
    PartialMediatorInput in;
    if (f.experimental.empty()) {
        if (!backdoor) {
            throw ParseError("no experimental section; pass --backdoor to derive it "
                             "observationally");
        }
        in = assemble_partial_mediator(joint, true);
    } else {
        detail::CellGrid exp = detail::grid_of(f.experimental, f);
        in.obs = joint;
        in.p_y_do_x = detail::exp_outcome(exp, f.probabilities, 1, -1, tol);
        in.p_y_do_xp = detail::exp_outcome(exp, f.probabilities, 0, -1, tol);
        in.p_z_do_x = detail::exp_mediator(exp, f.probabilities, 1, joint.k);
        in.p_z_do_xp = detail::exp_mediator(exp, f.probabilities, 0, joint.k);
    }
    ensure_valid(in, tol);
    return in;
}

inline PureMediatorInput assemble_pure(const DataFile& f, bool backdoor,
                                       double tol = kIngestTolerance) {
    ObsXZY joint = detail::obs_xzy_from_file(f);
    PureMediatorInput in;
    if (f.experimental.empty()) {
        if (!backdoor) {
            throw ParseError("no experimental section; pass --backdoor to derive it "
                             "observationally");
        }
        in = assemble_pure_mediator(joint, true);
    } else {
        detail::CellGrid exp = detail::grid_of(f.experimental, f);
        in.obs = joint;
        in.p_y_do_x = detail::exp_outcome(exp, f.probabilities, 1, -1, tol);
        in.p_y_do_xp = detail::exp_outcome(exp, f.probabilities, 0, -1, tol);
    }
    ensure_valid(in, tol);
    return in;
}

inline PopulationData assemble_input(const DataFile& f, Structure structure, bool backdoor,
                                     double tol = kIngestTolerance) {
    switch (structure) {
    case Structure::Baseline: return assemble_baseline(f, backdoor, tol);
    case Structure::NonDescendant: return assemble_stratified(f, tol);
    case Structure::PartialMediator: return assemble_partial(f, backdoor, tol);
    case Structure::PureMediator: return assemble_pure(f, backdoor, tol);
    }
    throw std::logic_error("assemble_input: unreachable");
}

inline std::optional<Structure> structure_from_name(const std::string& name) {
    if (name == "baseline") return Structure::Baseline;
    if (name == "nondescendant") return Structure::NonDescendant;
    if (name == "partial-mediator") return Structure::PartialMediator;
    if (name == "pure-mediator") return Structure::PureMediator;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Report rendering. Human-readable values use the 5-decimal convention of the
// source tables; the machine section keeps full precision.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline std::string f5(double v) { return fmt("%.5f", v); }
inline std::string full(double v) { return fmt("%.17g", v); }

} // namespace detail

struct BoundsReport {
    Structure structure = Structure::Baseline;
    BenefitVector bv;
    bool backdoor = false;
    BenefitBounds bounds;
};

inline std::string render_bounds_report(const BoundsReport& r) {
    using detail::f5;
    using detail::full;
    DecisionReport d = decide(r.bounds);
    std::ostringstream os;
    os << "benefit bounds (" << structure_name(r.structure) << ")\n";
    os << "  benefit vector: beta=" << r.bv.beta << " gamma=" << r.bv.gamma
       << " theta=" << r.bv.theta << " delta=" << r.bv.delta << "\n";
    os << "  backdoor adjustment: " << (r.backdoor ? "asserted" : "not used") << "\n";
    os << "  sigma = " << f5(r.bounds.sigma) << "\n";
    os << "  W     = " << f5(r.bounds.w) << "\n";
    os << "  PNS in [" << f5(r.bounds.pns.interval.lower()) << ", "
       << f5(r.bounds.pns.interval.upper()) << "]\n";
    os << "    lower attained by: " << r.bounds.pns.lower_term << "\n";
    os << "    upper attained by: " << r.bounds.pns.upper_term << "\n";
    if (r.bounds.pns.clamp_warning) {
        os << "  warning: bounds clamped beyond 1e-9; input tables look inconsistent\n";
    }
    if (r.bounds.is_point) {
        os << "  benefit = " << f5(r.bounds.interval.lower()) << " (point estimate, sigma = 0)\n";
    } else {
        os << "  benefit in [" << f5(r.bounds.interval.lower()) << ", "
           << f5(r.bounds.interval.upper()) << "]\n";
    }
    os << "  midpoint " << f5(r.bounds.interval.midpoint()) << ", decision by midpoint sign: "
       << decision_name(d.midpoint_sign) << "\n";
    os << "  whole interval one-signed: " << (d.one_signed ? "yes" : "no") << "\n";
    os << "machine:\n";
    os << "structure=" << structure_name(r.structure) << "\n";
    os << "backdoor=" << (r.backdoor ? 1 : 0) << "\n";
    os << "sigma=" << full(r.bounds.sigma) << "\n";
    os << "w=" << full(r.bounds.w) << "\n";
    os << "pns_lower=" << full(r.bounds.pns.interval.lower()) << "\n";
    os << "pns_upper=" << full(r.bounds.pns.interval.upper()) << "\n";
    os << "lower=" << full(r.bounds.interval.lower()) << "\n";
    os << "upper=" << full(r.bounds.interval.upper()) << "\n";
    os << "is_point=" << (r.bounds.is_point ? 1 : 0) << "\n";
    os << "decision_midpoint=" << decision_name(d.midpoint_sign) << "\n";
    os << "one_signed=" << (d.one_signed ? 1 : 0) << "\n";
    return os.str();
}

inline std::string render_summary_report(Structure structure, const SimulationSummary& s,
                                         std::int64_t generated, bool filtered,
                                         std::uint64_t seed) {
    using detail::full;
    std::ostringstream os;
    os << "simulation summary (" << structure_name(structure) << (filtered ? ", filtered" : "")
       << ", seed " << seed << ")\n";
    char buf[96];
    auto row = [&](const char* label, double v) {
        std::snprintf(buf, sizeof(buf), "  %-34s %.5f\n", label, v);
        os << buf;
    };
    os << "  samples                            " << s.n << "\n";
    row("average increased lower bound", s.avg_lower_gain);
    row("average decreased upper bound", s.avg_upper_gain);
    row("average gap, baseline", s.avg_gap_baseline);
    row("average gap, covariate-informed", s.avg_gap_informed);
    os << "  decisions flipped                  " << s.flips << "\n";
    os << "  bounds narrower                    " << s.narrower << "\n";
    if (filtered && s.n > 0) {
        std::snprintf(buf, sizeof(buf), "  acceptance rate                    %.5f (%lld drawn)\n",
                      static_cast<double>(s.n) / static_cast<double>(generated),
                      static_cast<long long>(generated));
        os << buf;
    }
    os << "machine:\n";
    os << "structure=" << structure_name(structure) << "\n";
    os << "filtered=" << (filtered ? 1 : 0) << "\n";
    os << "seed=" << seed << "\n";
    os << "n=" << s.n << "\n";
    os << "generated=" << generated << "\n";
    os << "avg_lower_gain=" << full(s.avg_lower_gain) << "\n";
    os << "avg_upper_gain=" << full(s.avg_upper_gain) << "\n";
    os << "avg_gap_baseline=" << full(s.avg_gap_baseline) << "\n";
    os << "avg_gap_informed=" << full(s.avg_gap_informed) << "\n";
    os << "flips=" << s.flips << "\n";
    os << "narrower=" << s.narrower << "\n";
    return os.str();
}

/// Key=value pairs from the machine section of a rendered report.
inline std::map<std::string, std::string> parse_machine_section(const std::string& report) {
    std::map<std::string, std::string> kv;
    std::istringstream is(report);
    std::string line;
    bool in_machine = false;
    while (std::getline(is, line)) {
        if (line == "machine:") {
            in_machine = true;
            continue;
        }
        if (!in_machine) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

} // namespace unitselect
