// unitselect: bounds on the unit-selection benefit function from
// observational and experimental tables, plus the simulation and oracle
// harnesses. Exit codes: 0 success, 2 invalid data or arguments, 3 file
// parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitselect.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitParse = 3;

unitselect::BenefitVector parse_benefit(const std::vector<double>& v) {
    if (v.size() != 4) {
        throw CLI::ValidationError("--benefit", "expected four values beta,gamma,theta,delta");
    }
    return unitselect::BenefitVector{v[0], v[1], v[2], v[3]};
}

void emit(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot write " + out_path);
        os << text;
    }
}

int cmd_bounds(const std::string& data_path, const std::string& structure_name,
               const std::vector<double>& benefit, bool backdoor, double tolerance,
               const std::string& out_path) {
    auto structure = unitselect::structure_from_name(structure_name);
    if (!structure) {
        std::cerr << "error: unknown structure '" << structure_name << "'\n";
        return kExitInvalid;
    }
    unitselect::BenefitVector bv = parse_benefit(benefit);
    unitselect::DataFile file = unitselect::load_data_file(data_path);
    unitselect::PopulationData input =
        unitselect::assemble_input(file, *structure, backdoor, tolerance);

    unitselect::BoundsReport report;
    report.structure = *structure;
    report.bv = bv;
    report.backdoor = backdoor;
    switch (*structure) {
    case unitselect::Structure::Baseline:
        report.bounds = unitselect::lipearl_bounds(std::get<unitselect::BaselineInput>(input), bv);
        break;
    case unitselect::Structure::NonDescendant:
        report.bounds =
            unitselect::stratified_bounds(std::get<unitselect::StratifiedInput>(input), bv);
        break;
    case unitselect::Structure::PartialMediator:
        report.bounds =
            unitselect::partial_mediator_bounds(std::get<unitselect::PartialMediatorInput>(input), bv);
        break;
    case unitselect::Structure::PureMediator:
        report.bounds =
            unitselect::pure_mediator_bounds(std::get<unitselect::PureMediatorInput>(input), bv);
        break;
    }
    emit(unitselect::render_bounds_report(report), out_path);
    return kExitOk;
}

int cmd_simulate(const std::string& case_name, std::int64_t n, std::uint64_t seed,
                 const std::vector<double>& benefit, bool filtered, std::int64_t series_m,
                 const std::string& series_path, const std::string& out_path) {
    auto structure = unitselect::structure_from_name(case_name);
    if (!structure || *structure == unitselect::Structure::Baseline) {
        std::cerr << "error: --case must be nondescendant, partial-mediator or pure-mediator\n";
        return kExitInvalid;
    }
    if (n <= 0) {
        std::cerr << "error: --n must be positive\n";
        return kExitInvalid;
    }
    if (filtered && *structure != unitselect::Structure::PartialMediator) {
        std::cerr << "error: --filtered applies to --case partial-mediator only\n";
        return kExitInvalid;
    }
    unitselect::BenefitVector bv = parse_benefit(benefit);
    unitselect::StudyResult result =
        filtered ? unitselect::run_study_filtered(*structure, n, bv, seed)
                 : unitselect::run_study(*structure, n, bv, seed);
    emit(unitselect::render_summary_report(*structure, result.summary, result.generated, filtered,
                                           seed),
         out_path);
    if (series_m > 0) {
        if (result.records.empty()) {
            std::cerr << "error: study too large to keep records, cannot export series\n";
            return kExitInvalid;
        }
        // Figure convention: sort the stratified case by the baseline lower
        // bound, mediator cases by the baseline upper bound.
        unitselect::SortKey key = *structure == unitselect::Structure::NonDescendant
                                      ? unitselect::SortKey::BaselineLower
                                      : unitselect::SortKey::BaselineUpper;
        unitselect::Rng series_rng(seed ^ 0x5eed5eed5eed5eedULL);
        auto rows = unitselect::export_series(result.records, key,
                                              static_cast<std::size_t>(series_m), series_rng);
        std::ofstream os(series_path);
        if (!os) throw std::runtime_error("cannot write " + series_path);
        os << unitselect::series_to_csv(rows);
        std::cout << "series: " << rows.size() << " rows -> " << series_path << "\n";
    }
    return kExitOk;
}

int cmd_oracle(const std::string& structure_name, std::int64_t trials, std::uint64_t seed,
               const std::vector<double>& benefit, int k) {
    auto structure = unitselect::structure_from_name(structure_name);
    if (!structure) {
        std::cerr << "error: unknown structure '" << structure_name << "'\n";
        return kExitInvalid;
    }
    if (trials <= 0) {
        std::cerr << "error: --trials must be positive\n";
        return kExitInvalid;
    }
    unitselect::BenefitVector bv = parse_benefit(benefit);
    unitselect::Rng rng(seed);

    std::int64_t pns_violations = 0;
    std::int64_t benefit_violations = 0;
    double max_decompose_err = 0.0;
    double max_switch_identity_err = 0.0;
    double max_type_sum_err = 0.0;

    for (std::int64_t i = 0; i < trials; ++i) {
        unitselect::Scm scm = unitselect::sample_scm(*structure, k, rng);
        unitselect::ResponseTypeProbs truth = unitselect::exact_counterfactuals(scm);
        double true_benefit = unitselect::exact_benefit(scm, bv);
        double p_do_x = unitselect::interventional_outcome(scm, true);
        double p_do_xp = unitselect::interventional_outcome(scm, false);

        max_type_sum_err = std::max(max_type_sum_err, std::fabs(truth.sum() - 1.0));
        max_switch_identity_err = std::max(
            max_switch_identity_err, std::fabs((truth.pns() - truth.defier) - (p_do_x - p_do_xp)));
        max_decompose_err = std::max(
            max_decompose_err,
            std::fabs(unitselect::decompose(bv, truth.pns(), p_do_x, p_do_xp) - true_benefit));

        unitselect::PopulationData input = unitselect::induced_input(scm);
        unitselect::BenefitBounds bounds = std::visit(
            [&](const auto& in) -> unitselect::BenefitBounds {
                using T = std::decay_t<decltype(in)>;
                if constexpr (std::is_same_v<T, unitselect::BaselineInput>) {
                    return unitselect::lipearl_bounds(in, bv);
                } else if constexpr (std::is_same_v<T, unitselect::StratifiedInput>) {
                    return unitselect::stratified_bounds(in, bv);
                } else if constexpr (std::is_same_v<T, unitselect::PartialMediatorInput>) {
                    return unitselect::partial_mediator_bounds(in, bv);
                } else {
                    return unitselect::pure_mediator_bounds(in, bv);
                }
            },
            input);
        if (!bounds.pns.interval.contains(truth.pns(), 1e-9)) ++pns_violations;
        if (!bounds.interval.contains(true_benefit, 1e-9)) ++benefit_violations;
    }

    std::cout << "oracle containment (" << unitselect::structure_name(*structure) << ", "
              << trials << " trials, seed " << seed << ", k=" << k << ")\n";
    std::cout << "  PNS containment violations     " << pns_violations << "\n";
    std::cout << "  benefit containment violations " << benefit_violations << "\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  max |W+sigma*PNS - benefit|    %.3e\n", max_decompose_err);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "  max PNS-defier identity error  %.3e\n", max_switch_identity_err);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "  max response-type sum error    %.3e\n", max_type_sum_err);
    std::cout << buf;
    return pns_violations == 0 && benefit_violations == 0 ? kExitOk : kExitInvalid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounds on the unit-selection benefit function"};
    app.require_subcommand(1);

    std::string data_path, structure_name = "baseline", out_path, series_path = "series.csv";
    std::vector<double> benefit = {1.0, -1.0, -1.0, -1.0};
    bool backdoor = false, filtered = false;
    double tolerance = unitselect::kIngestTolerance;
    std::int64_t n = 100000, trials = 10000, series_m = 0;
    std::uint64_t seed = 0;
    int k = 2;

    CLI::App* bounds = app.add_subcommand("bounds", "compute benefit bounds from a data file");
    bounds->add_option("data-file", data_path, "table file")->required();
    bounds->add_option("--structure", structure_name,
                       "baseline | nondescendant | partial-mediator | pure-mediator")
        ->required();
    bounds->add_option("--benefit", benefit, "beta,gamma,theta,delta")->delimiter(',');
    bounds->add_flag("--backdoor", backdoor,
                     "assert the back-door criterion and derive experimental quantities");
    bounds->add_option("--tolerance", tolerance, "validation tolerance for ingested tables");
    bounds->add_option("--out", out_path, "also write the report to this file");

    CLI::App* simulate = app.add_subcommand("simulate", "paired-bounds simulation study");
    simulate->add_option("--case", structure_name,
                         "nondescendant | partial-mediator | pure-mediator")
        ->required();
    simulate->add_option("--n", n, "number of sample distributions");
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--benefit", benefit, "beta,gamma,theta,delta")->delimiter(',');
    simulate->add_flag("--filtered", filtered, "keep only samples with narrower bounds");
    simulate->add_option("--export-series", series_m, "export this many records as plot data");
    simulate->add_option("--series-out", series_path, "series file path");
    simulate->add_option("--out", out_path, "also write the summary to this file");

    CLI::App* oracle = app.add_subcommand("oracle", "containment check against exact SCMs");
    oracle->add_option("--structure", structure_name,
                       "baseline | nondescendant | partial-mediator | pure-mediator")
        ->required();
    oracle->add_option("--trials", trials, "number of sampled SCMs");
    oracle->add_option("--seed", seed, "random seed");
    oracle->add_option("--benefit", benefit, "beta,gamma,theta,delta")->delimiter(',');
    oracle->add_option("--k", k, "arity of the covariate Z");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (bounds->parsed()) {
            return cmd_bounds(data_path, structure_name, benefit, backdoor, tolerance, out_path);
        }
        if (simulate->parsed()) {
            return cmd_simulate(structure_name, n, seed, benefit, filtered, series_m, series_path,
                                out_path);
        }
        return cmd_oracle(structure_name, trials, seed, benefit, k);
    } catch (const unitselect::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
