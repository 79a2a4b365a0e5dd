#pragma once

// Shared study fixtures: the carwash discount tables and the drug trial
// table, in the same variants the data files carry.

#include "unitselect.hpp"

namespace fixtures {

inline const unitselect::BenefitVector kCompanyBv{100.0, -60.0, 0.0, -140.0};
inline const unitselect::BenefitVector kDrugBv{1.0, -1.0, -1.0, -1.0};

// Published per-stratum experimental rates (rounded to three significant
// digits in the source) over exact observational count ratios. This is the
// variant that reproduces the published bounds digit for digit.
inline unitselect::StratifiedInput company_rounded() {
    unitselect::StratifiedInput in;
    unitselect::Stratum young;
    young.label = "young";
    young.weight = 202.0 / 700.0;
    young.p_y_do_x = 0.446;
    young.p_y_do_xp = 0.050;
    young.obs = unitselect::ObsXY{90.0 / 202.0, 62.0 / 202.0, 9.0 / 202.0, 41.0 / 202.0};
    unitselect::Stratum elder;
    elder.label = "elder";
    elder.weight = 498.0 / 700.0;
    elder.p_y_do_x = 0.996;
    elder.p_y_do_xp = 0.719;
    elder.obs = unitselect::ObsXY{157.0 / 498.0, 2.0 / 498.0, 239.0 / 498.0, 100.0 / 498.0};
    in.strata = {young, elder};
    return in;
}

// The same study ingested as raw counts.
inline unitselect::StratifiedInput company_counts() {
    unitselect::StratumCounts young;
    young.label = "young";
    young.exp = unitselect::ExperimentalCountsXY{45, 56, 5, 96};
    young.obs = unitselect::ObsCountsXY{90, 62, 9, 41};
    unitselect::StratumCounts elder;
    elder.label = "elder";
    elder.exp = unitselect::ExperimentalCountsXY{248, 1, 179, 70};
    elder.obs = unitselect::ObsCountsXY{157, 2, 239, 100};
    const unitselect::StratumCounts strata[] = {young, elder};
    return unitselect::stratified_from_counts(strata);
}

// Drug trial observational counts over (treatment, blood pressure, recovery);
// z index 0 is low blood pressure.
inline unitselect::ObsCountsXZY drug_obs_counts() {
    unitselect::ObsCountsXZY c;
    c.k = 2;
    c.cells.assign(8, 0);
    auto idx = [](int x, int z, int y) { return static_cast<std::size_t>((x * 2 + z) * 2 + y); };
    c.cells[idx(1, 0, 1)] = 375;
    c.cells[idx(1, 0, 0)] = 30;
    c.cells[idx(1, 1, 1)] = 17;
    c.cells[idx(1, 1, 0)] = 166;
    c.cells[idx(0, 0, 1)] = 159;
    c.cells[idx(0, 0, 0)] = 322;
    c.cells[idx(0, 1, 1)] = 3;
    c.cells[idx(0, 1, 0)] = 3;
    return c;
}

inline unitselect::ObsXZY drug_obs() { return unitselect::obs_xzy_from_counts(drug_obs_counts()); }

// Experimental quantities derived through the asserted back-door criterion.
inline unitselect::PartialMediatorInput drug_input() {
    return unitselect::assemble_partial_mediator(drug_obs(), true);
}

} // namespace fixtures
