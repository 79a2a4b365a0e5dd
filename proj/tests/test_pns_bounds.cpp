#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "unitselect.hpp"

using namespace unitselect;

TEST_CASE("company overall bounds match the published values", "[pns]") {
    BaselineInput in = to_baseline(fixtures::company_rounded());
    PnsBounds b = pns_baseline(in);
    CHECK(b.interval.lower() == Catch::Approx(0.31134).margin(5e-4));
    CHECK(b.interval.upper() == Catch::Approx(0.47405).margin(5e-4));
    CHECK(b.lower_term == "P(y_x)-P(y_x')");
    CHECK(b.upper_term == "P(y'_x')");
    CHECK_FALSE(b.clamp_warning);
}

TEST_CASE("drug adjusted bounds match the published values", "[pns]") {
    BaselineInput in = to_baseline(fixtures::drug_input());
    PnsBounds b = pns_baseline(in);
    CHECK(b.interval.lower() == Catch::Approx(0.33401).margin(5e-4));
    CHECK(b.interval.upper() == Catch::Approx(0.66666).margin(5e-4));
    CHECK(b.upper_term == "P(y_x)");
}

TEST_CASE("forced complier pins the bounds to one", "[pns]") {
    BaselineInput in;
    in.p_y_do_x = 1.0;
    in.p_y_do_xp = 0.0;
    in.obs = ObsXY{0.5, 0.0, 0.0, 0.5};
    REQUIRE_FALSE(validate(in).has_value());
    PnsBounds b = pns_baseline(in);
    CHECK(b.interval.lower() == 1.0);
    CHECK(b.interval.upper() == 1.0);
}

TEST_CASE("company stratified bounds match the published values", "[pns]") {
    PnsBounds b = pns_stratified(fixtures::company_rounded());
    CHECK(b.interval.lower() == Catch::Approx(0.32407).margin(5e-4));
    CHECK(b.interval.upper() == Catch::Approx(0.32862).margin(5e-4));
    CHECK(b.lower_term == "z=young:P(y)-P(y_x'); z=elder:P(y_x)-P(y_x')");
    CHECK(b.upper_term == "z=young:P(y_x); z=elder:P(y'_x')");
}

TEST_CASE("a single stratum degenerates to the baseline bounds", "[pns]") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        Scm scm = sample_scm(Structure::Baseline, 0, rng);
        BaselineInput base = induced_baseline(scm);
        StratifiedInput strat;
        Stratum s;
        s.weight = 1.0;
        s.p_y_do_x = base.p_y_do_x;
        s.p_y_do_xp = base.p_y_do_xp;
        s.obs = base.obs;
        strat.strata = {s};
        PnsBounds a = pns_stratified(strat);
        PnsBounds b = pns_baseline(base);
        CHECK(a.interval.lower() == Catch::Approx(b.interval.lower()).margin(1e-15));
        CHECK(a.interval.upper() == Catch::Approx(b.interval.upper()).margin(1e-15));
    }
}

TEST_CASE("drug mediator term matches the published value", "[pns]") {
    PartialMediatorInput in = fixtures::drug_input();
    CHECK(partial_mediator_term(in) == Catch::Approx(0.49731).margin(5e-4));
    PnsBounds b = pns_partial_mediator(in);
    CHECK(b.interval.upper() == Catch::Approx(0.49731).margin(5e-4));
    CHECK(b.upper_term == "mediator pair sum");
    // lower bound is the baseline one, bit for bit
    CHECK(b.interval.lower() == pns_baseline(to_baseline(in)).interval.lower());
}

TEST_CASE("partial mediator: single surviving pair", "[pns]") {
    // All interventional mediator mass on z=0 in both arms leaves one pair.
    PartialMediatorInput in;
    in.p_z_do_x = {1.0, 0.0};
    in.p_z_do_xp = {1.0, 0.0};
    in.obs = ObsXZY::zeros(2);
    in.obs.at(true, 0, true) = 0.30;  // P(y|z,x)  = 0.6
    in.obs.at(true, 0, false) = 0.20;
    in.obs.at(false, 0, true) = 0.35; // P(y'|z,x') = 0.3
    in.obs.at(false, 0, false) = 0.15;
    in.p_y_do_x = 0.6;
    in.p_y_do_xp = 0.7;
    REQUIRE_FALSE(validate(in).has_value());
    CHECK(partial_mediator_term(in) == Catch::Approx(std::min(0.6, 0.3)).margin(1e-12));
}

TEST_CASE("missing conditional under a nonzero mediator weight throws", "[pns]") {
    PartialMediatorInput in;
    in.p_z_do_x = {0.5, 0.5}; // z=1 carries weight under do(x)
    in.p_z_do_xp = {1.0, 0.0};
    in.obs = ObsXZY::zeros(2);
    in.obs.at(true, 0, true) = 0.25; // nothing observed at (x, z=1)
    in.obs.at(true, 0, false) = 0.25;
    in.obs.at(false, 0, true) = 0.25;
    in.obs.at(false, 0, false) = 0.25;
    in.p_y_do_x = 0.5;
    in.p_y_do_xp = 0.5;
    CHECK_THROWS_WITH(partial_mediator_term(in),
                      Catch::Matchers::ContainsSubstring("MissingConditional"));
}

TEST_CASE("pure mediator: deterministic responsive mediator is non-binding", "[pns]") {
    // P(z|x) = P(z'|x') = 1, P(y|z) = 1, P(y|z') = 0: term = 1 + 0 = 1.
    PureMediatorInput in;
    in.obs = ObsXZY::zeros(2);
    in.obs.at(true, 0, true) = 0.5;   // x: z, y
    in.obs.at(false, 1, false) = 0.5; // x': z', y'
    in.p_y_do_x = 1.0;
    in.p_y_do_xp = 0.0;
    CHECK(pure_mediator_term(in) == Catch::Approx(1.0).margin(1e-12));
    PnsBounds b = pns_pure_mediator(in);
    CHECK(b.upper_term != "mediator pair sum");
}

namespace {

// Independent enumeration oracle: all pure-mediator SCMs over binary Z whose
// conditionals match P(z|x)=P(z|x')=0.4, P(y|z)=0.7, P(y|z')=0.2. The
// mediator latent is the pair (Z_x, Z_{x'}) with both margins fixed at 0.4;
// the outcome latent is the pair (f(z), f(z')) with margins 0.7 and 0.2.
double max_pns_over_family() {
    double worst = 0.0;
    for (double q = 0.0; q <= 0.4 + 1e-9; q += 0.01) {   // P(Z_x=z, Z_x'=z)
        for (double r = 0.0; r <= 0.2 + 1e-9; r += 0.01) { // P(f(z)=y, f(z')=y)
            double pz[2][2];                               // [Z_x==z][Z_x'==z]
            pz[1][1] = q;
            pz[1][0] = 0.4 - q;
            pz[0][1] = 0.4 - q;
            pz[0][0] = 0.2 + q;
            double py[2][2]; // [f(z)==y][f(z')==y]
            py[1][1] = r;
            py[1][0] = 0.7 - r;
            py[0][1] = 0.2 - r;
            py[0][0] = 0.1 + r;
            double pns = 0.0;
            for (int zx = 0; zx < 2; ++zx) {
                for (int zxp = 0; zxp < 2; ++zxp) {
                    for (int fz = 0; fz < 2; ++fz) {
                        for (int fzp = 0; fzp < 2; ++fzp) {
                            // y at z_x means f evaluated at that mediator value
                            int y_x = zx == 1 ? fz : fzp;
                            int y_xp = zxp == 1 ? fz : fzp;
                            if (y_x == 1 && y_xp == 0) {
                                pns += pz[zx][zxp] * py[fz][fzp];
                            }
                        }
                    }
                }
            }
            worst = std::max(worst, pns);
        }
    }
    return worst;
}

} // namespace

TEST_CASE("pure mediator: unresponsive mediator fixture", "[pns]") {
    // Conditionals P(z|x) = P(z|x') = 0.4, P(y|z) = 0.7, P(y|z') = 0.2,
    // P(x) = 0.5. Pair terms: (z,z'): min{0.7,0.8} min{0.4,0.6} = 0.28 and
    // (z',z): min{0.2,0.3} min{0.6,0.4} = 0.08.
    PureMediatorInput in;
    in.obs = ObsXZY::zeros(2);
    auto fill = [&](bool x, double p_z) {
        in.obs.at(x, 0, true) = 0.5 * p_z * 0.7;
        in.obs.at(x, 0, false) = 0.5 * p_z * 0.3;
        in.obs.at(x, 1, true) = 0.5 * (1.0 - p_z) * 0.2;
        in.obs.at(x, 1, false) = 0.5 * (1.0 - p_z) * 0.8;
    };
    fill(true, 0.4);
    fill(false, 0.4);
    in.p_y_do_x = 0.4 * 0.7 + 0.6 * 0.2;
    in.p_y_do_xp = in.p_y_do_x;
    REQUIRE_FALSE(validate(in).has_value());
    double term = pure_mediator_term(in);
    CHECK(term == Catch::Approx(0.36).margin(1e-12));
    // every SCM with these conditionals keeps its exact PNS below the term
    CHECK(max_pns_over_family() <= term + 1e-9);
}

TEST_CASE("stratification never loosens the baseline bounds", "[pns]") {
    Rng rng(77);
    for (int i = 0; i < 2000; ++i) {
        StratifiedInput in = gen_nondescendant(rng);
        PnsBounds strat = pns_stratified(in);
        PnsBounds base = pns_baseline(to_baseline(in));
        CHECK(strat.interval.lower() >= base.interval.lower() - kEpsCmp);
        CHECK(strat.interval.upper() <= base.interval.upper() + kEpsCmp);
    }
    for (int i = 0; i < 500; ++i) {
        Scm scm = sample_scm(Structure::NonDescendant, 2 + i % 3, rng);
        StratifiedInput in = induced_stratified(scm);
        PnsBounds strat = pns_stratified(in);
        PnsBounds base = pns_baseline(to_baseline(in));
        CHECK(strat.interval.lower() >= base.interval.lower() - kEpsCmp);
        CHECK(strat.interval.upper() <= base.interval.upper() + kEpsCmp);
    }
}

TEST_CASE("mediator bounds keep the baseline lower bound exactly", "[pns]") {
    Rng rng(78);
    for (int i = 0; i < 1000; ++i) {
        PartialMediatorSample s = gen_partial_mediator(rng);
        PnsBounds med = pns_partial_mediator(s.input);
        PnsBounds base = pns_baseline(to_baseline(s.input));
        CHECK(med.interval.lower() == base.interval.lower());
        CHECK(med.interval.upper() <= base.interval.upper() + kEpsCmp);

        PureMediatorSample p = gen_pure_mediator(rng);
        PnsBounds med3 = pns_pure_mediator(p.input);
        PnsBounds base3 = pns_baseline(to_baseline(p.input));
        CHECK(med3.interval.lower() == base3.interval.lower());
        CHECK(med3.interval.upper() <= base3.interval.upper() + kEpsCmp);
    }
}

TEST_CASE("bounds are always inside the unit interval", "[pns]") {
    Rng rng(79);
    for (int i = 0; i < 1000; ++i) {
        StratifiedInput in = gen_nondescendant(rng);
        PnsBounds strat = pns_stratified(in);
        CHECK(strat.interval.lower() >= 0.0);
        CHECK(strat.interval.upper() <= 1.0);
        PartialMediatorSample s = gen_partial_mediator(rng);
        PnsBounds med = pns_partial_mediator(s.input);
        CHECK(med.interval.lower() >= 0.0);
        CHECK(med.interval.upper() <= 1.0);
    }
}

TEST_CASE("random SCMs: exact PNS is contained per structure", "[pns]") {
    Rng rng(80);
    for (int i = 0; i < 600; ++i) {
        for (Structure s : {Structure::NonDescendant, Structure::PartialMediator,
                            Structure::PureMediator}) {
            Scm scm = sample_scm(s, 2 + i % 2, rng);
            double truth = exact_counterfactuals(scm).pns();
            PnsBounds b;
            if (s == Structure::NonDescendant) {
                b = pns_stratified(induced_stratified(scm));
            } else if (s == Structure::PartialMediator) {
                b = pns_partial_mediator(induced_partial_mediator(scm));
            } else {
                b = pns_pure_mediator(induced_pure_mediator(scm));
            }
            INFO(structure_name(s) << " trial " << i);
            CHECK(b.interval.contains(truth, 1e-9));
        }
    }
}
