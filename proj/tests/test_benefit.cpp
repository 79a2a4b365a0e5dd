#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "unitselect.hpp"

using namespace unitselect;

TEST_CASE("sigma of the example vectors", "[benefit]") {
    CHECK(sigma(fixtures::kCompanyBv) == 20.0);
    CHECK(sigma(fixtures::kDrugBv) == 2.0);
    CHECK(sigma(BenefitVector{1.0, 1.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("W of the example studies", "[benefit]") {
    CHECK(compute_w(fixtures::kCompanyBv, 0.83729, 0.52595) == Catch::Approx(-6.64980).margin(1e-9));
    CHECK(compute_w(fixtures::kDrugBv, 0.66666, 0.33265) == Catch::Approx(-1.0).margin(1e-12));
    // theta = gamma = delta = 0 leaves nothing
    CHECK(compute_w(BenefitVector{7.0, 0.0, 0.0, 0.0}, 0.3, 0.9) == 0.0);
}

TEST_CASE("decompose reduces to the stated special cases", "[benefit]") {
    // sigma = 0: the PNS drops out
    BenefitVector flat{2.0, 1.0, 3.0, 2.0};
    REQUIRE(sigma(flat) == 0.0);
    CHECK(decompose(flat, 0.1, 0.4, 0.2) == decompose(flat, 0.9, 0.4, 0.2));
    // pure-complier payoff: W vanishes and the benefit is the PNS itself
    BenefitVector complier_only{1.0, 0.0, 0.0, 0.0};
    CHECK(decompose(complier_only, 0.37, 0.5, 0.3) == Catch::Approx(0.37).margin(1e-15));
}

TEST_CASE("decompose agrees with the exact benefit on random SCMs", "[benefit]") {
    Rng rng(101);
    for (int i = 0; i < 400; ++i) {
        Structure s = static_cast<Structure>(i % 4);
        Scm scm = sample_scm(s, 2 + i % 3, rng);
        BenefitVector bv{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0,
                         4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
        ResponseTypeProbs t = exact_counterfactuals(scm);
        double direct = exact_benefit(scm, bv);
        double via_w = decompose(bv, t.pns(), interventional_outcome(scm, true),
                                 interventional_outcome(scm, false));
        CHECK(via_w == Catch::Approx(direct).margin(1e-12));
    }
}

TEST_CASE("company intervals match the published ones", "[benefit]") {
    StratifiedInput in = fixtures::company_rounded();
    BenefitBounds lp = lipearl_bounds(to_baseline(in), fixtures::kCompanyBv);
    CHECK(lp.sigma == 20.0);
    CHECK(lp.w == Catch::Approx(-6.64980).margin(5e-4));
    CHECK(lp.interval.lower() == Catch::Approx(-0.423).margin(5e-4));
    CHECK(lp.interval.upper() == Catch::Approx(2.832).margin(5e-4));

    BenefitBounds t1 = stratified_bounds(in, fixtures::kCompanyBv);
    CHECK(t1.interval.lower() == Catch::Approx(-0.168).margin(5e-4));
    CHECK(t1.interval.upper() == Catch::Approx(-0.077).margin(5e-4));
}

TEST_CASE("drug intervals match the published ones", "[benefit]") {
    PartialMediatorInput in = fixtures::drug_input();
    BenefitBounds lp = lipearl_bounds(to_baseline(in), fixtures::kDrugBv);
    CHECK(lp.sigma == 2.0);
    CHECK(lp.w == Catch::Approx(-1.0).margin(1e-12));
    CHECK(lp.interval.lower() == Catch::Approx(-0.3320).margin(5e-4));
    CHECK(lp.interval.upper() == Catch::Approx(0.3333).margin(5e-4));

    BenefitBounds t2 = partial_mediator_bounds(in, fixtures::kDrugBv);
    CHECK(t2.interval.lower() == Catch::Approx(-0.3320).margin(5e-4));
    CHECK(t2.interval.upper() == Catch::Approx(-0.0054).margin(5e-4));
}

TEST_CASE("equal payoffs give a point estimate at the common payoff", "[benefit]") {
    BenefitVector flat{1.0, 1.0, 1.0, 1.0};
    BaselineInput in = to_baseline(fixtures::drug_input());
    BenefitBounds b = lipearl_bounds(in, flat);
    CHECK(b.is_point);
    CHECK(b.interval.lower() == Catch::Approx(1.0).margin(1e-12));
    CHECK(b.interval.upper() == Catch::Approx(1.0).margin(1e-12));
    CHECK(b.interval.width() == 0.0);
}

TEST_CASE("single stratum equals the baseline composition", "[benefit]") {
    BaselineInput base = to_baseline(fixtures::drug_input());
    StratifiedInput strat;
    Stratum s;
    s.weight = 1.0;
    s.p_y_do_x = base.p_y_do_x;
    s.p_y_do_xp = base.p_y_do_xp;
    s.obs = base.obs;
    strat.strata = {s};
    BenefitBounds a = stratified_bounds(strat, fixtures::kDrugBv);
    BenefitBounds b = lipearl_bounds(base, fixtures::kDrugBv);
    CHECK(a.interval.lower() == Catch::Approx(b.interval.lower()).margin(1e-12));
    CHECK(a.interval.upper() == Catch::Approx(b.interval.upper()).margin(1e-12));
}

TEST_CASE("non-binding mediator term reproduces the baseline interval", "[benefit]") {
    Rng rng(103);
    int non_binding = 0;
    for (int i = 0; i < 500 && non_binding < 25; ++i) {
        PartialMediatorSample s = gen_partial_mediator(rng);
        if (partial_mediator_term(s.input) <
            pns_baseline(to_baseline(s.input)).interval.upper()) {
            continue;
        }
        ++non_binding;
        BenefitBounds t2 = partial_mediator_bounds(s.input, fixtures::kDrugBv);
        BenefitBounds lp = lipearl_bounds(to_baseline(s.input), fixtures::kDrugBv);
        CHECK(t2.interval.lower() == lp.interval.lower());
        CHECK(t2.interval.upper() == lp.interval.upper());
    }
    CHECK(non_binding == 25);
}

TEST_CASE("decide on the published intervals", "[benefit]") {
    BenefitBounds negative;
    negative.interval = Interval(-0.168, -0.077);
    CHECK(decide(negative).midpoint_sign == Decision::Negative);
    CHECK(decide(negative).one_signed);

    BenefitBounds mixed;
    mixed.interval = Interval(-0.3320, 0.3333);
    CHECK(decide(mixed).midpoint_sign == Decision::Positive); // midpoint 0.00065
    CHECK_FALSE(decide(mixed).one_signed);

    BenefitBounds balanced;
    balanced.interval = Interval(-1.0, 1.0);
    CHECK(decide(balanced).midpoint_sign == Decision::Ambiguous);
    CHECK_FALSE(decide(balanced).one_signed);
}

TEST_CASE("decision is invariant under positive payoff rescaling", "[benefit]") {
    Rng rng(104);
    for (int i = 0; i < 300; ++i) {
        PartialMediatorSample s = gen_partial_mediator(rng);
        BenefitVector bv{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0,
                         4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
        double k = 0.1 + 10.0 * rng.uniform01();
        BenefitVector scaled{k * bv.beta, k * bv.gamma, k * bv.theta, k * bv.delta};
        DecisionReport a = decide(partial_mediator_bounds(s.input, bv));
        DecisionReport b = decide(partial_mediator_bounds(s.input, scaled));
        CHECK(a.midpoint_sign == b.midpoint_sign);
        CHECK(a.one_signed == b.one_signed);
    }
}

TEST_CASE("orientation: W + sigma p stays inside the interval for p in the PNS bounds",
          "[benefit]") {
    Rng rng(105);
    for (int i = 0; i < 300; ++i) {
        StratifiedInput in = gen_nondescendant(rng);
        BenefitVector bv{6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0,
                         6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0};
        BenefitBounds b = stratified_bounds(in, bv);
        BaselineInput margin = to_baseline(in);
        for (int g = 0; g <= 10; ++g) {
            double p = b.pns.interval.lower() + b.pns.interval.width() * g / 10.0;
            double f = decompose(bv, p, margin.p_y_do_x, margin.p_y_do_xp);
            CHECK(f >= b.interval.lower() - 1e-9);
            CHECK(f <= b.interval.upper() + 1e-9);
        }
    }
}

TEST_CASE("covariate-informed intervals are contained in the baseline interval", "[benefit]") {
    Rng rng(106);
    for (int i = 0; i < 500; ++i) {
        BenefitVector bv{6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0,
                         6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0};
        StratifiedInput nd = gen_nondescendant(rng);
        BenefitBounds t1 = stratified_bounds(nd, bv);
        BenefitBounds lp1 = lipearl_bounds(to_baseline(nd), bv);
        CHECK(t1.interval.lower() >= lp1.interval.lower() - 1e-9);
        CHECK(t1.interval.upper() <= lp1.interval.upper() + 1e-9);

        PureMediatorSample pm = gen_pure_mediator(rng);
        BenefitBounds t3 = pure_mediator_bounds(pm.input, bv);
        BenefitBounds lp3 = lipearl_bounds(to_baseline(pm.input), bv);
        CHECK(t3.interval.lower() >= lp3.interval.lower() - 1e-9);
        CHECK(t3.interval.upper() <= lp3.interval.upper() + 1e-9);
    }
}

TEST_CASE("random SCM benefit lands inside every covariate-informed interval", "[benefit]") {
    Rng rng(107);
    for (int i = 0; i < 400; ++i) {
        BenefitVector bv{6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0,
                         6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0};
        Scm nd = sample_scm(Structure::NonDescendant, 2 + i % 3, rng);
        CHECK(stratified_bounds(induced_stratified(nd), bv)
                  .interval.contains(exact_benefit(nd, bv), 1e-9));
        Scm pm = sample_scm(Structure::PartialMediator, 2 + i % 3, rng);
        CHECK(partial_mediator_bounds(induced_partial_mediator(pm), bv)
                  .interval.contains(exact_benefit(pm, bv), 1e-9));
        Scm pu = sample_scm(Structure::PureMediator, 2 + i % 3, rng);
        CHECK(pure_mediator_bounds(induced_pure_mediator(pu), bv)
                  .interval.contains(exact_benefit(pu, bv), 1e-9));
    }
}
