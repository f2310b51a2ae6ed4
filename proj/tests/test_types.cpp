#include "doctest.h"
#include "omw/types.hpp"

using namespace omw;

TEST_SUITE("types") {

TEST_CASE("system params ranges") {
    SystemParams ok{0.3, 0.5, 0.8, 0.2};
    CHECK_NOTHROW(ok.validate());

    SystemParams bad = ok;
    bad.p = 1.0;  // p -> 1 diverges
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.eta = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.T = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.n0 = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hardware params regime warnings do not throw") {
    HardwareParams hw;
    hw.g0 = 2e9;  // stronger than kappa: warning, not error
    hw.kappa = 1e9;
    hw.omega_m = 5e8;  // not resolved-sideband either
    hw.n_plus = 100;
    hw.n_minus = 100;
    hw.t1 = hw.t2 = 50e-9;
    hw.n0 = 0.0;
    CHECK_NOTHROW(hw.validate());
    CHECK(hw.regime_warnings().size() == 2);
}

TEST_CASE("inclusion-exclusion over singles and joint") {
    const JointOutcomes j = joints_from_singles(0.8, 0.7, 0.6);
    CHECK(j.pp == doctest::Approx(0.6));
    CHECK(j.pm == doctest::Approx(0.2));
    CHECK(j.mp == doctest::Approx(0.1));
    CHECK(j.mm == doctest::Approx(0.1));

    // inconsistent inputs: joint larger than a single
    CHECK_THROWS_AS(joints_from_singles(0.3, 0.9, 0.5), NumericalError);
}

TEST_CASE("probability set validation") {
    ClickProbabilitySet set;  // vacuum defaults
    CHECK_NOTHROW(set.validate());

    set.p_pp = 0.6;
    set.p_pm = 0.2;
    set.p_mp = 0.1;
    set.p_mm = 0.1;
    set.pc_a1 = 0.19;
    CHECK_NOTHROW(set.validate());  // click probability on A1 is 0.2
    set.pc_a1 = 0.21;
    CHECK_THROWS_AS(set.validate(), NumericalError);

    set.pc_a1 = 0.0;
    set.p_mm = 0.2;  // breaks the sum rule
    CHECK_THROWS_AS(set.validate(), NumericalError);
}

}  // TEST_SUITE
