#include <cmath>
#include <numbers>
#include <tuple>

#include "doctest.h"
#include "omw/analytic_model.hpp"
#include "omw/rng.hpp"

using namespace omw;
using namespace omw::analytic;

namespace {
const double kTwoPi = 2.0 * std::numbers::pi;

// the photonic-crystal nanobeam numbers used throughout
HardwareParams nanobeam() {
    HardwareParams hw;
    hw.g0 = kTwoPi * 869e3;
    hw.kappa = kTwoPi * 846e6;
    hw.omega_m = kTwoPi * 5.25e9;
    hw.n_plus = 298;
    hw.n_minus = 318;
    hw.t1 = 50e-9;
    hw.t2 = 50e-9;
    hw.n0 = 0.2;
    return hw;
}
}  // namespace

TEST_SUITE("analytic_model") {

TEST_CASE("hardware mapping reproduces the design point") {
    const SystemParams sp = hardware_to_params(nanobeam(), 0.1);
    CHECK(std::abs(sp.T - 0.30) < 0.01);
    CHECK(std::abs(sp.p - 0.284) < 1e-3);
    CHECK(sp.eta == 0.1);
    CHECK(sp.n0 == 0.2);

    HardwareParams zero = nanobeam();
    zero.t2 = 0.0;
    CHECK(hardware_to_params(zero, 0.1).T == doctest::Approx(0.0));
}

TEST_CASE("joint click probability limits") {
    SystemParams vac{0.0, 1.0, 1.0, 0.0};
    // two independent vacua
    CHECK(joint_click_prob(vac, 1.0, 0.5) == doctest::Approx(std::exp(-1.25)).epsilon(1e-12));

    SystemParams tms{0.5, 1.0, 1.0, 0.0};
    CHECK(joint_click_prob(tms, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));

    vac.eta = 0.37;
    CHECK(joint_click_prob(vac, 1.0, 0.0) == doctest::Approx(std::exp(-0.37)).epsilon(1e-12));
}

TEST_CASE("local click probabilities") {
    SystemParams vac{0.0, 1.0, 1.0, 0.0};
    CHECK(local_click_prob_a1(vac, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    SystemParams tms{0.5, 1.0, 1.0, 0.0};
    // thermal marginal of the pair state has mean 1
    CHECK(local_click_prob_a1(tms, 0.0) == doctest::Approx(0.5).epsilon(1e-12));

    SystemParams swap{0.0, 0.3, 0.1, 0.2};
    // transmitted thermal occupation eta T n0 = 0.006
    CHECK(local_click_prob_a2(swap, 0.0) == doctest::Approx(1.0 / 1.006).epsilon(1e-12));
}

TEST_CASE("coincidence probabilities") {
    SystemParams vac{0.0, 1.0, 1.0, 0.0};
    auto [c1, c2] = coincidence_probs(vac);
    CHECK(c1 == 0.0);
    CHECK(c2 == 0.0);

    SystemParams tms{0.5, 1.0, 1.0, 0.0};
    std::tie(c1, c2) = coincidence_probs(tms);
    CHECK(c1 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    SystemParams noswap{0.3, 0.0, 1.0, 0.0};
    std::tie(c1, c2) = coincidence_probs(noswap);
    CHECK(c2 == doctest::Approx(0.0));
}

TEST_CASE("no-displacement joints") {
    SystemParams vac{0.0, 1.0, 1.0, 0.0};
    const JointOutcomes j = no_displacement_joint_probs(vac);
    CHECK(j.pp == doctest::Approx(1.0));
    CHECK(j.pm == doctest::Approx(0.0));
    CHECK(j.mp == doctest::Approx(0.0));
    CHECK(j.mm == doctest::Approx(0.0));

    // perfect photon-number correlation of the pair state
    SystemParams tms{0.5, 1.0, 1.0, 0.0};
    const JointOutcomes c = no_displacement_joint_probs(tms);
    CHECK(c.pm == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.mp == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("probability set invariants over random parameters") {
    PhiloxEngine rng(0xA11CE, 7);
    for (int trial = 0; trial < 10000; ++trial) {
        SystemParams params;
        params.p = rng.uniform(0.0, 0.95);
        params.T = rng.uniform(0.0, 1.0);
        params.eta = rng.uniform(0.01, 1.0);
        params.n0 = rng.uniform(0.0, 3.0);
        const double alpha = rng.uniform(-4.0, 4.0);
        const double beta = rng.uniform(-4.0, 4.0);
        const ClickProbabilitySet set = probability_set(params, alpha, beta);  // validates
        CHECK(set.q_joint <= std::min(set.q_singles_a, set.q_singles_b) + 1e-12);
    }
}

TEST_CASE("joint probability symmetric under conjugation of both displacements") {
    SystemParams params{0.3, 0.6, 0.4, 0.15};
    const complexd a(1.2, 0.7), b(-0.8, 0.4);
    CHECK(joint_click_prob(params, a, b) ==
          doctest::Approx(joint_click_prob(params, std::conj(a), std::conj(b))).epsilon(1e-14));
}

TEST_CASE("A1 click probability strictly decreases with |alpha|") {
    SystemParams params{0.4, 0.5, 0.7, 0.3};
    double prev = local_click_prob_a1(params, 0.0);
    for (double a = 0.25; a < 4.0; a += 0.25) {
        const double cur = local_click_prob_a1(params, a);
        CHECK(cur < prev);
        prev = cur;
    }
}

}  // TEST_SUITE
