#include "omw/analytic_model.hpp"

#include <cmath>
#include <tuple>

namespace omw::analytic {

SystemParams hardware_to_params(const HardwareParams& hw, double eta) {
    hw.validate();
    const double gt_plus = 2.0 * hw.g0 * hw.g0 * hw.n_plus / hw.kappa;
    const double gt_minus = 2.0 * hw.g0 * hw.g0 * hw.n_minus / hw.kappa;
    SystemParams sp;
    sp.p = 1.0 - std::exp(-2.0 * gt_plus * hw.t1);
    sp.T = 1.0 - std::exp(-2.0 * gt_minus * hw.t2);
    sp.eta = eta;
    sp.n0 = hw.n0;
    sp.validate();
    return sp;
}

namespace {
void require_valid(const SystemParams& params) {
    if (!params.is_valid()) {
        SystemParams copy = params;
        copy.validate();  // throws with the specific reason
    }
}
}  // namespace

double joint_click_prob(const SystemParams& params, complexd alpha, complexd beta) {
    require_valid(params);
    const double p = params.p, T = params.T, eta = params.eta, n0 = params.n0;
    const double denom = 1.0 + n0 * eta * T - p * (-1.0 + eta + n0 * eta) * (-1.0 + eta * T);
    if (denom <= 0.0) throw std::domain_error("joint_click_prob: vanishing normalization");
    const double a2 = std::norm(alpha);
    const double b2 = std::norm(beta);
    const double cross = 2.0 * (alpha * beta).real();  // alpha*beta + conj(alpha*beta)
    const double num = eta * a2 * (1.0 + p * (-1.0 + eta * T) + n0 * eta * T) +
                       eta * b2 * (1.0 + p * (-1.0 + eta + n0 * eta)) +
                       eta * eta * cross * (1.0 + n0) * std::sqrt(p * T);
    return (1.0 - p) / denom * std::exp(-num / denom);
}

double local_click_prob_a1(const SystemParams& params, complexd alpha) {
    require_valid(params);
    const double p = params.p, eta = params.eta, n0 = params.n0;
    const double denom = p * (eta + eta * n0 - 1.0) + 1.0;
    if (denom <= 0.0) throw std::domain_error("local_click_prob_a1: vanishing normalization");
    return (1.0 - p) * std::exp(-eta * std::norm(alpha) * (1.0 - p) / denom) / denom;
}

double local_click_prob_a2(const SystemParams& params, complexd beta) {
    require_valid(params);
    const double p = params.p, T = params.T, eta = params.eta, n0 = params.n0;
    const double denom = eta * T * (n0 + p) - p + 1.0;
    if (denom <= 0.0) throw std::domain_error("local_click_prob_a2: vanishing normalization");
    return (1.0 - p) * std::exp(-eta * std::norm(beta) * (1.0 - p) / denom) / denom;
}

std::pair<double, double> coincidence_probs(const SystemParams& params) {
    require_valid(params);
    const double p = params.p, T = params.T, eta = params.eta, n0 = params.n0;

    const double pc_a1 =
        1.0 - (1.0 - p) / (1.0 - p * (1.0 - eta - n0 * eta)) -
        2.0 * ((1.0 + n0) * (1.0 - p) * eta * p /
               ((2.0 - p * (2.0 - eta - eta * n0)) * (1.0 + p * (-1.0 + eta + n0 * eta))));

    const double x = (n0 + p) * T * eta;
    const double pc_a2 = 1.0 - (1.0 - p) / (1.0 - p + x) -
                         2.0 * ((1.0 - p) * x /
                                ((2.0 + n0 * T * eta + p * (-2.0 + T * eta)) *
                                 (1.0 + n0 * T * eta + p * (-1.0 + T * eta))));

    auto clamp01 = [](double v) { return v < 0.0 ? (v > -1e-12 ? 0.0 : v) : v; };
    return {clamp01(pc_a1), clamp01(pc_a2)};
}

JointOutcomes no_displacement_joint_probs(const SystemParams& params) {
    const double joint = joint_click_prob(params, 0.0, 0.0);
    const double pa = local_click_prob_a1(params, 0.0);
    const double pb = local_click_prob_a2(params, 0.0);
    return joints_from_singles(pa, pb, joint);
}

ClickProbabilitySet probability_set(const SystemParams& params, complexd alpha, complexd beta) {
    ClickProbabilitySet set;
    const JointOutcomes j = no_displacement_joint_probs(params);
    set.p_pp = j.pp;
    set.p_pm = j.pm;
    set.p_mp = j.mp;
    set.p_mm = j.mm;
    std::tie(set.pc_a1, set.pc_a2) = coincidence_probs(params);
    set.q_singles_a = local_click_prob_a1(params, alpha);
    set.q_singles_b = local_click_prob_a2(params, beta);
    set.q_joint = joint_click_prob(params, alpha, beta);
    set.validate();
    return set;
}

}  // namespace omw::analytic
