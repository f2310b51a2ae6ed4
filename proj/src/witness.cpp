#include "omw/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "omw/analytic_model.hpp"

namespace omw::witness {

DisplacementSetting DisplacementSetting::from_alpha(complexd alpha, complexd beta, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("DisplacementSetting: eta must lie in (0,1]");
    const double se = std::sqrt(eta);
    return DisplacementSetting{se * alpha, se * beta};
}

double sigma_element(int i, int j, double x) {
    const double e = std::exp(-x * x);
    if (i == 0 && j == 0) return -1.0 + 2.0 * e;
    if (i == 1 && j == 1) return -1.0 + 2.0 * x * x * e;
    if (i == 0 && j == 1) return -2.0 * x * e;
    if (i == 0 && j == 2) return std::numbers::sqrt2 * x * x * e;
    if (i == 1 && j == 2) return -std::numbers::sqrt2 * x * x * x * e;
    throw std::invalid_argument("sigma_element: unsupported element (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
}

double q_value(double p_plus_a, double p_plus_b, double p_joint) {
    for (double v : {p_plus_a, p_plus_b, p_joint})
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("q_value: probabilities must lie in [0,1]");
    const double q = 1.0 - 2.0 * p_plus_a - 2.0 * p_plus_b + 4.0 * p_joint;
    if (q < -1.0 - 1e-9 || q > 1.0 + 1e-9)
        throw NumericalError("q_value: inconsistent click probabilities give Q = " +
                             std::to_string(q));
    return std::clamp(q, -1.0, 1.0);
}

double separable_bound(const ClickProbabilitySet& probs, const DisplacementSetting& setting) {
    probs.validate();
    const double x = std::abs(setting.x);
    const double y = std::abs(setting.y);

    const double s00x = sigma_element(0, 0, x), s00y = sigma_element(0, 0, y);
    const double s11x = sigma_element(1, 1, x), s11y = sigma_element(1, 1, y);
    const double s01x = sigma_element(0, 1, x), s01y = sigma_element(0, 1, y);
    const double s12x = sigma_element(1, 2, x), s12y = sigma_element(1, 2, y);

    double s = s00x * s00y * probs.p_pp + s00x * s11y * probs.p_pm + s11x * s00y * probs.p_mp +
               s11x * s11y * probs.p_mm;

    // qubit-sector coherence, bounded through the PPT property
    s += 2.0 * std::abs(s01x * s01y) *
         std::min(std::sqrt(probs.p_pp * probs.p_mm), std::sqrt(probs.p_pm * probs.p_mp));
    // coherences towards the two-photon sector, bounded by the coincidences
    s += 2.0 * std::numbers::sqrt2 * std::abs(s01x * s12y) *
         std::min(std::sqrt(probs.pc_a2 * probs.p_pm), std::sqrt(probs.pc_a2 * probs.p_mm));
    s += 2.0 * std::numbers::sqrt2 * std::abs(s12x * s01y) *
         std::min(std::sqrt(probs.pc_a1 * probs.p_mp), std::sqrt(probs.pc_a1 * probs.p_mm));
    // everything with two or more photons in one mode
    s += 2.0 * (probs.pc_a1 + probs.pc_a2);
    return s;
}

WitnessEvaluation evaluate_set(const ClickProbabilitySet& probs,
                               const DisplacementSetting& setting) {
    WitnessEvaluation ev;
    ev.setting = setting;
    ev.q = q_value(probs.q_singles_a, probs.q_singles_b, probs.q_joint);
    ev.s_star = separable_bound(probs, setting);
    ev.diff = ev.q - ev.s_star;
    return ev;
}

WitnessEvaluation evaluate(const SystemParams& params, complexd alpha, complexd beta) {
    const ClickProbabilitySet probs = analytic::probability_set(params, alpha, beta);
    WitnessEvaluation ev =
        evaluate_set(probs, DisplacementSetting::from_alpha(alpha, beta, params.eta));
    ev.params = params;
    return ev;
}

}  // namespace omw::witness
