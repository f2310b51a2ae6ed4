#include "omw/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "omw/analytic_model.hpp"
#include "omw/rng.hpp"

namespace omw::stats {

const std::array<const char*, kProbCount> kProbNames = {
    "P(+1+1|a,b)", "P(+1-1|a,b)", "P(-1+1|a,b)", "P(-1-1|a,b)", "P(+1+1|0,0)",
    "P(+1-1|0,0)", "P(-1+1|0,0)", "P(-1-1|0,0)", "Pc(A1)",      "Pc(A2)"};

ProbVector measurement_vector(const ClickProbabilitySet& probs) {
    probs.validate();
    const JointOutcomes disp =
        joints_from_singles(probs.q_singles_a, probs.q_singles_b, probs.q_joint);
    return {disp.pp,    disp.pm,    disp.mp,    disp.mm,    probs.p_pp,
            probs.p_pm, probs.p_mp, probs.p_mm, probs.pc_a1, probs.pc_a2};
}

void CalibrationConstants::validate() const {
    for (double k : {k1, k2, k3, k4, k5, k6})
        if (!(k > 0.0) || !std::isfinite(k))
            throw CalibrationDegenerateError("calibration constant not positive and finite");
}

double LinearFunctional::value(const ProbVector& probs) const {
    double v = offset;
    for (int i = 0; i < kProbCount; ++i) v += coeffs[i] * probs[i];
    return v;
}

double bernoulli_variance(double p, std::int64_t n) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli_variance: p outside [0,1]");
    if (n < 1) throw std::invalid_argument("bernoulli_variance: need at least one run");
    return p * (1.0 - p) / static_cast<double>(n);
}

namespace {

CalibrationConstants constants_from(double pp, double pm, double mp, double mm, double pc1,
                                    double pc2) {
    CalibrationConstants k{std::sqrt(mm / pp), std::sqrt(mp / pm), std::sqrt(pm / pc2),
                           std::sqrt(mm / pc2), std::sqrt(mp / pc1), std::sqrt(mm / pc1)};
    k.validate();
    return k;
}

}  // namespace

CalibrationConstants calibration_constants(const ClickProbabilitySet& cal) {
    cal.validate();
    for (double v : {cal.p_pp, cal.p_pm, cal.p_mp, cal.p_mm, cal.pc_a1, cal.pc_a2})
        if (!(v > 0.0))
            throw CalibrationDegenerateError(
                "calibration_constants: a calibration probability vanishes; regularize with a "
                "finite run count");
    return constants_from(cal.p_pp, cal.p_pm, cal.p_mp, cal.p_mm, cal.pc_a1, cal.pc_a2);
}

CalibrationConstants calibration_constants(const ClickProbabilitySet& cal, std::int64_t n_cal) {
    cal.validate();
    if (n_cal < 1) throw std::invalid_argument("calibration_constants: n_cal must be positive");
    const double floor = 1.0 / (2.0 * static_cast<double>(n_cal));
    auto reg = [floor](double v) { return std::max(v, floor); };
    return constants_from(reg(cal.p_pp), reg(cal.p_pm), reg(cal.p_mp), reg(cal.p_mm),
                          reg(cal.pc_a1), reg(cal.pc_a2));
}

namespace {

struct SigmaElems {
    double s00x, s11x, s01x, s12x;
    double s00y, s11y, s01y, s12y;
};

SigmaElems sigma_elems(const witness::DisplacementSetting& setting) {
    const double x = std::abs(setting.x);
    const double y = std::abs(setting.y);
    return {witness::sigma_element(0, 0, x), witness::sigma_element(1, 1, x),
            witness::sigma_element(0, 1, x), witness::sigma_element(1, 2, x),
            witness::sigma_element(0, 0, y), witness::sigma_element(1, 1, y),
            witness::sigma_element(0, 1, y), witness::sigma_element(1, 2, y)};
}

// S*_linear as a functional over the measured probabilities. Branches are
// resolved against the supplied probability vector.
LinearFunctional linear_bound_functional(const witness::DisplacementSetting& setting,
                                         const CalibrationConstants& k, const ProbVector& at) {
    k.validate();
    const SigmaElems s = sigma_elems(setting);
    LinearFunctional f;

    f.coeffs[kJointPPCal] += s.s00x * s.s00y;
    f.coeffs[kJointPMCal] += s.s00x * s.s11y;
    f.coeffs[kJointMPCal] += s.s11x * s.s00y;
    f.coeffs[kJointMMCal] += s.s11x * s.s11y;

    struct MinTerm {
        double weight;
        double ka, kb;       // branch-1 and branch-2 leading constants
        Prob a1, a2, b1, b2; // branch-1 and branch-2 probability slots
    };
    // the 1/2 of each tangent surface absorbs half of the prefactor in front
    // of the coherence terms: 2 |..| -> 1 |..|, 2 sqrt2 |..| -> sqrt2 |..|
    const double sqrt2 = std::numbers::sqrt2;
    const MinTerm terms[3] = {
        {std::abs(s.s01x * s.s01y), k.k1, k.k2, kJointPPCal, kJointMMCal, kJointPMCal,
         kJointMPCal},
        {sqrt2 * std::abs(s.s01x * s.s12y), k.k3, k.k4, kCoincA2, kJointPMCal, kCoincA2,
         kJointMMCal},
        {sqrt2 * std::abs(s.s12x * s.s01y), k.k5, k.k6, kCoincA1, kJointMPCal, kCoincA1,
         kJointMMCal},
    };
    for (int t = 0; t < 3; ++t) {
        const MinTerm& mt = terms[t];
        const double first = mt.ka * at[mt.a1] + at[mt.a2] / mt.ka;
        const double second = mt.kb * at[mt.b1] + at[mt.b2] / mt.kb;
        if (first <= second) {
            f.branches[t] = MinBranch::First;
            f.coeffs[mt.a1] += mt.weight * mt.ka;
            f.coeffs[mt.a2] += mt.weight / mt.ka;
        } else {
            f.branches[t] = MinBranch::Second;
            f.coeffs[mt.b1] += mt.weight * mt.kb;
            f.coeffs[mt.b2] += mt.weight / mt.kb;
        }
    }

    f.coeffs[kCoincA1] += 2.0;
    f.coeffs[kCoincA2] += 2.0;
    return f;
}

}  // namespace

std::pair<LinearFunctional, double> linearized_bound(const ClickProbabilitySet& probs,
                                                     const witness::DisplacementSetting& setting,
                                                     const CalibrationConstants& k) {
    const ProbVector v = measurement_vector(probs);
    const LinearFunctional f = linear_bound_functional(setting, k, v);
    return {f, f.value(v)};
}

LinearFunctional estimator_functional(const witness::DisplacementSetting& setting,
                                      const CalibrationConstants& k,
                                      const ClickProbabilitySet& cal) {
    const ProbVector at = measurement_vector(cal);
    const LinearFunctional bound = linear_bound_functional(setting, k, at);
    LinearFunctional f;
    f.branches = bound.branches;
    // the +-1 x +-1 correlator over the displaced outcomes is exactly Q
    f.coeffs[kJointPPDisp] = 1.0;
    f.coeffs[kJointPMDisp] = -1.0;
    f.coeffs[kJointMPDisp] = -1.0;
    f.coeffs[kJointMMDisp] = 1.0;
    for (int i = 0; i < kProbCount; ++i) f.coeffs[i] -= bound.coeffs[i];
    f.offset = -bound.offset;
    return f;
}

namespace {

// shared allocation core: weights decide the split, p feeds the reported
// prediction
RunPlan allocate(const LinearFunctional& functional, const ProbVector& p,
                 const ProbVector& weight_sigma, std::int64_t n_total) {
    std::vector<int> active;
    for (int i = 0; i < kProbCount; ++i)
        if (functional.coeffs[i] != 0.0) active.push_back(i);
    if (active.empty()) throw std::invalid_argument("plan_runs: all coefficients vanish");
    if (n_total < static_cast<std::int64_t>(active.size()))
        throw std::invalid_argument("plan_runs: budget smaller than the number of measured terms");

    double weight_sum = 0.0;
    ProbVector weight{};
    for (int i : active) {
        weight[i] = std::abs(functional.coeffs[i]) * weight_sigma[i];
        weight_sum += weight[i];
    }

    RunPlan plan;
    plan.total = n_total;
    // largest-remainder rounding of the proportional allocation
    std::vector<std::pair<double, int>> remainders;
    std::int64_t assigned = 0;
    for (int i : active) {
        const double share = weight_sum > 0.0
                                 ? static_cast<double>(n_total) * weight[i] / weight_sum
                                 : static_cast<double>(n_total) / static_cast<double>(active.size());
        plan.runs[i] = static_cast<std::int64_t>(std::floor(share));
        assigned += plan.runs[i];
        remainders.push_back({share - std::floor(share), i});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // deterministic tie break
    });
    const std::int64_t leftover = n_total - assigned;
    for (std::int64_t r = 0; r < leftover; ++r)
        ++plan.runs[remainders[static_cast<size_t>(r) % remainders.size()].second];
    // never starve an active term completely
    for (int i : active) {
        while (plan.runs[i] < 1) {
            int richest = active.front();
            for (int j : active)
                if (plan.runs[j] > plan.runs[richest]) richest = j;
            if (plan.runs[richest] < 2)
                throw std::invalid_argument("plan_runs: budget cannot cover all measured terms");
            --plan.runs[richest];
            ++plan.runs[i];
        }
    }

    plan.predicted_mean = functional.value(p);
    plan.predicted_variance = 0.0;
    for (int i : active)
        plan.predicted_variance +=
            functional.coeffs[i] * functional.coeffs[i] * bernoulli_variance(p[i], plan.runs[i]);
    plan.significance = plan.predicted_variance > 0.0
                            ? plan.predicted_mean / std::sqrt(plan.predicted_variance)
                            : std::numeric_limits<double>::infinity();
    return plan;
}

}  // namespace

RunPlan plan_runs(const LinearFunctional& functional, const ClickProbabilitySet& probs,
                  std::int64_t n_total) {
    const ProbVector p = measurement_vector(probs);
    ProbVector sigma{};
    for (int i = 0; i < kProbCount; ++i) sigma[i] = std::sqrt(p[i] * (1.0 - p[i]));
    return allocate(functional, p, sigma, n_total);
}

RunPlan plan_runs_minimax(const LinearFunctional& functional, const ClickProbabilitySet& probs,
                          std::int64_t n_total) {
    const ProbVector p = measurement_vector(probs);
    ProbVector sigma{};
    sigma.fill(0.5);
    return allocate(functional, p, sigma, n_total);
}

double conservative_variance(const LinearFunctional& functional, const RunPlan& plan) {
    double var = 0.0;
    for (int i = 0; i < kProbCount; ++i) {
        if (functional.coeffs[i] == 0.0) continue;
        if (plan.runs[i] < 1)
            throw std::invalid_argument("conservative_variance: plan starves a measured term");
        var += functional.coeffs[i] * functional.coeffs[i] /
               (4.0 * static_cast<double>(plan.runs[i]));
    }
    return var;
}

RequiredRuns required_runs(const SystemParams& params, complexd alpha, complexd beta,
                           double significance, std::int64_t n_cal) {
    if (!(significance > 0.0)) throw std::invalid_argument("required_runs: significance must be > 0");
    const ClickProbabilitySet probs = analytic::probability_set(params, alpha, beta);
    const auto setting = witness::DisplacementSetting::from_alpha(alpha, beta, params.eta);
    const auto ev = witness::evaluate_set(probs, setting);
    if (!(ev.diff > 0.0))
        throw NoViolationError("required_runs: Q - S* = " + std::to_string(ev.diff) +
                               " is not positive at this point");

    const CalibrationConstants k = calibration_constants(probs, n_cal);
    const LinearFunctional f = estimator_functional(setting, k, probs);
    const double target = ev.diff / significance;

    auto satisfied = [&](std::int64_t n) {
        const RunPlan plan = plan_runs_minimax(f, probs, n);
        return std::sqrt(conservative_variance(f, plan)) <= target;
    };

    std::int64_t active = 0;
    for (double c : f.coeffs)
        if (c != 0.0) ++active;
    const std::int64_t minimal = std::max<std::int64_t>(active, 1);
    std::int64_t hi = minimal;
    if (!satisfied(hi)) {
        // double until the criterion holds, then bisect down to the edge
        std::int64_t lo = hi;
        do {
            if (hi > (std::int64_t{1} << 56))
                throw NumericalError("required_runs: budget search diverged");
            lo = hi;
            hi *= 2;
        } while (!satisfied(hi));
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (satisfied(mid))
                hi = mid;
            else
                lo = mid;
        }
    }

    RequiredRuns out;
    out.n_total = hi;
    out.plan = plan_runs_minimax(f, probs, hi);
    out.diff = ev.diff;
    return out;
}

double simulate_experiment(const SystemParams& params, complexd alpha, complexd beta,
                           const RunPlan& plan, std::uint64_t seed, std::uint64_t stream,
                           std::int64_t n_cal) {
    const ClickProbabilitySet probs = analytic::probability_set(params, alpha, beta);
    const auto setting = witness::DisplacementSetting::from_alpha(alpha, beta, params.eta);
    const CalibrationConstants k = calibration_constants(probs, n_cal);
    const LinearFunctional f = estimator_functional(setting, k, probs);
    const ProbVector p = measurement_vector(probs);

    PhiloxEngine engine(seed, stream);
    ProbVector freq = p;
    for (int i = 0; i < kProbCount; ++i) {
        if (f.coeffs[i] == 0.0) continue;
        if (plan.runs[i] < 1)
            throw std::invalid_argument("simulate_experiment: plan starves a measured term");
        std::binomial_distribution<std::int64_t> binom(plan.runs[i], p[i]);
        freq[i] = static_cast<double>(binom(engine)) / static_cast<double>(plan.runs[i]);
    }
    return f.value(freq);
}

}  // namespace omw::stats
