#ifndef OMW_STATISTICS_HPP
#define OMW_STATISTICS_HPP

#include <array>
#include <cstdint>
#include <utility>

#include "omw/types.hpp"
#include "omw/witness.hpp"

namespace omw::stats {

// Canonical order of the independently measured probabilities: the four
// displaced joint outcomes, the four no-displacement joint outcomes, the two
// coincidence rates. Every functional, plan and sample uses this order.
enum Prob : int {
    kJointPPDisp = 0,
    kJointPMDisp,
    kJointMPDisp,
    kJointMMDisp,
    kJointPPCal,
    kJointPMCal,
    kJointMPCal,
    kJointMMCal,
    kCoincA1,
    kCoincA2,
    kProbCount
};

extern const std::array<const char*, kProbCount> kProbNames;

using ProbVector = std::array<double, kProbCount>;

ProbVector measurement_vector(const ClickProbabilitySet& probs);

// Tangent-point ratios that turn the square roots of S* into a conservative
// linear estimator.
struct CalibrationConstants {
    double k1, k2, k3, k4, k5, k6;
    void validate() const;
};

enum class MinBranch { First, Second };

// Linear combination of the measured probabilities plus a constant. The
// branch chosen for each of the three min terms is frozen at calibration.
struct LinearFunctional {
    ProbVector coeffs{};
    double offset = 0.0;
    std::array<MinBranch, 3> branches{MinBranch::First, MinBranch::First, MinBranch::First};

    double value(const ProbVector& probs) const;
};

// Allocation of a run budget over the measured probabilities.
struct RunPlan {
    std::array<std::int64_t, kProbCount> runs{};
    std::int64_t total = 0;
    double predicted_variance = 0.0;
    double predicted_mean = 0.0;
    double significance = 0.0;  // mean / sqrt(variance)
};

struct RequiredRuns {
    std::int64_t n_total = 0;
    RunPlan plan;
    double diff = 0.0;  // asymptotic Q - S*
};

// Var of a Bernoulli frequency estimate: P (1-P) / N.
double bernoulli_variance(double p, std::int64_t n);

// Strict constants from a calibration set; throws CalibrationDegenerateError
// if any of the six ratios touches a vanishing probability.
CalibrationConstants calibration_constants(const ClickProbabilitySet& cal);

// Same, with every input floored at 1/(2 n_cal) so that finite calibration
// statistics always produce usable constants.
CalibrationConstants calibration_constants(const ClickProbabilitySet& cal, std::int64_t n_cal);

// Conservative linearization of S*: each sqrt(Pa Pb) is replaced by its
// tangent at the calibration point, each min resolves to the branch with the
// smaller linearized value. Returns the functional and its value at `probs`.
std::pair<LinearFunctional, double> linearized_bound(const ClickProbabilitySet& probs,
                                                     const witness::DisplacementSetting& setting,
                                                     const CalibrationConstants& k);

// Functional of the full estimator Q - S*_linear. The displaced joint
// outcomes enter with signs (+,-,-,+), which reproduces
// Q = 1 - 2P(+1|a) - 2P(+1|b) + 4P(+1+1|a,b). Branch freezing needs the
// absolute calibration probabilities, not only their ratios.
LinearFunctional estimator_functional(const witness::DisplacementSetting& setting,
                                      const CalibrationConstants& k,
                                      const ClickProbabilitySet& cal);

// Variance-optimal allocation N_i ~ |c_i| sqrt(P_i (1-P_i)), rounded by
// largest remainder so the total is preserved exactly; every probability
// with a nonzero coefficient keeps at least one run.
RunPlan plan_runs(const LinearFunctional& functional, const ClickProbabilitySet& probs,
                  std::int64_t n_total);

// Allocation that assumes nothing about the outcome statistics: every
// Bernoulli variance is taken at its maximum 1/4, which makes N_i ~ |c_i|
// optimal. The reported predicted_* fields still use the model
// probabilities; the worst-case guarantee itself is
// conservative_variance(functional, plan).
RunPlan plan_runs_minimax(const LinearFunctional& functional, const ClickProbabilitySet& probs,
                          std::int64_t n_total);

// sum_i c_i^2 / (4 N_i): the variance bound that holds whatever the
// probabilities are.
double conservative_variance(const LinearFunctional& functional, const RunPlan& plan);

// Smallest total budget whose minimax plan satisfies
// sqrt(conservative variance) <= (Q - S*) / significance at accurate
// calibration. Sizing against the worst case is what reproduces the
// published run budget; with the model probabilities plugged in, the same
// plan predicts a comfortably higher significance.
RequiredRuns required_runs(const SystemParams& params, complexd alpha, complexd beta,
                           double significance = 3.0, std::int64_t n_cal = 100000);

// One synthetic experiment: binomial counts at the model probabilities for
// each planned run block, pushed through the estimator functional. The
// stream id gives each replication its own counter-based substream, so
// parallel and serial execution agree.
double simulate_experiment(const SystemParams& params, complexd alpha, complexd beta,
                           const RunPlan& plan, std::uint64_t seed, std::uint64_t stream = 0,
                           std::int64_t n_cal = 100000);

}  // namespace omw::stats

#endif
