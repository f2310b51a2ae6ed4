#ifndef OMW_ANALYTIC_MODEL_HPP
#define OMW_ANALYTIC_MODEL_HPP

#include "omw/types.hpp"

namespace omw::analytic {

// Laboratory rates -> dimensionless protocol parameters.
// p = 1 - exp(-2*gt_plus*T1) with gt_plus = 2 g0^2 n_plus / kappa, and
// T = 1 - exp(-2*gt_minus*T2) likewise. The detection efficiency is not a
// property of the cavity drive and must be supplied by the caller.
SystemParams hardware_to_params(const HardwareParams& hw, double eta);

// Joint no-click probability P(+1+1 | alpha, beta) with displacements applied
// to both modes.
double joint_click_prob(const SystemParams& params, complexd alpha, complexd beta);

// Single-mode no-click probabilities P(+1 | alpha) on A1 / P(+1 | beta) on A2.
double local_click_prob_a1(const SystemParams& params, complexd alpha);
double local_click_prob_a2(const SystemParams& params, complexd beta);

// Twofold coincidence probabilities behind a balanced beamsplitter on each
// mode, (Pc(A1), Pc(A2)).
std::pair<double, double> coincidence_probs(const SystemParams& params);

// The four no-displacement outcomes P(+-1 +-1 | 0,0) by inclusion-exclusion
// over the joint and the two singles.
JointOutcomes no_displacement_joint_probs(const SystemParams& params);

// Everything the witness and the statistics need, in one shot.
ClickProbabilitySet probability_set(const SystemParams& params, complexd alpha, complexd beta);

}  // namespace omw::analytic

#endif
