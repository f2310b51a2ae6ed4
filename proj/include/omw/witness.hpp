#ifndef OMW_WITNESS_HPP
#define OMW_WITNESS_HPP

#include "omw/types.hpp"

namespace omw::witness {

// Effective displacements x = sqrt(eta) alpha, y = sqrt(eta) beta. Only
// these products enter the separable bound, so the displacement amplitude
// and the detector efficiency never need to be known separately.
struct DisplacementSetting {
    complexd x;
    complexd y;

    static DisplacementSetting from_alpha(complexd alpha, complexd beta, double eta);
};

struct WitnessEvaluation {
    double q = 0.0;
    double s_star = 0.0;
    double diff = 0.0;  // q - s_star
    DisplacementSetting setting;
    SystemParams params;
};

// Matrix elements <i| sigma_x |j> of the displaced click/no-click observable
// for real effective displacement x. Supported pairs:
// (0,0), (1,1), (0,1), (0,2), (1,2).
double sigma_element(int i, int j, double x);

// Q = 1 - 2 P(+1|alpha) - 2 P(+1|beta) + 4 P(+1+1|alpha,beta). Inputs that
// are not statistics of any pair of +-1 observables push Q outside [-1,1]
// and are rejected.
//
// The bound S* addresses the phase-averaged product observable. Q as
// measured at fixed displacement phases equals that average only for states
// invariant under the joint phase rotation exp(i phi n1 - i phi n2); the
// protocol state is such a state, arbitrary states need the averaging
// applied first (oracle::phase_average).
double q_value(double p_plus_a, double p_plus_b, double p_joint);

// Largest witness value any separable state can reach, evaluated from the
// measured calibration probabilities. Complex settings reduce to |x|, |y|.
double separable_bound(const ClickProbabilitySet& probs, const DisplacementSetting& setting);

// Q, S* and their difference from one probability set (so both sides of the
// inequality always see identical statistics).
WitnessEvaluation evaluate_set(const ClickProbabilitySet& probs, const DisplacementSetting& setting);

// Convenience: build the probability set from the closed-form model first.
WitnessEvaluation evaluate(const SystemParams& params, complexd alpha, complexd beta);

}  // namespace omw::witness

#endif
