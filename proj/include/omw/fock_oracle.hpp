#ifndef OMW_FOCK_ORACLE_HPP
#define OMW_FOCK_ORACLE_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "omw/types.hpp"

// Brute-force ground truth in a truncated photon-number basis. All closed
// forms of the analytic model are cross-validated against states built here.
namespace omw::oracle {

// Dense operator over a tensor-product Fock basis. For a two-mode operator
// the basis index is m * dim_per_mode[1] + n with m the first-mode level.
struct TruncatedOperator {
    std::vector<int> dim_per_mode;
    Eigen::MatrixXcd entries;

    int dim() const {
        int d = 1;
        for (int c : dim_per_mode) d *= c;
        return d;
    }
    // max |U^dag U - I|, for unitarity checks
    double unitarity_defect() const;
};

// Density operator of the optical modes A1 (x) A2.
struct TwoModeState {
    int cutoff1 = 0;
    int cutoff2 = 0;
    Eigen::MatrixXcd rho;

    int dim() const { return cutoff1 * cutoff2; }
    double trace_defect() const;
    double hermiticity_defect() const;
    double min_eigenvalue() const;  // of the Hermitian part; O(dim^3)
    Eigen::VectorXd marginal_diag(int mode) const;
    // population of the top two Fock levels of the given mode
    double mode_tail_top2(int mode) const;
    // throws if the density-operator invariants fail; the spectrum check is
    // optional because it is cubic in the dimension
    void validate(bool with_spectrum = false) const;
};

struct ClickProbs {
    double p_plus_a;  // P(+1 | alpha)
    double p_plus_b;  // P(+1 | beta)
    double p_joint;   // P(+1 +1 | alpha, beta)
};

// Annihilation and creation matrices at the given cutoff.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> ladder_ops(int cutoff);

// Thermal state with mean occupation n0, renormalized over the truncation.
Eigen::MatrixXcd thermal_state(double n0, int cutoff);

// exp(alpha a^dag - alpha^* a)
TruncatedOperator displacement_op(complexd alpha, int cutoff);

// exp(r (e^{i phase} a^dag b^dag - e^{-i phase} a b)) on two modes.
TruncatedOperator two_mode_squeeze_op(double r, double phase, int cutoff1, int cutoff2);

// Pure-loss channel on one mode (0 or 1). The transmitted amplitude picks up
// e^{i phase} per surviving photon, which realizes the i factors of the
// squeeze / state-swap conventions when phase = pi/2.
TwoModeState loss_channel(const TwoModeState& state, int mode, double transmissivity, double phase);

// Full protocol: A1 (x) phonon squeezing with sinh^2 r = p/(1-p), phonon ->
// A2 state swap as a relabeled loss channel of transmissivity T, then
// detection loss eta on both optical modes. cutoff = 0 grows the truncation
// adaptively; cutoff > 0 pins it for both modes and fails hard if too small.
TwoModeState simulate_protocol(const SystemParams& params, int cutoff = 0);

// No-click probabilities measured on a state that already carries the eta
// loss: displaced-vacuum expectations at x = -sqrt(eta) alpha etc.
ClickProbs click_probabilities(const TwoModeState& state, complexd alpha, complexd beta,
                               double eta);

// Twofold coincidence probability of the given mode behind a balanced
// beamsplitter with vacuum ancilla: 1 - P(out1=0) - P(out2=0) + P(0,0).
double coincidence_probability(const TwoModeState& state, int mode);

// exp(i phi n1) (x) exp(-i phi n2) conjugation; protocol states are invariant.
TwoModeState phase_rotate(const TwoModeState& state, double phi);

// Average of phase_rotate over phi, i.e. projection onto the invariant
// sector (m - n == m' - n'). A local operation plus shared randomness, so it
// maps separable states to separable states.
TwoModeState phase_average(const TwoModeState& state);

// The full measured probability set of the protocol state, computed without
// materializing the dense density matrix (the state is block diagonal in
// n1 - n2, which keeps the worst-case truncations cheap).
ClickProbabilitySet probability_set(const SystemParams& params, complexd alpha, complexd beta,
                                    int cutoff = 0);

}  // namespace omw::oracle

#endif
