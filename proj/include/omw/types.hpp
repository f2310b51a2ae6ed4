#ifndef OMW_TYPES_HPP
#define OMW_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace omw {

using complexd = std::complex<double>;

// Thrown when a truncated Fock-space computation cannot be trusted at the
// requested cutoff (tail mass of the top levels too large, or a fixed
// cutoff override was too small).
class UnderTruncationError : public std::runtime_error {
  public:
    explicit UnderTruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an operation requires Q - S* > 0 but the asymptotic
// difference at the given point is non-positive.
class NoViolationError : public std::runtime_error {
  public:
    explicit NoViolationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when calibration ratios cannot be formed because a measured
// probability in a denominator (or numerator) vanishes.
class CalibrationDegenerateError : public std::runtime_error {
  public:
    explicit CalibrationDegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// Internal-consistency failure of a probability computation (e.g. a joint
// probability more negative than floating-point cancellation can explain).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The four dimensionless knobs every closed-form expression consumes.
//   p    probability that the blue pulse creates at least one phonon-photon pair
//   T    phonon-photon conversion efficiency of the red pulse
//   eta  overall detection efficiency (cavity to detector), same for both modes
//   n0   initial mean thermal occupation of the mechanical mode
struct SystemParams {
    double p = 0.0;
    double T = 1.0;
    double eta = 1.0;
    double n0 = 0.0;

    void validate() const;
    bool is_valid() const;
};

// Physical rates of the opto-mechanical platform. Angular frequencies are
// stored in rad/s; the CLI accepts f/2pi inputs and converts.
struct HardwareParams {
    double g0 = 0.0;       // bare opto-mechanical coupling (rad/s)
    double kappa = 0.0;    // cavity decay rate (rad/s)
    double omega_m = 0.0;  // mechanical frequency (rad/s)
    double n_plus = 0.0;   // intra-cavity photon number, blue drive
    double n_minus = 0.0;  // intra-cavity photon number, red drive
    double t1 = 0.0;       // blue pulse duration (s)
    double t2 = 0.0;       // red pulse duration (s)
    double n0 = 0.0;       // initial mean thermal phonon number

    void validate() const;
    // Regime checks that warn instead of failing: the closed forms stay
    // evaluable outside the resolved-sideband / weak-coupling regime.
    std::vector<std::string> regime_warnings() const;
};

// The measured probabilities feeding both the witness value Q and the
// separable bound S*. All entries refer to the no-click outcome (+1) of a
// non-photon-resolving detector; pc_* are twofold coincidence rates behind
// a balanced beamsplitter.
struct ClickProbabilitySet {
    // no-displacement joint outcomes P(+-1 +-1 | 0,0)
    double p_pp = 1.0;
    double p_pm = 0.0;
    double p_mp = 0.0;
    double p_mm = 0.0;
    // coincidence probabilities on each mode
    double pc_a1 = 0.0;
    double pc_a2 = 0.0;
    // displaced singles and joint at the chosen (alpha, beta)
    double q_singles_a = 1.0;
    double q_singles_b = 1.0;
    double q_joint = 1.0;

    void validate() const;
};

// Inclusion-exclusion: joint +-1 outcomes from the two no-click singles and
// the joint no-click probability. Tiny negatives from cancellation are
// clamped; anything below -1e-12 is an internal-consistency error.
struct JointOutcomes {
    double pp, pm, mp, mm;
};
JointOutcomes joints_from_singles(double p_plus_a, double p_plus_b, double p_joint);

}  // namespace omw

#endif
