#include "omw/types.hpp"

#include <cmath>
#include <sstream>

namespace omw {

void SystemParams::validate() const {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("SystemParams: p must lie in [0,1)");
    if (!(T >= 0.0 && T <= 1.0)) throw std::invalid_argument("SystemParams: T must lie in [0,1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("SystemParams: eta must lie in (0,1]");
    if (!(n0 >= 0.0) || !std::isfinite(n0)) throw std::invalid_argument("SystemParams: n0 must be >= 0");
}

bool SystemParams::is_valid() const {
    return p >= 0.0 && p < 1.0 && T >= 0.0 && T <= 1.0 && eta > 0.0 && eta <= 1.0 &&
           n0 >= 0.0 && std::isfinite(n0);
}

void HardwareParams::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(g0) || !positive(kappa) || !positive(omega_m))
        throw std::invalid_argument("HardwareParams: rates g0, kappa, omega_m must be positive");
    if (!positive(n_plus) || !positive(n_minus))
        throw std::invalid_argument("HardwareParams: intra-cavity photon numbers must be positive");
    if (!(t1 >= 0.0) || !(t2 >= 0.0))
        throw std::invalid_argument("HardwareParams: pulse durations must be non-negative");
    if (!(n0 >= 0.0)) throw std::invalid_argument("HardwareParams: n0 must be >= 0");
}

std::vector<std::string> HardwareParams::regime_warnings() const {
    std::vector<std::string> w;
    if (kappa >= omega_m)
        w.push_back("resolved-sideband condition kappa < Omega_m not met");
    if (g0 >= kappa)
        w.push_back("weak-coupling condition g0 < kappa not met");
    return w;
}

namespace {
void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "ClickProbabilitySet: " << name << " = " << v << " outside [0,1]";
        throw std::invalid_argument(os.str());
    }
}
}  // namespace

void ClickProbabilitySet::validate() const {
    check_unit_interval(p_pp, "p_pp");
    check_unit_interval(p_pm, "p_pm");
    check_unit_interval(p_mp, "p_mp");
    check_unit_interval(p_mm, "p_mm");
    check_unit_interval(pc_a1, "pc_a1");
    check_unit_interval(pc_a2, "pc_a2");
    check_unit_interval(q_singles_a, "q_singles_a");
    check_unit_interval(q_singles_b, "q_singles_b");
    check_unit_interval(q_joint, "q_joint");
    const double sum = p_pp + p_pm + p_mp + p_mm;
    if (std::abs(sum - 1.0) > 1e-10)
        throw NumericalError("ClickProbabilitySet: no-displacement joints sum to " + std::to_string(sum));
    // a coincidence needs at least one photon on the mode, so it cannot be
    // more frequent than a click
    if (pc_a1 > 1.0 - p_pp - p_pm + 1e-10)
        throw NumericalError("ClickProbabilitySet: pc_a1 exceeds the A1 click probability");
    if (pc_a2 > 1.0 - p_pp - p_mp + 1e-10)
        throw NumericalError("ClickProbabilitySet: pc_a2 exceeds the A2 click probability");
}

JointOutcomes joints_from_singles(double p_plus_a, double p_plus_b, double p_joint) {
    JointOutcomes j{};
    j.pp = p_joint;
    j.pm = p_plus_a - p_joint;
    j.mp = p_plus_b - p_joint;
    j.mm = 1.0 - p_plus_a - p_plus_b + p_joint;
    for (double* v : {&j.pp, &j.pm, &j.mp, &j.mm}) {
        if (*v < -1e-12)
            throw NumericalError("joints_from_singles: inconsistent inputs give probability " +
                                 std::to_string(*v));
        if (*v < 0.0) *v = 0.0;
    }
    return j;
}

}  // namespace omw
