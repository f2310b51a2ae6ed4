#ifndef OMW_OPTIMIZER_HPP
#define OMW_OPTIMIZER_HPP

#include <vector>

#include "omw/types.hpp"

namespace omw::optimizer {

// Search brackets and resolution. The sign restriction alpha >= 0, beta <= 0
// costs nothing by the witness sign-flip symmetry, and the joint-click cross
// term favours opposite signs anyway.
struct Brackets {
    double alpha_max = 6.0;
    double beta_max = 6.0;   // beta searched in [-beta_max, 0]
    double p_min = 1e-9;     // p = 0 is a boundary, not a grid point
    double p_max = 0.5;
    int grid_alpha = 21;
    int grid_beta = 21;
    int grid_p = 11;
    double tolerance = 1e-7;
    int max_iterations = 200;
};

struct OptimizationResult {
    double alpha = 0.0;
    double beta = 0.0;
    double p = 0.0;
    double q = 0.0;
    double s_star = 0.0;
    double diff = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct SweepRow {
    double T, eta, n0;
    double alpha, beta, p;
    double q, s_star, diff;
};

// Maximize Q - S* over (alpha, beta, p) at fixed (T, eta, n0): coarse grid
// scan followed by a Nelder-Mead refinement clamped to the brackets.
// Deterministic for a given configuration.
OptimizationResult optimize_setting(double T, double eta, double n0,
                                    const Brackets& brackets = Brackets{});

// Same search with p pinned (used when the pair-creation probability is set
// by the hardware drive rather than optimized).
OptimizationResult optimize_displacements(double T, double eta, double n0, double p_fixed,
                                          const Brackets& brackets = Brackets{});

// One optimized row per grid combination, ordered (eta, n0, T); grid points
// may be evaluated in parallel, the row order never changes.
std::vector<SweepRow> sweep(const std::vector<double>& eta_list, const std::vector<double>& n0_list,
                            const std::vector<double>& T_list, const Brackets& brackets = Brackets{},
                            int threads = 1);

std::vector<SweepRow> sweep_T(const std::vector<double>& eta_list, double n0,
                              const std::vector<double>& T_list,
                              const Brackets& brackets = Brackets{}, int threads = 1);

std::vector<SweepRow> sweep_n0(double eta, const std::vector<double>& n0_list,
                               const std::vector<double>& T_list,
                               const Brackets& brackets = Brackets{}, int threads = 1);

}  // namespace omw::optimizer

#endif
