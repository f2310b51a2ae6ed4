#include "omw/verification.hpp"

#include <algorithm>
#include <cmath>

#include "omw/analytic_model.hpp"
#include "omw/fock_oracle.hpp"
#include "omw/parallel.hpp"
#include "omw/rng.hpp"

namespace omw::verify {

PointResult compare_point(const SystemParams& params, double alpha, double beta, int cutoff) {
    const ClickProbabilitySet a = analytic::probability_set(params, alpha, beta);
    const ClickProbabilitySet o = oracle::probability_set(params, alpha, beta, cutoff);
    const double deltas[] = {std::abs(a.p_pp - o.p_pp),
                             std::abs(a.p_pm - o.p_pm),
                             std::abs(a.p_mp - o.p_mp),
                             std::abs(a.p_mm - o.p_mm),
                             std::abs(a.pc_a1 - o.pc_a1),
                             std::abs(a.pc_a2 - o.pc_a2),
                             std::abs(a.q_singles_a - o.q_singles_a),
                             std::abs(a.q_singles_b - o.q_singles_b),
                             std::abs(a.q_joint - o.q_joint)};
    double worst = 0.0;
    for (double d : deltas) worst = std::max(worst, d);
    return PointResult{params, alpha, beta, worst};
}

AgreementReport run_agreement(int points, std::uint64_t seed, int cutoff, int threads,
                              double tolerance) {
    if (points < 1) throw std::invalid_argument("run_agreement: need at least one point");
    AgreementReport report;
    report.seed = seed;
    report.points = points;
    report.tolerance = tolerance;

    std::vector<PointResult> results(points);
    parallel_for_indexed(points, threads, [&](int i) {
        PhiloxEngine rng(seed, static_cast<std::uint64_t>(i));
        SystemParams params;
        params.p = rng.uniform(0.0, 0.5);
        params.T = rng.uniform(0.0, 1.0);
        params.eta = rng.uniform(0.05, 1.0);
        params.n0 = rng.uniform(0.0, 1.0);
        const double alpha = rng.uniform(-3.0, 3.0);
        const double beta = rng.uniform(-3.0, 3.0);
        results[i] = compare_point(params, alpha, beta, cutoff);
    });

    report.worst = results.front();
    for (const PointResult& r : results) {
        if (r.max_discrepancy > report.max_discrepancy) {
            report.max_discrepancy = r.max_discrepancy;
            report.worst = r;
        }
    }
    report.pass = report.max_discrepancy < tolerance;
    return report;
}

}  // namespace omw::verify
