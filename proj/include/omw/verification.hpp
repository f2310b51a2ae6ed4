#ifndef OMW_VERIFICATION_HPP
#define OMW_VERIFICATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "omw/types.hpp"

namespace omw::verify {

struct PointResult {
    SystemParams params;
    double alpha = 0.0;
    double beta = 0.0;
    double max_discrepancy = 0.0;  // worst of the nine probabilities
};

struct AgreementReport {
    std::uint64_t seed = 0;
    int points = 0;
    double tolerance = 1e-8;
    double max_discrepancy = 0.0;
    PointResult worst;
    bool pass = false;
};

// Largest absolute disagreement between the closed-form probability set and
// the Fock-space oracle at one parameter point.
PointResult compare_point(const SystemParams& params, double alpha, double beta, int cutoff = 0);

// Randomized sweep over p <= 0.5, T in [0,1], eta in [0.05,1], n0 <= 1 and
// real displacements |alpha|, |beta| <= 3.
AgreementReport run_agreement(int points, std::uint64_t seed, int cutoff = 0, int threads = 1,
                              double tolerance = 1e-8);

}  // namespace omw::verify

#endif
