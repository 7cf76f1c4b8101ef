#pragma once

#include <string>
#include <vector>

namespace twrn {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Self-contained invariant checks over the library: construction algebra,
// special-function pins, quadrature convergence, Gaussian-average identity,
// noise statistics, amplification normalization, estimator bias, and the
// per-relay vs closed-form signal path.  Deterministic.
std::vector<CheckResult> run_validate_suite();

}  // namespace twrn
