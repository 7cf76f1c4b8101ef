#pragma once

#include "twrn/channel_models.hpp"
#include "twrn/power_config.hpp"

namespace twrn {

struct AllocationResult {
    double alpha1 = 0;
    double alpha2 = 0;
    double cost = 0;       // C_T1^{-n} + C_T2^{-n} at the optimum
    double p1 = 0;         // powers for the requested p_total
    double p2 = 0;
    double p_relay_each = 0;
};

// High-SNR cost surface: with gamma dropping out, the two terminals' error
// exponents scale with
//   C_T2 = a1 ((1-a1-a2)/n) sf2 sg2 / (8 ((1-a1-a2) sg2 + a1 sf2 + a2 sg2))
//   C_T1 = a2 ((1-a1-a2)/n) sf2 sg2 / (8 ((1-a1-a2) sf2 + a1 sf2 + a2 sg2))
// and the objective is C_T1^{-n} + C_T2^{-n}.  Outside the feasible open
// simplex the cost is +infinity.
double opa_cost(double alpha1, double alpha2, double sigma_f_sq,
                double sigma_g_sq, int n_relays);

// Coarse grid search (step 0.01 over the open simplex) refined by
// Nelder-Mead until the simplex diameter drops below tol.
AllocationResult solve_opa(double sigma_f_sq, double sigma_g_sq, int n_relays,
                           double tol = 1e-6, double p_total = 1.0);

PowerConfig allocation_to_powers(const AllocationResult& alloc, double p_total,
                                 double n0, int n_relays);

}  // namespace twrn
