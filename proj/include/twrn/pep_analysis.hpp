#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "twrn/channel_models.hpp"
#include "twrn/linalg.hpp"
#include "twrn/power_config.hpp"
#include "twrn/rng.hpp"
#include "twrn/stc_codebooks.hpp"

namespace twrn {

// Exponential integral Ei(x) for x < 0.  Power series near zero, modified
// Lentz continued fraction for large |x|.
double exp_integral_ei(double x);

// Gauss-Legendre nodes/weights on [a, b].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    GaussLegendre(int order, double a, double b);
};

// Per-mode fading gains entering the pairwise error probability.  For an
// error-matrix eigenvalue lambda_i the mode gain is
//   M_i = p1 beta^2 sigma_f^2 sigma_g^2 lambda_i / (8 (n beta^2 sigma_g^2 + 1) n0).
struct PepParams {
    RVec m_values;

    int n_modes() const { return static_cast<int>(m_values.size()); }

    static PepParams from_m_values(RVec m);
    static PepParams from_link(const RVec& lambdas, const PowerConfig& power,
                               const ChannelStats& stats);
};

// eigenvalues (descending) of (S_k - S_j)^H (S_k - S_j) where S_x = U_x S_prev
RVec singular_values_of_difference(const Codebook& codebook, int k, int j,
                                   const CMat& s_prev);

// exact pairwise error probability, averaged over Rayleigh fading:
// (1/pi) * int_0^{pi/2} prod_i [ -(sin^2 t / M_i) e^{sin^2 t / M_i}
//                                Ei(-sin^2 t / M_i) ] dt
double pep_mgf(const PepParams& params);
double pep_mgf(const PepParams& params, int quad_order);  // convergence checks

// high-SNR closed form (1/2) ((2n-1)!!/(2n)!!) prod_i ln(M_i)/M_i;
// requires every M_i > e
double pep_simplified(const PepParams& params);

// Chernoff-style bound (1/2) prod_i ln(M_i)/M_i; requires every M_i > e
double pep_chernoff(const PepParams& params);

// union bound on block error probability under equiprobable codewords,
// clipped to [0, 1]
double bler_union_bound(const RelaySet& relays, const Codebook& codebook,
                        const PowerConfig& power, const ChannelStats& stats);

// least-squares slope of -log10(BLER) per decade of SNR over the given
// points; entries with bler <= 0 are skipped, at least two must remain
double diversity_slope(std::span<const double> snr_db,
                       std::span<const double> bler);

// Monte Carlo check of the Gaussian integral identity the fading average
// rests on: for Hermitian positive definite B (n <= 3),
//   int exp(-x^H B x) dx = pi^n / det(B).
// Returns {importance-sampled estimate, closed form}.
std::pair<double, double> gaussian_integral_check(const CMat& b_matrix,
                                                  std::int64_t n_samples,
                                                  RngStream& rng);

}  // namespace twrn
