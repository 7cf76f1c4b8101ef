#pragma once

// Independent reference computations the tests compare the library against.
// Everything here is deliberately written from the defining formulas, not by
// calling back into the code under test.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "twrn/linalg.hpp"
#include "twrn/rng.hpp"

namespace oracle {

inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Conditional pairwise error probability averaged over the product-Rayleigh
// fading by brute force: mean of Q(sqrt(2 sum_i M_i |f_i|^2 |g_i|^2)) with
// f_i, g_i iid CN(0,1).
inline double pep_monte_carlo(const std::vector<double>& m_values,
                              std::int64_t samples, twrn::RngStream& rng) {
    double acc = 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
        double metric = 0.0;
        for (double m : m_values) {
            double ff = std::norm(rng.complex_gaussian(1.0));
            double gg = std::norm(rng.complex_gaussian(1.0));
            metric += m * ff * gg;
        }
        acc += q_function(std::sqrt(2.0 * metric));
    }
    return acc / double(samples);
}

// Power-series exponential integral for x < 0, kept independent of the
// library's branch logic.
inline double ei_series(double x, int terms = 400) {
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= terms; ++k) {
        term *= x / k;
        sum += term / k;
    }
    return 0.5772156649015328606 + std::log(-x) + sum;
}

// chi-square statistic for observed counts vs uniform expectation
inline double chi_square_uniform(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    double expect = double(total) / double(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        double d = double(c) - expect;
        stat += d * d / expect;
    }
    return stat;
}

// two-sample Kolmogorov-Smirnov p-value (asymptotic)
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
    double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

// SNR (dB) where a log-linearly interpolated BLER curve crosses the target
inline double snr_at_bler(const std::vector<double>& snr_db,
                          const std::vector<double>& bler, double target) {
    for (size_t i = 1; i < snr_db.size(); ++i) {
        double a = bler[i - 1], b = bler[i];
        if (!(a > 0) || !(b > 0)) continue;
        if ((a >= target && b <= target) || (a <= target && b >= target)) {
            double la = std::log10(a), lb = std::log10(b), lt = std::log10(target);
            if (la == lb) return snr_db[i - 1];
            return snr_db[i - 1] +
                   (snr_db[i] - snr_db[i - 1]) * (lt - la) / (lb - la);
        }
    }
    throw std::runtime_error("bler curve does not cross the target level");
}

}  // namespace oracle
