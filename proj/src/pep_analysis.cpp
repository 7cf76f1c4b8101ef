#include "twrn/pep_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twrn {

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr int kDefaultQuadOrder = 128;
}  // namespace

namespace {

// e^z E1(z) for z > 0 by continued fraction (modified Lentz); keeping the
// exponential factored out lets callers avoid overflow for large z
double e1_scaled_cf(double z) {
    const double tiny = 1e-300;
    double b = z + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -double(i) * double(i);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

}  // namespace

double exp_integral_ei(double x) {
    if (!(x < 0))
        throw std::domain_error("exp_integral_ei: defined here for x < 0 only");
    const double ax = -x;
    if (ax <= 5.0) {
        // Ei(x) = gamma + ln|x| + sum x^k/(k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= x / k;
            double add = term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return kEulerGamma + std::log(ax) + sum;
    }
    // Ei(-z) = -E1(z) = -e^{-z} (e^z E1(z))
    return -std::exp(-ax) * e1_scaled_cf(ax);
}

GaussLegendre::GaussLegendre(int order, double a, double b) {
    if (order < 2) throw std::invalid_argument("GaussLegendre: order must be >= 2");
    nodes.resize(order);
    weights.resize(order);
    const int m = (order + 1) / 2;
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        nodes[i] = xm - xl * z;
        nodes[order - 1 - i] = xm + xl * z;
        weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        weights[order - 1 - i] = weights[i];
    }
}

PepParams PepParams::from_m_values(RVec m) {
    if (m.size() < 1) throw std::invalid_argument("PepParams: need at least one mode");
    PepParams p;
    p.m_values = std::move(m);
    return p;
}

PepParams PepParams::from_link(const RVec& lambdas, const PowerConfig& power,
                               const ChannelStats& stats) {
    power.validate();
    stats.validate();
    if (lambdas.size() != power.n_relays)
        throw std::invalid_argument("PepParams: lambda count must equal n_relays");
    const double beta = compute_beta(power.p_relay_each(), power.p1(), power.p2(),
                                     stats, power.n0);
    const double b2 = beta * beta;
    const double denom =
        8.0 * (power.n_relays * b2 * stats.sigma_g_sq + 1.0) * power.n0;
    RVec m(lambdas.size());
    for (Eigen::Index i = 0; i < lambdas.size(); ++i)
        m(i) = power.p1() * b2 * stats.sigma_f_sq * stats.sigma_g_sq * lambdas(i) /
               denom;
    return from_m_values(std::move(m));
}

RVec singular_values_of_difference(const Codebook& codebook, int k, int j,
                                   const CMat& s_prev) {
    const int size = codebook.size();
    if (k < 0 || k >= size || j < 0 || j >= size)
        throw std::invalid_argument("singular_values_of_difference: index out of range");
    if (k == j)
        throw std::invalid_argument("singular_values_of_difference: codewords must differ");
    CMat d = (codebook.entries[k] - codebook.entries[j]) * s_prev;
    Eigen::SelfAdjointEigenSolver<CMat> es(d.adjoint() * d);
    RVec ev = es.eigenvalues().reverse();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) < 0 && ev(i) > -1e-12) ev(i) = 0;
    return ev;
}

namespace {

void check_modes_positive(const PepParams& params, const char* who) {
    for (int i = 0; i < params.n_modes(); ++i)
        if (!(params.m_values(i) > 0))
            throw std::domain_error(std::string(who) + ": mode " + std::to_string(i) +
                                    " has non-positive gain M = " +
                                    std::to_string(params.m_values(i)));
}

void check_modes_above_e(const PepParams& params, const char* who) {
    check_modes_positive(params, who);
    for (int i = 0; i < params.n_modes(); ++i)
        if (!(params.m_values(i) > std::numbers::e)) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "%s: out of regime, mode %d has M = %.6g <= e", who, i,
                          params.m_values(i));
            throw std::domain_error(buf);
        }
}

// (2n-1)!! / (2n)!!
double double_factorial_ratio(int n) {
    double r = 1.0;
    for (int k = 1; k <= n; ++k) r *= (2.0 * k - 1.0) / (2.0 * k);
    return r;
}

const GaussLegendre& default_quad() {
    static const GaussLegendre gl(kDefaultQuadOrder, 0.0, std::numbers::pi / 2.0);
    return gl;
}

// one per-mode factor -a e^a Ei(-a); for a > 5 the exponentials are folded
// into the continued fraction so the factor stays finite for any gain
double pep_mode_factor(double a) {
    if (a > 5.0) return a * e1_scaled_cf(a);
    return -a * std::exp(a) * exp_integral_ei(-a);
}

double pep_mgf_with_quad(const PepParams& params, const GaussLegendre& gl) {
    double acc = 0.0;
    for (size_t q = 0; q < gl.nodes.size(); ++q) {
        double s2 = std::sin(gl.nodes[q]);
        s2 *= s2;
        double prod = 1.0;
        for (int i = 0; i < params.n_modes(); ++i)
            prod *= pep_mode_factor(s2 / params.m_values(i));
        acc += gl.weights[q] * prod;
    }
    return acc / std::numbers::pi;
}

}  // namespace

double pep_mgf(const PepParams& params) {
    check_modes_positive(params, "pep_mgf");
    return pep_mgf_with_quad(params, default_quad());
}

double pep_mgf(const PepParams& params, int quad_order) {
    check_modes_positive(params, "pep_mgf");
    return pep_mgf_with_quad(params,
                             GaussLegendre(quad_order, 0.0, std::numbers::pi / 2.0));
}

double pep_simplified(const PepParams& params) {
    check_modes_above_e(params, "pep_simplified");
    double prod = 1.0;
    for (int i = 0; i < params.n_modes(); ++i)
        prod *= std::log(params.m_values(i)) / params.m_values(i);
    return 0.5 * double_factorial_ratio(params.n_modes()) * prod;
}

double pep_chernoff(const PepParams& params) {
    check_modes_above_e(params, "pep_chernoff");
    double prod = 1.0;
    for (int i = 0; i < params.n_modes(); ++i)
        prod *= std::log(params.m_values(i)) / params.m_values(i);
    return 0.5 * prod;
}

double bler_union_bound(const RelaySet& relays, const Codebook& codebook,
                        const PowerConfig& power, const ChannelStats& stats) {
    const int n = relays.n_relays;
    const CMat s_prev = code_matrix(relays, reference_vector(n));
    const int size = codebook.size();
    // the pairwise terms depend only on the eigenvalue tuple; memoize
    std::map<std::vector<std::int64_t>, double> cache;
    double total = 0.0;
    for (int k = 0; k < size; ++k) {
        for (int j = 0; j < size; ++j) {
            if (j == k) continue;
            RVec lam = singular_values_of_difference(codebook, k, j, s_prev);
            std::vector<std::int64_t> key(lam.size());
            for (Eigen::Index i = 0; i < lam.size(); ++i)
                key[i] = std::llround(lam(i) * 1e9);
            auto it = cache.find(key);
            double pep;
            if (it != cache.end()) {
                pep = it->second;
            } else {
                pep = pep_mgf(PepParams::from_link(lam, power, stats));
                cache.emplace(std::move(key), pep);
            }
            total += pep;
        }
    }
    return std::clamp(total / size, 0.0, 1.0);
}

double diversity_slope(std::span<const double> snr_db,
                       std::span<const double> bler) {
    if (snr_db.size() != bler.size())
        throw std::invalid_argument("diversity_slope: length mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = 0; i < bler.size(); ++i) {
        if (!(bler[i] > 0)) continue;
        double x = snr_db[i] / 10.0;  // decades of SNR
        double y = std::log10(bler[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2)
        throw std::invalid_argument("diversity_slope: need at least two positive points");
    double denom = m * sxx - sx * sx;
    if (!(std::abs(denom) > 0))
        throw std::invalid_argument("diversity_slope: degenerate abscissae");
    return -(m * sxy - sx * sy) / denom;
}

std::pair<double, double> gaussian_integral_check(const CMat& b_matrix,
                                                  std::int64_t n_samples,
                                                  RngStream& rng) {
    const int n = static_cast<int>(b_matrix.rows());
    if (b_matrix.cols() != n || n < 1 || n > 3)
        throw std::invalid_argument(
            "gaussian_integral_check: matrix must be square with 1 <= n <= 3");
    if (max_abs(b_matrix - b_matrix.adjoint()) > 1e-10)
        throw std::invalid_argument("gaussian_integral_check: matrix must be Hermitian");
    if (n_samples < 1)
        throw std::invalid_argument("gaussian_integral_check: need n_samples >= 1");
    Eigen::SelfAdjointEigenSolver<CMat> es(b_matrix);
    if (!(es.eigenvalues().minCoeff() > 0))
        throw std::invalid_argument(
            "gaussian_integral_check: matrix must be positive definite");

    const double pi_n = std::pow(std::numbers::pi, n);
    double closed = pi_n / b_matrix.determinant().real();

    // importance sampling with a CN(0, I) proposal: the weighted integrand is
    // pi^n exp(-x^H (B - I) x)
    const CMat shifted = b_matrix - CMat::Identity(n, n);
    double acc = 0.0;
    CVec x(n);
    for (std::int64_t s = 0; s < n_samples; ++s) {
        for (int i = 0; i < n; ++i) x(i) = rng.complex_gaussian(1.0);
        double q = (x.adjoint() * shifted * x).value().real();
        acc += std::exp(-q);
    }
    return {pi_n * acc / double(n_samples), closed};
}

}  // namespace twrn
