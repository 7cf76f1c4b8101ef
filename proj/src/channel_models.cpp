#include "twrn/channel_models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twrn {

namespace {
constexpr int kJakesOscillators = 32;
}

void ChannelStats::validate() const {
    if (!(sigma_f_sq > 0) || !(sigma_g_sq > 0))
        throw std::invalid_argument("channel: variances must be > 0");
}

void FadingProcess::validate() const {
    if (kind == FadingKind::QuasiStatic) return;
    if (!(doppler_hz >= 0) || !(symbol_period_s > 0))
        throw std::invalid_argument(
            "fading: doppler must be >= 0 and symbol period > 0");
    if (!(normalized_doppler() < 0.1))
        throw std::invalid_argument("fading: normalized doppler must be < 0.1");
}

double compute_beta(double p_relay_each, double p1, double p2,
                    const ChannelStats& stats, double n0) {
    if (!(p_relay_each > 0) || !(p1 > 0) || !(p2 > 0) || !(n0 > 0))
        throw std::invalid_argument("compute_beta: powers and n0 must be > 0");
    stats.validate();
    return std::sqrt(p_relay_each /
                     (stats.sigma_f_sq * p1 + stats.sigma_g_sq * p2 + n0));
}

std::pair<CVec, CVec> sample_quasi_static(const ChannelStats& stats, int n,
                                          RngStream& rng) {
    stats.validate();
    CVec f(n), g(n);
    for (int i = 0; i < n; ++i) f(i) = rng.complex_gaussian(stats.sigma_f_sq);
    for (int i = 0; i < n; ++i) g(i) = rng.complex_gaussian(stats.sigma_g_sq);
    return {std::move(f), std::move(g)};
}

CMat jakes_series(double sigma_sq, int n_links, double doppler_hz,
                  double symbol_period_s, int length, RngStream& rng) {
    if (!(sigma_sq > 0)) throw std::invalid_argument("jakes_series: sigma_sq must be > 0");
    if (length < 1 || n_links < 1)
        throw std::invalid_argument("jakes_series: need n_links >= 1, length >= 1");
    const double wd = 2.0 * std::numbers::pi * doppler_hz;
    const double amp = std::sqrt(sigma_sq / kJakesOscillators);
    CMat out(n_links, length);
    for (int link = 0; link < n_links; ++link) {
        double omega[kJakesOscillators], phase[kJakesOscillators];
        for (int m = 0; m < kJakesOscillators; ++m) {
            // random arrival angle -> Doppler shift wd*cos(theta); random phase
            omega[m] = wd * std::cos(2.0 * std::numbers::pi * rng.uniform());
            phase[m] = 2.0 * std::numbers::pi * rng.uniform();
        }
        for (int t = 0; t < length; ++t) {
            double tau = t * symbol_period_s;
            Complex acc{0.0, 0.0};
            for (int m = 0; m < kJakesOscillators; ++m) {
                double arg = omega[m] * tau + phase[m];
                acc += Complex{std::cos(arg), std::sin(arg)};
            }
            out(link, t) = amp * acc;
        }
    }
    return out;
}

std::pair<CMat, CMat> sample_jakes(const ChannelStats& stats, int n,
                                   double doppler_hz, double symbol_period_s,
                                   int length, RngStream& rng) {
    stats.validate();
    CMat f = jakes_series(stats.sigma_f_sq, n, doppler_hz, symbol_period_s, length, rng);
    CMat g = jakes_series(stats.sigma_g_sq, n, doppler_hz, symbol_period_s, length, rng);
    return {std::move(f), std::move(g)};
}

CVec awgn(double n0, int dims, RngStream& rng) {
    if (!(n0 >= 0)) throw std::invalid_argument("awgn: n0 must be >= 0");
    CVec v(dims);
    for (int i = 0; i < dims; ++i)
        v(i) = n0 > 0 ? rng.complex_gaussian(n0) : Complex{0.0, 0.0};
    return v;
}

LinkRealization LinkRealization::make(const std::vector<RelayCase>& case_flags,
                                      CVec f, CVec g, double beta, double n0) {
    const int n = static_cast<int>(case_flags.size());
    if (f.size() != n || g.size() != n)
        throw std::invalid_argument("LinkRealization: link vectors must match relay count");
    if (!(beta > 0) || !(n0 > 0))
        throw std::invalid_argument("LinkRealization: beta and n0 must be > 0");
    LinkRealization lr;
    lr.beta = beta;
    lr.h12.resize(n);
    lr.h22.resize(n);
    double gpow = 0;
    for (int i = 0; i < n; ++i) {
        Complex fh = (case_flags[i] == RelayCase::ForwardSignal) ? f(i) : std::conj(f(i));
        Complex gh = (case_flags[i] == RelayCase::ForwardSignal) ? g(i) : std::conj(g(i));
        lr.h12(i) = beta * fh * g(i);
        lr.h22(i) = beta * gh * g(i);
        gpow += std::norm(g(i));
    }
    lr.sigma_n2_sq = (beta * beta * gpow + 1.0) * n0;
    lr.sigma_n2_tilde_sq = 2.0 * lr.sigma_n2_sq;
    lr.f = std::move(f);
    lr.g = std::move(g);
    return lr;
}

}  // namespace twrn
