#pragma once

#include <utility>
#include <vector>

#include "twrn/linalg.hpp"
#include "twrn/rng.hpp"
#include "twrn/stc_codebooks.hpp"

namespace twrn {

// Rayleigh-fading variances of the terminal-to-relay links: f_i ~ CN(0, sigma_f^2)
// on the T1 side, g_i ~ CN(0, sigma_g^2) on the T2 side.
struct ChannelStats {
    double sigma_f_sq = 1.0;
    double sigma_g_sq = 1.0;

    void validate() const;
};

enum class FadingKind { QuasiStatic, Jakes };

struct FadingProcess {
    FadingKind kind = FadingKind::QuasiStatic;
    double doppler_hz = 0.0;       // Jakes only; 0 degrades to a constant track
    double symbol_period_s = 0.0;  // Jakes only

    void validate() const;
    double normalized_doppler() const { return doppler_hz * symbol_period_s; }
};

// relay amplification factor: beta = sqrt(p_r / (sigma_f^2 p1 + sigma_g^2 p2 + n0))
double compute_beta(double p_relay_each, double p1, double p2,
                    const ChannelStats& stats, double n0);

// i.i.d. CN(0, sigma^2) draws for the f and g link banks of one coherence
// interval
std::pair<CVec, CVec> sample_quasi_static(const ChannelStats& stats, int n,
                                          RngStream& rng);

// Sum-of-sinusoids (Clarke/Jakes) fading track: n_links independent series of
// `length` samples spaced symbol_period_s apart, each marginally CN(0,
// sigma_sq) with ensemble autocorrelation J0(2 pi f_d tau).  32 oscillators
// with random arrival angles and phases per realization.
CMat jakes_series(double sigma_sq, int n_links, double doppler_hz,
                  double symbol_period_s, int length, RngStream& rng);

// convenience wrapper producing matched f- and g-bank tracks
std::pair<CMat, CMat> sample_jakes(const ChannelStats& stats, int n,
                                   double doppler_hz, double symbol_period_s,
                                   int length, RngStream& rng);

// vector of i.i.d. CN(0, n0) noise samples
CVec awgn(double n0, int dims, RngStream& rng);

// Everything the receivers need to know about one coherence interval:
// raw links, the equivalent cascaded channels seen at T2, and the effective
// noise powers there.
struct LinkRealization {
    CVec f, g;
    double beta = 0;
    CVec h12;                    // cross channel: beta * fhat_i * g_i
    CVec h22;                    // self channel:  beta * ghat_i * g_i
    double sigma_n2_sq = 0;      // per-component variance of the T2 noise
    double sigma_n2_tilde_sq = 0;  // after differential combining: exactly 2x

    // fhat/ghat follow the per-relay case flags: case I keeps the draw, case
    // II conjugates it (making the self-channel entry beta |g_i|^2 >= 0).
    static LinkRealization make(const std::vector<RelayCase>& case_flags,
                                CVec f, CVec g, double beta, double n0);
};

}  // namespace twrn
