#include "twrn/twrn_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twrn {

const char* receiver_name(Receiver r) {
    switch (r) {
        case Receiver::Differential: return "differential";
        case Receiver::Genie: return "genie";
        default: return "coherent";
    }
}

BlockNoise BlockNoise::draw(int n_relays, double n0, RngStream& rng) {
    BlockNoise bn;
    bn.relay.reserve(n_relays);
    for (int i = 0; i < n_relays; ++i) bn.relay.push_back(awgn(n0, n_relays, rng));
    bn.w1 = awgn(n0, n_relays, rng);
    bn.w2 = awgn(n0, n_relays, rng);
    return bn;
}

CVec differential_encode(const CMat& u, const CVec& s_prev) {
    if (u.rows() != u.cols() || u.rows() != s_prev.size())
        throw std::invalid_argument("differential_encode: dimension mismatch");
    return u * s_prev;
}

CVec relay_process(const CVec& r, const CMat& relay_matrix, RelayCase flag,
                   double beta) {
    if (relay_matrix.cols() != r.size())
        throw std::invalid_argument("relay_process: dimension mismatch");
    if (!(beta >= 0)) throw std::invalid_argument("relay_process: beta must be >= 0");
    if (flag == RelayCase::ForwardSignal) return beta * (relay_matrix * r);
    return beta * (relay_matrix * r.conjugate());
}

namespace {

// channel access for one block; constant draw or per-slot track
struct SlotChannels {
    bool time_varying = false;
    const CVec* fq = nullptr;
    const CVec* gq = nullptr;
    const CMat* fm = nullptr;
    const CMat* gm = nullptr;

    Complex f(int link, int slot) const {
        return time_varying ? (*fm)(link, slot) : (*fq)(link);
    }
    Complex g(int link, int slot) const {
        return time_varying ? (*gm)(link, slot) : (*gq)(link);
    }
};

// two-hop exchange of one block, relay by relay; slot0 is the first uplink
// sample index of this block
void emit_block(const CodeSelection& sel, const CVec& s, const CVec& d,
                const PowerConfig& power, double beta, const SlotChannels& ch,
                int slot0, const BlockNoise& noise, CVec& y1, CVec& y2) {
    const int n = sel.relay_set.n_relays;
    const double sp1 = std::sqrt(power.p1());
    const double sp2 = std::sqrt(power.p2());
    y1 = noise.w1;
    y2 = noise.w2;
    CVec r(n);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < n; ++m)
            r(m) = sp1 * ch.f(i, slot0 + m) * s(m) + sp2 * ch.g(i, slot0 + m) * d(m) +
                   noise.relay[i](m);
        CVec x = relay_process(r, sel.relay_set.matrices[i],
                               sel.relay_set.case_flags[i], beta);
        for (int m = 0; m < n; ++m) {
            y1(m) += ch.f(i, slot0 + n + m) * x(m);
            y2(m) += ch.g(i, slot0 + n + m) * x(m);
        }
    }
}

void check_state(const FrameState& state, int n) {
    if (state.s_prev.size() != n || state.d_prev.size() != n)
        throw std::invalid_argument("frame state does not match relay count");
    if (std::abs(state.s_prev.squaredNorm() - n) > 1e-9 ||
        std::abs(state.d_prev.squaredNorm() - n) > 1e-9)
        throw std::logic_error("frame state norm drifted from block length");
}

int detect_min(const CVec& ytilde_t, const CVec& ytilde_tm1,
               const Codebook& codebook) {
    int best = 0;
    double best_metric = (ytilde_t - codebook.entries[0] * ytilde_tm1).squaredNorm();
    for (int k = 1; k < codebook.size(); ++k) {
        double m = (ytilde_t - codebook.entries[k] * ytilde_tm1).squaredNorm();
        if (m < best_metric) {
            best_metric = m;
            best = k;
        }
    }
    return best;
}

}  // namespace

BlockObservation simulate_block(const CodeSelection& sel, FrameState& state,
                                int u_index, int v_index,
                                const LinkRealization& link,
                                const PowerConfig& power,
                                const BlockNoise& noise) {
    const int n = sel.relay_set.n_relays;
    check_state(state, n);
    const int size = sel.codebook.size();
    if ((u_index != kReferenceBlock && (u_index < 0 || u_index >= size)) ||
        (v_index != kReferenceBlock && (v_index < 0 || v_index >= size)))
        throw std::invalid_argument("simulate_block: codeword index out of range");

    CVec s = (u_index == kReferenceBlock)
                 ? state.s_prev
                 : differential_encode(sel.codebook.entries[u_index], state.s_prev);
    CVec d = (v_index == kReferenceBlock)
                 ? state.d_prev
                 : differential_encode(sel.codebook.entries[v_index], state.d_prev);

    SlotChannels ch;
    ch.fq = &link.f;
    ch.gq = &link.g;

    BlockObservation obs;
    obs.u_index = u_index;
    obs.v_index = v_index;
    emit_block(sel, s, d, power, link.beta, ch, 0, noise, obs.y1, obs.y2);

    state.s_prev = std::move(s);
    state.d_prev = std::move(d);
    state.t += 1;
    return obs;
}

BlockObservation simulate_block(const CodeSelection& sel, FrameState& state,
                                int u_index, int v_index,
                                const LinkRealization& link,
                                const PowerConfig& power, RngStream& rng) {
    BlockNoise noise = BlockNoise::draw(sel.relay_set.n_relays, power.n0, rng);
    return simulate_block(sel, state, u_index, v_index, link, power, noise);
}

CVec estimate_self_channel(std::span<const CMat> own_code_matrices,
                           std::span<const CVec> received, double p_self, int n) {
    if (own_code_matrices.size() != received.size() || own_code_matrices.empty())
        throw std::invalid_argument("estimate_self_channel: need matched, nonempty spans");
    if (!(p_self > 0))
        throw std::invalid_argument("estimate_self_channel: p_self must be > 0");
    if (own_code_matrices[0].rows() != n || received[0].size() != n)
        throw std::invalid_argument("estimate_self_channel: dimension mismatch");
    CVec acc = CVec::Zero(n);
    for (size_t l = 0; l < received.size(); ++l)
        acc += own_code_matrices[l].adjoint() * received[l];
    return acc / (double(received.size()) * double(n) * std::sqrt(p_self));
}

CVec project_self_channel(CVec h, const std::vector<RelayCase>& case_flags) {
    if (h.size() != Eigen::Index(case_flags.size()))
        throw std::invalid_argument("project_self_channel: dimension mismatch");
    for (Eigen::Index i = 0; i < h.size(); ++i)
        if (case_flags[i] == RelayCase::ForwardConjugate)
            h(i) = Complex{std::max(h(i).real(), 0.0), 0.0};
    return h;
}

int cancel_and_detect(const CVec& y_t, const CVec& y_tm1, const CVec& h_self,
                      const CMat& own_mat_t, const CMat& own_mat_tm1,
                      double p_self, const Codebook& codebook) {
    const double sp = std::sqrt(p_self);
    CVec yt = y_t - sp * (own_mat_t * h_self);
    CVec yp = y_tm1 - sp * (own_mat_tm1 * h_self);
    return detect_min(yt, yp, codebook);
}

int coherent_detect(const CVec& y_t, const CMat& other_mat_prev,
                    const CVec& h_cross, const CVec& h_self,
                    const CMat& own_mat_t, double p_other, double p_self,
                    const Codebook& codebook) {
    CVec z = y_t - std::sqrt(p_self) * (own_mat_t * h_self);
    CVec ref = std::sqrt(p_other) * (other_mat_prev * h_cross);
    int best = 0;
    double best_metric = (z - codebook.entries[0] * ref).squaredNorm();
    for (int k = 1; k < codebook.size(); ++k) {
        double m = (z - codebook.entries[k] * ref).squaredNorm();
        if (m < best_metric) {
            best_metric = m;
            best = k;
        }
    }
    return best;
}

FrameErrorCounts& FrameErrorCounts::operator+=(const FrameErrorCounts& o) {
    data_blocks += o.data_blocks;
    frames += o.frames;
    for (int r = 0; r < kNumReceivers; ++r) {
        block_errors[r] += o.block_errors[r];
        frame_errors[r] += o.frame_errors[r];
    }
    return *this;
}

namespace {

// one terminal's detection pass over a stored frame
void detect_terminal(const CodeSelection& sel, const std::vector<CVec>& y,
                     const std::vector<CMat>& own_mats,
                     const std::vector<CMat>& other_mats, double p_self,
                     double p_other,
                     const std::vector<CVec>& h_self_blocks,
                     const std::vector<CVec>& h_cross_blocks,
                     const std::vector<int>& truth, bool drifting,
                     FrameErrorCounts& out) {
    const int n = sel.relay_set.n_relays;
    const int blocks = static_cast<int>(y.size());
    const double inv = 1.0 / (double(n) * std::sqrt(p_self));
    const double sp_self = std::sqrt(p_self);

    std::vector<CVec> contribs(blocks);
    CVec total = CVec::Zero(n);
    for (int t = 0; t < blocks; ++t) {
        contribs[t] = (own_mats[t].adjoint() * y[t]) * inv;
        total += contribs[t];
    }

    bool frame_err[kNumReceivers] = {};
    std::vector<int> decided(blocks, kReferenceBlock);
    for (int t = 1; t < blocks; ++t) {
        // blind estimate from all blocks except the pair under detection
        CVec raw = (blocks > 2)
                       ? CVec((total - contribs[t] - contribs[t - 1]) / double(blocks - 2))
                       : CVec(total / double(blocks));
        CVec hhat = project_self_channel(std::move(raw), sel.relay_set.case_flags);

        decided[t] = cancel_and_detect(y[t], y[t - 1], hhat, own_mats[t],
                                       own_mats[t - 1], p_self, sel.codebook);

        CVec yt = y[t] - sp_self * (own_mats[t] * h_self_blocks[t]);
        CVec yp = y[t - 1] - sp_self * (own_mats[t - 1] * h_self_blocks[t - 1]);
        int k_genie = detect_min(yt, yp, sel.codebook);

        int k_coh = coherent_detect(y[t], other_mats[t - 1], h_cross_blocks[t],
                                    h_self_blocks[t], own_mats[t], p_other, p_self,
                                    sel.codebook);

        if (k_genie != truth[t]) {
            ++out.block_errors[int(Receiver::Genie)];
            frame_err[int(Receiver::Genie)] = true;
        }
        if (k_coh != truth[t]) {
            ++out.block_errors[int(Receiver::Coherent)];
            frame_err[int(Receiver::Coherent)] = true;
        }
    }

    // Decision-directed refinement: the pass-1 cancellation is limited by the
    // cross term the other terminal's codewords leave in the running average
    // (its variance grows with SNR for a fixed frame length).  Differencing
    // each pair with the decided codeword cancels that term exactly when the
    // decision is right,
    //   y(t) - U y(t-1) = sqrt(p_self) (D(t) - U D(t-1)) h_self + noise,
    // leaving a linear fit for the self channel in which a wrong decision
    // corrupts only its own pair.  Such pairs are trimmed as residual
    // outliers, and re-detection with the refined estimate repairs them.
    // Under time-selective fading the self channel moves a few percent over
    // the frame, so the fit carries a linear drift term and each pair is
    // re-detected with the estimate interpolated at its own position.
    const int order = drifting ? 2 : 1;
    const int cols = order * n;
    const double mid = 0.5 * double(blocks - 1);
    auto pos = [&](int t) { return (double(t) - mid) / double(blocks); };
    std::vector<int> previous;
    const int pairs = blocks - 1;
    for (int pass = 0; pass < 5 && pairs >= order + 1; ++pass) {
        CMat a = CMat::Zero(pairs * n, cols);
        CVec b(pairs * n);
        for (int t = 1; t < blocks; ++t) {
            const CMat& u = sel.codebook.entries[decided[t]];
            a.block((t - 1) * n, 0, n, n) =
                sp_self * (own_mats[t] - u * own_mats[t - 1]);
            if (drifting)
                a.block((t - 1) * n, n, n, n) =
                    sp_self * (pos(t) * own_mats[t] -
                               pos(t - 1) * (u * own_mats[t - 1]));
            b.segment((t - 1) * n, n) = y[t] - u * y[t - 1];
        }
        CVec fit = a.colPivHouseholderQr().solve(b);

        std::vector<double> res(pairs);
        for (int t = 0; t < pairs; ++t)
            res[t] = (a.middleRows(t * n, n) * fit - b.segment(t * n, n))
                         .squaredNorm();
        std::vector<double> sorted = res;
        std::nth_element(sorted.begin(), sorted.begin() + pairs / 2, sorted.end());
        const double cut = 4.0 * sorted[pairs / 2];
        std::vector<int> keep;
        for (int t = 0; t < pairs; ++t)
            if (res[t] <= cut) keep.push_back(t);
        if (int(keep.size()) > order && int(keep.size()) < pairs) {
            CMat ak(int(keep.size()) * n, cols);
            CVec bk(int(keep.size()) * n);
            for (size_t r = 0; r < keep.size(); ++r) {
                ak.middleRows(int(r) * n, n) = a.middleRows(keep[r] * n, n);
                bk.segment(int(r) * n, n) = b.segment(keep[r] * n, n);
            }
            fit = ak.colPivHouseholderQr().solve(bk);
        }

        for (int t = 1; t < blocks; ++t) {
            CVec local = fit.head(n);
            if (drifting)
                local += 0.5 * (pos(t) + pos(t - 1)) * fit.tail(n);
            CVec refined =
                project_self_channel(std::move(local), sel.relay_set.case_flags);
            decided[t] = cancel_and_detect(y[t], y[t - 1], refined, own_mats[t],
                                           own_mats[t - 1], p_self, sel.codebook);
        }
        if (decided == previous) break;
        previous = decided;
    }
    for (int t = 1; t < blocks; ++t)
        if (decided[t] != truth[t]) {
            ++out.block_errors[int(Receiver::Differential)];
            frame_err[int(Receiver::Differential)] = true;
        }
    out.data_blocks += blocks - 1;
    out.frames += 1;
    for (int r = 0; r < kNumReceivers; ++r)
        if (frame_err[r]) ++out.frame_errors[r];
}

}  // namespace

FrameErrorCounts run_frame(const CodeSelection& sel, const PowerConfig& power,
                           const ChannelStats& stats,
                           const FadingProcess& fading, int frame_symbols,
                           RngStream& rng) {
    power.validate();
    stats.validate();
    fading.validate();
    const int n = sel.relay_set.n_relays;
    if (power.n_relays != n)
        throw std::invalid_argument("run_frame: power.n_relays does not match code");
    if (frame_symbols % n != 0 || frame_symbols / n < 2)
        throw std::invalid_argument(
            "run_frame: frame_symbols must be a multiple of the block length, >= 2 blocks");
    const int blocks = frame_symbols / n;
    const int k_size = sel.codebook.size();
    const double beta =
        compute_beta(power.p_relay_each(), power.p1(), power.p2(), stats, power.n0);

    // fixed draw order: channel track, then per block (u, v, noise)
    const bool tv = fading.kind == FadingKind::Jakes;
    CVec fq, gq;
    CMat fm, gm;
    SlotChannels ch;
    ch.time_varying = tv;
    if (tv) {
        std::tie(fm, gm) = sample_jakes(stats, n, fading.doppler_hz,
                                        fading.symbol_period_s, 2 * n * blocks, rng);
        ch.fm = &fm;
        ch.gm = &gm;
    } else {
        std::tie(fq, gq) = sample_quasi_static(stats, n, rng);
        ch.fq = &fq;
        ch.gq = &gq;
    }

    FrameState st = FrameState::start(n);
    std::vector<CVec> y1(blocks), y2(blocks);
    std::vector<CMat> s_mats(blocks), d_mats(blocks);
    std::vector<int> u_idx(blocks), v_idx(blocks);
    // genie references per block (start-of-block coefficients when fading)
    std::vector<CVec> h12_2(blocks), h22_2(blocks), h12_1(blocks), h22_1(blocks);

    for (int t = 0; t < blocks; ++t) {
        u_idx[t] = (t == 0) ? kReferenceBlock : int(rng.uniform_int(k_size));
        v_idx[t] = (t == 0) ? kReferenceBlock : int(rng.uniform_int(k_size));
        BlockNoise noise = BlockNoise::draw(n, power.n0, rng);

        CVec s = (t == 0) ? st.s_prev
                          : differential_encode(sel.codebook.entries[u_idx[t]], st.s_prev);
        CVec d = (t == 0) ? st.d_prev
                          : differential_encode(sel.codebook.entries[v_idx[t]], st.d_prev);
        emit_block(sel, s, d, power, beta, ch, 2 * n * t, noise, y1[t], y2[t]);
        s_mats[t] = code_matrix(sel.relay_set, s);
        d_mats[t] = code_matrix(sel.relay_set, d);
        st.s_prev = std::move(s);
        st.d_prev = std::move(d);
        st.t += 1;

        CVec fcol(n), gcol(n);
        for (int i = 0; i < n; ++i) {
            fcol(i) = ch.f(i, 2 * n * t);
            gcol(i) = ch.g(i, 2 * n * t);
        }
        LinkRealization l2 = LinkRealization::make(sel.relay_set.case_flags, fcol,
                                                   gcol, beta, power.n0);
        LinkRealization l1 = LinkRealization::make(sel.relay_set.case_flags,
                                                   std::move(gcol), std::move(fcol),
                                                   beta, power.n0);
        h12_2[t] = std::move(l2.h12);
        h22_2[t] = std::move(l2.h22);
        h12_1[t] = std::move(l1.h12);
        h22_1[t] = std::move(l1.h22);
    }

    FrameErrorCounts out;
    // T2 decodes the u-stream behind its own d-chain ...
    detect_terminal(sel, y2, d_mats, s_mats, power.p2(), power.p1(), h22_2, h12_2,
                    u_idx, tv, out);
    // ... and T1 the v-stream behind its s-chain
    detect_terminal(sel, y1, s_mats, d_mats, power.p1(), power.p2(), h22_1, h12_1,
                    v_idx, tv, out);
    return out;
}

}  // namespace twrn
