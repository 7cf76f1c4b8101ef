#include "twrn/validate_suite.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "twrn/channel_models.hpp"
#include "twrn/pep_analysis.hpp"
#include "twrn/power_config.hpp"
#include "twrn/rng.hpp"
#include "twrn/sim_harness.hpp"
#include "twrn/stc_codebooks.hpp"
#include "twrn/twrn_protocol.hpp"

namespace twrn {

namespace {

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// relay-noise image at T2 for one block: sum_i beta g_i O_i vhat_i + w
CVec noise_at_terminal(const CodeSelection& sel, const LinkRealization& link,
                       const BlockNoise& bn) {
    const int n = sel.relay_set.n_relays;
    CVec out = bn.w2;
    for (int i = 0; i < n; ++i) {
        CVec vh = (sel.relay_set.case_flags[i] == RelayCase::ForwardSignal)
                      ? bn.relay[i]
                      : CVec(bn.relay[i].conjugate());
        out += link.beta * link.g(i) * (sel.relay_set.matrices[i] * vh);
    }
    return out;
}

}  // namespace

std::vector<CheckResult> run_validate_suite() {
    std::vector<CheckResult> results;
    auto check = [&](const std::string& name, const std::function<CheckResult()>& fn) {
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.name = name;
        results.push_back(std::move(r));
    };

    for (const std::string& name : known_code_names()) {
        check("code-properties-" + name, [&]() -> CheckResult {
            CodeSelection sel = select_code(name);
            PropertyReport rep =
                verify_relay_and_code_properties(sel.relay_set, sel.codebook);
            double worst = std::max({rep.max_unitarity_error,
                                     rep.max_trace_orthogonality_error,
                                     rep.max_commutation_error,
                                     rep.max_code_orthogonality_error,
                                     rep.max_differential_error});
            return {"", rep.pass(1e-12),
                    fmt("worst identity error %.3g, min distance %.6g", worst,
                        rep.min_codeword_distance)};
        });
    }

    check("exp-integral-pins", []() -> CheckResult {
        double e1 = exp_integral_ei(-1.0);
        double err1 = std::abs(e1 + 0.2193839);
        double err2 = std::abs(exp_integral_ei(-0.1) + 1.8229239584193906);
        double err3 = std::abs(exp_integral_ei(-10.0) + 4.156968929685324e-6);
        bool ok = err1 <= 1e-6 && err2 <= 1e-12 && err3 <= 1e-18;
        return {"", ok, fmt("Ei(-1) = %.10f (pin error %.3g)", e1, err1)};
    });

    check("quadrature-convergence", []() -> CheckResult {
        RVec m2(2);
        m2 << 40.0, 400.0;
        RVec m4(4);
        m4 << 25.0, 50.0, 100.0, 200.0;
        double worst = 0;
        for (const RVec& m : {m2, m4}) {
            PepParams p = PepParams::from_m_values(m);
            double a = pep_mgf(p, 128), b = pep_mgf(p, 256);
            worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
        return {"", worst < 1e-10, fmt("rel change 128 -> 256 nodes: %.3g", worst)};
    });

    check("gaussian-average-identity", []() -> CheckResult {
        CMat b(3, 3);
        b << Complex(1.1, 0), Complex(0.3, 0.2), Complex(0, 0),
             Complex(0.3, -0.2), Complex(1.0, 0), Complex(0.1, -0.1),
             Complex(0, 0), Complex(0.1, 0.1), Complex(1.5, 0);
        RngStream rng = RngStream::substream(0x11, {1});
        auto [mc, closed] = gaussian_integral_check(b, 200000, rng);
        double rel = std::abs(mc - closed) / closed;
        return {"", rel < 0.02, fmt("monte carlo %.6g vs closed %.6g (rel %.3g)", mc, closed, rel)};
    });

    check("combined-noise-doubling", []() -> CheckResult {
        CodeSelection sel = select_code("alamouti-bpsk");
        ChannelStats stats{1.0, 1.0};
        PowerConfig power = PowerConfig::equal_split(1.0, 0.05, 2);
        RngStream rng = RngStream::substream(0x22, {1});
        auto [f, g] = sample_quasi_static(stats, 2, rng);
        double beta = compute_beta(power.p_relay_each(), power.p1(), power.p2(),
                                   stats, power.n0);
        LinkRealization link = LinkRealization::make(sel.relay_set.case_flags, f, g,
                                                     beta, power.n0);
        const CMat& u = sel.codebook.entries[1];
        double acc_single = 0, acc_diff = 0;
        const int reps = 100000;
        for (int r = 0; r < reps; ++r) {
            BlockNoise a = BlockNoise::draw(2, power.n0, rng);
            BlockNoise b = BlockNoise::draw(2, power.n0, rng);
            CVec na = noise_at_terminal(sel, link, a);
            CVec nb = noise_at_terminal(sel, link, b);
            acc_single += na.squaredNorm() / 2.0;
            acc_diff += (na - u * nb).squaredNorm() / 2.0;
        }
        double var_single = acc_single / reps;
        double var_diff = acc_diff / reps;
        double err_model = std::abs(var_single - link.sigma_n2_sq) / link.sigma_n2_sq;
        double err_double = std::abs(var_diff - link.sigma_n2_tilde_sq) / link.sigma_n2_tilde_sq;
        bool ok = err_model < 0.02 && err_double < 0.02;
        return {"", ok,
                fmt("var %.5g (model rel err %.3g), doubling rel err %.3g", var_single,
                    err_model, err_double)};
    });

    check("relay-power-normalization", []() -> CheckResult {
        CodeSelection sel = select_code("alamouti-bpsk");
        ChannelStats stats{1.0, 1.0};
        PowerConfig power = PowerConfig::equal_split(1.0, 0.1, 2);
        double beta = compute_beta(power.p_relay_each(), power.p1(), power.p2(),
                                   stats, power.n0);
        RngStream rng = RngStream::substream(0x33, {1});
        double acc = 0;
        const int reps = 200000;
        FrameState st = FrameState::start(2);
        const double sp1 = std::sqrt(power.p1()), sp2 = std::sqrt(power.p2());
        for (int r = 0; r < reps; ++r) {
            auto [f, g] = sample_quasi_static(stats, 2, rng);
            CVec v = awgn(power.n0, 2, rng);
            CVec rx = sp1 * f(0) * st.s_prev + sp2 * g(0) * st.d_prev + v;
            CVec x = relay_process(rx, sel.relay_set.matrices[0],
                                   sel.relay_set.case_flags[0], beta);
            acc += x.squaredNorm() / 2.0;
        }
        double mean_power = acc / reps;
        double rel = std::abs(mean_power - power.p_relay_each()) / power.p_relay_each();
        return {"", rel < 0.02,
                fmt("mean relay power %.5g vs budget %.5g (rel %.3g)", mean_power,
                    power.p_relay_each(), rel)};
    });

    check("self-channel-estimator-unbiased", []() -> CheckResult {
        CodeSelection sel = select_code("alamouti-bpsk");
        ChannelStats stats{1.0, 1.0};
        PowerConfig power = PowerConfig::equal_split(1.0, 0.1, 2);
        RngStream rng = RngStream::substream(0x44, {1});
        auto [f, g] = sample_quasi_static(stats, 2, rng);
        double beta = compute_beta(power.p_relay_each(), power.p1(), power.p2(),
                                   stats, power.n0);
        LinkRealization link = LinkRealization::make(sel.relay_set.case_flags, f, g,
                                                     beta, power.n0);
        const int L = 20000;
        FrameState st = FrameState::start(2);
        std::vector<CMat> d_mats;
        std::vector<CVec> ys;
        d_mats.reserve(L);
        ys.reserve(L);
        for (int l = 0; l < L; ++l) {
            int u = (l == 0) ? kReferenceBlock : int(rng.uniform_int(sel.codebook.size()));
            int v = (l == 0) ? kReferenceBlock : int(rng.uniform_int(sel.codebook.size()));
            BlockObservation obs = simulate_block(sel, st, u, v, link, power, rng);
            d_mats.push_back(code_matrix(sel.relay_set, st.d_prev));
            ys.push_back(obs.y2);
        }
        CVec est = estimate_self_channel(d_mats, ys, power.p2(), 2);
        // per-component standard error from the per-block contributions
        double worst_sigmas = 0;
        for (int c = 0; c < 2; ++c) {
            double mr = 0, mi = 0, vr = 0, vi = 0;
            for (int l = 0; l < L; ++l) {
                Complex z = (d_mats[l].adjoint() * ys[l])(c) /
                            (2.0 * std::sqrt(power.p2()));
                mr += z.real();
                mi += z.imag();
                vr += z.real() * z.real();
                vi += z.imag() * z.imag();
            }
            mr /= L;
            mi /= L;
            vr = vr / L - mr * mr;
            vi = vi / L - mi * mi;
            double se_r = std::sqrt(vr / L), se_i = std::sqrt(vi / L);
            worst_sigmas = std::max(worst_sigmas,
                                    std::abs(est(c).real() - link.h22(c).real()) / se_r);
            worst_sigmas = std::max(worst_sigmas,
                                    std::abs(est(c).imag() - link.h22(c).imag()) / se_i);
        }
        return {"", worst_sigmas < 4.0,
                fmt("worst deviation %.2f standard errors over %.0f blocks",
                    worst_sigmas, double(L))};
    });

    check("codeword-chain-norm", []() -> CheckResult {
        double worst = 0;
        RngStream rng = RngStream::substream(0x55, {1});
        for (const std::string& name : known_code_names()) {
            CodeSelection sel = select_code(name);
            CVec s = reference_vector(sel.relay_set.n_relays);
            for (int step = 0; step < 2000; ++step)
                s = differential_encode(
                    sel.codebook.entries[rng.uniform_int(sel.codebook.size())], s);
            worst = std::max(worst,
                             std::abs(s.squaredNorm() - sel.relay_set.n_relays));
        }
        return {"", worst <= 1e-9, fmt("worst norm drift %.3g after 2000 steps", worst)};
    });

    check("per-relay-vs-closed-form", []() -> CheckResult {
        double worst = 0;
        RngStream rng = RngStream::substream(0x66, {1});
        for (const std::string& name : known_code_names()) {
            CodeSelection sel = select_code(name);
            const int n = sel.relay_set.n_relays;
            ChannelStats stats{1.0, 2.0};
            PowerConfig power = PowerConfig::split(1.0, 0.3, 0.2, 0.05, n);
            double beta = compute_beta(power.p_relay_each(), power.p1(), power.p2(),
                                       stats, power.n0);
            for (int trial = 0; trial < 8; ++trial) {
                auto [f, g] = sample_quasi_static(stats, n, rng);
                LinkRealization l2 = LinkRealization::make(sel.relay_set.case_flags,
                                                           f, g, beta, power.n0);
                LinkRealization l1 = LinkRealization::make(sel.relay_set.case_flags,
                                                           g, f, beta, power.n0);
                FrameState st = FrameState::start(n);
                int u = int(rng.uniform_int(sel.codebook.size()));
                int v = int(rng.uniform_int(sel.codebook.size()));
                BlockNoise bn = BlockNoise::draw(n, power.n0, rng);
                BlockObservation obs = simulate_block(sel, st, u, v, l2, power, bn);
                CMat s_mat = code_matrix(sel.relay_set, st.s_prev);
                CMat d_mat = code_matrix(sel.relay_set, st.d_prev);
                CVec y2_closed = std::sqrt(power.p1()) * (s_mat * l2.h12) +
                                 std::sqrt(power.p2()) * (d_mat * l2.h22) +
                                 noise_at_terminal(sel, l2, bn);
                BlockNoise bn1 = bn;
                bn1.w2 = bn.w1;  // T1 view reuses its own terminal noise
                CVec y1_closed = std::sqrt(power.p2()) * (d_mat * l1.h12) +
                                 std::sqrt(power.p1()) * (s_mat * l1.h22) +
                                 noise_at_terminal(sel, l1, bn1);
                worst = std::max({worst, max_abs(obs.y2 - y2_closed),
                                  max_abs(obs.y1 - y1_closed)});
            }
        }
        return {"", worst <= 1e-9, fmt("worst decomposition mismatch %.3g", worst)};
    });

    check("noise-free-detection-margin", []() -> CheckResult {
        RngStream rng = RngStream::substream(0x77, {1});
        bool all_ok = true;
        for (const std::string& name : known_code_names()) {
            CodeSelection sel = select_code(name);
            const int n = sel.relay_set.n_relays;
            ChannelStats stats{1.0, 1.0};
            PowerConfig power = PowerConfig::equal_split(1.0, 1e-3, n);
            double beta = compute_beta(power.p_relay_each(), power.p1(), power.p2(),
                                       stats, power.n0);
            for (int trial = 0; trial < 6; ++trial) {
                auto [f, g] = sample_quasi_static(stats, n, rng);
                LinkRealization link = LinkRealization::make(sel.relay_set.case_flags,
                                                             f, g, beta, power.n0);
                BlockNoise quiet;
                quiet.relay.assign(n, CVec::Zero(n));
                quiet.w1 = CVec::Zero(n);
                quiet.w2 = CVec::Zero(n);
                FrameState st = FrameState::start(n);
                BlockObservation first =
                    simulate_block(sel, st, kReferenceBlock, kReferenceBlock, link,
                                   power, quiet);
                CMat d_prev_mat = code_matrix(sel.relay_set, st.d_prev);
                int u = int(rng.uniform_int(sel.codebook.size()));
                int v = int(rng.uniform_int(sel.codebook.size()));
                BlockObservation second = simulate_block(sel, st, u, v, link, power, quiet);
                CMat d_mat = code_matrix(sel.relay_set, st.d_prev);
                int got = cancel_and_detect(second.y2, first.y2, link.h22, d_mat,
                                            d_prev_mat, power.p2(), sel.codebook);
                CVec h_pert = link.h22;
                for (int i = 0; i < n; ++i)
                    h_pert(i) += 1e-8 * rng.complex_gaussian(1.0);
                int got_pert = cancel_and_detect(second.y2, first.y2, h_pert, d_mat,
                                                 d_prev_mat, power.p2(), sel.codebook);
                if (got != u || got_pert != u) all_ok = false;
            }
        }
        return {"", all_ok, "noise-free decisions exact and stable to 1e-8 estimate shifts"};
    });

    return results;
}

}  // namespace twrn
