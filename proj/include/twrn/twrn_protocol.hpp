#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "twrn/channel_models.hpp"
#include "twrn/linalg.hpp"
#include "twrn/power_config.hpp"
#include "twrn/rng.hpp"
#include "twrn/stc_codebooks.hpp"

namespace twrn {

enum class Receiver : int {
    Differential = 0,  // blind: cancels self-interference with the estimate
    Genie = 1,         // blind structure but true self channel
    Coherent = 2,      // full CSI reference
};
inline constexpr int kNumReceivers = 3;
const char* receiver_name(Receiver r);

// Differential transmit state of the terminal pair.  Both vectors keep
// squared norm n by construction (codewords are unitary).
struct FrameState {
    int t = 0;
    CVec s_prev;  // T1 side
    CVec d_prev;  // T2 side

    static FrameState start(int n) {
        return {0, reference_vector(n), reference_vector(n)};
    }
};

// Noise drawn for one block: per-relay receiver noise plus the terminal
// noise on each downlink.  Split out so tests can replay the same draws
// through independent signal-path computations.
struct BlockNoise {
    std::vector<CVec> relay;  // v_i, length n each
    CVec w1, w2;

    static BlockNoise draw(int n_relays, double n0, RngStream& rng);
};

// index value for the pilot (first) block of a frame, which carries the
// reference vectors unrotated
inline constexpr int kReferenceBlock = -1;

struct BlockObservation {
    CVec y1, y2;      // received blocks at the two terminals
    int u_index = kReferenceBlock;  // information carried T1 -> T2
    int v_index = kReferenceBlock;  // information carried T2 -> T1
};

// s(t) = U s(t-1)
CVec differential_encode(const CMat& u, const CVec& s_prev);

// x = beta * O r (forward) or beta * O conj(r) (conjugate)
CVec relay_process(const CVec& r, const CMat& relay_matrix, RelayCase flag,
                   double beta);

// One full two-hop exchange through the relay bank under a fixed channel
// draw, simulated relay by relay.  Advances the frame state; u_index /
// v_index select codewords, or kReferenceBlock for the pilot block.
BlockObservation simulate_block(const CodeSelection& sel, FrameState& state,
                                int u_index, int v_index,
                                const LinkRealization& link,
                                const PowerConfig& power,
                                const BlockNoise& noise);
BlockObservation simulate_block(const CodeSelection& sel, FrameState& state,
                                int u_index, int v_index,
                                const LinkRealization& link,
                                const PowerConfig& power, RngStream& rng);

// Blind self-channel estimate from matched blocks:
//   hhat = (1 / (L n sqrt(p_self))) sum_l D(l)^H y(l)
// Unbiased because the codeword-bearing cross term averages to zero.
CVec estimate_self_channel(std::span<const CMat> own_code_matrices,
                           std::span<const CVec> received, double p_self, int n);

// Receiver-side feasibility projection: components whose relay conjugates
// are nonnegative reals by construction get clamped onto [0, inf).
CVec project_self_channel(CVec h, const std::vector<RelayCase>& case_flags);

// Cancel own contribution from both blocks with the given estimate, then
// pick argmin_k || ytilde(t) - U_k ytilde(t-1) ||.
int cancel_and_detect(const CVec& y_t, const CVec& y_tm1, const CVec& h_self,
                      const CMat& own_mat_t, const CMat& own_mat_tm1,
                      double p_self, const Codebook& codebook);

// Full-CSI reference: cancel with the true self channel and match against
// sqrt(p_other) U_k S_prev h_cross.
int coherent_detect(const CVec& y_t, const CMat& other_mat_prev,
                    const CVec& h_cross, const CVec& h_self,
                    const CMat& own_mat_t, double p_other, double p_self,
                    const Codebook& codebook);

struct FrameErrorCounts {
    std::uint64_t data_blocks = 0;  // detection trials (both terminals)
    std::uint64_t frames = 0;       // terminal-frames
    std::array<std::uint64_t, kNumReceivers> block_errors{};
    std::array<std::uint64_t, kNumReceivers> frame_errors{};

    FrameErrorCounts& operator+=(const FrameErrorCounts& o);
};

// Simulate one frame (pilot block + data blocks) and run all three
// receivers at both terminals.  frame_symbols must be a multiple of the
// block length with at least two blocks.  Randomness is consumed in a
// fixed order independent of the receiver set.
FrameErrorCounts run_frame(const CodeSelection& sel, const PowerConfig& power,
                           const ChannelStats& stats,
                           const FadingProcess& fading, int frame_symbols,
                           RngStream& rng);

}  // namespace twrn
