#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "twrn/linalg.hpp"

namespace twrn {

// Per-relay dispersion behaviour: a relay forwards either its received vector
// or its conjugate, mapped through a fixed unitary matrix.
enum class RelayCase : std::uint8_t {
    ForwardSignal,     // column i of the block is O_i * r_i
    ForwardConjugate,  // column i of the block is O_i * conj(r_i)
};

struct RelaySet {
    std::string name;
    int n_relays = 0;                    // equals the block length T
    std::vector<CMat> matrices;          // O_i, each n x n unitary
    std::vector<RelayCase> case_flags;   // one per relay
};

// Unitary information matrices; a block carries log2(size) bits.
struct Codebook {
    std::string name;
    std::string modulation_label;
    std::vector<CMat> entries;

    int size() const { return static_cast<int>(entries.size()); }
    double bits_per_block() const;
};

struct CodeSelection {
    RelaySet relay_set;
    Codebook codebook;
};

// all-ones start vector, ||s||^2 = n
CVec reference_vector(int n);

// N=2 orthogonal set: O_1 = I (forward), O_2 = [[0,-1],[1,0]] (conjugate).
RelaySet build_alamouti_relay_set();

// N in {2,4}: real orthogonal dispersion sets where every relay forwards the
// unconjugated signal.  N=2 uses the plane rotation, N=4 the left-regular
// quaternion matrices.
RelaySet build_sorc_relay_set(int n);

// Information matrices commuting with the given relay set.
// Alamouti: scaled 2x2 orthogonal designs over an M-PSK pair (K = M^2).
// SORC-2:   plane rotations over a BPSK pair (K = 4).
// SORC-4:   scaled right-regular quaternion combinations over BPSK (K = 16).
Codebook build_unitary_codebook(const RelaySet& relays, int psk_order);

// Distributed code block: column i is O_i s (forward) or O_i conj(s).
CMat code_matrix(const RelaySet& relays, const CVec& s);

// Named configurations exposed on the command line.
// alamouti-bpsk, alamouti-qpsk, sorc2-bpsk, sorc4-bpsk
CodeSelection select_code(std::string_view name);
std::vector<std::string> known_code_names();

struct PropertyReport {
    double max_unitarity_error = 0;            // relay matrices and codewords
    double max_trace_orthogonality_error = 0;  // |tr(O_i^H O_j)|, i != j
    double max_commutation_error = 0;          // O_i U = U O_i (or conj form)
    double max_code_orthogonality_error = 0;   // S^H S = n I on random inputs
    double max_differential_error = 0;         // S(Us) = U S(s) on random inputs
    double min_codeword_distance = 0;          // min ||U_k - U_j||_F, k != j

    bool pass(double tol = 1e-12) const;
};

// Construction-time checks over the algebraic identities the scheme relies
// on; random inputs are drawn from the given seed.
PropertyReport verify_relay_and_code_properties(const RelaySet& relays,
                                                const Codebook& codebook,
                                                int random_trials = 16,
                                                std::uint64_t seed = 0x5eedULL);

}  // namespace twrn
