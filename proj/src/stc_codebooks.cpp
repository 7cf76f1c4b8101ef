#include "twrn/stc_codebooks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "twrn/rng.hpp"

namespace twrn {

namespace {

CMat real_mat(int n, std::initializer_list<double> entries) {
    CMat m(n, n);
    auto it = entries.begin();
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = *it++;
    return m;
}

// right-regular quaternion basis (multiplication by i, j, k on the right);
// commutes entrywise with the left-regular set used for the relays
CMat quat_right(int which) {
    switch (which) {
        case 1:
            return real_mat(4, {0, -1, 0, 0,
                                1, 0, 0, 0,
                                0, 0, 0, 1,
                                0, 0, -1, 0});
        case 2:
            return real_mat(4, {0, 0, -1, 0,
                                0, 0, 0, -1,
                                1, 0, 0, 0,
                                0, 1, 0, 0});
        default:
            return real_mat(4, {0, 0, 0, -1,
                                0, 0, 1, 0,
                                0, -1, 0, 0,
                                1, 0, 0, 0});
    }
}

CMat quat_left(int which) {
    switch (which) {
        case 1:
            return real_mat(4, {0, -1, 0, 0,
                                1, 0, 0, 0,
                                0, 0, 0, -1,
                                0, 0, 1, 0});
        case 2:
            return real_mat(4, {0, 0, -1, 0,
                                0, 0, 0, 1,
                                1, 0, 0, 0,
                                0, -1, 0, 0});
        default:
            return real_mat(4, {0, 0, 0, -1,
                                0, 0, -1, 0,
                                0, 1, 0, 0,
                                1, 0, 0, 0});
    }
}

}  // namespace

double Codebook::bits_per_block() const { return std::log2(double(size())); }

CVec reference_vector(int n) {
    if (n < 1) throw std::invalid_argument("reference_vector: n must be >= 1");
    return CVec::Ones(n);
}

RelaySet build_alamouti_relay_set() {
    RelaySet rs;
    rs.name = "alamouti";
    rs.n_relays = 2;
    rs.matrices = {CMat::Identity(2, 2), real_mat(2, {0, -1, 1, 0})};
    rs.case_flags = {RelayCase::ForwardSignal, RelayCase::ForwardConjugate};
    return rs;
}

RelaySet build_sorc_relay_set(int n) {
    RelaySet rs;
    rs.n_relays = n;
    if (n == 2) {
        rs.name = "sorc2";
        rs.matrices = {CMat::Identity(2, 2), real_mat(2, {0, -1, 1, 0})};
    } else if (n == 4) {
        rs.name = "sorc4";
        rs.matrices = {CMat::Identity(4, 4), quat_left(1), quat_left(2), quat_left(3)};
    } else {
        throw std::invalid_argument("build_sorc_relay_set: n must be 2 or 4");
    }
    rs.case_flags.assign(n, RelayCase::ForwardSignal);
    return rs;
}

Codebook build_unitary_codebook(const RelaySet& relays, int psk_order) {
    if (psk_order < 2) throw std::invalid_argument("psk_order must be >= 2");
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    Codebook cb;

    auto psk = [&](int idx) {
        double phi = 2.0 * std::numbers::pi * idx / psk_order;
        return Complex{std::cos(phi), std::sin(phi)};
    };

    cb.modulation_label = psk_order == 2   ? "BPSK"
                          : psk_order == 4 ? "QPSK"
                                           : std::to_string(psk_order) + "-PSK";

    if (relays.name == "alamouti") {
        // scaled orthogonal design over an M-PSK symbol pair
        cb.name = "alamouti-" + std::string(psk_order == 2 ? "bpsk" : psk_order == 4 ? "qpsk" : "psk" + std::to_string(psk_order));
        for (int a = 0; a < psk_order; ++a) {
            for (int b = 0; b < psk_order; ++b) {
                Complex u1 = psk(a), u2 = psk(b);
                CMat u(2, 2);
                u << u1, -std::conj(u2), u2, std::conj(u1);
                cb.entries.push_back(inv_sqrt2 * u);
            }
        }
        return cb;
    }

    if (relays.name == "sorc2") {
        if (psk_order != 2)
            throw std::invalid_argument("sorc2 codebook is defined over BPSK");
        cb.name = "sorc2-bpsk";
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                double u1 = a ? -1.0 : 1.0, u2 = b ? -1.0 : 1.0;
                CMat u(2, 2);
                u << u1, -u2, u2, u1;
                cb.entries.push_back(inv_sqrt2 * u);
            }
        }
        return cb;
    }

    if (relays.name == "sorc4") {
        if (psk_order != 2)
            throw std::invalid_argument("sorc4 codebook is defined over BPSK");
        cb.name = "sorc4-bpsk";
        const CMat r1 = CMat::Identity(4, 4);
        const CMat r2 = quat_right(1), r3 = quat_right(2), r4 = quat_right(3);
        for (int mask = 0; mask < 16; ++mask) {
            double u1 = (mask & 1) ? -1.0 : 1.0;
            double u2 = (mask & 2) ? -1.0 : 1.0;
            double u3 = (mask & 4) ? -1.0 : 1.0;
            double u4 = (mask & 8) ? -1.0 : 1.0;
            cb.entries.push_back(0.5 * (u1 * r1 + u2 * r2 + u3 * r3 + u4 * r4));
        }
        return cb;
    }

    throw std::invalid_argument("unknown relay set: " + relays.name);
}

CMat code_matrix(const RelaySet& relays, const CVec& s) {
    const int n = relays.n_relays;
    if (s.size() != n)
        throw std::invalid_argument("code_matrix: vector length does not match relay count");
    CMat out(n, n);
    for (int i = 0; i < n; ++i) {
        if (relays.case_flags[i] == RelayCase::ForwardSignal)
            out.col(i) = relays.matrices[i] * s;
        else
            out.col(i) = relays.matrices[i] * s.conjugate();
    }
    return out;
}

CodeSelection select_code(std::string_view name) {
    if (name == "alamouti-bpsk")
        return {build_alamouti_relay_set(),
                build_unitary_codebook(build_alamouti_relay_set(), 2)};
    if (name == "alamouti-qpsk")
        return {build_alamouti_relay_set(),
                build_unitary_codebook(build_alamouti_relay_set(), 4)};
    if (name == "sorc2-bpsk")
        return {build_sorc_relay_set(2),
                build_unitary_codebook(build_sorc_relay_set(2), 2)};
    if (name == "sorc4-bpsk")
        return {build_sorc_relay_set(4),
                build_unitary_codebook(build_sorc_relay_set(4), 2)};
    throw std::invalid_argument("unknown code name: " + std::string(name));
}

std::vector<std::string> known_code_names() {
    return {"alamouti-bpsk", "alamouti-qpsk", "sorc2-bpsk", "sorc4-bpsk"};
}

bool PropertyReport::pass(double tol) const {
    return max_unitarity_error <= tol && max_trace_orthogonality_error <= tol &&
           max_commutation_error <= tol && max_code_orthogonality_error <= tol &&
           max_differential_error <= tol && min_codeword_distance > tol;
}

PropertyReport verify_relay_and_code_properties(const RelaySet& relays,
                                                const Codebook& codebook,
                                                int random_trials,
                                                std::uint64_t seed) {
    const int n = relays.n_relays;
    PropertyReport rep;

    for (const CMat& o : relays.matrices)
        rep.max_unitarity_error = std::max(rep.max_unitarity_error, unitarity_error(o));
    for (const CMat& u : codebook.entries)
        rep.max_unitarity_error = std::max(rep.max_unitarity_error, unitarity_error(u));

    for (size_t i = 0; i < relays.matrices.size(); ++i)
        for (size_t j = i + 1; j < relays.matrices.size(); ++j) {
            double t = std::abs((relays.matrices[i].adjoint() * relays.matrices[j]).trace());
            rep.max_trace_orthogonality_error = std::max(rep.max_trace_orthogonality_error, t);
        }

    // the commutation that turns the block recursion into S(t) = U S(t-1):
    // forward relays need O_i U = U O_i, conjugating relays O_i conj(U) = U O_i
    for (size_t i = 0; i < relays.matrices.size(); ++i) {
        const CMat& o = relays.matrices[i];
        for (const CMat& u : codebook.entries) {
            CMat lhs = (relays.case_flags[i] == RelayCase::ForwardSignal)
                           ? CMat(o * u)
                           : CMat(o * u.conjugate());
            rep.max_commutation_error =
                std::max(rep.max_commutation_error, max_abs(lhs - u * o));
        }
    }

    // random points of the reachable signal set: products of codewords
    // applied to the start vector (SORC trajectories stay real, Alamouti's
    // are complex; drawing arbitrary complex vectors would test a stronger
    // property than the scheme needs)
    RngStream rng(RngStream::mix_key(seed, {0x51c0deULL}));
    for (int trial = 0; trial < random_trials; ++trial) {
        CVec s = reference_vector(n);
        const int hops = 1 + int(rng.uniform_int(6));
        for (int h = 0; h < hops; ++h)
            s = codebook.entries[rng.uniform_int(codebook.size())] * s;
        CMat sm = code_matrix(relays, s);
        rep.max_code_orthogonality_error =
            std::max(rep.max_code_orthogonality_error,
                     max_abs(sm.adjoint() * sm - double(n) * CMat::Identity(n, n)));
        for (const CMat& u : codebook.entries) {
            CMat direct = code_matrix(relays, u * s);
            rep.max_differential_error =
                std::max(rep.max_differential_error, max_abs(direct - u * sm));
        }
    }

    rep.min_codeword_distance = std::numeric_limits<double>::infinity();
    for (int k = 0; k < codebook.size(); ++k)
        for (int j = k + 1; j < codebook.size(); ++j)
            rep.min_codeword_distance =
                std::min(rep.min_codeword_distance,
                         (codebook.entries[k] - codebook.entries[j]).norm());
    return rep;
}

}  // namespace twrn
