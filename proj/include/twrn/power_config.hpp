#pragma once

#include <stdexcept>

namespace twrn {

// Split of the total transmit power P between the two terminals and the
// relay bank: P1 = a1 P, P2 = a2 P, each relay gets (1 - a1 - a2) P / n.
struct PowerConfig {
    double p_total = 1.0;
    double alpha1 = 0.25;
    double alpha2 = 0.25;
    double n0 = 1.0;
    int n_relays = 2;

    double p1() const { return alpha1 * p_total; }
    double p2() const { return alpha2 * p_total; }
    double p_relay_each() const {
        return (1.0 - alpha1 - alpha2) * p_total / n_relays;
    }
    double snr() const { return p_total / n0; }

    void validate() const {
        if (!(p_total > 0)) throw std::invalid_argument("power: p_total must be > 0");
        if (!(n0 > 0)) throw std::invalid_argument("power: n0 must be > 0");
        if (n_relays < 1) throw std::invalid_argument("power: n_relays must be >= 1");
        if (!(alpha1 > 0) || !(alpha2 > 0) || !(alpha1 + alpha2 < 1))
            throw std::invalid_argument(
                "power: need alpha1 > 0, alpha2 > 0, alpha1 + alpha2 < 1");
    }

    static PowerConfig equal_split(double p_total, double n0, int n_relays) {
        PowerConfig pc;
        pc.p_total = p_total;
        pc.n0 = n0;
        pc.n_relays = n_relays;
        pc.alpha1 = pc.alpha2 = 1.0 / (n_relays + 2);
        pc.validate();
        return pc;
    }

    static PowerConfig split(double p_total, double alpha1, double alpha2,
                             double n0, int n_relays) {
        PowerConfig pc{p_total, alpha1, alpha2, n0, n_relays};
        pc.validate();
        return pc;
    }
};

}  // namespace twrn
