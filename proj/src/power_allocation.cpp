#include "twrn/power_allocation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twrn {

double opa_cost(double alpha1, double alpha2, double sigma_f_sq,
                double sigma_g_sq, int n_relays) {
    if (!(sigma_f_sq > 0) || !(sigma_g_sq > 0))
        throw std::invalid_argument("opa_cost: variances must be > 0");
    if (n_relays < 1) throw std::invalid_argument("opa_cost: n_relays must be >= 1");
    const double ar = 1.0 - alpha1 - alpha2;
    if (!(alpha1 > 0) || !(alpha2 > 0) || !(ar > 0))
        return std::numeric_limits<double>::infinity();
    const double num = (ar / n_relays) * sigma_f_sq * sigma_g_sq;
    const double mix = alpha1 * sigma_f_sq + alpha2 * sigma_g_sq;
    const double c_t2 = alpha1 * num / (8.0 * (ar * sigma_g_sq + mix));
    const double c_t1 = alpha2 * num / (8.0 * (ar * sigma_f_sq + mix));
    return std::pow(c_t1, -n_relays) + std::pow(c_t2, -n_relays);
}

AllocationResult solve_opa(double sigma_f_sq, double sigma_g_sq, int n_relays,
                           double tol, double p_total) {
    if (!(tol > 0)) throw std::invalid_argument("solve_opa: tol must be > 0");
    if (!(p_total > 0)) throw std::invalid_argument("solve_opa: p_total must be > 0");
    auto cost = [&](double a1, double a2) {
        return opa_cost(a1, a2, sigma_f_sq, sigma_g_sq, n_relays);
    };

    // grid pass keeps us out of the wrong basin near the simplex edges
    double best1 = 0.25, best2 = 0.25;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 100; ++i) {
        for (int j = 1; j + i < 100; ++j) {
            double c = cost(i / 100.0, j / 100.0);
            if (c < best) {
                best = c;
                best1 = i / 100.0;
                best2 = j / 100.0;
            }
        }
    }

    // Nelder-Mead refinement
    struct Vertex {
        double a1, a2, c;
    };
    std::array<Vertex, 3> sx = {{{best1, best2, best},
                                 {std::min(best1 + 0.02, 0.98), best2, 0},
                                 {best1, std::min(best2 + 0.02, 0.98), 0}}};
    sx[1].c = cost(sx[1].a1, sx[1].a2);
    sx[2].c = cost(sx[2].a1, sx[2].a2);

    for (int iter = 0; iter < 500; ++iter) {
        std::sort(sx.begin(), sx.end(),
                  [](const Vertex& a, const Vertex& b) { return a.c < b.c; });
        double diam = std::max({std::abs(sx[0].a1 - sx[1].a1) + std::abs(sx[0].a2 - sx[1].a2),
                                std::abs(sx[0].a1 - sx[2].a1) + std::abs(sx[0].a2 - sx[2].a2)});
        if (diam < tol) break;
        double cen1 = 0.5 * (sx[0].a1 + sx[1].a1);
        double cen2 = 0.5 * (sx[0].a2 + sx[1].a2);
        Vertex refl{cen1 + (cen1 - sx[2].a1), cen2 + (cen2 - sx[2].a2), 0};
        refl.c = cost(refl.a1, refl.a2);
        if (refl.c < sx[0].c) {
            Vertex ext{cen1 + 2.0 * (cen1 - sx[2].a1), cen2 + 2.0 * (cen2 - sx[2].a2), 0};
            ext.c = cost(ext.a1, ext.a2);
            sx[2] = ext.c < refl.c ? ext : refl;
        } else if (refl.c < sx[1].c) {
            sx[2] = refl;
        } else {
            Vertex con{cen1 + 0.5 * (sx[2].a1 - cen1), cen2 + 0.5 * (sx[2].a2 - cen2), 0};
            con.c = cost(con.a1, con.a2);
            if (con.c < sx[2].c) {
                sx[2] = con;
            } else {
                for (int v = 1; v < 3; ++v) {
                    sx[v].a1 = 0.5 * (sx[v].a1 + sx[0].a1);
                    sx[v].a2 = 0.5 * (sx[v].a2 + sx[0].a2);
                    sx[v].c = cost(sx[v].a1, sx[v].a2);
                }
            }
        }
    }
    std::sort(sx.begin(), sx.end(),
              [](const Vertex& a, const Vertex& b) { return a.c < b.c; });

    AllocationResult out;
    out.alpha1 = sx[0].a1;
    out.alpha2 = sx[0].a2;
    out.cost = sx[0].c;
    out.p1 = out.alpha1 * p_total;
    out.p2 = out.alpha2 * p_total;
    out.p_relay_each = (1.0 - out.alpha1 - out.alpha2) * p_total / n_relays;
    return out;
}

PowerConfig allocation_to_powers(const AllocationResult& alloc, double p_total,
                                 double n0, int n_relays) {
    return PowerConfig::split(p_total, alloc.alpha1, alloc.alpha2, n0, n_relays);
}

}  // namespace twrn
