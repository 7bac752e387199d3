#include "phi4ion/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phi4ion/util.hpp"

namespace phi4ion::sf {

namespace {

void check_exponent(double s) {
    if (!(s > 0.0)) throw std::domain_error("truncated series need exponent s > 0");
}

void check_order(TruncationOrder order) {
    if (order.n_terms < 1) throw std::domain_error("truncation order must be >= 1");
}

}  // namespace

double truncated_zeta(double s, TruncationOrder order) {
    check_exponent(s);
    check_order(order);
    KahanSum acc;
    for (std::int64_t r = 1; r <= order.n_terms; ++r) acc.add(std::pow(static_cast<double>(r), -s));
    return acc.value();
}

double truncated_eta(double s, TruncationOrder order) {
    check_exponent(s);
    check_order(order);
    KahanSum acc;
    for (std::int64_t r = 1; r <= order.n_terms; ++r) {
        const double term = std::pow(static_cast<double>(r), -s);
        acc.add((r % 2 == 1) ? term : -term);
    }
    return acc.value();
}

double elliptic_k(double m) {
    if (m < 0.0) throw std::domain_error("elliptic_k: parameter m < 0");
    if (m >= 1.0) throw std::domain_error("elliptic_k: parameter m >= 1 (IR-divergent limit)");
    double a = 1.0;
    double g = std::sqrt(1.0 - m);
    // Quadratic convergence; 40 iterations is far more than double needs.
    for (int i = 0; i < 40; ++i) {
        const double an = 0.5 * (a + g);
        const double gn = std::sqrt(a * g);
        a = an;
        g = gn;
        if (std::abs(a - g) <= std::numeric_limits<double>::epsilon() * a) break;
    }
    return M_PI / (2.0 * a);
}

double polygamma1(double z) {
    if (!(z > 0.0)) throw std::domain_error("polygamma1: need z > 0");
    // Shift into the asymptotic regime, psi1(z) = psi1(z+1) + 1/z^2.
    double shift = 0.0;
    while (z < 10.0) {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    const double zi = 1.0 / z;
    const double zi2 = zi * zi;
    // psi1(z) ~ 1/z + 1/(2z^2) + sum_k B_{2k} / z^{2k+1}
    static const double bern[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                  5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};
    double tail = 0.0;
    double p = zi * zi2;  // z^{-3}
    for (double b : bern) {
        tail += b * p;
        p *= zi2;
    }
    return shift + zi + 0.5 * zi2 + tail;
}

}  // namespace phi4ion::sf
