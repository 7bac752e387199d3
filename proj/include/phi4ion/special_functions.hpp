#pragma once

#include <cstdint>

namespace phi4ion::sf {

/// Number of summand terms kept in a truncated series (N1/2 for the lattice
/// mode sums).
struct TruncationOrder {
    std::int64_t n_terms;
};

/// Truncated Riemann zeta: sum_{r=1}^{n} r^{-s}, s > 0.
double truncated_zeta(double s, TruncationOrder order);

/// Truncated Dirichlet eta: sum_{r=1}^{n} (-1)^{r+1} r^{-s}, s > 0.
double truncated_eta(double s, TruncationOrder order);

/// Complete elliptic integral of the first kind, parameter convention:
/// K(m) = int_0^{pi/2} dtheta (1 - m sin^2 theta)^{-1/2}, 0 <= m < 1.
/// Evaluated by the arithmetic-geometric mean.
double elliptic_k(double m);

/// Trigamma function psi^1(z), z > 0.
double polygamma1(double z);

}  // namespace phi4ion::sf
