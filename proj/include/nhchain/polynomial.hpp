#pragma once

#include "nhchain/linalg.hpp"

#include <vector>

namespace nhchain {

// Coefficients in descending powers; the stated degree is coefficients.size()-1.
// A zero leading coefficient is allowed only as an explicit degree-padded form
// (e.g. a constant written as "0*x + c" so it can enter a Sylvester matrix).
struct Polynomial {
    std::vector<cplx> coefficients;

    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs);

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    cplx leading() const { return coefficients.front(); }

    cplx evaluate(cplx x) const;  // Horner
    Polynomial derivative() const;
    Polynomial padded_to_degree(int target_degree) const;
    double max_coefficient_magnitude() const;
};

struct RootOptions {
    int max_sweeps = 200;
    double residual_rel = 1e-12;  // converged when |P(root)| <= residual_rel * max |coeff|
};

// All complex roots with multiplicity by simultaneous Aberth-Ehrlich iteration.
// Requires degree >= 1 and a nonzero leading coefficient. Throws
// std::runtime_error when the sweep cap is hit without meeting the residual
// target (ill-conditioned input).
std::vector<cplx> polynomial_roots(const Polynomial& p, const RootOptions& opts = {});

}  // namespace nhchain
