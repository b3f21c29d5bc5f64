#include "nhchain/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nhchain {

Polynomial::Polynomial(std::vector<cplx> coeffs) : coefficients(std::move(coeffs)) {
    if (coefficients.empty())
        throw std::invalid_argument("Polynomial: at least one coefficient required");
}

cplx Polynomial::evaluate(cplx x) const {
    cplx acc(0.0, 0.0);
    for (const cplx& c : coefficients) acc = acc * x + c;
    return acc;
}

Polynomial Polynomial::derivative() const {
    const int d = degree();
    if (d == 0) return Polynomial({cplx(0.0, 0.0)});
    std::vector<cplx> out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        out[i] = coefficients[i] * static_cast<double>(d - i);
    return Polynomial(std::move(out));
}

Polynomial Polynomial::padded_to_degree(int target_degree) const {
    if (target_degree < degree())
        throw std::invalid_argument("padded_to_degree: target below actual degree");
    std::vector<cplx> out(static_cast<std::size_t>(target_degree - degree()), cplx(0.0, 0.0));
    out.insert(out.end(), coefficients.begin(), coefficients.end());
    return Polynomial(std::move(out));
}

double Polynomial::max_coefficient_magnitude() const {
    double mx = 0.0;
    for (const cplx& c : coefficients) mx = std::max(mx, std::abs(c));
    return mx;
}

std::vector<cplx> polynomial_roots(const Polynomial& p, const RootOptions& opts) {
    const int n = p.degree();
    if (n < 1) throw std::invalid_argument("polynomial_roots: degree must be >= 1");
    if (std::abs(p.leading()) == 0.0)
        throw std::invalid_argument("polynomial_roots: leading coefficient must be nonzero");

    // Monic copy for the iteration; residuals are checked on the original.
    std::vector<cplx> monic(p.coefficients);
    for (cplx& c : monic) c /= p.coefficients.front();
    const Polynomial pm{std::vector<cplx>(monic)};
    const Polynomial pmd = pm.derivative();

    // Fujiwara-style radius bound for the initial circle.
    double radius = 0.0;
    for (int k = 1; k <= n; ++k)
        radius = std::max(radius, std::pow(std::abs(monic[static_cast<std::size_t>(k)]),
                                           1.0 / static_cast<double>(k)));
    radius = 1.0 + 2.0 * radius;

    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n + 0.43;  // offset breaks symmetry
        z[static_cast<std::size_t>(k)] =
            0.5 * radius * cplx(std::cos(angle), std::sin(angle));
    }

    const double tol = opts.residual_rel * p.max_coefficient_magnitude();
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        bool all_converged = true;
        for (int k = 0; k < n; ++k) {
            cplx& zk = z[static_cast<std::size_t>(k)];
            const cplx pv = pm.evaluate(zk);
            if (std::abs(pv) * std::abs(p.leading()) <= 0.01 * tol) continue;
            all_converged = false;
            cplx dv = pmd.evaluate(zk);
            if (dv == cplx(0.0, 0.0)) dv = cplx(1e-300, 0.0);
            const cplx newton = pv / dv;
            cplx repel(0.0, 0.0);
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                cplx d = zk - z[static_cast<std::size_t>(j)];
                if (d == cplx(0.0, 0.0)) d = cplx(1e-14 * (1.0 + std::abs(zk)), 0.0);
                repel += 1.0 / d;
            }
            const cplx denom = 1.0 - newton * repel;
            zk -= (denom == cplx(0.0, 0.0)) ? newton : newton / denom;
        }
        if (all_converged) {
            bool ok = true;
            for (const cplx& r : z)
                if (std::abs(p.evaluate(r)) > tol) { ok = false; break; }
            if (ok) return z;
        }
    }
    // The sweep cap ran out; accept only if the residual target is still met.
    for (const cplx& r : z)
        if (std::abs(p.evaluate(r)) > tol)
            throw std::runtime_error("polynomial_roots: iteration did not converge "
                                     "(ill-conditioned polynomial)");
    return z;
}

}  // namespace nhchain
