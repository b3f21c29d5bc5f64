#include "nhchain/analysis.hpp"

#include "nhchain/csv.hpp"
#include "nhchain/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nhchain {

DensityMatrix::DensityMatrix(int n) : dim(n) {
    if (n < 1) throw std::invalid_argument("DensityMatrix: dimension must be >= 1");
    entries.assign(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0));
}

void DensityMatrix::validate() const {
    if (dim < 1 || entries.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("DensityMatrix: entries length must equal dim^2");
    cplx tr(0.0, 0.0);
    for (int i = 0; i < dim; ++i) {
        tr += at(i, i);
        for (int j = 0; j < dim; ++j)
            if (std::abs(at(i, j) - std::conj(at(j, i))) > 1e-12)
                throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(tr - cplx(1.0, 0.0)) > 1e-10)
        throw std::invalid_argument("DensityMatrix: trace must be 1");

    // Positivity via the characteristic coefficients: a Hermitian matrix has
    // all eigenvalues >= 0 exactly when the monic coefficients alternate in
    // sign. This stays exact for repeated zero eigenvalues, where root
    // finding loses half the digits.
    ComplexMatrix m(dim);
    m.entries = entries;
    Polynomial cp = characteristic_polynomial(m);
    if (dim % 2 == 1)
        for (cplx& c : cp.coefficients) c = -c;
    for (int k = 0; k <= dim; ++k) {
        const double signed_coeff = ((k % 2 == 0) ? 1.0 : -1.0) *
                                    cp.coefficients[static_cast<std::size_t>(k)].real();
        if (signed_coeff < -1e-9)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
}

DensityMatrix reduced_two_mode_density(const StateVector& psi, int mode_i, int mode_j) {
    const int n = static_cast<int>(psi.amplitudes.size());
    if (mode_i < 0 || mode_j < 0 || mode_i >= n || mode_j >= n || mode_i == mode_j)
        throw std::invalid_argument("reduced_two_mode_density: bad mode pair");
    const cplx ci = psi.amplitudes[static_cast<std::size_t>(mode_i)];
    const cplx cj = psi.amplitudes[static_cast<std::size_t>(mode_j)];
    DensityMatrix rho(4);
    rho.at(0, 0) = 1.0 - std::norm(ci) - std::norm(cj);  // excitation elsewhere
    rho.at(1, 1) = std::norm(cj);                        // |0_i 1_j>
    rho.at(2, 2) = std::norm(ci);                        // |1_i 0_j>
    rho.at(1, 2) = cj * std::conj(ci);
    rho.at(2, 1) = ci * std::conj(cj);
    return rho;
}

double wootters_concurrence(const DensityMatrix& rho) {
    if (rho.dim != 4)
        throw std::invalid_argument("wootters_concurrence: 4x4 density matrix required");
    rho.validate();

    // sy x sy
    ComplexMatrix flip(4);
    flip.at(0, 3) = -1.0;
    flip.at(1, 2) = 1.0;
    flip.at(2, 1) = 1.0;
    flip.at(3, 0) = -1.0;

    ComplexMatrix r(4);
    r.entries = rho.entries;
    ComplexMatrix r_conj(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r_conj.at(i, j) = std::conj(r.at(i, j));
    const ComplexMatrix m = matmul(matmul(r, flip), matmul(r_conj, flip));

    // Exact zero eigenvalues (every pure-state block produces a rank-one m)
    // appear as vanishing trailing coefficients; deflate them before the root
    // iteration, which would otherwise only resolve them to ~cbrt(residual).
    Polynomial cp = characteristic_polynomial(m);
    const double coeff_scale = cp.max_coefficient_magnitude();
    int zero_roots = 0;
    while (cp.degree() > 0 &&
           std::abs(cp.coefficients.back()) <= 1e-13 * coeff_scale) {
        cp.coefficients.pop_back();
        ++zero_roots;
    }
    std::vector<double> vals(static_cast<std::size_t>(zero_roots), 0.0);
    if (cp.degree() >= 1) {
        RootOptions opts;
        opts.residual_rel = 1e-13;
        for (const cplx& v : polynomial_roots(cp, opts))
            vals.push_back(std::max(0.0, v.real()));
    }
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    const double c = std::sqrt(vals[0]) - std::sqrt(vals[1]) - std::sqrt(vals[2]) -
                     std::sqrt(vals[3]);
    return std::max(0.0, c);
}

double pairwise_concurrence(const StateVector& psi, int mode_i, int mode_j) {
    if (std::abs(psi.norm - 1.0) > 1e-8)
        throw std::invalid_argument("pairwise_concurrence: state must be normalized");
    const cplx ci = psi.amplitudes[static_cast<std::size_t>(mode_i)];
    const cplx cj = psi.amplitudes[static_cast<std::size_t>(mode_j)];
    const double closed = 2.0 * std::abs(ci) * std::abs(cj);
    const double general = wootters_concurrence(reduced_two_mode_density(psi, mode_i, mode_j));
    if (std::abs(closed - general) > 1e-10)
        throw std::runtime_error("pairwise_concurrence: closed form and Wootters value "
                                 "disagree beyond tolerance");
    return closed;
}

namespace {

// Pivoted-QR pencil reduction: computes the model_order x model_order pencil
// (B0, B1) spanning the signal subspace of the shifted Hankel pair.
struct PencilReduction {
    ComplexMatrix b0, b1;
};

PencilReduction reduce_pencil(const std::vector<cplx>& c, int pencil_len, int order) {
    const int n = static_cast<int>(c.size());
    const int rows = n - pencil_len;

    auto hankel_col = [&](int j, int shift) {
        std::vector<cplx> col(static_cast<std::size_t>(rows));
        for (int i = 0; i < rows; ++i)
            col[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i + j + shift)];
        return col;
    };

    std::vector<std::vector<cplx>> work(static_cast<std::size_t>(pencil_len));
    for (int j = 0; j < pencil_len; ++j) work[static_cast<std::size_t>(j)] = hankel_col(j, 0);

    std::vector<double> col_norm2(static_cast<std::size_t>(pencil_len), 0.0);
    for (int j = 0; j < pencil_len; ++j)
        for (const cplx& x : work[static_cast<std::size_t>(j)])
            col_norm2[static_cast<std::size_t>(j)] += std::norm(x);
    const double max_norm2 =
        *std::max_element(col_norm2.begin(), col_norm2.end());

    std::vector<std::vector<cplx>> reflectors;
    std::vector<int> pivots;
    for (int step = 0; step < order; ++step) {
        int best = -1;
        double best_norm2 = -1.0;
        for (int j = 0; j < pencil_len; ++j) {
            if (std::find(pivots.begin(), pivots.end(), j) != pivots.end()) continue;
            double n2 = 0.0;
            for (int i = step; i < rows; ++i)
                n2 += std::norm(work[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
            if (n2 > best_norm2) { best_norm2 = n2; best = j; }
        }
        if (best < 0 || best_norm2 <= 1e-24 * max_norm2)
            throw std::runtime_error("extract_eigenenergies: signal rank below model order");
        pivots.push_back(best);

        auto& col = work[static_cast<std::size_t>(best)];
        const double s = std::sqrt(best_norm2);
        const cplx xk = col[static_cast<std::size_t>(step)];
        const cplx phase = (xk == cplx(0.0, 0.0)) ? cplx(1.0, 0.0) : xk / std::abs(xk);
        const cplx alpha = -phase * s;
        std::vector<cplx> v(static_cast<std::size_t>(rows - step));
        v[0] = xk - alpha;
        for (int i = step + 1; i < rows; ++i)
            v[static_cast<std::size_t>(i - step)] = col[static_cast<std::size_t>(i)];
        double vnorm2 = 0.0;
        for (const cplx& x : v) vnorm2 += std::norm(x);
        auto reflect = [&](std::vector<cplx>& target) {
            cplx proj(0.0, 0.0);
            for (int i = step; i < rows; ++i)
                proj += std::conj(v[static_cast<std::size_t>(i - step)]) *
                        target[static_cast<std::size_t>(i)];
            proj *= 2.0 / vnorm2;
            for (int i = step; i < rows; ++i)
                target[static_cast<std::size_t>(i)] -= proj * v[static_cast<std::size_t>(i - step)];
        };
        for (int j = 0; j < pencil_len; ++j) reflect(work[static_cast<std::size_t>(j)]);
        col[static_cast<std::size_t>(step)] = alpha;
        reflectors.push_back(std::move(v));
    }

    PencilReduction red{ComplexMatrix(order), ComplexMatrix(order)};
    for (int j = 0; j < order; ++j) {
        for (int i = 0; i < order; ++i)
            red.b0.at(i, j) = work[static_cast<std::size_t>(pivots[static_cast<std::size_t>(j)])]
                                  [static_cast<std::size_t>(i)];
        std::vector<cplx> col = hankel_col(pivots[static_cast<std::size_t>(j)], 1);
        for (int step = 0; step < order; ++step) {
            const auto& v = reflectors[static_cast<std::size_t>(step)];
            double vnorm2 = 0.0;
            for (const cplx& x : v) vnorm2 += std::norm(x);
            cplx proj(0.0, 0.0);
            for (int i = step; i < rows; ++i)
                proj += std::conj(v[static_cast<std::size_t>(i - step)]) *
                        col[static_cast<std::size_t>(i)];
            proj *= 2.0 / vnorm2;
            for (int i = step; i < rows; ++i)
                col[static_cast<std::size_t>(i)] -= proj * v[static_cast<std::size_t>(i - step)];
        }
        for (int i = 0; i < order; ++i) red.b1.at(i, j) = col[static_cast<std::size_t>(i)];
    }
    return red;
}

}  // namespace

namespace {

std::vector<cplx> pencil_exponents(const std::vector<cplx>& samples, double dt,
                                   int model_order) {
    const int n = static_cast<int>(samples.size());
    if (n < 4 * model_order)
        throw std::invalid_argument("extract_eigenenergies: need >= 4*model_order samples");
    if (!(dt > 0.0)) throw std::invalid_argument("extract_eigenenergies: dt must be > 0");

    int pencil_len = n / 2;
    pencil_len = std::max(pencil_len, model_order);
    pencil_len = std::min(pencil_len, n - model_order);

    const PencilReduction red = reduce_pencil(samples, pencil_len, model_order);

    // Generalized eigenvalues of (B1, B0): solve B0^{-1} B1 and take its
    // characteristic roots (order <= 3).
    ComplexMatrix g(model_order);
    for (int j = 0; j < model_order; ++j) {
        std::vector<cplx> rhs(static_cast<std::size_t>(model_order));
        for (int i = 0; i < model_order; ++i) rhs[static_cast<std::size_t>(i)] = red.b1.at(i, j);
        const auto x = solve_dense(red.b0, rhs);
        for (int i = 0; i < model_order; ++i) g.at(i, j) = x[static_cast<std::size_t>(i)];
    }
    const auto z = polynomial_roots(characteristic_polynomial(g));

    std::vector<cplx> energies;
    std::vector<cplx> kept_z;
    for (const cplx& zk : z) {
        if (std::abs(zk) == 0.0)
            throw std::runtime_error("extract_eigenenergies: vanishing pencil eigenvalue");
        const cplx e = cplx(0.0, 1.0) * std::log(zk) / dt;
        if (std::abs(e) * dt >= std::numbers::pi)
            throw std::runtime_error("extract_eigenenergies: aliasing (|E|*dt >= pi)");
        energies.push_back(e);
        kept_z.push_back(zk);
    }

    // Amplitudes by Vandermonde least squares; prune negligible components.
    std::vector<std::vector<cplx>> vander(kept_z.size());
    for (std::size_t j = 0; j < kept_z.size(); ++j) {
        vander[j].resize(static_cast<std::size_t>(n));
        cplx p(1.0, 0.0);
        for (int k = 0; k < n; ++k) {
            vander[j][static_cast<std::size_t>(k)] = p;
            p *= kept_z[j];
        }
    }
    const auto amps = lstsq(vander, samples);
    double max_amp = 0.0;
    for (const cplx& a : amps) max_amp = std::max(max_amp, std::abs(a));
    std::vector<cplx> out;
    for (std::size_t j = 0; j < energies.size(); ++j)
        if (std::abs(amps[j]) >= 1e-8 * max_amp) out.push_back(energies[j]);

    std::sort(out.begin(), out.end(), [](const cplx& a, const cplx& b) {
        if (a.imag() != b.imag()) return a.imag() > b.imag();
        return a.real() > b.real();
    });
    return out;
}

void check_uniform_sampling(const TimeTrace& trace, int component) {
    if (trace.size() < 2)
        throw std::invalid_argument("extract_eigenenergies: trace too short");
    if (component < 0 || component >= trace.dim())
        throw std::invalid_argument("extract_eigenenergies: component out of range");
    const double dt = trace.times[1] - trace.times[0];
    for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
        const double step = trace.times[k + 1] - trace.times[k];
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw std::invalid_argument("extract_eigenenergies: trace is not uniformly sampled");
    }
}

}  // namespace

std::vector<cplx> extract_eigenenergies_from_samples(const std::vector<cplx>& samples,
                                                     double dt, int model_order) {
    if (model_order < 1 || model_order > 3)
        throw std::invalid_argument("extract_eigenenergies: model_order must be 1..3");
    return pencil_exponents(samples, dt, model_order);
}

std::vector<cplx> extract_eigenenergies(const TimeTrace& trace, int component,
                                        int model_order) {
    check_uniform_sampling(trace, component);
    std::vector<cplx> samples(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        samples[k] = trace.states[k].amplitudes[static_cast<std::size_t>(component)];
    return extract_eigenenergies_from_samples(samples, trace.times[1] - trace.times[0],
                                              model_order);
}

std::vector<cplx> extract_beat_frequencies(const TimeTrace& trace, int component,
                                           int n_terms) {
    if (n_terms < 2 || n_terms > 8)
        throw std::invalid_argument("extract_beat_frequencies: n_terms must be 2..8");
    check_uniform_sampling(trace, component);
    // raw mode weight |c(t)|^2, before postselection renormalization
    std::vector<cplx> samples(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        samples[k] = trace.populations[k][static_cast<std::size_t>(component)] * trace.norms[k];
    return pencil_exponents(samples, trace.times[1] - trace.times[0], n_terms);
}

SymmetricParametrization fit_symmetric_parametrization(const std::vector<cplx>& energies,
                                                       double re_tol) {
    if (energies.size() != 3)
        throw std::invalid_argument("fit_symmetric_parametrization: three energies required");
    if (!(re_tol > 0.0))
        throw std::invalid_argument("fit_symmetric_parametrization: re_tol must be > 0");

    // Exactly one near-imaginary energy; the remaining pair must straddle zero.
    int center = -1;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(energies[static_cast<std::size_t>(k)].real()) < re_tol) {
            if (center >= 0)
                throw std::runtime_error("fit_symmetric_parametrization: more than one "
                                         "near-imaginary energy (outside the symmetric regime)");
            center = k;
        }
    }
    if (center < 0)
        throw std::runtime_error("fit_symmetric_parametrization: no near-imaginary energy "
                                 "(outside the symmetric regime)");
    std::vector<cplx> pair;
    for (int k = 0; k < 3; ++k)
        if (k != center) pair.push_back(energies[static_cast<std::size_t>(k)]);
    if (!(pair[0].real() * pair[1].real() < 0.0))
        throw std::runtime_error("fit_symmetric_parametrization: pair real parts do not "
                                 "have opposite signs");

    SymmetricParametrization fit;
    fit.i1 = -energies[static_cast<std::size_t>(center)].imag();
    fit.r = 0.5 * (std::abs(pair[0].real()) + std::abs(pair[1].real()));
    fit.i2 = -0.5 * (pair[0].imag() + pair[1].imag());

    const cplx rec_center(0.0, -fit.i1);
    const cplx rec_plus(fit.r, -fit.i2);
    const cplx rec_minus(-fit.r, -fit.i2);
    double residual = std::abs(energies[static_cast<std::size_t>(center)] - rec_center);
    const cplx& pos = pair[0].real() > 0.0 ? pair[0] : pair[1];
    const cplx& neg = pair[0].real() > 0.0 ? pair[1] : pair[0];
    residual = std::max(residual, std::abs(pos - rec_plus));
    residual = std::max(residual, std::abs(neg - rec_minus));
    fit.residual = residual;
    return fit;
}

PerturbationRatios perturbation_ratios(double lambda1, double lambda2, double kappa) {
    const double lambda = std::hypot(lambda1, lambda2);
    if (!(lambda > 0.0))
        throw std::invalid_argument("perturbation_ratios: lambda must be > 0");

    PerturbationRatios out;
    out.lambda = lambda;
    out.theta = std::atan2(lambda1, lambda2);  // tan(theta) = lambda1/lambda2
    const double st = std::sin(out.theta);
    const double ct = std::cos(out.theta);

    // Dressed-basis decay couplings and diagonal gaps.
    const double off_12 = std::abs(kappa * std::sin(2.0 * out.theta)) / (4.0 * std::sqrt(2.0));
    const double off_23 = kappa * st * st / 4.0;
    const double diag_1_im = -0.5 * kappa * ct * ct;
    const double diag_2_im = -0.25 * kappa * st * st;
    const double gap_12 = std::hypot(lambda, diag_1_im - diag_2_im);
    const double gap_23 = 2.0 * lambda;

    out.ratio_12 = (gap_12 > 0.0) ? off_12 / gap_12 : 0.0;
    out.ratio_23 = off_23 / gap_23;
    out.kappa_over_8lambda = kappa / (8.0 * lambda);
    return out;
}

std::string extraction_csv(const std::vector<ExtractionRecord>& records) {
    std::ostringstream os;
    os << "lambda1,lambda2,re_E1,im_E1,re_E2,im_E2,re_E3,im_E3,R,I1,I2,residual\n";
    for (const auto& rec : records) {
        os << format_double(rec.lambda1) << ',' << format_double(rec.lambda2);
        for (std::size_t k = 0; k < 3; ++k) {
            if (k < rec.energies.size())
                os << ',' << format_double(rec.energies[k].real()) << ','
                   << format_double(rec.energies[k].imag());
            else
                os << ",,";
        }
        if (rec.fit)
            os << ',' << format_double(rec.fit->r) << ',' << format_double(rec.fit->i1)
               << ',' << format_double(rec.fit->i2) << ',' << format_double(rec.fit->residual);
        else
            os << ",,,,";
        os << '\n';
    }
    return os.str();
}

}  // namespace nhchain
