#pragma once

#include "nhchain/dynamics.hpp"
#include "nhchain/linalg.hpp"
#include "nhchain/spectra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nhchain {

struct DensityMatrix {
    int dim = 0;
    std::vector<cplx> entries;  // row-major

    DensityMatrix() = default;
    explicit DensityMatrix(int n);

    cplx& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
    const cplx& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }

    // Hermitian within 1e-12, unit trace within 1e-10, eigenvalues >= -1e-10.
    void validate() const;
};

// Two-mode reduced state of a single-excitation pure state, basis
// (|0_i 0_j>, |0_i 1_j>, |1_i 0_j>, |1_i 1_j>).
DensityMatrix reduced_two_mode_density(const StateVector& psi, int mode_i, int mode_j);

// Wootters concurrence of a two-qubit density matrix: the mu_k are the
// eigenvalues of rho (sy x sy) conj(rho) (sy x sy), obtained from the 4x4
// characteristic polynomial by the simultaneous root finder.
double wootters_concurrence(const DensityMatrix& rho);

// Concurrence between modes i and j of a normalized single-excitation pure
// state. Evaluates the closed form 2 |c_i| |c_j| and cross-checks it against
// the Wootters value of the reduced state to 1e-10.
double pairwise_concurrence(const StateVector& psi, int mode_i, int mode_j);

// Matrix-pencil estimation of the complex exponents of a sampled amplitude:
// shifted Hankel matrices, rank-revealing pivoted QR reduction of the pencil
// to model_order, then the generalized eigenvalues. Requires a uniformly
// sampled trace with at least 4 * model_order samples; model_order in {1,2,3}.
// Components with relative amplitude below 1e-8 are pruned. Throws on
// aliasing (|E| * dt >= pi) and on rank below model_order.
std::vector<cplx> extract_eigenenergies(const TimeTrace& trace, int component,
                                        int model_order);

// Same estimator on a raw uniformly-sampled scalar signal.
std::vector<cplx> extract_eigenenergies_from_samples(const std::vector<cplx>& samples,
                                                     double dt, int model_order);

// Validation mode mirroring the population-only measurement route: the raw
// mode weight |c(t)|^2 is a sum of exponentials at the beat values
// E_n - conj(E_m), which this recovers with the same pencil (n_terms is the
// number of distinct beats, 2..8; populations alone cannot give the E_n
// directly). Cross-check against extract_eigenenergies differences.
std::vector<cplx> extract_beat_frequencies(const TimeTrace& trace, int component,
                                           int n_terms);

// Spectrum pattern {-i*I1, R - i*I2, -R - i*I2} fitted to three energies.
struct SymmetricParametrization {
    double r = 0.0;         // common |Re| of the symmetric pair
    double i1 = 0.0;        // decay of the near-imaginary energy
    double i2 = 0.0;        // common decay of the pair
    double residual = 0.0;  // worst reconstruction mismatch
};

// Requires exactly one energy with |Re| < re_tol and a pair with opposite
// real parts; otherwise throws std::runtime_error (input outside the
// symmetric regime, e.g. an all-imaginary isofrequency spectrum).
SymmetricParametrization fit_symmetric_parametrization(const std::vector<cplx>& energies,
                                                       double re_tol);

// Dressed-basis perturbation diagnostics at tan(theta) = lambda1/lambda2:
// off-diagonal decay couplings against the level gaps, plus the reference
// ratio kappa/(8 lambda). ratio_23 and kappa_over_8lambda are distinct
// diagnostics and differ away from theta = pi/2 (the pair gap is 2 lambda).
struct PerturbationRatios {
    double ratio_12 = 0.0;  // |kappa sin(2 theta)/(4 sqrt 2)| / |gap_12|
    double ratio_23 = 0.0;  // (kappa sin^2 theta / 4) / (2 lambda)
    double kappa_over_8lambda = 0.0;
    double theta = 0.0;
    double lambda = 0.0;
};

PerturbationRatios perturbation_ratios(double lambda1, double lambda2, double kappa);

struct ExtractionRecord {
    double lambda1 = 0.0, lambda2 = 0.0;
    std::vector<cplx> energies;  // up to three, deterministic spectral order
    std::optional<SymmetricParametrization> fit;
};

// CSV "lambda1,lambda2,re_E1,im_E1,re_E2,im_E2,re_E3,im_E3,R,I1,I2,residual";
// absent energies / fits leave their fields empty.
std::string extraction_csv(const std::vector<ExtractionRecord>& records);

}  // namespace nhchain
