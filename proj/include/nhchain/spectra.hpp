#pragma once

#include "nhchain/linalg.hpp"
#include "nhchain/polynomial.hpp"

#include <array>
#include <optional>
#include <vector>

namespace nhchain {

enum class SpectrumOrdering { ByRealPart, ByImaginaryPart, Unordered };

struct ComplexSpectrum {
    std::vector<cplx> energies;  // 1/us
    SpectrumOrdering ordering = SpectrumOrdering::Unordered;
};

// Deterministic order used throughout: descending imaginary part, ties broken
// by descending real part.
void sort_spectrum(ComplexSpectrum& spectrum);

enum class DegeneracyKind { Regular, EP2, EP3, DP };

struct EpClassification {
    DegeneracyKind kind = DegeneracyKind::Regular;
    std::optional<cplx> degenerate_energy;
    double min_gap = 0.0;
};

struct StateVector {
    std::vector<cplx> amplitudes;
    double norm = 0.0;  // Euclidean norm of amplitudes

    static StateVector from_amplitudes(std::vector<cplx> amplitudes);
};

// Closed-form eigenenergies of the three-mode chain (decay kappa on mode 1,
// couplings lambda1, lambda2) via Cardano resolution of the characteristic
// cubic. The square-root branch is chosen to avoid cancellation and the three
// cube roots are evaluated together, so the returned multiset satisfies the
// cubic to O(eps) conditioning; a coalescing triple within 1e-4 of the exact
// degeneracy is snapped to it (the cube-root scale is the conditioning floor
// there). Total: no error conditions.
ComplexSpectrum eigenvalues_closed_form(double lambda1, double lambda2, double kappa);

// Two-mode chain (decay kappa on mode 1): E = -i*kappa/4 +- sqrt(lambda1^2 -
// kappa^2/16); a negative square-root argument yields a positive-imaginary
// root.
std::array<cplx, 2> eigenvalues_two_mode(double lambda1, double kappa);

// det(H - E*Id) as a polynomial in E, by Faddeev-LeVerrier. Dimension <= 8.
Polynomial characteristic_polynomial(const ComplexMatrix& matrix);

// Unit-norm null vector of (H - E*Id), Gaussian elimination with complete
// pivoting freeing the most singular direction. Global phase fixed so the
// largest-magnitude component is real and positive. Throws std::runtime_error
// when the residual |(H-E)v| exceeds 1e-6 * |H| (energy not an eigenvalue).
StateVector eigenvector_for(const ComplexMatrix& matrix, cplx energy);

// Degeneracy classification of the three-mode chain at one parameter point.
// A degenerate cluster counts as DP only when the eigenvectors stay linearly
// independent (geometric multiplicity matches) or the matrix is Hermitian;
// otherwise it is an EP of the cluster's order.
EpClassification classify_point(double lambda1, double lambda2, double kappa,
                                double gap_tol);

struct Ep3Point {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double refined_max_gap = 0.0;  // max pairwise gap left after refinement
};

// The four third-order degeneracies (+-sqrt(2)*kappa/(3*sqrt(3)),
// +-kappa/(6*sqrt(3))), each polished by a local pattern-search minimization
// of the maximum pairwise gap. Order: (+,+), (+,-), (-,+), (-,-). Throws
// std::runtime_error if the polish drifts more than 1e-3*kappa from the seed.
std::array<Ep3Point, 4> locate_ep3(double kappa);

struct GridSpec {
    double lambda1_min = 0.0, lambda1_max = 0.0;
    int n1 = 0;
    double lambda2_min = 0.0, lambda2_max = 0.0;
    int n2 = 0;

    void validate() const;  // positive extent, >= 2 points per axis
    double lambda1_at(int i) const;
    double lambda2_at(int j) const;
};

struct SpectralMapRecord {
    double lambda1 = 0.0, lambda2 = 0.0;
    double max_re_gap = 0.0;  // max |Re(E_n - E_m)|
    double max_im_gap = 0.0;  // max |Im(E_n - E_m)|
    double min_gap = 0.0;     // min |E_n - E_m|
    bool isofrequency = false;  // all |Re E_n| below tolerance
    bool ifermi = false;        // all pairwise |Im(E_n - E_m)| below tolerance
};

// Gap maps over a rectangular (lambda1, lambda2) grid, lambda1 as the outer
// (row) index. flag_tol <= 0 selects the default 1e-9 * max(1, |kappa|).
// n_threads == 0 resolves the worker count from NHCHAIN_THREADS or hardware.
std::vector<SpectralMapRecord> scan_spectral_map(double kappa, const GridSpec& grid,
                                                 double flag_tol = -1.0,
                                                 int n_threads = 0);

std::string spectral_map_csv(const std::vector<SpectralMapRecord>& records);

int resolve_worker_count(int requested);  // NHCHAIN_THREADS / hardware fallback

}  // namespace nhchain
