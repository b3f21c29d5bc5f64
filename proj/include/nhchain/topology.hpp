#pragma once

#include "nhchain/model.hpp"
#include "nhchain/polynomial.hpp"
#include "nhchain/spectra.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace nhchain {

// The pair of resultants whose planar winding is the topological invariant.
// For the chain's symmetric spectra both components are real; norm and phase
// are taken from the real parts after that assertion.
struct ResultantVector {
    cplx r1;      // discriminant: (E1-E2)^2 (E1-E3)^2 (E2-E3)^2
    cplx r2;      // 8i * (E1+E3-2E2)(E1+E2-2E3)(E2+E3-2E1)
    double norm = 0.0;
    double phase = 0.0;  // atan2(Re r2, Re r1), in (-pi, pi]
};

// Requires exactly three energies. Throws std::runtime_error if either
// component has |Im| > 1e-6 * norm (inputs outside the symmetric spectral
// class).
ResultantVector resultant_vector(const ComplexSpectrum& spectrum);

// Determinant of the Sylvester matrix of p and q built from their stated
// degrees (zero leading coefficients allowed as explicit degree padding).
// Throws std::invalid_argument when either stated degree is < 1.
cplx sylvester_resultant(const Polynomial& p, const Polynomial& q);

enum class LoopKind { Square, ParametricTheta, Polyline };
enum class LoopOrientation { Forward, Reversed };

struct ParameterLoop {
    LoopKind kind = LoopKind::Square;
    double lambda_m = 0.0;                        // Square / ParametricTheta
    std::vector<std::array<double, 2>> vertices;  // Polyline (closed: first == last)
    LoopOrientation orientation = LoopOrientation::Forward;
    int theta_samples = 512;  // initial samples per 2*pi for ParametricTheta

    static ParameterLoop square(double lambda_m,
                                LoopOrientation orientation = LoopOrientation::Forward);
    static ParameterLoop parametric_theta(double lambda_m, int theta_samples = 512,
                                          LoopOrientation orientation = LoopOrientation::Forward);
    static ParameterLoop polyline(std::vector<std::array<double, 2>> vertices,
                                  LoopOrientation orientation = LoopOrientation::Forward);

    void validate() const;
};

// Square path (0,0) -> (lm,0) -> (lm,lm) -> (0,lm) -> (0,0) as a smooth
// parametric curve in theta over [0, 2*pi]:
//   lm/2 * (1 - cos t|cos t| + sin t|sin t|, 1 - cos t|cos t| - sin t|sin t|)
std::array<double, 2> square_loop_point(double theta, double lambda_m);

// Map from a parameter-plane point to the two real resultant components.
using ResultantField = std::function<std::array<double, 2>(double, double)>;

// Field of the three-mode chain at fixed kappa, via the closed-form spectrum
// and the product formulas above.
ResultantField chain_resultant_field(double kappa);

// Field of a reference model: characteristic polynomial P at each point, then
// Sylvester resultants (P,P') and (P,P''), constants degree-padded. The loop
// plane maps to (omega_x, omega_y), (lambda1, lambda2) or (j_x, j_y); for
// EP2Qubit the template supplies gamma.
ResultantField reference_resultant_field(const ReferenceModelParams& model_template);

struct WindingOptions {
    int samples_per_edge = 512;             // initial density (per 2*pi for theta loops)
    std::size_t max_total_samples = 1u << 20;
    double max_phase_step = 1.5707963267948966;  // refine until steps are below pi/2
    double quantization_tol = 1e-3;
    bool record_trace = false;
};

struct WindingTraceSample {
    double s = 0.0;  // arclength fraction in [0, 1]
    double lambda1 = 0.0, lambda2 = 0.0;
    double r1_normalized = 0.0, r2_normalized = 0.0;
    double phase_unwrapped = 0.0;
};

struct WindingResult {
    double raw = 0.0;
    int rounded = 0;
    std::size_t samples_used = 0;
    std::vector<WindingTraceSample> trace;  // populated when record_trace is set
};

// Accumulated, unwrapped phase of (r1, r2) along the loop divided by 2*pi,
// with local bisection until every consecutive phase step is below
// max_phase_step. Throws std::runtime_error when the resultant vector
// vanishes on the loop, when refinement exceeds max_total_samples (an EP
// arbitrarily close to the loop), or when |raw - rounded| > quantization_tol.
WindingResult winding_number(const ParameterLoop& loop, const ResultantField& field,
                             const WindingOptions& opts = {});

// Chain convenience overload.
WindingResult winding_number(const ParameterLoop& loop, double kappa,
                             const WindingOptions& opts = {});

std::string winding_trace_csv(const WindingResult& result);

}  // namespace nhchain
