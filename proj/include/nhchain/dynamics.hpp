#pragma once

#include "nhchain/linalg.hpp"
#include "nhchain/spectra.hpp"

#include <array>
#include <string>
#include <vector>

namespace nhchain {

// Sampled no-jump trajectory. norms holds the squared state norm, i.e. the
// probability that no jump has occurred up to that time; populations are the
// renormalized per-mode probabilities (they sum to one by construction).
struct TimeTrace {
    std::vector<double> times;                     // us
    std::vector<StateVector> states;               // raw (decaying) amplitudes
    std::vector<double> norms;                     // |psi|^2 success probability
    std::vector<std::vector<double>> populations;  // |c_i|^2 / |psi|^2

    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().amplitudes.size()); }
    std::size_t size() const { return times.size(); }
};

struct EvolveOptions {
    double dt = 1e-3;       // us
    double t_final = 1.0;   // us
    int output_stride = 1;  // record every stride-th step
};

// Fixed-step RK4 integration of i dpsi/dt = H psi. For a purely decaying H
// (anti-Hermitian part negative semidefinite) a per-step norm growth beyond
// 1 + 1e-6 signals an unstable step size and throws std::runtime_error.
TimeTrace evolve_nh(const ComplexMatrix& matrix, const StateVector& psi0,
                    const EvolveOptions& opts);

// Two-tone parametric modulation of the middle mode. Rates in 1/us; detunings
// are measured from the mean qubit frequency (delta_b = omega_b - omega_0,
// delta_r = omega_r - omega_0). Sideband resonance means nu1 = delta_r and
// nu2 = -delta_b; off-resonant configurations are allowed.
struct ModulationConfig {
    double g_b = 0.0, g_r = 0.0;          // on-resonance couplings
    double epsilon1 = 0.0, epsilon2 = 0.0;  // modulation amplitudes
    double nu1 = 0.0, nu2 = 0.0;            // modulation frequencies
    double delta_b = 0.0, delta_r = 0.0;    // detunings

    bool resonant(double tol) const;
};

// Integrates the interaction-picture three-mode Hamiltonian with the full
// modulation phase factors exp(-i mu_j sin(nu_j t)) (mode 1 = readout
// resonator with decay kappa, mode 2 = qubit, mode 3 = bus resonator).
// Requires dt <= 0.02 / max(|nu1|, |nu2|, |delta_b|, |delta_r|).
TimeTrace evolve_modulated(const ModulationConfig& cfg, double kappa,
                           const StateVector& psi0, const EvolveOptions& opts);

// First-sideband effective couplings lambda1 = g_r J1(mu1) J0(mu2),
// lambda2 = g_b J0(mu1) J1(mu2), mu_j = epsilon_j / nu_j.
std::array<double, 2> effective_couplings(const ModulationConfig& cfg);

// Modulation amplitudes hitting the requested effective couplings at fixed
// tone frequencies (2D Newton on the Bessel product formulas).
std::array<double, 2> modulation_amplitudes_for(double g_r, double g_b, double nu1,
                                                double nu2, double lambda1_target,
                                                double lambda2_target);

// Fully tuned two-tone configuration for given target couplings: amplitudes
// from modulation_amplitudes_for plus detunings corrected for the
// second-order level shifts of the strong carrier terms (+-g^2 J0^2 / nu),
// which would otherwise detune the sidebands. This mirrors the experimental
// calibration of the sideband resonances.
ModulationConfig tuned_modulation_config(double g_r, double g_b, double nu1, double nu2,
                                         double lambda1_target, double lambda2_target);

// Bessel function of the first kind: ascending power series for small
// arguments, normalized downward recurrence otherwise. Valid for
// 0 <= n <= 20, |x| <= 30.
double bessel_j(int n, double x);

struct StabilizationMetrics {
    // fidelities[sample][n] = |<phi_n|psi(t)>|^2 / |psi(t)|^2
    std::vector<std::vector<double>> fidelities;
    int dominant_index = 0;              // eigenvector with the largest Im(E)
    double time_to_high_fidelity = 0.0;  // NaN when the threshold is never reached
    double fidelity_threshold = 0.99;
    bool defective_advisory = false;     // spectrum carries a coalesced pair
};

StabilizationMetrics stabilization_metrics(const TimeTrace& trace,
                                           const ComplexSpectrum& spectrum,
                                           const std::vector<StateVector>& eigenvectors);

// CSV "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,norm2,p1,p2,p3" (three-mode
// traces only), emitting every stride-th sample.
std::string trace_csv(const TimeTrace& trace, int stride = 1);

}  // namespace nhchain
