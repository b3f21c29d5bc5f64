#pragma once

#include "nhchain/linalg.hpp"

#include <string>
#include <vector>

namespace nhchain {

// Nearest-neighbour coupled-mode chain with per-mode decay. All rates and
// couplings are angular frequencies in 1/us. The single-excitation basis is
// ordered (mode 1 excited, ..., mode N excited), mode 1 being the decaying
// readout mode in the three-mode configuration.
struct ChainParams {
    int n_modes = 0;
    std::vector<double> kappas;   // N non-negative decay rates, 1/us
    std::vector<double> lambdas;  // N-1 real couplings, 1/us

    void validate() const;  // throws std::invalid_argument
};

// Convenience: three modes, decay kappa on mode 1 only.
ChainParams three_mode_chain(double lambda1, double lambda2, double kappa);

// Single-excitation matrix: diagonal -i*kappa_j/2, first off-diagonals
// lambda_j. Complex symmetric by construction.
ComplexMatrix build_chain_hamiltonian(const ChainParams& params);

// JSON document with exactly the keys "n_modes", "kappas", "lambdas";
// unknown keys are rejected.
std::string chain_params_to_json(const ChainParams& params);
ChainParams chain_params_from_json(const std::string& text);

// Zero-winding reference models.
enum class ReferenceModelKind { DP2D, DP3D, EP2Qubit };

struct ReferenceModelParams {
    ReferenceModelKind kind = ReferenceModelKind::DP2D;
    double omega_x = 0.0, omega_y = 0.0;        // DP2D
    double lambda1 = 0.0, lambda2 = 0.0;        // DP3D
    double j_x = 0.0, j_y = 0.0, gamma = 0.0;   // EP2Qubit, gamma >= 0

    static ReferenceModelParams dp2d(double omega_x, double omega_y);
    static ReferenceModelParams dp3d(double lambda1, double lambda2);
    static ReferenceModelParams ep2_qubit(double j_x, double j_y, double gamma);

    void validate() const;
};

// DP2D:     [[0, wx - i*wy], [wx + i*wy, 0]]            (wx*sx + wy*sy)
// DP3D:     [[0, l2, 0], [l2, 0, l1], [0, l1, 0]]
// EP2Qubit: [[0, Jx - i*Jy], [Jx + i*Jy, -i*gamma/2]]
ComplexMatrix build_reference_model(const ReferenceModelParams& params);

}  // namespace nhchain
