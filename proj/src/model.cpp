#include "nhchain/model.hpp"

#include <json.hpp>

#include <stdexcept>

namespace nhchain {

void ChainParams::validate() const {
    if (n_modes < 2) throw std::invalid_argument("ChainParams: n_modes must be >= 2");
    if (static_cast<int>(kappas.size()) != n_modes)
        throw std::invalid_argument("ChainParams: kappas must have n_modes entries");
    if (static_cast<int>(lambdas.size()) != n_modes - 1)
        throw std::invalid_argument("ChainParams: lambdas must have n_modes-1 entries");
    for (double k : kappas)
        if (!(k >= 0.0)) throw std::invalid_argument("ChainParams: kappas must be >= 0");
}

ChainParams three_mode_chain(double lambda1, double lambda2, double kappa) {
    ChainParams p;
    p.n_modes = 3;
    p.kappas = {kappa, 0.0, 0.0};
    p.lambdas = {lambda1, lambda2};
    return p;
}

ComplexMatrix build_chain_hamiltonian(const ChainParams& params) {
    params.validate();
    ComplexMatrix h(params.n_modes);
    for (int j = 0; j < params.n_modes; ++j)
        h.at(j, j) = cplx(0.0, -0.5 * params.kappas[static_cast<std::size_t>(j)]);
    for (int j = 0; j + 1 < params.n_modes; ++j) {
        h.at(j, j + 1) = params.lambdas[static_cast<std::size_t>(j)];
        h.at(j + 1, j) = params.lambdas[static_cast<std::size_t>(j)];
    }
    return h;
}

std::string chain_params_to_json(const ChainParams& params) {
    params.validate();
    nlohmann::json j;
    j["n_modes"] = params.n_modes;
    j["kappas"] = params.kappas;
    j["lambdas"] = params.lambdas;
    return j.dump();
}

ChainParams chain_params_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("ChainParams: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("ChainParams: expected a JSON object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "n_modes" && key != "kappas" && key != "lambdas")
            throw std::invalid_argument("ChainParams: unknown key \"" + key + "\"");
    }
    if (!j.contains("n_modes") || !j.contains("kappas") || !j.contains("lambdas"))
        throw std::invalid_argument("ChainParams: keys n_modes, kappas, lambdas required");
    ChainParams p;
    try {
        p.n_modes = j.at("n_modes").get<int>();
        p.kappas = j.at("kappas").get<std::vector<double>>();
        p.lambdas = j.at("lambdas").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("ChainParams: bad field type: ") + e.what());
    }
    p.validate();
    return p;
}

ReferenceModelParams ReferenceModelParams::dp2d(double omega_x, double omega_y) {
    ReferenceModelParams p;
    p.kind = ReferenceModelKind::DP2D;
    p.omega_x = omega_x;
    p.omega_y = omega_y;
    return p;
}

ReferenceModelParams ReferenceModelParams::dp3d(double lambda1, double lambda2) {
    ReferenceModelParams p;
    p.kind = ReferenceModelKind::DP3D;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    return p;
}

ReferenceModelParams ReferenceModelParams::ep2_qubit(double j_x, double j_y, double gamma) {
    ReferenceModelParams p;
    p.kind = ReferenceModelKind::EP2Qubit;
    p.j_x = j_x;
    p.j_y = j_y;
    p.gamma = gamma;
    return p;
}

void ReferenceModelParams::validate() const {
    switch (kind) {
        case ReferenceModelKind::DP2D:
            if (lambda1 != 0 || lambda2 != 0 || j_x != 0 || j_y != 0 || gamma != 0)
                throw std::invalid_argument("ReferenceModelParams: DP2D uses omega_x/omega_y only");
            return;
        case ReferenceModelKind::DP3D:
            if (omega_x != 0 || omega_y != 0 || j_x != 0 || j_y != 0 || gamma != 0)
                throw std::invalid_argument("ReferenceModelParams: DP3D uses lambda1/lambda2 only");
            return;
        case ReferenceModelKind::EP2Qubit:
            if (omega_x != 0 || omega_y != 0 || lambda1 != 0 || lambda2 != 0)
                throw std::invalid_argument("ReferenceModelParams: EP2Qubit uses j_x/j_y/gamma only");
            if (!(gamma >= 0.0))
                throw std::invalid_argument("ReferenceModelParams: gamma must be >= 0");
            return;
    }
    throw std::invalid_argument("ReferenceModelParams: unknown kind");
}

ComplexMatrix build_reference_model(const ReferenceModelParams& params) {
    params.validate();
    switch (params.kind) {
        case ReferenceModelKind::DP2D: {
            ComplexMatrix h(2);
            h.at(0, 1) = cplx(params.omega_x, -params.omega_y);
            h.at(1, 0) = cplx(params.omega_x, params.omega_y);
            return h;
        }
        case ReferenceModelKind::DP3D: {
            ComplexMatrix h(3);
            h.at(0, 1) = params.lambda2;
            h.at(1, 0) = params.lambda2;
            h.at(1, 2) = params.lambda1;
            h.at(2, 1) = params.lambda1;
            return h;
        }
        case ReferenceModelKind::EP2Qubit: {
            ComplexMatrix h(2);
            h.at(0, 1) = cplx(params.j_x, -params.j_y);
            h.at(1, 0) = cplx(params.j_x, params.j_y);
            h.at(1, 1) = cplx(0.0, -0.5 * params.gamma);
            return h;
        }
    }
    throw std::invalid_argument("build_reference_model: unknown kind");
}

}  // namespace nhchain
