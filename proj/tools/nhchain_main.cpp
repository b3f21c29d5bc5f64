#include "nhchain/cli.hpp"
#include "nhchain/csv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

namespace {

using nhchain::format_double;

std::string scale_grid_spec(const std::string& spec, double factor) {
    const nhchain::GridSpec g = nhchain::parse_grid_spec(spec);
    std::ostringstream os;
    os << format_double(g.lambda1_min * factor) << ':' << format_double(g.lambda1_max * factor)
       << ':' << g.n1 << ',' << format_double(g.lambda2_min * factor) << ':'
       << format_double(g.lambda2_max * factor) << ':' << g.n2;
    return os.str();
}

std::string scale_loop_spec(const std::string& spec, double factor) {
    const nhchain::ParameterLoop loop = nhchain::parse_loop_spec(spec);
    std::ostringstream os;
    switch (loop.kind) {
        case nhchain::LoopKind::Square:
            os << "square:" << format_double(loop.lambda_m * factor);
            break;
        case nhchain::LoopKind::ParametricTheta:
            os << "theta:" << format_double(loop.lambda_m * factor) << ':'
               << loop.theta_samples;
            break;
        case nhchain::LoopKind::Polyline: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& v : loop.vertices)
                arr.push_back({v[0] * factor, v[1] * factor});
            os << "polyline:" << arr.dump();
            break;
        }
    }
    return os.str();
}

std::string scale_line_spec(const std::string& spec, double factor) {
    std::stringstream ss(spec);
    std::string a, b, n;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, n, ':');
    auto scale_pair = [factor](const std::string& text) {
        std::stringstream ps(text);
        std::string x, y;
        std::getline(ps, x, ',');
        std::getline(ps, y, ',');
        return format_double(std::stod(x) * factor) + "," + format_double(std::stod(y) * factor);
    };
    return scale_pair(a) + ":" + scale_pair(b) + ":" + n;
}

// --mhz2pi: every rate-like input is multiplied by 2*pi so that values quoted
// in MHz land in the canonical angular 1/us units. Times are untouched.
void scale_rate_inputs(nlohmann::json& p) {
    const double factor = 2.0 * std::numbers::pi;
    for (const char* key : {"kappa", "lambda1", "lambda2", "flag_tol", "gap_tol", "re_tol",
                            "gamma", "gb", "gr", "eps1", "eps2", "nu1", "nu2", "delta_b",
                            "delta_r"})
        if (p.contains(key)) p[key] = p[key].get<double>() * factor;
    if (p.contains("grid")) p["grid"] = scale_grid_spec(p["grid"].get<std::string>(), factor);
    if (p.contains("loop")) p["loop"] = scale_loop_spec(p["loop"].get<std::string>(), factor);
    if (p.contains("line")) p["line"] = scale_line_spec(p["line"].get<std::string>(), factor);
    if (p.contains("chain")) {
        nlohmann::json& chain = p["chain"];
        for (auto& v : chain["kappas"]) v = v.get<double>() * factor;
        for (auto& v : chain["lambdas"]) v = v.get<double>() * factor;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nhchain: eigenspectra, exceptional points, resultant winding numbers,\n"
                 "no-jump dynamics and concurrence for small dissipative coupled-mode chains.\n"
                 "All rates are angular frequencies in 1/us unless --mhz2pi is given."};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string config_path, out_path, dump_path, format = "csv";
    bool mhz2pi = false;
    app.add_option("--config", config_path, "run a saved configuration JSON file");
    app.add_option("--out", out_path, "output file for the row data");
    app.add_option("--format", format, "row output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--dump-config", dump_path, "write the materialized configuration JSON");
    app.add_flag("--mhz2pi", mhz2pi, "multiply rate inputs by 2*pi (plain MHz -> 1/us)");

    nlohmann::json params = nlohmann::json::object();
    auto add_num = [&params](CLI::App* cmd, const char* name, const char* key,
                             const char* desc) {
        cmd->add_option_function<double>(
            name, [&params, key](double v) { params[key] = v; }, desc);
    };
    auto add_int = [&params](CLI::App* cmd, const char* name, const char* key,
                             const char* desc) {
        cmd->add_option_function<int>(
            name, [&params, key](int v) { params[key] = v; }, desc);
    };
    auto add_str = [&params](CLI::App* cmd, const char* name, const char* key,
                             const char* desc) {
        cmd->add_option_function<std::string>(
            name, [&params, key](const std::string& v) { params[key] = v; }, desc);
    };
    auto add_flag = [&params](CLI::App* cmd, const char* name, const char* key,
                              const char* desc) {
        cmd->add_flag_function(
            name, [&params, key](std::int64_t n) { if (n > 0) params[key] = true; }, desc);
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "gap maps over a (lambda1, lambda2) grid");
    add_num(spectrum, "--kappa", "kappa", "decay rate of mode 1");
    add_str(spectrum, "--grid", "grid", "grid spec min:max:n,min:max:n");
    add_num(spectrum, "--flag-tol", "flag_tol", "tolerance for the isofrequency/i-Fermi flags");
    add_int(spectrum, "--threads", "threads", "worker threads (default: NHCHAIN_THREADS)");

    CLI::App* eps = app.add_subcommand("eps", "locate the four third-order degeneracies");
    add_num(eps, "--kappa", "kappa", "decay rate of mode 1");

    CLI::App* winding = app.add_subcommand("winding", "resultant winding number along a loop");
    add_num(winding, "--kappa", "kappa", "decay rate (chain model)");
    add_str(winding, "--loop", "loop", "square:<lm> | theta:<lm>:<n> | polyline:<src>");
    add_flag(winding, "--reverse", "reverse", "traverse the loop backwards");
    add_str(winding, "--model", "model", "chain (default) | dp2d | dp3d | ep2qubit");
    add_num(winding, "--gamma", "gamma", "dissipation rate for the ep2qubit model");
    add_int(winding, "--samples-per-edge", "samples_per_edge", "initial sampling density");

    CLI::App* evolve = app.add_subcommand("evolve", "no-jump trajectory under the chain");
    add_num(evolve, "--kappa", "kappa", "decay rate of mode 1");
    add_num(evolve, "--lambda1", "lambda1", "coupling of modes 1-2");
    add_num(evolve, "--lambda2", "lambda2", "coupling of modes 2-3");
    evolve->add_option_function<std::string>(
        "--chain-json",
        [&params](const std::string& v) { params["chain"] = nlohmann::json::parse(v); },
        "full chain parameters as JSON (overrides kappa/lambda options)");
    add_str(evolve, "--psi0", "psi0", "initial state: modeK or re,im;re,im;...");
    add_num(evolve, "--dt", "dt", "step size in us (default 1e-3)");
    add_num(evolve, "--tfinal", "tfinal", "final time in us");
    add_int(evolve, "--stride", "stride", "record every stride-th step");

    CLI::App* modulated = app.add_subcommand("modulated",
                                             "two-tone modulated interaction-picture dynamics");
    add_num(modulated, "--gb", "gb", "bus coupling");
    add_num(modulated, "--gr", "gr", "readout coupling");
    add_num(modulated, "--kappa", "kappa", "readout decay rate");
    add_num(modulated, "--eps1", "eps1", "first modulation amplitude");
    add_num(modulated, "--eps2", "eps2", "second modulation amplitude");
    add_num(modulated, "--nu1", "nu1", "first modulation frequency");
    add_num(modulated, "--nu2", "nu2", "second modulation frequency");
    add_num(modulated, "--delta-b", "delta_b", "bus detuning omega_b - omega_0");
    add_num(modulated, "--delta-r", "delta_r", "readout detuning omega_r - omega_0");
    add_str(modulated, "--psi0", "psi0", "initial state (default mode2)");
    add_num(modulated, "--dt", "dt", "step size in us (default 2e-4)");
    add_num(modulated, "--tfinal", "tfinal", "final time in us");
    add_int(modulated, "--stride", "stride", "record every stride-th step");

    CLI::App* extract = app.add_subcommand("extract",
                                           "matrix-pencil eigenenergies from simulated traces");
    add_num(extract, "--kappa", "kappa", "decay rate of mode 1");
    add_num(extract, "--lambda1", "lambda1", "coupling of modes 1-2");
    add_num(extract, "--lambda2", "lambda2", "coupling of modes 2-3");
    add_str(extract, "--line", "line", "sweep spec l1a,l2a:l1b,l2b:n");
    add_int(extract, "--component", "component", "1-based mode index to sample (default 2)");
    add_int(extract, "--order", "order", "model order 1..3 (default 3)");
    add_str(extract, "--psi0", "psi0", "initial state (default mode2)");
    add_num(extract, "--dt", "dt", "integration step (default 1e-3)");
    add_num(extract, "--tfinal", "tfinal", "trace length in us (default 4)");
    add_int(extract, "--stride", "stride", "sample stride (default 10)");
    add_num(extract, "--re-tol", "re_tol", "parametrization classification tolerance");

    CLI::App* concurrence = app.add_subcommand("concurrence",
                                               "pairwise concurrences of a three-mode state");
    add_str(concurrence, "--state", "state", "amplitudes re,im;re,im;re,im");
    add_num(concurrence, "--kappa", "kappa", "decay rate (eigenstate mode)");
    add_num(concurrence, "--lambda1", "lambda1", "coupling of modes 1-2");
    add_num(concurrence, "--lambda2", "lambda2", "coupling of modes 2-3");
    add_int(concurrence, "--state-index", "state_index", "eigenstate index in spectral order");

    CLI::App* arcs = app.add_subcommand("arcs", "degeneracy classification over a grid");
    add_num(arcs, "--kappa", "kappa", "decay rate of mode 1");
    add_str(arcs, "--grid", "grid", "grid spec min:max:n,min:max:n");
    add_num(arcs, "--gap-tol", "gap_tol", "degeneracy tolerance (default 1e-6*kappa)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    nhchain::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config file \"" << config_path << "\"\n";
                return 2;
            }
            cfg = nhchain::RunConfig::from_json(nlohmann::json::parse(in));
        } else {
            CLI::App* chosen = nullptr;
            for (CLI::App* sub : {spectrum, eps, winding, evolve, modulated, extract,
                                  concurrence, arcs})
                if (sub->parsed()) chosen = sub;
            if (chosen == nullptr) {
                std::cerr << app.help();
                return 2;
            }
            cfg.command = nhchain::command_from_string(chosen->get_name());
            if (mhz2pi) {
                scale_rate_inputs(params);
                std::cout << "note: rate inputs multiplied by 2*pi (MHz -> 1/us)\n";
            }
            cfg.params = params;
            cfg.output_path = out_path;
            cfg.format = nhchain::format_from_string(format);
        }
        if (!dump_path.empty()) {
            std::ofstream dump(dump_path);
            if (!dump) {
                std::cerr << "cannot open dump file \"" << dump_path << "\"\n";
                return 2;
            }
            dump << cfg.to_json().dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return nhchain::run(cfg, std::cout, std::cerr);
}
