#include "nhchain/cli.hpp"

#include "nhchain/analysis.hpp"
#include "nhchain/csv.hpp"
#include "nhchain/dynamics.hpp"
#include "nhchain/model.hpp"
#include "nhchain/spectra.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nhchain {

std::string command_to_string(Command c) {
    switch (c) {
        case Command::Spectrum: return "spectrum";
        case Command::Eps: return "eps";
        case Command::Winding: return "winding";
        case Command::Evolve: return "evolve";
        case Command::Modulated: return "modulated";
        case Command::Extract: return "extract";
        case Command::Concurrence: return "concurrence";
        case Command::Arcs: return "arcs";
    }
    throw std::invalid_argument("command_to_string: unknown command");
}

Command command_from_string(const std::string& s) {
    if (s == "spectrum") return Command::Spectrum;
    if (s == "eps") return Command::Eps;
    if (s == "winding") return Command::Winding;
    if (s == "evolve") return Command::Evolve;
    if (s == "modulated") return Command::Modulated;
    if (s == "extract") return Command::Extract;
    if (s == "concurrence") return Command::Concurrence;
    if (s == "arcs") return Command::Arcs;
    throw std::invalid_argument("unknown command \"" + s + "\"");
}

std::string format_to_string(OutputFormat f) {
    return f == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown format \"" + s + "\" (csv or json)");
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["command"] = command_to_string(command);
    j["params"] = params;
    j["output_path"] = output_path;
    j["format"] = format_to_string(format);
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("RunConfig: expected a JSON object");
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "command" && k != "params" && k != "output_path" && k != "format")
            throw std::invalid_argument("RunConfig: unknown key \"" + k + "\"");
    }
    RunConfig c;
    c.command = command_from_string(j.at("command").get<std::string>());
    if (j.contains("params")) {
        if (!j.at("params").is_object())
            throw std::invalid_argument("RunConfig: params must be an object");
        c.params = j.at("params");
    }
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("format")) c.format = format_from_string(j.at("format").get<std::string>());
    return c;
}

namespace {

double require_finite(double v, const std::string& key) {
    if (!std::isfinite(v))
        throw std::invalid_argument("parameter \"" + key + "\" must be finite");
    return v;
}

double get_num(const nlohmann::json& p, const std::string& key) {
    if (!p.contains(key)) throw std::invalid_argument("missing parameter \"" + key + "\"");
    if (!p.at(key).is_number())
        throw std::invalid_argument("parameter \"" + key + "\" must be a number");
    return require_finite(p.at(key).get<double>(), key);
}

double get_num_or(const nlohmann::json& p, const std::string& key, double fallback) {
    return p.contains(key) ? get_num(p, key) : fallback;
}

int get_int_or(const nlohmann::json& p, const std::string& key, int fallback) {
    if (!p.contains(key)) return fallback;
    if (!p.at(key).is_number_integer())
        throw std::invalid_argument("parameter \"" + key + "\" must be an integer");
    return p.at(key).get<int>();
}

bool get_bool_or(const nlohmann::json& p, const std::string& key, bool fallback) {
    if (!p.contains(key)) return fallback;
    if (!p.at(key).is_boolean())
        throw std::invalid_argument("parameter \"" + key + "\" must be a boolean");
    return p.at(key).get<bool>();
}

std::string get_str(const nlohmann::json& p, const std::string& key) {
    if (!p.contains(key)) throw std::invalid_argument("missing parameter \"" + key + "\"");
    if (!p.at(key).is_string())
        throw std::invalid_argument("parameter \"" + key + "\" must be a string");
    return p.at(key).get<std::string>();
}

std::vector<double> split_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, sep)) {
        if (token.empty()) throw std::invalid_argument("empty numeric field in \"" + text + "\"");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse number \"" + token + "\"");
        }
        if (used != token.size())
            throw std::invalid_argument("cannot parse number \"" + token + "\"");
        out.push_back(require_finite(v, token));
    }
    return out;
}

std::string kind_name(DegeneracyKind k) {
    switch (k) {
        case DegeneracyKind::Regular: return "Regular";
        case DegeneracyKind::EP2: return "EP2";
        case DegeneracyKind::EP3: return "EP3";
        case DegeneracyKind::DP: return "DP";
    }
    return "Regular";
}

struct CommandOutput {
    std::string summary;
    std::string csv;
    nlohmann::json rows = nlohmann::json::array();
};

CommandOutput run_spectrum(const nlohmann::json& p) {
    const double kappa = get_num(p, "kappa");
    const GridSpec grid = parse_grid_spec(get_str(p, "grid"));
    const double flag_tol = get_num_or(p, "flag_tol", -1.0);
    const int threads = get_int_or(p, "threads", 0);
    const auto records = scan_spectral_map(kappa, grid, flag_tol, threads);

    CommandOutput out;
    out.csv = spectral_map_csv(records);
    for (const auto& r : records)
        out.rows.push_back({{"lambda1", r.lambda1},
                            {"lambda2", r.lambda2},
                            {"max_re_gap", r.max_re_gap},
                            {"max_im_gap", r.max_im_gap},
                            {"min_gap", r.min_gap},
                            {"isofrequency", r.isofrequency},
                            {"ifermi", r.ifermi}});
    out.summary = "spectrum: kappa=" + format_double(kappa) + " rows=" +
                  std::to_string(records.size());
    return out;
}

CommandOutput run_eps(const nlohmann::json& p) {
    const double kappa = get_num(p, "kappa");
    const auto points = locate_ep3(kappa);

    CommandOutput out;
    std::ostringstream csv;
    csv << "lambda1,lambda2,refined_max_gap\n";
    std::ostringstream summary;
    summary << "eps: kappa=" << format_double(kappa);
    for (const auto& pt : points) {
        csv << format_double(pt.lambda1) << ',' << format_double(pt.lambda2) << ','
            << format_double(pt.refined_max_gap) << '\n';
        out.rows.push_back({{"lambda1", pt.lambda1},
                            {"lambda2", pt.lambda2},
                            {"refined_max_gap", pt.refined_max_gap}});
        summary << " (" << format_double(pt.lambda1) << ',' << format_double(pt.lambda2)
                << ')';
    }
    out.csv = csv.str();
    out.summary = summary.str();
    return out;
}

CommandOutput run_winding(const nlohmann::json& p, bool want_rows) {
    ParameterLoop loop = parse_loop_spec(get_str(p, "loop"));
    if (get_bool_or(p, "reverse", false)) loop.orientation = LoopOrientation::Reversed;

    WindingOptions opts;
    opts.samples_per_edge = get_int_or(p, "samples_per_edge", opts.samples_per_edge);
    opts.record_trace = want_rows;

    const std::string model = p.contains("model") ? get_str(p, "model") : "chain";
    WindingResult result;
    if (model == "chain") {
        result = winding_number(loop, get_num(p, "kappa"), opts);
    } else {
        ReferenceModelParams ref;
        if (model == "dp2d") ref = ReferenceModelParams::dp2d(0.0, 0.0);
        else if (model == "dp3d") ref = ReferenceModelParams::dp3d(0.0, 0.0);
        else if (model == "ep2qubit")
            ref = ReferenceModelParams::ep2_qubit(0.0, 0.0, get_num(p, "gamma"));
        else throw std::invalid_argument("unknown model \"" + model + "\"");
        result = winding_number(loop, reference_resultant_field(ref), opts);
    }

    CommandOutput out;
    out.csv = winding_trace_csv(result);
    for (const auto& t : result.trace)
        out.rows.push_back({{"s", t.s},
                            {"lambda1", t.lambda1},
                            {"lambda2", t.lambda2},
                            {"r1_normalized", t.r1_normalized},
                            {"r2_normalized", t.r2_normalized},
                            {"phase_unwrapped", t.phase_unwrapped}});
    out.summary = "winding: W_raw=" + format_double(result.raw) + " W=" +
                  std::to_string(result.rounded) + " samples=" +
                  std::to_string(result.samples_used);
    return out;
}

ComplexMatrix chain_matrix_from_params(const nlohmann::json& p) {
    if (p.contains("chain")) {
        if (!p.at("chain").is_object())
            throw std::invalid_argument("parameter \"chain\" must be an object");
        return build_chain_hamiltonian(chain_params_from_json(p.at("chain").dump()));
    }
    return build_chain_hamiltonian(three_mode_chain(
        get_num(p, "lambda1"), get_num(p, "lambda2"), get_num(p, "kappa")));
}

CommandOutput trace_output(const TimeTrace& trace, std::string label) {
    CommandOutput out;
    out.csv = trace_csv(trace, 1);  // trace already carries the integration stride
    for (std::size_t k = 0; k < trace.size(); ++k) {
        nlohmann::json row;
        row["t"] = trace.times[k];
        for (int i = 0; i < trace.dim(); ++i) {
            row["re_c" + std::to_string(i + 1)] =
                trace.states[k].amplitudes[static_cast<std::size_t>(i)].real();
            row["im_c" + std::to_string(i + 1)] =
                trace.states[k].amplitudes[static_cast<std::size_t>(i)].imag();
        }
        row["norm2"] = trace.norms[k];
        for (int i = 0; i < trace.dim(); ++i)
            row["p" + std::to_string(i + 1)] =
                trace.populations[k][static_cast<std::size_t>(i)];
        out.rows.push_back(std::move(row));
    }
    std::ostringstream summary;
    summary << label << ": samples=" << trace.size()
            << " final_norm2=" << format_double(trace.norms.back()) << " p=(";
    for (int i = 0; i < trace.dim(); ++i) {
        if (i) summary << ',';
        summary << format_double(trace.populations.back()[static_cast<std::size_t>(i)]);
    }
    summary << ')';
    out.summary = summary.str();
    return out;
}

CommandOutput run_evolve(const nlohmann::json& p) {
    const ComplexMatrix h = chain_matrix_from_params(p);
    const StateVector psi0 = parse_state_spec(
        p.contains("psi0") ? get_str(p, "psi0") : "mode2", h.dim);
    EvolveOptions opts;
    opts.dt = get_num_or(p, "dt", 1e-3);
    opts.t_final = get_num(p, "tfinal");
    opts.output_stride = get_int_or(p, "stride", 1);
    return trace_output(evolve_nh(h, psi0, opts), "evolve");
}

CommandOutput run_modulated(const nlohmann::json& p) {
    ModulationConfig cfg;
    cfg.g_b = get_num(p, "gb");
    cfg.g_r = get_num(p, "gr");
    cfg.epsilon1 = get_num(p, "eps1");
    cfg.epsilon2 = get_num(p, "eps2");
    cfg.nu1 = get_num(p, "nu1");
    cfg.nu2 = get_num(p, "nu2");
    cfg.delta_b = get_num(p, "delta_b");
    cfg.delta_r = get_num(p, "delta_r");
    const double kappa = get_num(p, "kappa");
    const StateVector psi0 =
        parse_state_spec(p.contains("psi0") ? get_str(p, "psi0") : "mode2", 3);
    EvolveOptions opts;
    opts.dt = get_num_or(p, "dt", 2e-4);
    opts.t_final = get_num(p, "tfinal");
    opts.output_stride = get_int_or(p, "stride", 1);

    CommandOutput out =
        trace_output(evolve_modulated(cfg, kappa, psi0, opts), "modulated");
    const auto eff = effective_couplings(cfg);
    out.summary += " lambda_eff=(" + format_double(eff[0]) + ',' + format_double(eff[1]) + ')';
    if (!cfg.resonant(1e-9)) out.summary += " off-resonant";
    return out;
}

CommandOutput run_extract(const nlohmann::json& p) {
    const double kappa = get_num(p, "kappa");
    const int order = get_int_or(p, "order", 3);
    const int component = get_int_or(p, "component", 2) - 1;  // 1-based mode index
    EvolveOptions opts;
    opts.dt = get_num_or(p, "dt", 1e-3);
    opts.t_final = get_num_or(p, "tfinal", 4.0);
    opts.output_stride = get_int_or(p, "stride", 10);
    const double re_tol = get_num_or(p, "re_tol", 0.02 * std::abs(kappa));

    std::vector<std::array<double, 2>> points;
    if (p.contains("line")) {
        // "l1a,l2a:l1b,l2b:n" - n points along the segment
        const std::string spec = get_str(p, "line");
        std::stringstream ss(spec);
        std::string a, b, n_text;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
            !std::getline(ss, n_text, ':'))
            throw std::invalid_argument("line spec must be \"l1a,l2a:l1b,l2b:n\"");
        const auto pa = split_numbers(a, ',');
        const auto pb = split_numbers(b, ',');
        const auto pn = split_numbers(n_text, ',');
        if (pa.size() != 2 || pb.size() != 2 || pn.size() != 1 || pn[0] < 2)
            throw std::invalid_argument("line spec must be \"l1a,l2a:l1b,l2b:n\" with n >= 2");
        const int n = static_cast<int>(pn[0]);
        for (int k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / (n - 1);
            points.push_back({pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])});
        }
    } else {
        points.push_back({get_num(p, "lambda1"), get_num(p, "lambda2")});
    }

    std::vector<ExtractionRecord> records;
    for (const auto& pt : points) {
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(pt[0], pt[1], kappa));
        const StateVector psi0 = parse_state_spec(
            p.contains("psi0") ? get_str(p, "psi0") : "mode2", 3);
        const TimeTrace trace = evolve_nh(h, psi0, opts);
        ExtractionRecord rec;
        rec.lambda1 = pt[0];
        rec.lambda2 = pt[1];
        rec.energies = extract_eigenenergies(trace, component, order);
        if (rec.energies.size() == 3) {
            try {
                rec.fit = fit_symmetric_parametrization(rec.energies, re_tol);
            } catch (const std::runtime_error&) {
                // outside the symmetric regime; leave the fit fields empty
            }
        }
        records.push_back(std::move(rec));
    }

    CommandOutput out;
    out.csv = extraction_csv(records);
    for (const auto& rec : records) {
        nlohmann::json row;
        row["lambda1"] = rec.lambda1;
        row["lambda2"] = rec.lambda2;
        for (std::size_t k = 0; k < rec.energies.size(); ++k) {
            row["re_E" + std::to_string(k + 1)] = rec.energies[k].real();
            row["im_E" + std::to_string(k + 1)] = rec.energies[k].imag();
        }
        if (rec.fit) {
            row["R"] = rec.fit->r;
            row["I1"] = rec.fit->i1;
            row["I2"] = rec.fit->i2;
            row["residual"] = rec.fit->residual;
        }
        out.rows.push_back(std::move(row));
    }
    out.summary = "extract: points=" + std::to_string(records.size());
    if (records.size() == 1) {
        out.summary += " E=";
        for (std::size_t k = 0; k < records.front().energies.size(); ++k) {
            if (k) out.summary += ';';
            out.summary += format_double(records.front().energies[k].real()) + "+" +
                           format_double(records.front().energies[k].imag()) + "i";
        }
    }
    return out;
}

CommandOutput run_concurrence(const nlohmann::json& p) {
    StateVector state;
    std::string origin;
    if (p.contains("state")) {
        state = parse_state_spec(get_str(p, "state"), 3);
        origin = "state";
    } else {
        const double kappa = get_num(p, "kappa");
        const double l1 = get_num(p, "lambda1");
        const double l2 = get_num(p, "lambda2");
        const int index = get_int_or(p, "state_index", 0);
        const ComplexSpectrum spec = eigenvalues_closed_form(l1, l2, kappa);
        if (index < 0 || index >= static_cast<int>(spec.energies.size()))
            throw std::invalid_argument("state_index out of range");
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(l1, l2, kappa));
        state = eigenvector_for(h, spec.energies[static_cast<std::size_t>(index)]);
        origin = "eigenstate " + std::to_string(index);
    }
    if (std::abs(state.norm - 1.0) > 1e-8)
        throw std::invalid_argument("concurrence: state must be normalized");

    const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    CommandOutput out;
    std::ostringstream csv;
    csv << "mode_i,mode_j,concurrence\n";
    std::ostringstream summary;
    summary << "concurrence(" << origin << "):";
    for (const auto& pr : pairs) {
        const double c = pairwise_concurrence(state, pr[0], pr[1]);
        csv << (pr[0] + 1) << ',' << (pr[1] + 1) << ',' << format_double(c) << '\n';
        out.rows.push_back(
            {{"mode_i", pr[0] + 1}, {"mode_j", pr[1] + 1}, {"concurrence", c}});
        summary << " C(" << (pr[0] + 1) << ',' << (pr[1] + 1) << ")=" << format_double(c);
    }
    out.csv = csv.str();
    out.summary = summary.str();
    return out;
}

CommandOutput run_arcs(const nlohmann::json& p) {
    const double kappa = get_num(p, "kappa");
    const GridSpec grid = parse_grid_spec(get_str(p, "grid"));
    const double gap_tol =
        get_num_or(p, "gap_tol", 1e-6 * (kappa != 0.0 ? std::abs(kappa) : 1.0));

    CommandOutput out;
    std::ostringstream csv;
    csv << "lambda1,lambda2,kind,min_gap\n";
    std::size_t counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < grid.n1; ++i)
        for (int j = 0; j < grid.n2; ++j) {
            const double l1 = grid.lambda1_at(i);
            const double l2 = grid.lambda2_at(j);
            const EpClassification cls = classify_point(l1, l2, kappa, gap_tol);
            csv << format_double(l1) << ',' << format_double(l2) << ','
                << kind_name(cls.kind) << ',' << format_double(cls.min_gap) << '\n';
            out.rows.push_back({{"lambda1", l1},
                                {"lambda2", l2},
                                {"kind", kind_name(cls.kind)},
                                {"min_gap", cls.min_gap}});
            counts[static_cast<int>(cls.kind)]++;
        }
    out.csv = csv.str();
    out.summary = "arcs: rows=" + std::to_string(out.rows.size()) +
                  " regular=" + std::to_string(counts[0]) + " ep2=" + std::to_string(counts[1]) +
                  " ep3=" + std::to_string(counts[2]) + " dp=" + std::to_string(counts[3]);
    return out;
}

}  // namespace

ParameterLoop parse_loop_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("loop spec must be square:<lm>, theta:<lm>:<n> or "
                                    "polyline:<source>");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    if (kind == "square") {
        const auto v = split_numbers(rest, ':');
        if (v.size() != 1) throw std::invalid_argument("square loop spec takes one number");
        return ParameterLoop::square(v[0]);
    }
    if (kind == "theta") {
        const auto v = split_numbers(rest, ':');
        if (v.size() != 2) throw std::invalid_argument("theta loop spec is theta:<lm>:<n>");
        return ParameterLoop::parametric_theta(v[0], static_cast<int>(v[1]));
    }
    if (kind == "polyline") {
        std::string payload = rest;
        if (!rest.empty() && rest.front() != '[') {
            std::ifstream in(rest);
            if (!in) throw std::invalid_argument("cannot open polyline file \"" + rest + "\"");
            std::ostringstream ss;
            ss << in.rdbuf();
            payload = ss.str();
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(payload);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("polyline: invalid JSON: ") + e.what());
        }
        if (!j.is_array()) throw std::invalid_argument("polyline: expected an array of pairs");
        std::vector<std::array<double, 2>> vertices;
        for (const auto& v : j) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw std::invalid_argument("polyline: entries must be [lambda1, lambda2]");
            vertices.push_back({require_finite(v[0].get<double>(), "polyline"),
                                require_finite(v[1].get<double>(), "polyline")});
        }
        return ParameterLoop::polyline(std::move(vertices));
    }
    throw std::invalid_argument("unknown loop kind \"" + kind + "\"");
}

GridSpec parse_grid_spec(const std::string& text) {
    std::stringstream ss(text);
    std::string axis1, axis2;
    if (!std::getline(ss, axis1, ',') || !std::getline(ss, axis2, ','))
        throw std::invalid_argument("grid spec must be \"min:max:n,min:max:n\"");
    const auto a = split_numbers(axis1, ':');
    const auto b = split_numbers(axis2, ':');
    if (a.size() != 3 || b.size() != 3)
        throw std::invalid_argument("grid spec must be \"min:max:n,min:max:n\"");
    GridSpec g;
    g.lambda1_min = a[0];
    g.lambda1_max = a[1];
    g.n1 = static_cast<int>(a[2]);
    g.lambda2_min = b[0];
    g.lambda2_max = b[1];
    g.n2 = static_cast<int>(b[2]);
    g.validate();
    return g;
}

StateVector parse_state_spec(const std::string& text, int dim) {
    if (text.rfind("mode", 0) == 0) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(text.substr(4), &used);
            if (used != text.size() - 4) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw std::invalid_argument("state spec \"" + text + "\" is not modeK");
        }
        if (k < 1 || k > dim)
            throw std::invalid_argument("state spec mode index out of range");
        std::vector<cplx> amps(static_cast<std::size_t>(dim), cplx(0.0, 0.0));
        amps[static_cast<std::size_t>(k - 1)] = 1.0;
        return StateVector::from_amplitudes(std::move(amps));
    }
    std::vector<cplx> amps;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ';')) {
        const auto v = split_numbers(token, ',');
        if (v.size() != 2)
            throw std::invalid_argument("state spec entries must be \"re,im\"");
        amps.emplace_back(v[0], v[1]);
    }
    if (static_cast<int>(amps.size()) != dim)
        throw std::invalid_argument("state spec has wrong dimension");
    return StateVector::from_amplitudes(std::move(amps));
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        CommandOutput result;
        const bool want_rows = !config.output_path.empty();
        switch (config.command) {
            case Command::Spectrum: result = run_spectrum(config.params); break;
            case Command::Eps: result = run_eps(config.params); break;
            case Command::Winding: result = run_winding(config.params, want_rows); break;
            case Command::Evolve: result = run_evolve(config.params); break;
            case Command::Modulated: result = run_modulated(config.params); break;
            case Command::Extract: result = run_extract(config.params); break;
            case Command::Concurrence: result = run_concurrence(config.params); break;
            case Command::Arcs: result = run_arcs(config.params); break;
        }
        if (want_rows) {
            std::ofstream file(config.output_path);
            if (!file)
                throw std::invalid_argument("cannot open output file \"" +
                                            config.output_path + "\"");
            if (config.format == OutputFormat::Csv) {
                file << result.csv;
            } else {
                nlohmann::json envelope;
                envelope["meta"] = config.to_json();
                envelope["rows"] = result.rows;
                file << envelope.dump(2) << '\n';
            }
        }
        out << result.summary << '\n';
        return 0;
    } catch (const std::invalid_argument& e) {
        nlohmann::json record;
        record["error"] = {{"message", e.what()},
                           {"status", 2},
                           {"command", command_to_string(config.command)}};
        err << record.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        nlohmann::json record;
        record["error"] = {{"message", e.what()},
                           {"status", 3},
                           {"command", command_to_string(config.command)}};
        err << record.dump() << '\n';
        return 3;
    }
}

}  // namespace nhchain
