#pragma once

#include "nhchain/topology.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace nhchain {

enum class Command { Spectrum, Eps, Winding, Evolve, Modulated, Extract, Concurrence, Arcs };
enum class OutputFormat { Csv, Json };

std::string command_to_string(Command c);
Command command_from_string(const std::string& s);
std::string format_to_string(OutputFormat f);
OutputFormat format_from_string(const std::string& s);

// One reproducible invocation: a command, its parameter map, and where the
// rows go. params carries exactly the keys each command documents; every
// numeric parameter must be finite.
struct RunConfig {
    Command command = Command::Spectrum;
    nlohmann::json params = nlohmann::json::object();
    std::string output_path;  // empty: summary only, no row output
    OutputFormat format = OutputFormat::Csv;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

// square:<lambda_m> | theta:<lambda_m>:<n_samples> | polyline:<file-or-inline-json>
// Polyline sources are JSON arrays of [lambda1, lambda2] pairs, first == last.
ParameterLoop parse_loop_spec(const std::string& text);

// "l1min:l1max:n1,l2min:l2max:n2"
GridSpec parse_grid_spec(const std::string& text);

// "modeK" (1-based basis state) or "re,im;re,im;..." amplitude list.
StateVector parse_state_spec(const std::string& text, int dim);

// Dispatches the command, writes the output file (CSV or a JSON envelope
// {"meta": ..., "rows": ...}) deterministically, prints a one-line summary to
// `out`. Returns 0 on success, 2 on invalid configuration, 3 on numerical
// failure; failures emit a machine-readable JSON error record on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace nhchain
