#include "nhchain/topology.hpp"

#include "nhchain/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nhchain {

ResultantVector resultant_vector(const ComplexSpectrum& spectrum) {
    if (spectrum.energies.size() != 3)
        throw std::invalid_argument("resultant_vector: exactly three energies required");
    const cplx e1 = spectrum.energies[0];
    const cplx e2 = spectrum.energies[1];
    const cplx e3 = spectrum.energies[2];

    const cplx diffs = (e1 - e2) * (e1 - e3) * (e2 - e3);
    ResultantVector rv;
    rv.r1 = diffs * diffs;
    // (sum - 3*E_k) over the three energies; symmetric in the labels. The
    // leading 8i makes the component real on the chain's symmetric spectra.
    rv.r2 = cplx(0.0, 8.0) *
            (e2 + e3 - 2.0 * e1) * (e1 + e3 - 2.0 * e2) * (e1 + e2 - 2.0 * e3);

    const double norm_c = std::sqrt(std::norm(rv.r1) + std::norm(rv.r2));
    if (norm_c > 0.0 &&
        (std::abs(rv.r1.imag()) > 1e-6 * norm_c || std::abs(rv.r2.imag()) > 1e-6 * norm_c))
        throw std::runtime_error("resultant_vector: components are not real "
                                 "(spectrum outside the symmetric class)");
    rv.norm = norm_c;
    rv.phase = (norm_c > 0.0) ? std::atan2(rv.r2.real(), rv.r1.real()) : 0.0;
    return rv;
}

cplx sylvester_resultant(const Polynomial& p, const Polynomial& q) {
    const int n = p.degree();
    const int m = q.degree();
    if (n < 1 && m < 1)
        throw std::invalid_argument("sylvester_resultant: both polynomials constant");
    if (n < 1 || m < 1)
        throw std::invalid_argument(
            "sylvester_resultant: degree-pad constants to degree 1 first");

    ComplexMatrix s(m + n);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k <= n; ++k) s.at(i, i + k) = p.coefficients[static_cast<std::size_t>(k)];
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= m; ++k)
            s.at(m + j, j + k) = q.coefficients[static_cast<std::size_t>(k)];
    return determinant(s);
}

ParameterLoop ParameterLoop::square(double lambda_m, LoopOrientation orientation) {
    ParameterLoop l;
    l.kind = LoopKind::Square;
    l.lambda_m = lambda_m;
    l.orientation = orientation;
    l.validate();
    return l;
}

ParameterLoop ParameterLoop::parametric_theta(double lambda_m, int theta_samples,
                                              LoopOrientation orientation) {
    ParameterLoop l;
    l.kind = LoopKind::ParametricTheta;
    l.lambda_m = lambda_m;
    l.theta_samples = theta_samples;
    l.orientation = orientation;
    l.validate();
    return l;
}

ParameterLoop ParameterLoop::polyline(std::vector<std::array<double, 2>> vertices,
                                      LoopOrientation orientation) {
    ParameterLoop l;
    l.kind = LoopKind::Polyline;
    l.vertices = std::move(vertices);
    l.orientation = orientation;
    l.validate();
    return l;
}

void ParameterLoop::validate() const {
    switch (kind) {
        case LoopKind::Square:
            if (!(lambda_m > 0.0))
                throw std::invalid_argument("ParameterLoop: lambda_m must be > 0");
            return;
        case LoopKind::ParametricTheta:
            if (!(lambda_m > 0.0))
                throw std::invalid_argument("ParameterLoop: lambda_m must be > 0");
            if (theta_samples < 8)
                throw std::invalid_argument("ParameterLoop: theta_samples must be >= 8");
            return;
        case LoopKind::Polyline:
            if (vertices.size() < 4)
                throw std::invalid_argument(
                    "ParameterLoop: polyline needs at least 3 edges plus closure");
            if (vertices.front() != vertices.back())
                throw std::invalid_argument("ParameterLoop: polyline must be closed "
                                            "(first vertex equals last)");
            return;
    }
    throw std::invalid_argument("ParameterLoop: unknown kind");
}

std::array<double, 2> square_loop_point(double theta, double lambda_m) {
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    const double cc = c * std::abs(c);
    const double ss = sn * std::abs(sn);
    return {0.5 * lambda_m * (1.0 - cc + ss), 0.5 * lambda_m * (1.0 - cc - ss)};
}

ResultantField chain_resultant_field(double kappa) {
    return [kappa](double lambda1, double lambda2) -> std::array<double, 2> {
        const ResultantVector rv =
            resultant_vector(eigenvalues_closed_form(lambda1, lambda2, kappa));
        return {rv.r1.real(), rv.r2.real()};
    };
}

ResultantField reference_resultant_field(const ReferenceModelParams& model_template) {
    return [model_template](double x, double y) -> std::array<double, 2> {
        ReferenceModelParams p = model_template;
        switch (p.kind) {
            case ReferenceModelKind::DP2D: p.omega_x = x; p.omega_y = y; break;
            case ReferenceModelKind::DP3D: p.lambda1 = x; p.lambda2 = y; break;
            case ReferenceModelKind::EP2Qubit: p.j_x = x; p.j_y = y; break;
        }
        const Polynomial cp = characteristic_polynomial(build_reference_model(p));
        Polynomial d1 = cp.derivative();
        Polynomial d2 = d1.derivative();
        if (d2.degree() < 1) d2 = d2.padded_to_degree(1);
        const cplx r1 = sylvester_resultant(cp, d1);
        const cplx r2 = sylvester_resultant(cp, d2);
        const double norm_c = std::sqrt(std::norm(r1) + std::norm(r2));
        if (norm_c > 0.0 &&
            (std::abs(r1.imag()) > 1e-6 * norm_c || std::abs(r2.imag()) > 1e-6 * norm_c))
            throw std::runtime_error(
                "reference_resultant_field: resultants are not real for this model");
        return {r1.real(), r2.real()};
    };
}

namespace {

// Loop position for a global parameter u in [0, 1], Forward geometry.
std::array<double, 2> loop_point_at(const ParameterLoop& loop, double u) {
    u = std::clamp(u, 0.0, 1.0);
    switch (loop.kind) {
        case LoopKind::Square: {
            const double scaled = 4.0 * u;
            const int edge = std::min(3, static_cast<int>(scaled));
            const double t = scaled - edge;
            const double lm = loop.lambda_m;
            switch (edge) {
                case 0: return {lm * t, 0.0};
                case 1: return {lm, lm * t};
                case 2: return {lm * (1.0 - t), lm};
                default: return {0.0, lm * (1.0 - t)};
            }
        }
        case LoopKind::ParametricTheta:
            return square_loop_point(2.0 * std::numbers::pi * u, loop.lambda_m);
        case LoopKind::Polyline: {
            const std::size_t edges = loop.vertices.size() - 1;
            const double scaled = static_cast<double>(edges) * u;
            const std::size_t edge =
                std::min(edges - 1, static_cast<std::size_t>(scaled));
            const double t = scaled - static_cast<double>(edge);
            const auto& a = loop.vertices[edge];
            const auto& b = loop.vertices[edge + 1];
            return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
        }
    }
    throw std::invalid_argument("loop_point_at: unknown kind");
}

int initial_sample_count(const ParameterLoop& loop, const WindingOptions& opts) {
    switch (loop.kind) {
        case LoopKind::Square: return 4 * opts.samples_per_edge;
        case LoopKind::ParametricTheta: return loop.theta_samples;
        case LoopKind::Polyline:
            return static_cast<int>(loop.vertices.size() - 1) * opts.samples_per_edge;
    }
    return 0;
}

struct FieldSample {
    double u = 0.0;
    double x = 0.0, y = 0.0;
    double r1 = 0.0, r2 = 0.0;
    double norm = 0.0;
    double phase = 0.0;  // atan2(r2, r1)
};

double wrap_phase(double d) {
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    return d;
}

struct PhaseAccumulator {
    const ParameterLoop& loop;
    const ResultantField& field;
    const WindingOptions& opts;
    double zero_tol = 0.0;
    std::size_t samples_used = 0;
    double total_phase = 0.0;
    std::vector<WindingTraceSample>* trace = nullptr;
    double arc_position = 0.0;

    FieldSample evaluate(double u) const {
        const auto pt = loop_point_at(loop, u);
        const auto rv = field(pt[0], pt[1]);
        FieldSample s;
        s.u = u;
        s.x = pt[0];
        s.y = pt[1];
        s.r1 = rv[0];
        s.r2 = rv[1];
        s.norm = std::hypot(rv[0], rv[1]);
        s.phase = (s.norm > 0.0) ? std::atan2(rv[1], rv[0]) : 0.0;
        return s;
    }

    void check_nonzero(const FieldSample& s) const {
        if (s.norm <= zero_tol)
            throw std::runtime_error("winding_number: resultant vector vanishes on the "
                                     "loop (degeneracy of full order on the path)");
    }

    void record(const FieldSample& s) {
        if (!trace) return;
        WindingTraceSample t;
        if (!trace->empty()) {
            const auto& prev = trace->back();
            arc_position += std::hypot(s.x - prev.lambda1, s.y - prev.lambda2);
        }
        t.s = arc_position;  // rescaled to a fraction afterwards
        t.lambda1 = s.x;
        t.lambda2 = s.y;
        t.r1_normalized = (s.norm > 0.0) ? s.r1 / s.norm : 0.0;
        t.r2_normalized = (s.norm > 0.0) ? s.r2 / s.norm : 0.0;
        t.phase_unwrapped = total_phase;
        trace->push_back(t);
    }

    void advance(const FieldSample& a, const FieldSample& b) {
        const double step = wrap_phase(b.phase - a.phase);
        if (std::abs(step) < opts.max_phase_step) {
            total_phase += step;
            record(b);
            return;
        }
        if (samples_used >= opts.max_total_samples)
            throw std::runtime_error("winding_number: sample cap exceeded while refining "
                                     "(a degeneracy lies arbitrarily close to the loop)");
        const FieldSample mid = evaluate(0.5 * (a.u + b.u));
        ++samples_used;
        check_nonzero(mid);
        advance(a, mid);
        advance(mid, b);
    }
};

}  // namespace

WindingResult winding_number(const ParameterLoop& loop, const ResultantField& field,
                             const WindingOptions& opts) {
    loop.validate();
    const int n_init = initial_sample_count(loop, opts);

    PhaseAccumulator acc{loop, field, opts};
    std::vector<FieldSample> init;
    init.reserve(static_cast<std::size_t>(n_init) + 1);
    for (int k = 0; k <= n_init; ++k) {
        double u = static_cast<double>(k) / n_init;
        if (loop.orientation == LoopOrientation::Reversed) u = 1.0 - u;
        init.push_back(acc.evaluate(u));
    }
    acc.samples_used = init.size();

    double max_norm = 0.0;
    for (const auto& s : init) max_norm = std::max(max_norm, s.norm);
    acc.zero_tol = 1e-12 * max_norm;
    for (const auto& s : init) acc.check_nonzero(s);

    WindingResult result;
    if (opts.record_trace) acc.trace = &result.trace;
    acc.record(init.front());
    // The start phase is the reference; record() stores cumulative phase
    // relative to it plus the absolute phase of the first sample below.
    for (std::size_t k = 0; k + 1 < init.size(); ++k) acc.advance(init[k], init[k + 1]);

    result.raw = acc.total_phase / (2.0 * std::numbers::pi);
    result.rounded = static_cast<int>(std::lround(result.raw));
    result.samples_used = acc.samples_used;
    if (std::abs(result.raw - result.rounded) > opts.quantization_tol)
        throw std::runtime_error("winding_number: accumulated phase is not quantized "
                                 "(|raw - rounded| above tolerance)");
    if (acc.trace && !result.trace.empty()) {
        const double total_arc = result.trace.back().s;
        if (total_arc > 0.0)
            for (auto& t : result.trace) t.s /= total_arc;
        const double phase0 = init.front().phase;
        for (auto& t : result.trace) t.phase_unwrapped += phase0;
    }
    return result;
}

WindingResult winding_number(const ParameterLoop& loop, double kappa,
                             const WindingOptions& opts) {
    return winding_number(loop, chain_resultant_field(kappa), opts);
}

std::string winding_trace_csv(const WindingResult& result) {
    std::ostringstream os;
    os << "s,lambda1,lambda2,r1_normalized,r2_normalized,phase_unwrapped\n";
    for (const auto& t : result.trace) {
        os << format_double(t.s) << ',' << format_double(t.lambda1) << ','
           << format_double(t.lambda2) << ',' << format_double(t.r1_normalized) << ','
           << format_double(t.r2_normalized) << ',' << format_double(t.phase_unwrapped)
           << '\n';
    }
    return os.str();
}

}  // namespace nhchain
