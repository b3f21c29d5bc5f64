#include "nhchain/dynamics.hpp"

#include "nhchain/csv.hpp"
#include "nhchain/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nhchain {

namespace {

void validate_evolve_inputs(const ComplexMatrix& matrix, const StateVector& psi0,
                            const EvolveOptions& opts) {
    matrix.validate();
    if (static_cast<int>(psi0.amplitudes.size()) != matrix.dim)
        throw std::invalid_argument("evolve: initial state dimension mismatch");
    if (!(opts.dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (!(opts.t_final > 0.0)) throw std::invalid_argument("evolve: t_final must be > 0");
    if (opts.output_stride < 1)
        throw std::invalid_argument("evolve: output_stride must be >= 1");
}

// True when the anti-Hermitian part (H - H^dag)/(2i) has no positive
// eigenvalue, i.e. the norm can only decay. Tested through the coefficient
// signs of the characteristic polynomial of the negated (Hermitian) part,
// which is robust against repeated zero eigenvalues.
bool is_purely_decaying(const ComplexMatrix& h) {
    if (h.dim > 8) return false;  // monitor only for the small systems we model
    ComplexMatrix neg_a(h.dim);
    const cplx half_i(0.0, 0.5);
    for (int i = 0; i < h.dim; ++i)
        for (int j = 0; j < h.dim; ++j)
            neg_a.at(i, j) = (h.at(i, j) - std::conj(h.at(j, i))) * half_i;
    const double scale = max_abs_entry(neg_a);
    if (scale == 0.0) return true;  // Hermitian: norm preserved
    Polynomial cp = characteristic_polynomial(neg_a);
    if (h.dim % 2 == 1)
        for (cplx& c : cp.coefficients) c = -c;
    // neg_a is PSD exactly when the monic coefficients alternate in sign.
    double tol = 1e-9;
    for (int k = 0; k <= h.dim; ++k) {
        const double signed_coeff = ((k % 2 == 0) ? 1.0 : -1.0) *
                                    cp.coefficients[static_cast<std::size_t>(k)].real();
        if (signed_coeff < -tol) return false;
        tol *= static_cast<double>(h.dim) * scale;
    }
    return true;
}

struct Recorder {
    TimeTrace trace;

    void push(double t, const std::vector<cplx>& psi) {
        StateVector s = StateVector::from_amplitudes(psi);
        const double n2 = s.norm * s.norm;
        std::vector<double> pops(psi.size(), 0.0);
        if (n2 > 0.0)
            for (std::size_t i = 0; i < psi.size(); ++i) pops[i] = std::norm(psi[i]) / n2;
        trace.times.push_back(t);
        trace.states.push_back(std::move(s));
        trace.norms.push_back(n2);
        trace.populations.push_back(std::move(pops));
    }
};

}  // namespace

TimeTrace evolve_nh(const ComplexMatrix& matrix, const StateVector& psi0,
                    const EvolveOptions& opts) {
    validate_evolve_inputs(matrix, psi0, opts);
    const bool monitor = is_purely_decaying(matrix);
    const cplx minus_i(0.0, -1.0);
    const int dim = matrix.dim;

    auto rhs = [&](const std::vector<cplx>& psi) {
        std::vector<cplx> out = matvec(matrix, psi);
        for (cplx& x : out) x *= minus_i;
        return out;
    };

    const long long n_steps = std::max(1ll, std::llround(opts.t_final / opts.dt));
    std::vector<cplx> psi = psi0.amplitudes;
    Recorder rec;
    rec.push(0.0, psi);
    double prev_norm2 = rec.trace.norms.back();

    std::vector<cplx> k1, k2, k3, k4, tmp(psi.size());
    for (long long step = 1; step <= n_steps; ++step) {
        k1 = rhs(psi);
        for (int i = 0; i < dim; ++i) tmp[static_cast<std::size_t>(i)] =
            psi[static_cast<std::size_t>(i)] + 0.5 * opts.dt * k1[static_cast<std::size_t>(i)];
        k2 = rhs(tmp);
        for (int i = 0; i < dim; ++i) tmp[static_cast<std::size_t>(i)] =
            psi[static_cast<std::size_t>(i)] + 0.5 * opts.dt * k2[static_cast<std::size_t>(i)];
        k3 = rhs(tmp);
        for (int i = 0; i < dim; ++i) tmp[static_cast<std::size_t>(i)] =
            psi[static_cast<std::size_t>(i)] + opts.dt * k3[static_cast<std::size_t>(i)];
        k4 = rhs(tmp);
        for (int i = 0; i < dim; ++i) {
            const auto s = static_cast<std::size_t>(i);
            psi[s] += opts.dt / 6.0 * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
        }
        double n2 = 0.0;
        for (const cplx& x : psi) n2 += std::norm(x);
        if (monitor && n2 > prev_norm2 * (1.0 + 1e-6))
            throw std::runtime_error("evolve_nh: norm grew on a decaying Hamiltonian "
                                     "(unstable step size)");
        prev_norm2 = n2;
        if (step % opts.output_stride == 0 || step == n_steps)
            rec.push(static_cast<double>(step) * opts.dt, psi);
    }
    return rec.trace;
}

bool ModulationConfig::resonant(double tol) const {
    return std::abs(nu1 - delta_r) <= tol && std::abs(nu2 + delta_b) <= tol;
}

TimeTrace evolve_modulated(const ModulationConfig& cfg, double kappa,
                           const StateVector& psi0, const EvolveOptions& opts) {
    if (static_cast<int>(psi0.amplitudes.size()) != 3)
        throw std::invalid_argument("evolve_modulated: three-mode initial state required");
    if (!(opts.dt > 0.0)) throw std::invalid_argument("evolve_modulated: dt must be > 0");
    if (!(opts.t_final > 0.0))
        throw std::invalid_argument("evolve_modulated: t_final must be > 0");
    if (opts.output_stride < 1)
        throw std::invalid_argument("evolve_modulated: output_stride must be >= 1");
    if (!(kappa >= 0.0)) throw std::invalid_argument("evolve_modulated: kappa must be >= 0");

    const double fastest = std::max({std::abs(cfg.nu1), std::abs(cfg.nu2),
                                     std::abs(cfg.delta_b), std::abs(cfg.delta_r)});
    if (fastest > 0.0 && opts.dt > 0.02 / fastest * (1.0 + 1e-9))
        throw std::invalid_argument("evolve_modulated: dt does not resolve the fastest "
                                    "phase (need dt <= 0.02/max frequency)");

    double mu1 = 0.0, mu2 = 0.0;
    if (cfg.nu1 != 0.0) mu1 = cfg.epsilon1 / cfg.nu1;
    else if (cfg.epsilon1 != 0.0)
        throw std::invalid_argument("evolve_modulated: zero modulation frequency");
    if (cfg.nu2 != 0.0) mu2 = cfg.epsilon2 / cfg.nu2;
    else if (cfg.epsilon2 != 0.0)
        throw std::invalid_argument("evolve_modulated: zero modulation frequency");

    const cplx minus_i(0.0, -1.0);
    const cplx decay(0.0, -0.5 * kappa);

    // dpsi/dt = -i H(t) psi with the interaction-picture matrix built on the fly.
    auto rhs = [&](double t, const std::vector<cplx>& psi) {
        const double phase_mod = -(mu1 * std::sin(cfg.nu1 * t) + mu2 * std::sin(cfg.nu2 * t));
        const cplx f = std::polar(1.0, phase_mod);
        const cplx h01 = cfg.g_r * f * std::polar(1.0, cfg.delta_r * t);
        const cplx h21 = cfg.g_b * f * std::polar(1.0, cfg.delta_b * t);
        std::vector<cplx> out(3);
        out[0] = minus_i * (decay * psi[0] + h01 * psi[1]);
        out[1] = minus_i * (std::conj(h01) * psi[0] + std::conj(h21) * psi[2]);
        out[2] = minus_i * (h21 * psi[1]);
        return out;
    };

    const long long n_steps = std::max(1ll, std::llround(opts.t_final / opts.dt));
    std::vector<cplx> psi = psi0.amplitudes;
    Recorder rec;
    rec.push(0.0, psi);
    double prev_norm2 = rec.trace.norms.back();

    std::vector<cplx> tmp(3);
    for (long long step = 1; step <= n_steps; ++step) {
        const double t0 = static_cast<double>(step - 1) * opts.dt;
        const auto k1 = rhs(t0, psi);
        for (int i = 0; i < 3; ++i) tmp[static_cast<std::size_t>(i)] =
            psi[static_cast<std::size_t>(i)] + 0.5 * opts.dt * k1[static_cast<std::size_t>(i)];
        const auto k2 = rhs(t0 + 0.5 * opts.dt, tmp);
        for (int i = 0; i < 3; ++i) tmp[static_cast<std::size_t>(i)] =
            psi[static_cast<std::size_t>(i)] + 0.5 * opts.dt * k2[static_cast<std::size_t>(i)];
        const auto k3 = rhs(t0 + 0.5 * opts.dt, tmp);
        for (int i = 0; i < 3; ++i) tmp[static_cast<std::size_t>(i)] =
            psi[static_cast<std::size_t>(i)] + opts.dt * k3[static_cast<std::size_t>(i)];
        const auto k4 = rhs(t0 + opts.dt, tmp);
        for (int i = 0; i < 3; ++i) {
            const auto s = static_cast<std::size_t>(i);
            psi[s] += opts.dt / 6.0 * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
        }
        double n2 = 0.0;
        for (const cplx& x : psi) n2 += std::norm(x);
        if (n2 > prev_norm2 * (1.0 + 1e-6))
            throw std::runtime_error("evolve_modulated: norm grew beyond tolerance "
                                     "(under-resolved step size)");
        prev_norm2 = n2;
        if (step % opts.output_stride == 0 || step == n_steps)
            rec.push(static_cast<double>(step) * opts.dt, psi);
    }
    return rec.trace;
}

std::array<double, 2> effective_couplings(const ModulationConfig& cfg) {
    if (cfg.nu1 == 0.0 || cfg.nu2 == 0.0)
        throw std::invalid_argument("effective_couplings: zero modulation frequency");
    const double mu1 = cfg.epsilon1 / cfg.nu1;
    const double mu2 = cfg.epsilon2 / cfg.nu2;
    return {cfg.g_r * bessel_j(1, mu1) * bessel_j(0, mu2),
            cfg.g_b * bessel_j(0, mu1) * bessel_j(1, mu2)};
}

std::array<double, 2> modulation_amplitudes_for(double g_r, double g_b, double nu1,
                                                double nu2, double lambda1_target,
                                                double lambda2_target) {
    if (nu1 == 0.0 || nu2 == 0.0)
        throw std::invalid_argument("modulation_amplitudes_for: zero modulation frequency");
    if (g_r == 0.0 || g_b == 0.0)
        throw std::invalid_argument("modulation_amplitudes_for: zero coupling");

    // J1 peaks at ~0.5819; beyond that the sideband cannot reach the target.
    const double j1_max = 0.5819;
    if (std::abs(lambda1_target) > j1_max * std::abs(g_r) ||
        std::abs(lambda2_target) > j1_max * std::abs(g_b))
        throw std::runtime_error("modulation_amplitudes_for: targets outside the "
                                 "reachable sideband range");

    double mu1 = 2.0 * lambda1_target / g_r;  // J1(x) ~ x/2 seed
    double mu2 = 2.0 * lambda2_target / g_b;
    const double scale = std::max({std::abs(lambda1_target), std::abs(lambda2_target), 1e-12});
    for (int iter = 0; iter < 60; ++iter) {
        mu1 = std::clamp(mu1, -3.8, 3.8);  // stay on the principal branch of J1
        mu2 = std::clamp(mu2, -3.8, 3.8);
        const double j0_1 = bessel_j(0, mu1), j1_1 = bessel_j(1, mu1);
        const double j0_2 = bessel_j(0, mu2), j1_2 = bessel_j(1, mu2);
        const double f1 = g_r * j1_1 * j0_2 - lambda1_target;
        const double f2 = g_b * j0_1 * j1_2 - lambda2_target;
        if (std::abs(f1) <= 1e-13 * scale && std::abs(f2) <= 1e-13 * scale)
            return {mu1 * nu1, mu2 * nu2};
        // dJ0 = -J1, dJ1 = (J0 - J2)/2
        const double d1_1 = 0.5 * (j0_1 - bessel_j(2, mu1));
        const double d1_2 = 0.5 * (j0_2 - bessel_j(2, mu2));
        const double a = g_r * d1_1 * j0_2;
        const double b = -g_r * j1_1 * j1_2;
        const double c = -g_b * j1_1 * j1_2;
        const double d = g_b * j0_1 * d1_2;
        const double det = a * d - b * c;
        if (det == 0.0) break;
        mu1 -= (d * f1 - b * f2) / det;
        mu2 -= (-c * f1 + a * f2) / det;
    }
    throw std::runtime_error("modulation_amplitudes_for: Newton iteration did not converge "
                             "(targets outside the reachable sideband range?)");
}

ModulationConfig tuned_modulation_config(double g_r, double g_b, double nu1, double nu2,
                                         double lambda1_target, double lambda2_target) {
    const auto amps =
        modulation_amplitudes_for(g_r, g_b, nu1, nu2, lambda1_target, lambda2_target);
    ModulationConfig cfg;
    cfg.g_r = g_r;
    cfg.g_b = g_b;
    cfg.epsilon1 = amps[0];
    cfg.epsilon2 = amps[1];
    cfg.nu1 = nu1;
    cfg.nu2 = nu2;
    // Carrier-induced quasi-energy shifts: the full-strength off-resonant
    // carriers push mode 1 up by g_r^2 J00^2 / nu1, mode 3 down by
    // g_b^2 J00^2 / nu2 and the middle mode by the opposite amounts. The
    // sideband harmonics stay resonant when the detunings absorb the
    // resulting level differences.
    const double j00 = bessel_j(0, amps[0] / nu1) * bessel_j(0, amps[1] / nu2);
    const double pull_r = g_r * g_r * j00 * j00 / nu1;
    const double pull_b = g_b * g_b * j00 * j00 / nu2;
    cfg.delta_r = nu1 - 2.0 * pull_r + pull_b;
    cfg.delta_b = -nu2 - pull_r + 2.0 * pull_b;
    return cfg;
}

double bessel_j(int n, double x) {
    if (n < 0 || n > 20)
        throw std::invalid_argument("bessel_j: order must be in [0, 20]");
    if (!(std::abs(x) <= 30.0))
        throw std::invalid_argument("bessel_j: |x| must be <= 30");
    const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax == 0.0) return n == 0 ? 1.0 : 0.0;

    if (ax <= 2.0) {
        // Ascending series; terms shrink immediately for these arguments.
        const double half = 0.5 * ax;
        double term = 1.0;
        for (int k = 1; k <= n; ++k) term *= half / k;
        double sum = term;
        const double q = half * half;
        for (int k = 1; k < 200; ++k) {
            term *= -q / (k * (n + k));
            sum += term;
            if (std::abs(term) < 1e-15 * std::abs(sum)) break;
        }
        return sign * sum;
    }

    // Normalized downward recurrence (Miller's algorithm):
    // J_{k-1} = (2k/x) J_k - J_{k+1}, normalized via J_0 + 2 sum J_{2k} = 1.
    const int base = std::max(n, static_cast<int>(std::ceil(ax)));
    int start = base + 18 + static_cast<int>(std::ceil(2.0 * std::sqrt(base + 1.0)));
    if (start % 2 == 1) ++start;
    double jp = 0.0;          // J_{k+1}
    double jc = 1e-30;        // J_k (arbitrary seed)
    double target = 0.0;
    double norm_sum = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm = (2.0 * k / ax) * jc - jp;
        jp = jc;
        jc = jm;
        if (k - 1 == n) target = jc;
        if ((k - 1) % 2 == 0) norm_sum += (k - 1 == 0) ? jc : 2.0 * jc;
        if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
            jc *= 1e-250;
            jp *= 1e-250;
            target *= 1e-250;
            norm_sum *= 1e-250;
        }
    }
    return sign * target / norm_sum;
}

StabilizationMetrics stabilization_metrics(const TimeTrace& trace,
                                           const ComplexSpectrum& spectrum,
                                           const std::vector<StateVector>& eigenvectors) {
    if (trace.size() == 0)
        throw std::invalid_argument("stabilization_metrics: empty trace");
    if (eigenvectors.size() != spectrum.energies.size())
        throw std::invalid_argument(
            "stabilization_metrics: eigenvectors must match the spectrum");
    const int dim = trace.dim();
    for (const auto& v : eigenvectors)
        if (static_cast<int>(v.amplitudes.size()) != dim)
            throw std::invalid_argument("stabilization_metrics: eigenvector dimension mismatch");

    StabilizationMetrics out;
    const std::size_t n_eig = eigenvectors.size();

    double max_e = 0.0;
    for (const cplx& e : spectrum.energies) max_e = std::max(max_e, std::abs(e));
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n_eig; ++a)
        for (std::size_t b = a + 1; b < n_eig; ++b)
            min_gap = std::min(min_gap, std::abs(spectrum.energies[a] - spectrum.energies[b]));
    out.defective_advisory = n_eig > 1 && min_gap <= 1e-8 * std::max(1.0, max_e);

    out.dominant_index = 0;
    for (std::size_t nn = 1; nn < n_eig; ++nn)
        if (spectrum.energies[nn].imag() > spectrum.energies[static_cast<std::size_t>(out.dominant_index)].imag())
            out.dominant_index = static_cast<int>(nn);

    out.fidelities.resize(trace.size());
    out.time_to_high_fidelity = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out.fidelities[k].resize(n_eig, 0.0);
        const double n2 = trace.norms[k];
        for (std::size_t nn = 0; nn < n_eig; ++nn) {
            const double vn = eigenvectors[nn].norm;
            if (n2 <= 0.0 || vn <= 0.0) continue;
            const cplx ov = inner_product(eigenvectors[nn].amplitudes,
                                          trace.states[k].amplitudes);
            out.fidelities[k][nn] = std::norm(ov) / (n2 * vn * vn);
        }
        if (std::isnan(out.time_to_high_fidelity) &&
            out.fidelities[k][static_cast<std::size_t>(out.dominant_index)] >=
                out.fidelity_threshold)
            out.time_to_high_fidelity = trace.times[k];
    }
    return out;
}

std::string trace_csv(const TimeTrace& trace, int stride) {
    if (trace.dim() != 3)
        throw std::invalid_argument("trace_csv: three-mode traces only");
    if (stride < 1) throw std::invalid_argument("trace_csv: stride must be >= 1");
    std::ostringstream os;
    os << "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,norm2,p1,p2,p3\n";
    for (std::size_t k = 0; k < trace.size(); k += static_cast<std::size_t>(stride)) {
        const auto& a = trace.states[k].amplitudes;
        os << format_double(trace.times[k]);
        for (int i = 0; i < 3; ++i)
            os << ',' << format_double(a[static_cast<std::size_t>(i)].real()) << ','
               << format_double(a[static_cast<std::size_t>(i)].imag());
        os << ',' << format_double(trace.norms[k]);
        for (int i = 0; i < 3; ++i)
            os << ',' << format_double(trace.populations[k][static_cast<std::size_t>(i)]);
        os << '\n';
    }
    return os.str();
}

}  // namespace nhchain
