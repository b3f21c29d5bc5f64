#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhchain/cli.hpp"
#include "nhchain/dynamics.hpp"
#include "nhchain/model.hpp"
#include "nhchain/spectra.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nhchain;

namespace {

constexpr double kPi = std::numbers::pi;

// Ascending-series reference, trustworthy for small and moderate arguments.
double bessel_series_oracle(int n, double x) {
    long double half = x / 2.0L;
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k) term *= half / k;
    long double sum = term;
    const long double q = half * half;
    for (int k = 1; k < 400; ++k) {
        term *= -q / (static_cast<long double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-25L * std::abs(sum)) break;
    }
    return static_cast<double>(sum);
}

ChainParams two_mode(double lambda1, double kappa) {
    ChainParams p;
    p.n_modes = 2;
    p.kappas = {kappa, 0.0};
    p.lambdas = {lambda1};
    return p;
}

// Exact two-mode no-jump propagation through the eigendecomposition.
std::vector<cplx> two_mode_exact(double lambda1, double kappa, const std::vector<cplx>& psi0,
                                 double t) {
    const auto e = eigenvalues_two_mode(lambda1, kappa);
    ComplexMatrix vm(2);
    vm.at(0, 0) = e[0] / lambda1;
    vm.at(0, 1) = e[1] / lambda1;
    vm.at(1, 0) = 1.0;
    vm.at(1, 1) = 1.0;
    const auto coeff = solve_dense(vm, psi0);
    std::vector<cplx> out(2, cplx(0, 0));
    for (int j = 0; j < 2; ++j) {
        const cplx ph = std::exp(cplx(0, -1) * e[static_cast<std::size_t>(j)] * t) *
                        coeff[static_cast<std::size_t>(j)];
        out[0] += ph * (e[static_cast<std::size_t>(j)] / lambda1);
        out[1] += ph;
    }
    return out;
}

double population_rms(const TimeTrace& a, const TimeTrace& b) {
    const std::size_t n = std::min(a.size(), b.size());
    REQUIRE(a.dim() == b.dim());
    double worst = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = a.populations[k][static_cast<std::size_t>(i)] -
                             b.populations[k][static_cast<std::size_t>(i)];
            acc += d * d;
        }
        worst = std::max(worst, std::sqrt(acc / static_cast<double>(n)));
    }
    return worst;
}

}  // namespace

TEST_CASE("lossless two-mode Rabi populations") {
    const double lambda = 0.9;
    const ComplexMatrix h = build_chain_hamiltonian(two_mode(lambda, 0.0));
    EvolveOptions o;
    o.dt = 1e-3;
    o.t_final = 3.0;
    o.output_stride = 25;
    const auto tr = evolve_nh(h, parse_state_spec("mode2", 2), o);
    CHECK(tr.norms.front() == doctest::Approx(1.0));
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double t = tr.times[k];
        const double c = std::cos(lambda * t), s = std::sin(lambda * t);
        CHECK(std::abs(tr.populations[k][1] - c * c) < 1e-8);
        CHECK(std::abs(tr.populations[k][0] - s * s) < 1e-8);
    }
}

TEST_CASE("success probability never grows under decay") {
    std::mt19937 gen(881);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> uk(0.1, 5.0);
    for (int it = 0; it < 20; ++it) {
        const ComplexMatrix h =
            build_chain_hamiltonian(three_mode_chain(u(gen), u(gen), uk(gen)));
        EvolveOptions o;
        o.dt = 1e-3;
        o.t_final = 1.0;
        o.output_stride = 10;
        const auto tr = evolve_nh(h, parse_state_spec("mode2", 3), o);
        for (std::size_t k = 0; k + 1 < tr.size(); ++k)
            CHECK(tr.norms[k + 1] <= tr.norms[k] * (1.0 + 1e-12));
        for (std::size_t k = 0; k < tr.size(); ++k) {
            double sum = 0.0;
            for (double p : tr.populations[k]) sum += p;
            CHECK(std::abs(sum - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("norm decay law d|psi|^2/dt = -kappa |c1|^2") {
    const double kappa = 2.0;
    const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(1.3, 0.9, kappa));
    EvolveOptions o;
    o.dt = 1e-3;
    o.t_final = 2.0;
    const auto tr = evolve_nh(h, parse_state_spec("mode2", 3), o);
    for (std::size_t k = 1; k + 1 < tr.size(); k += 50) {
        const double deriv = (tr.norms[k + 1] - tr.norms[k - 1]) / (2.0 * o.dt);
        const double expected = -kappa * std::norm(tr.states[k].amplitudes[0]);
        CHECK(std::abs(deriv - expected) < 1e-5);
    }
}

TEST_CASE("RK4 halving the step shrinks the error about sixteen-fold") {
    const double lambda = 1.0, kappa = 1.0;
    const ComplexMatrix h = build_chain_hamiltonian(two_mode(lambda, kappa));
    const auto exact = two_mode_exact(lambda, kappa, {cplx(0, 0), cplx(1, 0)}, 1.0);
    double errs[2];
    int idx = 0;
    for (double dt : {0.02, 0.01}) {
        EvolveOptions o;
        o.dt = dt;
        o.t_final = 1.0;
        o.output_stride = 1 << 20;
        const auto tr = evolve_nh(h, parse_state_spec("mode2", 2), o);
        const auto& last = tr.states.back().amplitudes;
        errs[idx++] = std::hypot(std::abs(last[0] - exact[0]), std::abs(last[1] - exact[1]));
    }
    const double ratio = errs[0] / errs[1];
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("unstable step size is reported") {
    // |E| dt far outside the stability region of the fixed-step scheme
    const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(3.0, 3.0, 1.0));
    EvolveOptions o;
    o.dt = 2.0;
    o.t_final = 40.0;
    CHECK_THROWS_AS(evolve_nh(h, parse_state_spec("mode2", 3), o), std::runtime_error);
}

TEST_CASE("integration input validation") {
    const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(1.0, 1.0, 1.0));
    EvolveOptions o;
    o.dt = 1e-3;
    o.t_final = 1.0;
    CHECK_THROWS_AS(evolve_nh(h, parse_state_spec("mode2", 2), o), std::invalid_argument);
    o.dt = 0.0;
    CHECK_THROWS_AS(evolve_nh(h, parse_state_spec("mode2", 3), o), std::invalid_argument);
    o.dt = 1e-3;
    o.t_final = -1.0;
    CHECK_THROWS_AS(evolve_nh(h, parse_state_spec("mode2", 3), o), std::invalid_argument);
}

TEST_CASE("modulated evolution") {
    SUBCASE("no modulation, detuned: the excitation stays on the qubit") {
        ModulationConfig cfg;
        cfg.g_r = 2 * kPi * 5.0;
        cfg.g_b = 2 * kPi * 5.0;
        cfg.nu1 = 2 * kPi * 250.0;
        cfg.nu2 = 2 * kPi * 150.0;
        cfg.delta_r = 2 * kPi * 300.0;
        cfg.delta_b = -2 * kPi * 170.0;
        EvolveOptions o;
        o.dt = 0.02 / cfg.delta_r * 0.9;
        o.t_final = 0.5;
        o.output_stride = 25;
        const auto tr = evolve_modulated(cfg, 0.0, parse_state_spec("mode2", 3), o);
        double min_p2 = 1.0;
        for (const auto& pops : tr.populations) min_p2 = std::min(min_p2, pops[1]);
        CHECK(min_p2 > 0.98);
    }
    SUBCASE("single sideband reproduces the effective Rabi rate") {
        ModulationConfig cfg;
        cfg.g_r = 2 * kPi * 2.0;
        cfg.g_b = 0.0;
        cfg.nu1 = 2 * kPi * 300.0;
        cfg.epsilon1 = 0.4 * cfg.nu1;
        cfg.nu2 = 2 * kPi * 200.0;
        cfg.epsilon2 = 0.0;
        cfg.delta_r = cfg.nu1;
        cfg.delta_b = -cfg.nu2;
        CHECK(cfg.resonant(1e-9));
        const double lambda1 = cfg.g_r * bessel_j(1, 0.4);

        const double out_dt = 1e-3;
        const int sub = static_cast<int>(std::ceil(out_dt / (0.02 / cfg.nu1)));
        EvolveOptions om;
        om.dt = out_dt / sub;
        om.t_final = 1.0;
        om.output_stride = sub;
        const auto tm = evolve_modulated(cfg, 0.0, parse_state_spec("mode2", 3), om);

        EvolveOptions oe;
        oe.dt = out_dt;
        oe.t_final = 1.0;
        const auto te = evolve_nh(build_chain_hamiltonian(three_mode_chain(lambda1, 0.0, 0.0)),
                                  parse_state_spec("mode2", 3), oe);
        CHECK(population_rms(tm, te) < 0.05);
    }
    SUBCASE("tuned two-tone configuration tracks the effective chain") {
        const double gr = 2 * kPi * 41.0, gb = 2 * kPi * 20.0, kappa = 5.0;
        const double l1 = 2 * kPi * 0.21, l2 = 2 * kPi * 0.31;
        const ModulationConfig cfg =
            tuned_modulation_config(gr, gb, 2 * kPi * 820.0, 2 * kPi * 400.0, l1, l2);
        const auto eff = effective_couplings(cfg);
        CHECK(eff[0] == doctest::Approx(l1).epsilon(1e-12));
        CHECK(eff[1] == doctest::Approx(l2).epsilon(1e-12));

        const double out_dt = 1e-3;
        const double fastest = std::max(cfg.nu1, std::abs(cfg.delta_r));
        const int sub = static_cast<int>(std::ceil(out_dt / (0.02 / fastest)));
        EvolveOptions om;
        om.dt = out_dt / sub;
        om.t_final = 0.4;
        om.output_stride = sub;
        const auto tm = evolve_modulated(cfg, kappa, parse_state_spec("mode2", 3), om);

        EvolveOptions oe;
        oe.dt = out_dt;
        oe.t_final = 0.4;
        const auto te = evolve_nh(build_chain_hamiltonian(three_mode_chain(l1, l2, kappa)),
                                  parse_state_spec("mode2", 3), oe);
        CHECK(population_rms(tm, te) < 0.05);
    }
    SUBCASE("under-resolved step size is rejected") {
        ModulationConfig cfg;
        cfg.g_r = 1.0;
        cfg.nu1 = 2 * kPi * 500.0;
        cfg.nu2 = 2 * kPi * 100.0;
        cfg.delta_r = cfg.nu1;
        cfg.delta_b = -cfg.nu2;
        EvolveOptions o;
        o.dt = 1e-3;  // far above 0.02 / nu1
        o.t_final = 0.1;
        CHECK_THROWS_AS(evolve_modulated(cfg, 1.0, parse_state_spec("mode2", 3), o),
                        std::invalid_argument);
    }
    SUBCASE("zero tone frequency with a nonzero amplitude is rejected") {
        ModulationConfig cfg;
        cfg.g_r = 1.0;
        cfg.epsilon1 = 1.0;
        cfg.nu1 = 0.0;
        cfg.nu2 = 1.0;
        EvolveOptions o;
        o.dt = 1e-4;
        o.t_final = 0.1;
        CHECK_THROWS_AS(evolve_modulated(cfg, 1.0, parse_state_spec("mode2", 3), o),
                        std::invalid_argument);
    }
}

TEST_CASE("effective couplings") {
    SUBCASE("no modulation, no coupling") {
        ModulationConfig cfg;
        cfg.g_r = 41.0;
        cfg.g_b = 20.0;
        cfg.nu1 = 10.0;
        cfg.nu2 = 7.0;
        const auto eff = effective_couplings(cfg);
        CHECK(eff[0] == 0.0);
        CHECK(eff[1] == 0.0);
    }
    SUBCASE("first-sideband value against the series oracle") {
        ModulationConfig cfg;
        cfg.g_r = 41.0;
        cfg.nu1 = 10.0;
        cfg.epsilon1 = 5.0;  // mu1 = 0.5
        cfg.nu2 = 7.0;
        cfg.epsilon2 = 0.0;
        const auto eff = effective_couplings(cfg);
        CHECK(eff[0] == doctest::Approx(41.0 * bessel_series_oracle(1, 0.5)).epsilon(1e-12));
        CHECK(eff[0] == doctest::Approx(9.9330068).epsilon(1e-6));
    }
    SUBCASE("swap symmetry") {
        ModulationConfig cfg;
        cfg.g_r = 3.1;
        cfg.g_b = 1.7;
        cfg.nu1 = 11.0;
        cfg.nu2 = 5.0;
        cfg.epsilon1 = 4.0;
        cfg.epsilon2 = 2.0;
        ModulationConfig swapped;
        swapped.g_r = cfg.g_b;
        swapped.g_b = cfg.g_r;
        swapped.nu1 = cfg.nu2;
        swapped.nu2 = cfg.nu1;
        swapped.epsilon1 = cfg.epsilon2;
        swapped.epsilon2 = cfg.epsilon1;
        const auto a = effective_couplings(cfg);
        const auto b = effective_couplings(swapped);
        CHECK(a[0] == doctest::Approx(b[1]).epsilon(1e-15));
        CHECK(a[1] == doctest::Approx(b[0]).epsilon(1e-15));
    }
    SUBCASE("zero modulation frequency is rejected") {
        ModulationConfig cfg;
        cfg.nu1 = 0.0;
        cfg.nu2 = 1.0;
        CHECK_THROWS_AS(effective_couplings(cfg), std::invalid_argument);
    }
}

TEST_CASE("Bessel function of the first kind") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    // three-term recurrence value J2(1) = 2 J1(1) - J0(1)
    const double j2_ref = 2.0 * bessel_series_oracle(1, 1.0) - bessel_series_oracle(0, 1.0);
    CHECK(bessel_j(2, 1.0) == doctest::Approx(j2_ref).epsilon(1e-13));
    CHECK(bessel_j(2, 1.0) == doctest::Approx(0.11490348493190048).epsilon(1e-12));
    // near the first maximum of J1
    CHECK(bessel_j(1, 1.84118) == doctest::Approx(0.5818652242786637).epsilon(1e-12));
    CHECK(bessel_j(1, 1.84118) == doctest::Approx(0.581865).epsilon(1e-6));

    SUBCASE("series oracle agreement at small and moderate arguments") {
        for (int n : {0, 1, 2, 5, 9}) {
            for (double x : {0.05, 0.7, 1.9, 4.2, 8.0}) {
                CHECK(bessel_j(n, x) ==
                      doctest::Approx(bessel_series_oracle(n, x)).epsilon(5e-13));
            }
        }
    }
    SUBCASE("recurrence identity across the range") {
        for (int n : {1, 2, 5, 10, 19}) {
            for (double x : {0.5, 3.7, 12.3, 29.5}) {
                const double lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
                const double rhs = 2.0 * n / x * bessel_j(n, x);
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        }
    }
    SUBCASE("parity") {
        CHECK(bessel_j(1, -2.0) == doctest::Approx(-bessel_j(1, 2.0)).epsilon(1e-15));
        CHECK(bessel_j(2, -2.0) == doctest::Approx(bessel_j(2, 2.0)).epsilon(1e-15));
    }
    SUBCASE("range validation") {
        CHECK_THROWS_AS(bessel_j(-1, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(bessel_j(21, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(bessel_j(0, 31.0), std::invalid_argument);
    }
}

TEST_CASE("modulation amplitude inversion") {
    const auto amps = modulation_amplitudes_for(41.0, 20.0, 10.0, 7.0, 1.3, 1.9);
    ModulationConfig cfg;
    cfg.g_r = 41.0;
    cfg.g_b = 20.0;
    cfg.nu1 = 10.0;
    cfg.nu2 = 7.0;
    cfg.epsilon1 = amps[0];
    cfg.epsilon2 = amps[1];
    const auto eff = effective_couplings(cfg);
    CHECK(eff[0] == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(eff[1] == doctest::Approx(1.9).epsilon(1e-12));

    CHECK_THROWS_AS(modulation_amplitudes_for(1.0, 1.0, 10.0, 7.0, 5.0, 0.1),
                    std::runtime_error);  // unreachable target
}

TEST_CASE("stabilization metrics") {
    SUBCASE("isofrequency region: the slowest-decaying eigenvector takes over") {
        const double kappa = 1.0;
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(0.2, 0.02, kappa));
        const ComplexSpectrum s = eigenvalues_closed_form(0.2, 0.02, kappa);
        std::vector<StateVector> vecs;
        for (const cplx& e : s.energies) vecs.push_back(eigenvector_for(h, e));
        EvolveOptions o;
        o.dt = 0.005;
        o.t_final = 30.0;
        o.output_stride = 20;
        const auto tr = evolve_nh(h, parse_state_spec("mode3", 3), o);
        const auto m = stabilization_metrics(tr, s, vecs);
        CHECK_FALSE(m.defective_advisory);
        CHECK(std::isfinite(m.time_to_high_fidelity));
        CHECK(m.time_to_high_fidelity > 0.0);
        CHECK(m.time_to_high_fidelity < 30.0);
        // fidelity approaches one while the success probability keeps falling
        CHECK(m.fidelities.back()[static_cast<std::size_t>(m.dominant_index)] > 0.99);
        CHECK(tr.norms.back() < tr.norms.front());
    }
    SUBCASE("unitary dynamics: overlaps are constants of motion, none converge") {
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(1.0, 1.0, 0.0));
        const ComplexSpectrum s = eigenvalues_closed_form(1.0, 1.0, 0.0);
        std::vector<StateVector> vecs;
        for (const cplx& e : s.energies) vecs.push_back(eigenvector_for(h, e));
        EvolveOptions o;
        o.dt = 0.01;
        o.t_final = 10.0;
        o.output_stride = 10;
        const auto tr = evolve_nh(h, parse_state_spec("mode1", 3), o);
        const auto m = stabilization_metrics(tr, s, vecs);
        CHECK(std::isnan(m.time_to_high_fidelity));
        for (std::size_t n = 0; n < vecs.size(); ++n) {
            const double first = m.fidelities.front()[n];
            for (const auto& f : m.fidelities) CHECK(std::abs(f[n] - first) < 1e-7);
        }
    }
    SUBCASE("an exact eigenvector keeps unit fidelity") {
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(0.8, 0.5, 1.0));
        const ComplexSpectrum s = eigenvalues_closed_form(0.8, 0.5, 1.0);
        std::vector<StateVector> vecs;
        for (const cplx& e : s.energies) vecs.push_back(eigenvector_for(h, e));
        EvolveOptions o;
        o.dt = 0.005;
        o.t_final = 5.0;
        o.output_stride = 20;
        const auto tr = evolve_nh(h, vecs[1], o);
        const auto m = stabilization_metrics(tr, s, vecs);
        for (const auto& f : m.fidelities) CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("coalesced spectrum raises the defective advisory") {
        const double kappa = 1.0;
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(0.25, 0.0, kappa));
        const ComplexSpectrum s = eigenvalues_closed_form(0.25, 0.0, kappa);
        std::vector<StateVector> vecs;
        for (const cplx& e : s.energies) vecs.push_back(eigenvector_for(h, e));
        EvolveOptions o;
        o.dt = 0.01;
        o.t_final = 1.0;
        o.output_stride = 10;
        const auto tr = evolve_nh(h, parse_state_spec("mode2", 3), o);
        CHECK(stabilization_metrics(tr, s, vecs).defective_advisory);
    }
}

TEST_CASE("trace CSV") {
    const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(1.0, 1.0, 1.0));
    EvolveOptions o;
    o.dt = 0.01;
    o.t_final = 0.1;
    const auto tr = evolve_nh(h, parse_state_spec("mode2", 3), o);
    const std::string csv = trace_csv(tr);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,norm2,p1,p2,p3");
    CHECK(trace_csv(tr, 5).size() < csv.size());
    CHECK_THROWS_AS(trace_csv(tr, 0), std::invalid_argument);

    const ComplexMatrix h2 = build_chain_hamiltonian(two_mode(1.0, 1.0));
    const auto tr2 = evolve_nh(h2, parse_state_spec("mode2", 2), o);
    CHECK_THROWS_AS(trace_csv(tr2), std::invalid_argument);
}
