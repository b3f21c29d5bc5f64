#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhchain/model.hpp"
#include "nhchain/polynomial.hpp"
#include "nhchain/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

using namespace nhchain;

namespace {

// Greedy multiset distance: worst |a_i - b_match(i)|.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (const cplx& x : a) {
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = std::abs(x - b[j]);
            if (d < bd) { bd = d; best = j; }
        }
        worst = std::max(worst, bd);
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return worst;
}

double min_pair_gap(const ComplexSpectrum& s) {
    double g = 1e300;
    for (std::size_t a = 0; a < s.energies.size(); ++a)
        for (std::size_t b = a + 1; b < s.energies.size(); ++b)
            g = std::min(g, std::abs(s.energies[a] - s.energies[b]));
    return g;
}

constexpr double kL1c = 0.2721655269759087;   // sqrt(2)/(3 sqrt 3)
constexpr double kL2c = 0.09622504486493763;  // 1/(6 sqrt 3)

}  // namespace

TEST_CASE("closed form snaps the triple degeneracy to -i kappa/6") {
    const ComplexSpectrum s = eigenvalues_closed_form(kL1c, kL2c, 1.0);
    for (const cplx& e : s.energies) CHECK(std::abs(e - cplx(0.0, -1.0 / 6.0)) < 1e-6);
}

TEST_CASE("closed form on decoupled modes") {
    const ComplexSpectrum s = eigenvalues_closed_form(0.0, 0.0, 1.0);
    CHECK(multiset_distance(s.energies, {cplx(0, 0), cplx(0, 0), cplx(0, -0.5)}) < 1e-14);
}

TEST_CASE("closed form in the Hermitian limit") {
    const ComplexSpectrum s = eigenvalues_closed_form(3.0, 4.0, 0.0);
    CHECK(multiset_distance(s.energies, {cplx(0, 0), cplx(5, 0), cplx(-5, 0)}) < 1e-10);

    std::mt19937 gen(101);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int it = 0; it < 200; ++it) {
        const double l1 = u(gen), l2 = u(gen);
        const double scale = std::max({1.0, std::abs(l1), std::abs(l2)});
        for (const cplx& e : eigenvalues_closed_form(l1, l2, 0.0).energies)
            CHECK(std::abs(e.imag()) < 1e-12 * scale);
    }
}

TEST_CASE("Vieta sum and product over random parameters") {
    std::mt19937 gen(4242);
    std::uniform_real_distribution<double> uk(0.2, 5.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 1000; ++it) {
        const double kappa = uk(gen);
        const double l1 = 2.0 * kappa * u(gen);
        const double l2 = 2.0 * kappa * u(gen);
        const auto s = eigenvalues_closed_form(l1, l2, kappa);
        const cplx sum = s.energies[0] + s.energies[1] + s.energies[2];
        CHECK(std::abs(sum + cplx(0.0, 0.5 * kappa)) < 1e-9 * std::max(1.0, kappa));
        const cplx prod = s.energies[0] * s.energies[1] * s.energies[2];
        const double scale3 =
            std::pow(std::max({kappa, std::abs(l1), std::abs(l2)}), 3.0);
        CHECK(std::abs(prod - cplx(0.0, 0.5 * kappa * l2 * l2)) < 1e-8 * scale3);
    }
}

TEST_CASE("spectral symmetry: multiset invariant under E -> -conj(E)") {
    std::mt19937 gen(515);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> uk(0.0, 5.0);
    for (int it = 0; it < 300; ++it) {
        const double kappa = uk(gen);
        const auto s = eigenvalues_closed_form(u(gen), u(gen), kappa);
        std::vector<cplx> mirrored;
        for (const cplx& e : s.energies) mirrored.push_back(-std::conj(e));
        const double scale = std::max(1.0, std::abs(s.energies[0]));
        CHECK(multiset_distance(s.energies, mirrored) < 1e-10 * scale);
    }
}

TEST_CASE("closed form agrees with the simultaneous root finder away from degeneracies") {
    std::mt19937 gen(909);
    std::uniform_real_distribution<double> uk(0.2, 5.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int it = 0; it < 1000; ++it) {
        const double kappa = uk(gen);
        const double l1 = 2.0 * kappa * u(gen);
        const double l2 = 2.0 * kappa * u(gen);
        const auto s = eigenvalues_closed_form(l1, l2, kappa);
        if (min_pair_gap(s) <= 1e-3 * kappa) continue;
        ++checked;
        const auto roots = polynomial_roots(characteristic_polynomial(
            build_chain_hamiltonian(three_mode_chain(l1, l2, kappa))));
        const double scale = std::max({1.0, kappa, std::abs(l1), std::abs(l2)});
        CHECK(multiset_distance(s.energies, roots) < 1e-8 * scale);
    }
    CHECK(checked > 900);
}

TEST_CASE("deterministic spectral ordering") {
    const auto s = eigenvalues_closed_form(1.7, 0.4, 3.0);
    CHECK(s.ordering == SpectrumOrdering::ByImaginaryPart);
    for (std::size_t k = 0; k + 1 < s.energies.size(); ++k) {
        const cplx& a = s.energies[k];
        const cplx& b = s.energies[k + 1];
        CHECK((a.imag() > b.imag() || (a.imag() == b.imag() && a.real() >= b.real())));
    }
}

TEST_CASE("two-mode eigenenergies") {
    SUBCASE("coalescence at lambda1 = kappa/4") {
        const auto e = eigenvalues_two_mode(1.25, 5.0);
        CHECK(std::abs(e[0] - cplx(0.0, -1.25)) < 1e-12);
        CHECK(std::abs(e[1] - cplx(0.0, -1.25)) < 1e-12);
    }
    SUBCASE("decoupled limit") {
        const auto e = eigenvalues_two_mode(0.0, 5.0);
        CHECK(multiset_distance({e[0], e[1]}, {cplx(0, 0), cplx(0, -2.5)}) < 1e-14);
    }
    SUBCASE("above the degeneracy the pair is +-sqrt(3) - i for lambda1=2, kappa=4") {
        const auto e = eigenvalues_two_mode(2.0, 4.0);
        const double r3 = 1.7320508075688772;
        CHECK(multiset_distance({e[0], e[1]}, {cplx(r3, -1.0), cplx(-r3, -1.0)}) < 1e-12);
        // cross-check against the generic root finder
        ChainParams p;
        p.n_modes = 2;
        p.kappas = {4.0, 0.0};
        p.lambdas = {2.0};
        const auto roots = polynomial_roots(characteristic_polynomial(build_chain_hamiltonian(p)));
        CHECK(multiset_distance({e[0], e[1]}, roots) < 1e-10);
    }
    SUBCASE("negative root argument comes back positive imaginary") {
        const auto e = eigenvalues_two_mode(0.5, 4.0);  // lambda1 < kappa/4
        CHECK(e[0].imag() > e[1].imag());
        CHECK(std::abs(e[0].real()) < 1e-15);
    }
}

TEST_CASE("characteristic polynomial conventions") {
    SUBCASE("EP2 qubit model") {
        const double jx = 0.3, jy = 0.4, gamma = 2.0;
        const Polynomial p = characteristic_polynomial(
            build_reference_model(ReferenceModelParams::ep2_qubit(jx, jy, gamma)));
        REQUIRE(p.degree() == 2);
        CHECK(std::abs(p.coefficients[0] - cplx(1, 0)) < 1e-15);
        CHECK(std::abs(p.coefficients[1] - cplx(0, gamma / 2)) < 1e-15);
        CHECK(std::abs(p.coefficients[2] - cplx(-(jx * jx + jy * jy), 0)) < 1e-15);
    }
    SUBCASE("three-mode chain") {
        const double l1 = 1.2, l2 = 0.7, kappa = 3.0;
        const Polynomial p = characteristic_polynomial(
            build_chain_hamiltonian(three_mode_chain(l1, l2, kappa)));
        REQUIRE(p.degree() == 3);
        CHECK(std::abs(p.coefficients[0] - cplx(-1, 0)) < 1e-14);
        CHECK(std::abs(p.coefficients[1] - cplx(0, -kappa / 2)) < 1e-14);
        CHECK(std::abs(p.coefficients[2] - cplx(l1 * l1 + l2 * l2, 0)) < 1e-13);
        CHECK(std::abs(p.coefficients[3] - cplx(0, kappa * l2 * l2 / 2)) < 1e-13);
        // its roots must reproduce the closed form
        const auto s = eigenvalues_closed_form(l1, l2, kappa);
        CHECK(multiset_distance(polynomial_roots(p), s.energies) < 1e-9);
    }
    SUBCASE("diagonal matrix") {
        ComplexMatrix m(2);
        m.at(0, 0) = cplx(2.0, 0.5);
        m.at(1, 1) = cplx(-1.0, 0.0);
        const Polynomial p = characteristic_polynomial(m);
        // (a-E)(b-E) = E^2 - (a+b) E + a b
        CHECK(std::abs(p.coefficients[0] - cplx(1, 0)) < 1e-15);
        CHECK(std::abs(p.coefficients[1] + (m.at(0, 0) + m.at(1, 1))) < 1e-15);
        CHECK(std::abs(p.coefficients[2] - m.at(0, 0) * m.at(1, 1)) < 1e-15);
    }
    SUBCASE("dimension cap") {
        CHECK_THROWS_AS(characteristic_polynomial(ComplexMatrix(9)), std::invalid_argument);
    }
}

TEST_CASE("polynomial root finder") {
    SUBCASE("z^2 + 1") {
        const auto r = polynomial_roots(Polynomial({cplx(1, 0), cplx(0, 0), cplx(1, 0)}));
        CHECK(multiset_distance(r, {cplx(0, 1), cplx(0, -1)}) < 1e-12);
    }
    SUBCASE("(z-2)(z-3)(z-5)") {
        const auto r = polynomial_roots(
            Polynomial({cplx(1, 0), cplx(-10, 0), cplx(31, 0), cplx(-30, 0)}));
        CHECK(multiset_distance(r, {cplx(2, 0), cplx(3, 0), cplx(5, 0)}) < 1e-10);
    }
    SUBCASE("characteristic cubic at the triple degeneracy clusters within 1e-4") {
        const Polynomial p = characteristic_polynomial(
            build_chain_hamiltonian(three_mode_chain(kL1c, kL2c, 1.0)));
        for (const cplx& r : polynomial_roots(p))
            CHECK(std::abs(r - cplx(0.0, -1.0 / 6.0)) < 1e-4);
    }
    SUBCASE("random polynomials reproduce their roots") {
        std::mt19937 gen(31337);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::uniform_int_distribution<int> deg(1, 6);
        for (int it = 0; it < 200; ++it) {
            const int n = deg(gen);
            std::vector<cplx> roots_in;
            for (int k = 0; k < n; ++k) roots_in.emplace_back(u(gen), u(gen));
            std::vector<cplx> coeffs{cplx(1, 0)};
            for (const cplx& r : roots_in) {
                std::vector<cplx> next(coeffs.size() + 1, cplx(0, 0));
                for (std::size_t i = 0; i < coeffs.size(); ++i) {
                    next[i] += coeffs[i];
                    next[i + 1] -= coeffs[i] * r;
                }
                coeffs = std::move(next);
            }
            const auto got = polynomial_roots(Polynomial(coeffs));
            CHECK(multiset_distance(got, roots_in) < 2e-5);  // random clusters allowed
        }
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(polynomial_roots(Polynomial({cplx(3, 0)})), std::invalid_argument);
        CHECK_THROWS_AS(polynomial_roots(Polynomial({cplx(0, 0), cplx(1, 0)})),
                        std::invalid_argument);
    }
}

TEST_CASE("eigenvectors") {
    SUBCASE("triple-degenerate eigenstate of the first-quadrant degeneracy") {
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(kL1c, kL2c, 1.0));
        const StateVector v = eigenvector_for(h, cplx(0.0, -1.0 / 6.0));
        CHECK(std::abs(v.norm - 1.0) < 1e-12);
        // expected (sqrt2, i sqrt3, -1)/sqrt6 up to a global phase
        const std::vector<cplx> expected = {cplx(std::sqrt(2.0 / 6.0), 0.0),
                                            cplx(0.0, std::sqrt(3.0 / 6.0)),
                                            cplx(-std::sqrt(1.0 / 6.0), 0.0)};
        CHECK(std::abs(inner_product(expected, v.amplitudes)) ==
              doctest::Approx(1.0).epsilon(1e-10));
        // phase convention: largest-magnitude component real positive
        CHECK(v.amplitudes[1].imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(v.amplitudes[1].real() > 0.0);
    }
    SUBCASE("lambda1 = 0: Hermitian two-mode block") {
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(0.0, 0.9, 2.0));
        for (double sign : {1.0, -1.0}) {
            const StateVector v = eigenvector_for(h, cplx(sign * 0.9, 0.0));
            const std::vector<cplx> expected = {cplx(0, 0), cplx(1.0 / std::sqrt(2.0), 0),
                                                cplx(sign / std::sqrt(2.0), 0)};
            CHECK(std::abs(inner_product(expected, v.amplitudes)) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("two-mode component ratio") {
        ChainParams p;
        p.n_modes = 2;
        p.kappas = {4.0, 0.0};
        p.lambdas = {2.0};
        const ComplexMatrix h = build_chain_hamiltonian(p);
        const auto e = eigenvalues_two_mode(2.0, 4.0);
        const StateVector v = eigenvector_for(h, e[1]);
        // proportional to (E/lambda1, 1) in (mode 1, mode 2) order
        const cplx ratio = v.amplitudes[0] / v.amplitudes[1];
        CHECK(std::abs(ratio - e[1] / 2.0) < 1e-9);
    }
    SUBCASE("residuals stay below 1e-9 |H| at true eigenvalues") {
        std::mt19937 gen(2277);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::uniform_real_distribution<double> uk(0.1, 5.0);
        for (int it = 0; it < 100; ++it) {
            const double kappa = uk(gen);
            const double l1 = u(gen), l2 = u(gen);
            const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(l1, l2, kappa));
            const double scale = max_abs_entry(h);
            for (const cplx& e : eigenvalues_closed_form(l1, l2, kappa).energies) {
                const StateVector v = eigenvector_for(h, e);
                ComplexMatrix shifted = h;
                for (int i = 0; i < 3; ++i) shifted.at(i, i) -= e;
                CHECK(vec_norm(matvec(shifted, v.amplitudes)) < 1e-9 * scale);
            }
        }
    }
    SUBCASE("non-eigenvalue input is rejected") {
        const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(1.0, 1.0, 1.0));
        CHECK_THROWS_AS(eigenvector_for(h, cplx(10.0, 3.0)), std::runtime_error);
    }
}

TEST_CASE("degeneracy classification") {
    const EpClassification ep3 = classify_point(kL1c, kL2c, 1.0, 1e-6);
    CHECK(ep3.kind == DegeneracyKind::EP3);
    REQUIRE(ep3.degenerate_energy.has_value());
    CHECK(std::abs(*ep3.degenerate_energy - cplx(0.0, -1.0 / 6.0)) < 1e-6);

    const EpClassification ep2 = classify_point(0.25, 0.0, 1.0, 1e-6);
    CHECK(ep2.kind == DegeneracyKind::EP2);

    CHECK(classify_point(0.0, 0.0, 0.0, 1e-6).kind == DegeneracyKind::DP);
    CHECK(classify_point(0.0, 0.0, 1.0, 1e-6).kind == DegeneracyKind::DP);

    const EpClassification reg = classify_point(1.0, 1.0, 1.0, 1e-6);
    CHECK(reg.kind == DegeneracyKind::Regular);
    CHECK(reg.min_gap > 0.1);

    CHECK_THROWS_AS(classify_point(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("third-order degeneracy location") {
    const auto pts = locate_ep3(1.0);
    CHECK(pts[0].lambda1 == doctest::Approx(kL1c).epsilon(1e-9));
    CHECK(pts[0].lambda2 == doctest::Approx(kL2c).epsilon(1e-9));
    CHECK(pts[1].lambda1 == doctest::Approx(kL1c).epsilon(1e-9));
    CHECK(pts[1].lambda2 == doctest::Approx(-kL2c).epsilon(1e-9));
    CHECK(pts[2].lambda1 == doctest::Approx(-kL1c).epsilon(1e-9));
    CHECK(pts[3].lambda2 == doctest::Approx(-kL2c).epsilon(1e-9));
    for (const auto& p : pts) CHECK(p.refined_max_gap < 1e-6);

    const auto pts2 = locate_ep3(2.0);
    for (int k = 0; k < 4; ++k) {
        CHECK(pts2[k].lambda1 == doctest::Approx(2.0 * pts[k].lambda1).epsilon(1e-9));
        CHECK(pts2[k].lambda2 == doctest::Approx(2.0 * pts[k].lambda2).epsilon(1e-9));
    }

    CHECK_THROWS_AS(locate_ep3(0.0), std::invalid_argument);
}

TEST_CASE("spectral map scan") {
    GridSpec grid;
    grid.lambda1_min = kL1c;
    grid.lambda1_max = kL1c + 0.8;
    grid.n1 = 5;
    grid.lambda2_min = kL2c;
    grid.lambda2_max = kL2c + 0.9;
    grid.n2 = 4;
    const auto records = scan_spectral_map(1.0, grid);
    REQUIRE(records.size() == 20);

    // first record sits exactly on the triple degeneracy
    CHECK(records[0].lambda1 == doctest::Approx(kL1c));
    CHECK(records[0].max_re_gap < 1e-9);
    CHECK(records[0].max_im_gap < 1e-9);
    CHECK(records[0].min_gap < 1e-9);

    SUBCASE("isofrequency flag inside the arc region") {
        GridSpec g2;
        g2.lambda1_min = 0.2;
        g2.lambda1_max = 0.25;
        g2.n1 = 2;
        g2.lambda2_min = 0.02;
        g2.lambda2_max = 0.03;
        g2.n2 = 2;
        const auto recs = scan_spectral_map(1.0, g2);
        CHECK(recs[0].isofrequency);
    }
    SUBCASE("regular far point") {
        GridSpec g3;
        g3.lambda1_min = 1.0;
        g3.lambda1_max = 1.1;
        g3.n1 = 2;
        g3.lambda2_min = 1.0;
        g3.lambda2_max = 1.1;
        g3.n2 = 2;
        const auto recs = scan_spectral_map(1.0, g3);
        CHECK(recs[0].min_gap > 0.1);
        CHECK_FALSE(recs[0].isofrequency);
        CHECK_FALSE(recs[0].ifermi);
    }
    SUBCASE("csv output is deterministic and thread-count independent") {
        const std::string a = spectral_map_csv(scan_spectral_map(1.0, grid, -1.0, 1));
        const std::string b = spectral_map_csv(scan_spectral_map(1.0, grid, -1.0, 4));
        CHECK(a == b);
        CHECK(a.substr(0, a.find('\n')) ==
              "lambda1,lambda2,max_re_gap,max_im_gap,min_gap,isofrequency,ifermi");
    }
    SUBCASE("grid validation") {
        GridSpec bad = grid;
        bad.n1 = 1;
        CHECK_THROWS_AS(scan_spectral_map(1.0, bad), std::invalid_argument);
        bad = grid;
        bad.lambda1_max = bad.lambda1_min;
        CHECK_THROWS_AS(scan_spectral_map(1.0, bad), std::invalid_argument);
    }
}

TEST_CASE("worker count resolves from the environment") {
    setenv("NHCHAIN_THREADS", "3", 1);
    CHECK(resolve_worker_count(0) == 3);
    unsetenv("NHCHAIN_THREADS");
    CHECK(resolve_worker_count(2) == 2);
    CHECK(resolve_worker_count(0) >= 1);
}
