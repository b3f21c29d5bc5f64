#include "nhchain/spectra.hpp"

#include "nhchain/model.hpp"
#include "nhchain/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace nhchain {

void sort_spectrum(ComplexSpectrum& spectrum) {
    std::sort(spectrum.energies.begin(), spectrum.energies.end(),
              [](const cplx& a, const cplx& b) {
                  if (a.imag() != b.imag()) return a.imag() > b.imag();
                  return a.real() > b.real();
              });
    spectrum.ordering = SpectrumOrdering::ByImaginaryPart;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes) {
    StateVector s;
    s.amplitudes = std::move(amplitudes);
    s.norm = vec_norm(s.amplitudes);
    return s;
}

ComplexSpectrum eigenvalues_closed_form(double lambda1, double lambda2, double kappa) {
    // Characteristic cubic E^3 + c2 E^2 + c1 E + c0 of the single-excitation
    // matrix, then Cardano on the depressed form y^3 + p y + q, E = y - c2/3.
    const cplx c2(0.0, 0.5 * kappa);
    const cplx c1(-(lambda1 * lambda1 + lambda2 * lambda2), 0.0);
    const cplx c0(0.0, -0.5 * kappa * lambda2 * lambda2);

    const cplx shift = -c2 / 3.0;
    const cplx p = c1 - c2 * c2 / 3.0;
    const cplx q = c0 - c1 * c2 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;

    const cplx s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    // Anti-cancellation branch: keep the larger |u^3|.
    const cplx u3a = -q / 2.0 + s;
    const cplx u3b = -q / 2.0 - s;
    const cplx u3 = (std::abs(u3a) >= std::abs(u3b)) ? u3a : u3b;

    const double scale = std::max({std::abs(kappa), std::abs(lambda1), std::abs(lambda2)});
    ComplexSpectrum out;
    // |u| ~ (distance to the triple degeneracy)^(1/3) is the conditioning
    // floor of a coalescing triple; below it the exact triple root is the
    // best-conditioned answer.
    const double u_guard = 1e-4 * scale / 3.0;
    if (std::abs(u3) <= u_guard * u_guard * u_guard) {
        out.energies.assign(3, shift);
        sort_spectrum(out);
        return out;
    }

    const cplx u0 = std::pow(u3, 1.0 / 3.0);
    const cplx omega(-0.5, 0.5 * std::sqrt(3.0));  // primitive cube root of unity
    const cplx roots_of_unity[3] = {cplx(1.0, 0.0), omega, std::conj(omega)};
    out.energies.reserve(3);
    for (const cplx& w : roots_of_unity) {
        const cplx u = u0 * w;
        out.energies.push_back(shift + u - p / (3.0 * u));
    }
    sort_spectrum(out);
    return out;
}

std::array<cplx, 2> eigenvalues_two_mode(double lambda1, double kappa) {
    const double arg = lambda1 * lambda1 - kappa * kappa / 16.0;
    const cplx root = (arg >= 0.0) ? cplx(std::sqrt(arg), 0.0)
                                   : cplx(0.0, std::sqrt(-arg));
    const cplx center(0.0, -0.25 * kappa);
    return {center + root, center - root};
}

Polynomial characteristic_polynomial(const ComplexMatrix& matrix) {
    matrix.validate();
    const int n = matrix.dim;
    if (n > 8) throw std::invalid_argument("characteristic_polynomial: dimension must be <= 8");

    // Faddeev-LeVerrier: monic coefficients of det(E*Id - H).
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1.0;
    ComplexMatrix b = matrix;
    c[1] = -trace(b);
    for (int k = 2; k <= n; ++k) {
        for (int i = 0; i < n; ++i) b.at(i, i) += c[static_cast<std::size_t>(k - 1)];
        b = matmul(matrix, b);
        c[static_cast<std::size_t>(k)] = -trace(b) / static_cast<double>(k);
    }
    // det(H - E*Id) = (-1)^n det(E*Id - H)
    if (n % 2 == 1)
        for (cplx& x : c) x = -x;
    return Polynomial(std::move(c));
}

StateVector eigenvector_for(const ComplexMatrix& matrix, cplx energy) {
    matrix.validate();
    ComplexMatrix shifted = matrix;
    for (int i = 0; i < matrix.dim; ++i) shifted.at(i, i) -= energy;

    std::vector<cplx> v = most_singular_direction(shifted);
    const double h_norm = std::max(max_abs_entry(matrix), 1e-300);
    const double residual = vec_norm(matvec(shifted, v));
    if (residual > 1e-6 * h_norm)
        throw std::runtime_error("eigenvector_for: energy is not an eigenvalue "
                                 "(residual above tolerance)");

    // Fix the global phase: largest-magnitude component real and positive.
    int imax = 0;
    for (int i = 1; i < matrix.dim; ++i)
        if (std::abs(v[static_cast<std::size_t>(i)]) >
            std::abs(v[static_cast<std::size_t>(imax)]))
            imax = i;
    const cplx top = v[static_cast<std::size_t>(imax)];
    const cplx phase = std::conj(top) / std::abs(top);
    for (cplx& x : v) x *= phase;
    return StateVector::from_amplitudes(std::move(v));
}

EpClassification classify_point(double lambda1, double lambda2, double kappa,
                                double gap_tol) {
    if (!(gap_tol > 0.0)) throw std::invalid_argument("classify_point: gap_tol must be > 0");
    const ComplexSpectrum spec = eigenvalues_closed_form(lambda1, lambda2, kappa);
    const auto& e = spec.energies;

    EpClassification out;
    double min_gap = std::abs(e[0] - e[1]);
    min_gap = std::min(min_gap, std::abs(e[0] - e[2]));
    min_gap = std::min(min_gap, std::abs(e[1] - e[2]));
    out.min_gap = min_gap;

    int close_pairs = 0;
    cplx degenerate_sum(0.0, 0.0);
    int degenerate_count = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (std::abs(e[static_cast<std::size_t>(a)] - e[static_cast<std::size_t>(b)]) <
                gap_tol) {
                ++close_pairs;
                degenerate_sum += e[static_cast<std::size_t>(a)] + e[static_cast<std::size_t>(b)];
                degenerate_count += 2;
            }
    if (close_pairs == 0) {
        out.kind = DegeneracyKind::Regular;
        return out;
    }

    const cplx e_deg = degenerate_sum / static_cast<double>(degenerate_count);
    out.degenerate_energy = e_deg;

    const ComplexMatrix h = build_chain_hamiltonian(three_mode_chain(lambda1, lambda2, kappa));
    const double h_scale = std::max(max_abs_entry(h), 1e-300);
    const bool hermitian = is_hermitian(h, 1e-12 * h_scale);

    // Geometric multiplicity at the degenerate energy separates diabolical
    // from exceptional degeneracies.
    ComplexMatrix shifted = h;
    for (int i = 0; i < 3; ++i) shifted.at(i, i) -= e_deg;
    const int null_dim = null_space_dimension(shifted, 1e-7);
    const int algebraic = (close_pairs >= 3) ? 3 : 2;

    if (hermitian || null_dim >= algebraic) out.kind = DegeneracyKind::DP;
    else if (close_pairs >= 3) out.kind = DegeneracyKind::EP3;
    else out.kind = DegeneracyKind::EP2;
    return out;
}

namespace {

double max_pairwise_gap(double lambda1, double lambda2, double kappa) {
    const ComplexSpectrum s = eigenvalues_closed_form(lambda1, lambda2, kappa);
    double g = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            g = std::max(g, std::abs(s.energies[static_cast<std::size_t>(a)] -
                                     s.energies[static_cast<std::size_t>(b)]));
    return g;
}

// Compass pattern search with shrinking steps. The objective behaves like
// (distance)^(1/3) near the minimum, so the basin is steep and a plain
// pattern search resolves the position far below the step used to enter it.
std::array<double, 2> refine_gap_minimum(double l1, double l2, double kappa,
                                         double initial_step, double final_step) {
    double best = max_pairwise_gap(l1, l2, kappa);
    double step = initial_step;
    while (step > final_step) {
        bool improved = false;
        const double candidates[4][2] = {{l1 + step, l2}, {l1 - step, l2},
                                         {l1, l2 + step}, {l1, l2 - step}};
        for (const auto& c : candidates) {
            const double g = max_pairwise_gap(c[0], c[1], kappa);
            if (g < best) {
                best = g;
                l1 = c[0];
                l2 = c[1];
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return {l1, l2};
}

}  // namespace

std::array<Ep3Point, 4> locate_ep3(double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("locate_ep3: kappa must be > 0");
    const double l1c = std::sqrt(2.0) * kappa / (3.0 * std::sqrt(3.0));
    const double l2c = kappa / (6.0 * std::sqrt(3.0));

    std::array<Ep3Point, 4> out;
    const double signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (int k = 0; k < 4; ++k) {
        const double seed1 = signs[k][0] * l1c;
        const double seed2 = signs[k][1] * l2c;
        const auto refined =
            refine_gap_minimum(seed1, seed2, kappa, 1e-6 * kappa, 1e-13 * kappa);
        const double drift = std::hypot(refined[0] - seed1, refined[1] - seed2);
        if (drift > 1e-3 * kappa)
            throw std::runtime_error("locate_ep3: refinement diverged from the analytic seed");
        out[static_cast<std::size_t>(k)] = Ep3Point{
            refined[0], refined[1], max_pairwise_gap(refined[0], refined[1], kappa)};
    }
    return out;
}

void GridSpec::validate() const {
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("GridSpec: at least 2 points per axis required");
    if (!(lambda1_max > lambda1_min) || !(lambda2_max > lambda2_min))
        throw std::invalid_argument("GridSpec: extent must be positive");
}

double GridSpec::lambda1_at(int i) const {
    return lambda1_min + (lambda1_max - lambda1_min) * i / (n1 - 1);
}

double GridSpec::lambda2_at(int j) const {
    return lambda2_min + (lambda2_max - lambda2_min) * j / (n2 - 1);
}

int resolve_worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NHCHAIN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

std::vector<SpectralMapRecord> scan_spectral_map(double kappa, const GridSpec& grid,
                                                 double flag_tol, int n_threads) {
    grid.validate();
    const double tol = (flag_tol > 0.0) ? flag_tol : 1e-9 * std::max(1.0, std::abs(kappa));
    const int total = grid.n1 * grid.n2;
    std::vector<SpectralMapRecord> records(static_cast<std::size_t>(total));

    auto worker = [&](int begin, int end) {
        for (int idx = begin; idx < end; ++idx) {
            const int i = idx / grid.n2;
            const int j = idx % grid.n2;
            SpectralMapRecord rec;
            rec.lambda1 = grid.lambda1_at(i);
            rec.lambda2 = grid.lambda2_at(j);
            const ComplexSpectrum s =
                eigenvalues_closed_form(rec.lambda1, rec.lambda2, kappa);
            double max_re = 0.0, max_im = 0.0;
            double min_gap = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) {
                    const cplx d = s.energies[static_cast<std::size_t>(a)] -
                                   s.energies[static_cast<std::size_t>(b)];
                    max_re = std::max(max_re, std::abs(d.real()));
                    max_im = std::max(max_im, std::abs(d.imag()));
                    min_gap = std::min(min_gap, std::abs(d));
                }
            rec.max_re_gap = max_re;
            rec.max_im_gap = max_im;
            rec.min_gap = min_gap;
            rec.isofrequency = true;
            for (const cplx& e : s.energies)
                if (std::abs(e.real()) >= tol) { rec.isofrequency = false; break; }
            rec.ifermi = max_im < tol;
            records[static_cast<std::size_t>(idx)] = rec;
        }
    };

    const int workers = std::min(resolve_worker_count(n_threads), total);
    if (workers <= 1) {
        worker(0, total);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const int chunk = (total + workers - 1) / workers;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker, w * chunk, std::min(total, (w + 1) * chunk));
        for (auto& t : pool) t.join();
    }
    return records;
}

std::string spectral_map_csv(const std::vector<SpectralMapRecord>& records) {
    std::ostringstream os;
    os << "lambda1,lambda2,max_re_gap,max_im_gap,min_gap,isofrequency,ifermi\n";
    for (const auto& r : records) {
        os << format_double(r.lambda1) << ',' << format_double(r.lambda2) << ','
           << format_double(r.max_re_gap) << ',' << format_double(r.max_im_gap) << ','
           << format_double(r.min_gap) << ',' << format_bool01(r.isofrequency) << ','
           << format_bool01(r.ifermi) << '\n';
    }
    return os.str();
}

}  // namespace nhchain
