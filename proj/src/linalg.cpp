#include "nhchain/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace nhchain {

ComplexMatrix::ComplexMatrix(int n) : dim(n) {
    if (n < 1) throw std::invalid_argument("ComplexMatrix: dimension must be >= 1");
    entries.assign(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0));
}

void ComplexMatrix::validate() const {
    if (dim < 1) throw std::invalid_argument("ComplexMatrix: dimension must be >= 1");
    if (entries.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("ComplexMatrix: entries length must equal dim^2");
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

std::vector<cplx> matvec(const ComplexMatrix& m, const std::vector<cplx>& v) {
    if (static_cast<int>(v.size()) != m.dim)
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cplx> out(m.dim, cplx(0.0, 0.0));
    for (int i = 0; i < m.dim; ++i) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < m.dim; ++j) acc += m.at(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim != b.dim) throw std::invalid_argument("matmul: dimension mismatch");
    ComplexMatrix c(a.dim);
    for (int i = 0; i < a.dim; ++i)
        for (int k = 0; k < a.dim; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < a.dim; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix a(m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) a.at(i, j) = std::conj(m.at(j, i));
    return a;
}

cplx trace(const ComplexMatrix& m) {
    cplx t(0.0, 0.0);
    for (int i = 0; i < m.dim; ++i) t += m.at(i, i);
    return t;
}

double max_abs_entry(const ComplexMatrix& m) {
    double mx = 0.0;
    for (const cplx& e : m.entries) mx = std::max(mx, std::abs(e));
    return mx;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j)
            if (std::abs(m.at(i, j) - std::conj(m.at(j, i))) > tol) return false;
    return true;
}

bool is_complex_symmetric(const ComplexMatrix& m, double tol) {
    for (int i = 0; i < m.dim; ++i)
        for (int j = i + 1; j < m.dim; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > tol) return false;
    return true;
}

double vec_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx inner_product(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner_product: size mismatch");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

cplx determinant(ComplexMatrix a) {
    a.validate();
    const int n = a.dim;
    cplx det(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double m = std::abs(a.at(i, k));
            if (m > best) { best = m; piv = i; }
        }
        if (best == 0.0) return cplx(0.0, 0.0);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            det = -det;
        }
        det *= a.at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cplx f = a.at(i, k) / a.at(k, k);
            if (f == cplx(0.0, 0.0)) continue;
            for (int j = k; j < n; ++j) a.at(i, j) -= f * a.at(k, j);
        }
    }
    return det;
}

std::vector<cplx> solve_dense(ComplexMatrix a, std::vector<cplx> b) {
    a.validate();
    const int n = a.dim;
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_dense: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double m = std::abs(a.at(i, k));
            if (m > best) { best = m; piv = i; }
        }
        if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const cplx f = a.at(i, k) / a.at(k, k);
            if (f == cplx(0.0, 0.0)) continue;
            for (int j = k; j < n; ++j) a.at(i, j) -= f * a.at(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<cplx> x(n);
    for (int k = n - 1; k >= 0; --k) {
        cplx s = b[k];
        for (int j = k + 1; j < n; ++j) s -= a.at(k, j) * x[j];
        x[k] = s / a.at(k, k);
    }
    return x;
}

namespace {

struct Elimination {
    ComplexMatrix u;            // upper-triangular up to column permutation
    std::vector<int> col_perm;  // u column j corresponds to original column col_perm[j]
    std::vector<double> pivots; // |pivot| per elimination step
};

// Complete pivoting: at each step bring the largest remaining entry onto the
// diagonal, so pivot magnitudes are non-increasing and expose the rank.
Elimination eliminate_complete(const ComplexMatrix& a) {
    Elimination e;
    e.u = a;
    const int n = a.dim;
    e.col_perm.resize(n);
    for (int j = 0; j < n; ++j) e.col_perm[j] = j;
    e.pivots.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        int pi = k, pj = k;
        double best = -1.0;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                const double m = std::abs(e.u.at(i, j));
                if (m > best) { best = m; pi = i; pj = j; }
            }
        e.pivots[k] = best;
        if (best == 0.0) break;  // remaining block zero; later pivots stay 0
        if (pi != k)
            for (int j = 0; j < n; ++j) std::swap(e.u.at(k, j), e.u.at(pi, j));
        if (pj != k) {
            for (int i = 0; i < n; ++i) std::swap(e.u.at(i, k), e.u.at(i, pj));
            std::swap(e.col_perm[k], e.col_perm[pj]);
        }
        for (int i = k + 1; i < n; ++i) {
            const cplx f = e.u.at(i, k) / e.u.at(k, k);
            if (f == cplx(0.0, 0.0)) continue;
            for (int j = k; j < n; ++j) e.u.at(i, j) -= f * e.u.at(k, j);
        }
    }
    return e;
}

int rank_from_pivots(const std::vector<double>& pivots, double rel_tol) {
    const double scale = pivots.empty() ? 0.0 : pivots.front();
    if (scale == 0.0) return 0;
    int r = 0;
    for (double p : pivots) {
        if (p > rel_tol * scale) ++r;
        else break;
    }
    return r;
}

// Back-substitute with permuted column `free_col` set to one and any other
// free columns set to zero; returns the un-permuted vector.
std::vector<cplx> back_substitute_free(const Elimination& e, int rank, int free_col) {
    const int n = e.u.dim;
    std::vector<cplx> x(n, cplx(0.0, 0.0));
    x[free_col] = 1.0;
    for (int k = rank - 1; k >= 0; --k) {
        cplx s(0.0, 0.0);
        for (int j = k + 1; j < n; ++j) s += e.u.at(k, j) * x[j];
        x[k] = -s / e.u.at(k, k);
    }
    std::vector<cplx> v(n, cplx(0.0, 0.0));
    for (int j = 0; j < n; ++j) v[e.col_perm[j]] = x[j];
    return v;
}

}  // namespace

int null_space_dimension(const ComplexMatrix& a, double rel_tol) {
    a.validate();
    const Elimination e = eliminate_complete(a);
    return a.dim - rank_from_pivots(e.pivots, rel_tol);
}

std::vector<std::vector<cplx>> null_space_basis(const ComplexMatrix& a, double rel_tol) {
    a.validate();
    const Elimination e = eliminate_complete(a);
    const int rank = rank_from_pivots(e.pivots, rel_tol);
    std::vector<std::vector<cplx>> basis;
    for (int f = rank; f < a.dim; ++f) {
        std::vector<cplx> v = back_substitute_free(e, rank, f);
        const double nrm = vec_norm(v);
        for (cplx& x : v) x /= nrm;
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<cplx> most_singular_direction(const ComplexMatrix& a) {
    a.validate();
    const int n = a.dim;
    if (n == 1) return {cplx(1.0, 0.0)};
    const Elimination e = eliminate_complete(a);
    int rank = rank_from_pivots(e.pivots, 1e-14);
    if (rank == n) rank = n - 1;  // numerically full rank: free the weakest column
    std::vector<cplx> v = back_substitute_free(e, rank, rank);
    const double nrm = vec_norm(v);
    for (cplx& x : v) x /= nrm;
    return v;
}

std::vector<cplx> lstsq(const std::vector<std::vector<cplx>>& a_columns,
                        const std::vector<cplx>& b) {
    const int ncols = static_cast<int>(a_columns.size());
    if (ncols == 0) throw std::invalid_argument("lstsq: empty system");
    const int nrows = static_cast<int>(a_columns.front().size());
    if (nrows < ncols) throw std::invalid_argument("lstsq: need rows >= cols");
    for (const auto& c : a_columns)
        if (static_cast<int>(c.size()) != nrows)
            throw std::invalid_argument("lstsq: ragged columns");
    if (static_cast<int>(b.size()) != nrows)
        throw std::invalid_argument("lstsq: rhs size mismatch");

    std::vector<std::vector<cplx>> r = a_columns;
    std::vector<cplx> rhs = b;
    for (int k = 0; k < ncols; ++k) {
        double s2 = 0.0;
        for (int i = k; i < nrows; ++i) s2 += std::norm(r[k][i]);
        const double s = std::sqrt(s2);
        if (s == 0.0) throw std::runtime_error("lstsq: rank deficient system");
        const cplx xk = r[k][k];
        const cplx phase = (xk == cplx(0.0, 0.0)) ? cplx(1.0, 0.0) : xk / std::abs(xk);
        const cplx alpha = -phase * s;
        // Householder vector stored in place of column k rows k..
        std::vector<cplx> v(nrows - k);
        v[0] = xk - alpha;
        for (int i = k + 1; i < nrows; ++i) v[i - k] = r[k][i];
        double vnorm2 = 0.0;
        for (const cplx& x : v) vnorm2 += std::norm(x);
        if (vnorm2 == 0.0) throw std::runtime_error("lstsq: rank deficient system");
        auto reflect = [&](std::vector<cplx>& col) {
            cplx proj(0.0, 0.0);
            for (int i = k; i < nrows; ++i) proj += std::conj(v[i - k]) * col[i];
            proj *= 2.0 / vnorm2;
            for (int i = k; i < nrows; ++i) col[i] -= proj * v[i - k];
        };
        for (int j = k; j < ncols; ++j) reflect(r[j]);
        reflect(rhs);
        r[k][k] = alpha;  // enforce exact triangular value
    }
    std::vector<cplx> x(ncols);
    for (int k = ncols - 1; k >= 0; --k) {
        cplx s = rhs[k];
        for (int j = k + 1; j < ncols; ++j) s -= r[j][k] * x[j];
        x[k] = s / r[k][k];
    }
    return x;
}

}  // namespace nhchain
