#pragma once

#include <complex>
#include <vector>

namespace nhchain {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Everything in this project is tiny
// (single-excitation subspaces, dimension <= 8, plus a few pencil reductions),
// so a plain contiguous buffer with explicit loops is all we need.
struct ComplexMatrix {
    int dim = 0;
    std::vector<cplx> entries;  // row-major, dim*dim

    ComplexMatrix() = default;
    explicit ComplexMatrix(int n);

    cplx& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
    const cplx& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }

    void validate() const;  // entries.size() == dim*dim, dim >= 1

    static ComplexMatrix identity(int n);
};

std::vector<cplx> matvec(const ComplexMatrix& m, const std::vector<cplx>& v);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);
cplx trace(const ComplexMatrix& m);
double max_abs_entry(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol);
bool is_complex_symmetric(const ComplexMatrix& m, double tol);

double vec_norm(const std::vector<cplx>& v);
// <a|b> = sum conj(a_i) b_i
cplx inner_product(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Gaussian elimination with partial pivoting.
cplx determinant(ComplexMatrix a);
std::vector<cplx> solve_dense(ComplexMatrix a, std::vector<cplx> b);  // throws on singular

// Rank / null-space queries via elimination with complete pivoting. rel_tol is
// relative to the largest pivot encountered.
int null_space_dimension(const ComplexMatrix& a, double rel_tol);
std::vector<std::vector<cplx>> null_space_basis(const ComplexMatrix& a, double rel_tol);

// Unit vector v (approximately) minimizing |a v|: eliminate with complete
// pivoting and back-substitute with the most singular column set free. Falls
// back to the genuine null space when the matrix is rank deficient.
std::vector<cplx> most_singular_direction(const ComplexMatrix& a);

// Least squares min |A x - b| by Householder QR; A given as columns of equal
// length (rows >= cols). Throws on rank deficiency.
std::vector<cplx> lstsq(const std::vector<std::vector<cplx>>& a_columns,
                        const std::vector<cplx>& b);

}  // namespace nhchain
