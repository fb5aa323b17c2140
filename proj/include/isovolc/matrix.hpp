#ifndef ISOVOLC_MATRIX_HPP
#define ISOVOLC_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "isovolc/numeric.hpp"

namespace isovolc {

// Dense arbitrary-precision integer matrix, row major.
class MatZ {
public:
    MatZ() : rows_(0), cols_(0) {}
    MatZ(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static MatZ identity(size_t n);
    static MatZ zero(size_t rows, size_t cols) { return MatZ(rows, cols); }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    Int& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Int& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    std::vector<Int> row(size_t i) const;
    void set_row(size_t i, const std::vector<Int>& v);

    MatZ transpose() const;
    MatZ operator*(const MatZ& o) const;
    MatZ operator*(const Int& s) const;
    MatZ operator+(const MatZ& o) const;
    bool operator==(const MatZ& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
    bool operator!=(const MatZ& o) const { return !(*this == o); }

    // lexicographic, for deterministic ordering of canonical forms
    int compare(const MatZ& o) const;

    Int content() const;
    void divexact_all(const Int& g);

    static MatZ vstack(const MatZ& top, const MatZ& bottom);
    static MatZ hstack(const MatZ& left, const MatZ& right);

private:
    size_t rows_, cols_;
    std::vector<Int> a_;
};

std::vector<Int> row_times_mat(const std::vector<Int>& v, const MatZ& m);

// Row Hermite normal form: upper trapezoidal, positive pivots, entries above
// each pivot reduced into [0, pivot).  Returns the nonzero rows only.
MatZ hnf(MatZ m);

// Same, also producing unimodular U with U*input = [H; 0].
MatZ hnf_with_transform(MatZ m, MatZ& U);

// Basis for { v : v * m = 0 } as rows.
MatZ left_kernel(const MatZ& m);

// Smith normal form diagonal d1 | d2 | ... (nonnegative; zeros for rank
// deficiency).  Transform version gives U*m*V = diag.
std::vector<Int> snf(MatZ m);
std::vector<Int> snf_with_transform(MatZ m, MatZ& U, MatZ& V);

Int det(const MatZ& m);             // Bareiss, fraction free
Int det_upper_triangular(const MatZ& m);

// adj(m) with m * adj(m) = det(m) * I
MatZ adjugate(const MatZ& m, const Int& determinant);

// Inverse of a unimodular integer matrix (det = ±1).
MatZ inverse_unimodular(const MatZ& m);

// Solves x * m = rhs exactly over Q for an invertible square m.
// Returns false when no rational solution exists (singular m).
bool solve_left_rational(const MatZ& m, const std::vector<Int>& rhs_num, const Int& rhs_den,
                         std::vector<Int>& sol_num, Int& sol_den);

}  // namespace isovolc

#endif
