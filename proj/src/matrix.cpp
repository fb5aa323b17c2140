#include "isovolc/matrix.hpp"

#include <algorithm>

#include "isovolc/errors.hpp"

namespace isovolc {

MatZ MatZ::identity(size_t n) {
    MatZ m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

std::vector<Int> MatZ::row(size_t i) const {
    return std::vector<Int>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
}

void MatZ::set_row(size_t i, const std::vector<Int>& v) {
    std::copy(v.begin(), v.end(), a_.begin() + i * cols_);
}

MatZ MatZ::transpose() const {
    MatZ t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

MatZ MatZ::operator*(const MatZ& o) const {
    MatZ r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t k = 0; k < cols_; ++k) {
            const Int& v = at(i, k);
            if (v == 0) continue;
            for (size_t j = 0; j < o.cols_; ++j) r.at(i, j) += v * o.at(k, j);
        }
    return r;
}

MatZ MatZ::operator*(const Int& s) const {
    MatZ r = *this;
    for (auto& v : r.a_) v *= s;
    return r;
}

MatZ MatZ::operator+(const MatZ& o) const {
    MatZ r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
}

int MatZ::compare(const MatZ& o) const {
    if (rows_ != o.rows_) return rows_ < o.rows_ ? -1 : 1;
    if (cols_ != o.cols_) return cols_ < o.cols_ ? -1 : 1;
    for (size_t i = 0; i < a_.size(); ++i) {
        int c = cmp(a_[i], o.a_[i]);
        if (c) return c;
    }
    return 0;
}

Int MatZ::content() const {
    Int g = 0;
    for (const auto& v : a_) {
        g = gcd(g, v);
        if (g == 1) break;
    }
    return g;
}

void MatZ::divexact_all(const Int& g) {
    for (auto& v : a_) v = divexact(v, g);
}

MatZ MatZ::vstack(const MatZ& top, const MatZ& bottom) {
    MatZ r(top.rows_ + bottom.rows_, top.cols_);
    r.a_ = top.a_;
    r.a_.insert(r.a_.end(), bottom.a_.begin(), bottom.a_.end());
    return r;
}

MatZ MatZ::hstack(const MatZ& left, const MatZ& right) {
    MatZ r(left.rows_, left.cols_ + right.cols_);
    for (size_t i = 0; i < left.rows_; ++i) {
        for (size_t j = 0; j < left.cols_; ++j) r.at(i, j) = left.at(i, j);
        for (size_t j = 0; j < right.cols_; ++j) r.at(i, left.cols_ + j) = right.at(i, j);
    }
    return r;
}

std::vector<Int> row_times_mat(const std::vector<Int>& v, const MatZ& m) {
    std::vector<Int> r(m.cols());
    for (size_t k = 0; k < m.rows(); ++k) {
        if (v[k] == 0) continue;
        for (size_t j = 0; j < m.cols(); ++j) r[j] += v[k] * m.at(k, j);
    }
    return r;
}

namespace {

void swap_rows(MatZ& m, size_t i, size_t j) {
    if (i == j) return;
    for (size_t c = 0; c < m.cols(); ++c) std::swap(m.at(i, c), m.at(j, c));
}

void addmul_row(MatZ& m, size_t dst, size_t src, const Int& f) {
    if (f == 0) return;
    for (size_t c = 0; c < m.cols(); ++c) m.at(dst, c) += f * m.at(src, c);
}

// Core row-HNF.  Pivot choice is minimal absolute value to limit coefficient
// growth.  When U != nullptr the same operations are mirrored there.
size_t hnf_inplace(MatZ& m, MatZ* U) {
    size_t r = 0;
    size_t rows = m.rows(), cols = m.cols();
    for (size_t c = 0; c < cols && r < rows; ++c) {
        for (;;) {
            size_t piv = rows;
            for (size_t i = r; i < rows; ++i) {
                if (m.at(i, c) == 0) continue;
                if (piv == rows || mpz_cmpabs(m.at(i, c).get_mpz_t(), m.at(piv, c).get_mpz_t()) < 0)
                    piv = i;
            }
            if (piv == rows) break;
            swap_rows(m, r, piv);
            if (U) swap_rows(*U, r, piv);
            bool clean = true;
            for (size_t i = r + 1; i < rows; ++i) {
                if (m.at(i, c) == 0) continue;
                Int q = round_q(m.at(i, c), m.at(r, c));
                addmul_row(m, i, r, -q);
                if (U) addmul_row(*U, i, r, -q);
                if (m.at(i, c) != 0) clean = false;
            }
            if (clean) break;
        }
        if (m.at(r, c) == 0) continue;
        if (m.at(r, c) < 0) {
            for (size_t j = 0; j < cols; ++j) m.at(r, j) = -m.at(r, j);
            if (U)
                for (size_t j = 0; j < U->cols(); ++j) U->at(r, j) = -U->at(r, j);
        }
        for (size_t i = 0; i < r; ++i) {
            Int q = fdiv_q(m.at(i, c), m.at(r, c));
            addmul_row(m, i, r, -q);
            if (U) addmul_row(*U, i, r, -q);
        }
        ++r;
    }
    return r;
}

MatZ take_rows(const MatZ& m, size_t r) {
    MatZ out(r, m.cols());
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(i, j);
    return out;
}

}  // namespace

MatZ hnf(MatZ m) {
    size_t r = hnf_inplace(m, nullptr);
    return take_rows(m, r);
}

MatZ hnf_with_transform(MatZ m, MatZ& U) {
    U = MatZ::identity(m.rows());
    size_t r = hnf_inplace(m, &U);
    return take_rows(m, r);
}

MatZ left_kernel(const MatZ& m) {
    MatZ U;
    MatZ h = hnf_with_transform(m, U);
    size_t rank = h.rows();
    MatZ ker(m.rows() - rank, m.rows());
    for (size_t i = rank; i < m.rows(); ++i)
        for (size_t j = 0; j < m.rows(); ++j) ker.at(i - rank, j) = U.at(i, j);
    return ker;
}

namespace {

// Smith normal form by alternating row/column reduction on the trailing
// submatrix, then a divisibility fixup pass.
void snf_inplace(MatZ& m, MatZ* U, MatZ* V) {
    size_t rows = m.rows(), cols = m.cols();
    size_t t = 0;
    size_t nmin = std::min(rows, cols);
    auto col_addmul = [&](size_t dst, size_t src, const Int& f) {
        if (f == 0) return;
        for (size_t i = 0; i < rows; ++i) m.at(i, dst) += f * m.at(i, src);
        if (V)
            for (size_t i = 0; i < V->rows(); ++i) V->at(i, dst) += f * V->at(i, src);
    };
    auto col_swap = [&](size_t a, size_t b) {
        if (a == b) return;
        for (size_t i = 0; i < rows; ++i) std::swap(m.at(i, a), m.at(i, b));
        if (V)
            for (size_t i = 0; i < V->rows(); ++i) std::swap(V->at(i, a), V->at(i, b));
    };
    for (; t < nmin; ++t) {
        // locate minimal nonzero entry in trailing block
        size_t bi = rows, bj = cols;
        for (size_t i = t; i < rows; ++i)
            for (size_t j = t; j < cols; ++j) {
                if (m.at(i, j) == 0) continue;
                if (bi == rows || mpz_cmpabs(m.at(i, j).get_mpz_t(), m.at(bi, bj).get_mpz_t()) < 0) {
                    bi = i;
                    bj = j;
                }
            }
        if (bi == rows) break;
        swap_rows(m, t, bi);
        if (U) swap_rows(*U, t, bi);
        col_swap(t, bj);
        for (;;) {
            bool touched = false;
            for (size_t i = t + 1; i < rows; ++i) {
                if (m.at(i, t) == 0) continue;
                Int q = round_q(m.at(i, t), m.at(t, t));
                addmul_row(m, i, t, -q);
                if (U) addmul_row(*U, i, t, -q);
                if (m.at(i, t) != 0) {
                    // smaller remainder becomes the pivot
                    swap_rows(m, t, i);
                    if (U) swap_rows(*U, t, i);
                    touched = true;
                }
            }
            for (size_t j = t + 1; j < cols; ++j) {
                if (m.at(t, j) == 0) continue;
                Int q = round_q(m.at(t, j), m.at(t, t));
                col_addmul(j, t, -q);
                if (m.at(t, j) != 0) {
                    col_swap(t, j);
                    touched = true;
                }
            }
            if (!touched) break;
        }
        // pivot must divide the whole trailing block
        for (;;) {
            size_t oi = rows, oj = cols;
            for (size_t i = t + 1; i < rows && oi == rows; ++i)
                for (size_t j = t + 1; j < cols; ++j)
                    if (!divisible(m.at(i, j), m.at(t, t))) {
                        oi = i;
                        oj = j;
                        break;
                    }
            if (oi == rows) break;
            (void)oj;
            addmul_row(m, t, oi, 1);
            if (U) addmul_row(*U, t, oi, 1);
            for (;;) {
                bool touched = false;
                for (size_t j = t + 1; j < cols; ++j) {
                    if (m.at(t, j) == 0) continue;
                    Int q = round_q(m.at(t, j), m.at(t, t));
                    col_addmul(j, t, -q);
                    if (m.at(t, j) != 0) {
                        col_swap(t, j);
                        touched = true;
                    }
                }
                for (size_t i = t + 1; i < rows; ++i) {
                    if (m.at(i, t) == 0) continue;
                    Int q = round_q(m.at(i, t), m.at(t, t));
                    addmul_row(m, i, t, -q);
                    if (U) addmul_row(*U, i, t, -q);
                    if (m.at(i, t) != 0) {
                        swap_rows(m, t, i);
                        if (U) swap_rows(*U, t, i);
                        touched = true;
                    }
                }
                if (!touched) break;
            }
        }
        if (m.at(t, t) < 0) {
            m.at(t, t) = -m.at(t, t);
            if (U)
                for (size_t j = 0; j < U->cols(); ++j) U->at(t, j) = -U->at(t, j);
        }
    }
}

}  // namespace

std::vector<Int> snf(MatZ m) {
    snf_inplace(m, nullptr, nullptr);
    size_t n = std::min(m.rows(), m.cols());
    std::vector<Int> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = m.at(i, i);
    return d;
}

std::vector<Int> snf_with_transform(MatZ m, MatZ& U, MatZ& V) {
    U = MatZ::identity(m.rows());
    V = MatZ::identity(m.cols());
    snf_inplace(m, &U, &V);
    size_t n = std::min(m.rows(), m.cols());
    std::vector<Int> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = m.at(i, i);
    return d;
}

Int det(const MatZ& m) {
    if (m.rows() != m.cols()) throw err("matrix", "NotSquare", "det of non-square matrix");
    size_t n = m.rows();
    if (n == 0) return 1;
    MatZ a = m;
    Int prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            size_t piv = n;
            for (size_t i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv == n) return 0;
            swap_rows(a, k, piv);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                a.at(i, j) = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                if (k > 0) a.at(i, j) = divexact(a.at(i, j), prev);
            }
        prev = a.at(k, k);
    }
    return sign > 0 ? a.at(n - 1, n - 1) : -a.at(n - 1, n - 1);
}

Int det_upper_triangular(const MatZ& m) {
    Int d = 1;
    for (size_t i = 0; i < m.rows(); ++i) d *= m.at(i, i);
    return d;
}

MatZ adjugate(const MatZ& m, const Int& determinant) {
    // row i = det * (row i of m^{-1}), via x * m = det * e_i
    size_t n = m.rows();
    MatZ adj(n, n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Int> rhs(n);
        rhs[i] = determinant;
        std::vector<Int> sol;
        Int den;
        if (!solve_left_rational(m, rhs, 1, sol, den))
            throw err("matrix", "Singular", "adjugate of singular matrix");
        for (size_t j = 0; j < n; ++j) {
            if (!divisible(sol[j], den))
                throw err("matrix", "Internal", "adjugate not integral");
            adj.at(i, j) = divexact(sol[j], den);
        }
    }
    return adj;
}

MatZ inverse_unimodular(const MatZ& m) {
    Int d = det(m);
    if (d != 1 && d != -1) throw err("matrix", "NotUnimodular", "inverse_unimodular");
    return adjugate(m, 1);
}

bool solve_left_rational(const MatZ& m, const std::vector<Int>& rhs_num, const Int& rhs_den,
                         std::vector<Int>& sol_num, Int& sol_den) {
    // Gaussian elimination over Q on the system x * m = rhs.
    size_t n = m.rows();
    if (m.cols() != n || rhs_num.size() != n)
        throw err("matrix", "BadShape", "solve_left_rational");
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n + 1));
    for (size_t i = 0; i < n; ++i) {
        // column i of the transposed system: sum_k x_k m[k][i] = rhs[i]
        for (size_t k = 0; k < n; ++k) a[i][k] = Rat(m.at(k, i));
        a[i][n] = Rat(rhs_num[i], rhs_den);
        a[i][n].canonicalize();
    }
    size_t row = 0;
    std::vector<size_t> pivot_col(n, n);
    for (size_t col = 0; col < n && row < n; ++col) {
        size_t piv = n;
        for (size_t i = row; i < n; ++i)
            if (a[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv == n) continue;
        std::swap(a[row], a[piv]);
        Rat inv = 1 / a[row][col];
        for (size_t j = col; j <= n; ++j) a[row][j] *= inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == row || a[i][col] == 0) continue;
            Rat f = a[i][col];
            for (size_t j = col; j <= n; ++j) a[i][j] -= f * a[row][j];
        }
        pivot_col[row] = col;
        ++row;
    }
    for (size_t i = row; i < n; ++i)
        if (a[i][n] != 0) return false;
    std::vector<Rat> x(n, Rat(0));
    for (size_t i = 0; i < row; ++i) x[pivot_col[i]] = a[i][n];
    if (row < n) return false;  // singular: demand unique solution
    sol_den = 1;
    for (size_t i = 0; i < n; ++i) sol_den = lcm(sol_den, x[i].get_den());
    sol_num.assign(n, Int(0));
    for (size_t i = 0; i < n; ++i) sol_num[i] = x[i].get_num() * divexact(sol_den, x[i].get_den());
    return true;
}

}  // namespace isovolc
