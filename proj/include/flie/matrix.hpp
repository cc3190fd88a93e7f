#ifndef FLIE_MATRIX_HPP
#define FLIE_MATRIX_HPP

#include "flie/field.hpp"

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <vector>

namespace flie {

using Vec = std::vector<Scalar>;

inline Vec zero_vec(std::size_t n, FieldSpec field) {
    return Vec(n, Scalar::zero(field));
}

inline Vec unit_vec(std::size_t n, std::size_t i, FieldSpec field) {
    Vec v = zero_vec(n, field);
    v[i] = Scalar::one(field);
    return v;
}

inline bool is_zero_vec(const Vec& v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

/// Dense matrix over one FieldSpec, row-major.
class Matrix {
  public:
    Matrix(std::size_t rows, std::size_t cols, FieldSpec field)
        : rows_(rows), cols_(cols), field_(field), a_(rows * cols, Scalar::zero(field)) {}

    static Matrix identity(std::size_t n, FieldSpec field) {
        Matrix m(n, n, field);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar::one(field);
        return m;
    }

    static Matrix from_rows(const std::vector<Vec>& rows, FieldSpec field, std::size_t cols) {
        Matrix m(rows.size(), cols, field);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) throw DimensionMismatch("row length mismatch");
            for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    /// Integer convenience constructor, entries given row-major.
    static Matrix from_ints(std::size_t rows, std::size_t cols, FieldSpec field,
                            std::initializer_list<std::int64_t> entries) {
        if (entries.size() != rows * cols) throw DimensionMismatch("entry count mismatch");
        Matrix m(rows, cols, field);
        std::size_t k = 0;
        for (auto v : entries) {
            m.a_[k++] = Scalar(field, v);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    FieldSpec field() const { return field_; }

    Scalar& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Vec row(std::size_t i) const {
        Vec r(cols_, Scalar::zero(field_));
        for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
        return r;
    }

    Vec col(std::size_t j) const {
        Vec c(rows_, Scalar::zero(field_));
        for (std::size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
        return c;
    }

    void set_col(std::size_t j, const Vec& v) {
        if (v.size() != rows_) throw DimensionMismatch("column length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) at(i, j) = v[i];
    }

    Vec apply(const Vec& v) const {
        if (v.size() != cols_) throw DimensionMismatch("matrix-vector size mismatch");
        Vec out = zero_vec(rows_, field_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!at(i, j).is_zero() && !v[j].is_zero()) out[i] += at(i, j) * v[j];
        return out;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product size mismatch");
        Matrix c(a.rows_, b.cols_, a.field_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b.at(k, j).is_zero()) c.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.field_ == b.field_ && a.a_ == b.a_;
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < rows_; ++i) {
            os << (i ? "\n" : "") << "[";
            for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j).str();
            os << "]";
        }
        return os.str();
    }

  private:
    std::size_t rows_, cols_;
    FieldSpec field_;
    std::vector<Scalar> a_;
};

struct RrefResult {
    Matrix reduced;
    std::size_t rank;
    std::vector<std::size_t> pivot_columns;
};

/// Unique reduced row-echelon form via Gauss-Jordan elimination.
inline RrefResult rref(const Matrix& m) {
    Matrix r = m;
    const std::size_t nr = r.rows(), nc = r.cols();
    std::vector<std::size_t> pivots;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < nc && lead < nr; ++c) {
        std::size_t sel = nr;
        for (std::size_t i = lead; i < nr; ++i)
            if (!r.at(i, c).is_zero()) {
                sel = i;
                break;
            }
        if (sel == nr) continue;
        if (sel != lead)
            for (std::size_t j = 0; j < nc; ++j) std::swap(r.at(lead, j), r.at(sel, j));
        const Scalar inv = r.at(lead, c).inv();
        for (std::size_t j = 0; j < nc; ++j) r.at(lead, j) *= inv;
        for (std::size_t i = 0; i < nr; ++i) {
            if (i == lead || r.at(i, c).is_zero()) continue;
            const Scalar f = r.at(i, c);
            for (std::size_t j = 0; j < nc; ++j) r.at(i, j) -= f * r.at(lead, j);
        }
        pivots.push_back(c);
        ++lead;
    }
    return {r, pivots.size(), pivots};
}

inline Scalar det(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("determinant of non-square matrix");
    Matrix r = m;
    const std::size_t n = r.rows();
    Scalar d = Scalar::one(m.field());
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t sel = n;
        for (std::size_t i = c; i < n; ++i)
            if (!r.at(i, c).is_zero()) {
                sel = i;
                break;
            }
        if (sel == n) return Scalar::zero(m.field());
        if (sel != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(r.at(c, j), r.at(sel, j));
            d = -d;
        }
        d *= r.at(c, c);
        const Scalar inv = r.at(c, c).inv();
        for (std::size_t i = c + 1; i < n; ++i) {
            if (r.at(i, c).is_zero()) continue;
            const Scalar f = r.at(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) r.at(i, j) -= f * r.at(c, j);
        }
    }
    return d;
}

inline bool is_invertible(const Matrix& m) {
    return m.rows() == m.cols() && !det(m).is_zero();
}

inline Matrix inverse(const Matrix& m) {
    if (m.rows() != m.cols()) throw SingularMatrix("inverse of non-square matrix");
    const std::size_t n = m.rows();
    Matrix aug(n, 2 * n, m.field());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = Scalar::one(m.field());
    }
    RrefResult r = rref(aug);
    if (r.rank != n || r.pivot_columns[n - 1] != n - 1)
        throw SingularMatrix("matrix is singular");
    Matrix inv(n, n, m.field());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = r.reduced.at(i, n + j);
    return inv;
}

}  // namespace flie

#endif
