#ifndef FLIE_SUBSPACE_HPP
#define FLIE_SUBSPACE_HPP

#include "flie/matrix.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace flie {

/// Subspace of the coordinate space, stored as its reduced row-echelon basis
/// with no zero rows. Two subspaces are equal iff the canonical bases match.
class Subspace {
  public:
    Subspace(std::size_t ambient_dim, FieldSpec field)
        : ambient_(ambient_dim), basis_(0, ambient_dim, field) {}

    static Subspace span(const std::vector<Vec>& vectors, std::size_t ambient_dim,
                         FieldSpec field) {
        RrefResult r = rref(Matrix::from_rows(vectors, field, ambient_dim));
        Matrix b(r.rank, ambient_dim, field);
        for (std::size_t i = 0; i < r.rank; ++i)
            for (std::size_t j = 0; j < ambient_dim; ++j) b.at(i, j) = r.reduced.at(i, j);
        Subspace s(ambient_dim, field);
        s.basis_ = b;
        return s;
    }

    static Subspace full(std::size_t ambient_dim, FieldSpec field) {
        Subspace s(ambient_dim, field);
        s.basis_ = Matrix::identity(ambient_dim, field);
        return s;
    }

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.rows(); }
    FieldSpec field() const { return basis_.field(); }
    const Matrix& basis() const { return basis_; }

    std::vector<Vec> basis_rows() const {
        std::vector<Vec> rows;
        rows.reserve(dim());
        for (std::size_t i = 0; i < dim(); ++i) rows.push_back(basis_.row(i));
        return rows;
    }

    std::vector<std::size_t> pivot_columns() const {
        std::vector<std::size_t> piv;
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < ambient_; ++j)
                if (!basis_.at(i, j).is_zero()) {
                    piv.push_back(j);
                    break;
                }
        return piv;
    }

    /// Reduce v against the echelon basis; the remainder is zero iff v lies in the subspace.
    Vec reduce(const Vec& v) const {
        if (v.size() != ambient_) throw DimensionMismatch("vector/ambient mismatch");
        Vec w = v;
        const auto piv = pivot_columns();
        for (std::size_t r = 0; r < piv.size(); ++r) {
            const Scalar f = w[piv[r]];
            if (f.is_zero()) continue;
            for (std::size_t j = 0; j < ambient_; ++j) w[j] -= f * basis_.at(r, j);
        }
        return w;
    }

    bool contains(const Vec& v) const { return is_zero_vec(reduce(v)); }

    bool contains(const Subspace& other) const {
        for (std::size_t i = 0; i < other.dim(); ++i)
            if (!contains(other.basis_.row(i))) return false;
        return true;
    }

    Subspace sum(const Subspace& other) const {
        auto rows = basis_rows();
        for (auto& r : other.basis_rows()) rows.push_back(r);
        return span(rows, ambient_, field());
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }

    /// Deterministic ordering key (finite fields): residues of basis entries, row-major.
    std::vector<std::int64_t> key() const {
        std::vector<std::int64_t> k;
        k.reserve(dim() * ambient_ + 1);
        k.push_back(static_cast<std::int64_t>(dim()));
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < ambient_; ++j) k.push_back(basis_.at(i, j).residue());
        return k;
    }

  private:
    std::size_t ambient_;
    Matrix basis_;
};

inline Subspace kernel(const Matrix& m) {
    RrefResult r = rref(m);
    const std::size_t nc = m.cols();
    std::vector<bool> is_piv(nc, false);
    for (auto c : r.pivot_columns) is_piv[c] = true;
    std::vector<Vec> basis;
    for (std::size_t fc = 0; fc < nc; ++fc) {
        if (is_piv[fc]) continue;
        Vec v = zero_vec(nc, m.field());
        v[fc] = Scalar::one(m.field());
        for (std::size_t row = 0; row < r.rank; ++row)
            v[r.pivot_columns[row]] = -r.reduced.at(row, fc);
        basis.push_back(v);
    }
    return Subspace::span(basis, nc, m.field());
}

struct Solution {
    Vec particular;
    Subspace kernel_space;
};

/// One solution of M x = b together with kernel(M); nullopt when inconsistent.
inline std::optional<Solution> solve(const Matrix& m, const Vec& b) {
    if (b.size() != m.rows()) throw DimensionMismatch("rhs length mismatch");
    Matrix aug(m.rows(), m.cols() + 1, m.field());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols()) = b[i];
    }
    RrefResult r = rref(aug);
    for (auto c : r.pivot_columns)
        if (c == m.cols()) return std::nullopt;
    Vec x = zero_vec(m.cols(), m.field());
    for (std::size_t row = 0; row < r.rank; ++row)
        x[r.pivot_columns[row]] = r.reduced.at(row, m.cols());
    return Solution{x, kernel(m)};
}

/// Streams every m-dimensional subspace of F_p^n containing a prescribed subspace,
/// each exactly once. Enumerates echelon forms of the quotient space in
/// lexicographic order (pivot sets, then completion entries), then lifts.
class SuperspaceStream {
  public:
    SuperspaceStream(std::size_t m, const Subspace& containing)
        : m_(m), base_(containing), field_(containing.field()), n_(containing.ambient_dim()) {
        if (!field_.is_finite())
            throw UnsupportedField("subspace enumeration requires a finite field");
        if (m_ < base_.dim() || m_ > n_) throw DimensionMismatch("dimension out of range");
        k_ = m_ - base_.dim();
        const auto piv = base_.pivot_columns();
        for (std::size_t c = 0; c < n_; ++c)
            if (std::find(piv.begin(), piv.end(), c) == piv.end()) complement_.push_back(c);
        quotient_dim_ = complement_.size();
        if (k_ == 0) {
            single_ = true;
            return;
        }
        pivots_.resize(k_);
        for (std::size_t i = 0; i < k_; ++i) pivots_[i] = i;
        setup_free_positions();
    }

    std::optional<Subspace> next() {
        if (done_) return std::nullopt;
        if (single_) {
            done_ = true;
            return base_;
        }
        Subspace out = materialize();
        advance();
        return out;
    }

  private:
    void setup_free_positions() {
        free_pos_.clear();
        for (std::size_t r = 0; r < k_; ++r)
            for (std::size_t c = pivots_[r] + 1; c < quotient_dim_; ++c)
                if (std::find(pivots_.begin(), pivots_.end(), c) == pivots_.end())
                    free_pos_.push_back({r, c});
        values_.assign(free_pos_.size(), 0);
    }

    Subspace materialize() const {
        std::vector<Vec> rows = base_.basis_rows();
        for (std::size_t r = 0; r < k_; ++r) {
            Vec v = zero_vec(n_, field_);
            v[complement_[pivots_[r]]] = Scalar::one(field_);
            for (std::size_t t = 0; t < free_pos_.size(); ++t)
                if (free_pos_[t].first == r)
                    v[complement_[free_pos_[t].second]] = Scalar(field_, values_[t]);
            rows.push_back(v);
        }
        return Subspace::span(rows, n_, field_);
    }

    void advance() {
        const std::int64_t p = field_.characteristic();
        for (std::size_t t = values_.size(); t-- > 0;) {
            if (++values_[t] < p) return;
            values_[t] = 0;
        }
        // next pivot combination in lexicographic order
        std::size_t i = k_;
        while (i-- > 0) {
            const std::size_t limit = quotient_dim_ - (k_ - i);
            if (pivots_[i] < limit) {
                ++pivots_[i];
                for (std::size_t j = i + 1; j < k_; ++j) pivots_[j] = pivots_[j - 1] + 1;
                setup_free_positions();
                return;
            }
        }
        done_ = true;
    }

    std::size_t m_;
    Subspace base_;
    FieldSpec field_;
    std::size_t n_;
    std::size_t k_ = 0;
    std::size_t quotient_dim_ = 0;
    std::vector<std::size_t> complement_;
    std::vector<std::size_t> pivots_;
    std::vector<std::pair<std::size_t, std::size_t>> free_pos_;
    std::vector<std::int64_t> values_;
    bool single_ = false;
    bool done_ = false;
};

inline SuperspaceStream superspaces_of(std::size_t m, const Subspace& containing) {
    return SuperspaceStream(m, containing);
}

inline std::vector<Subspace> collect_superspaces(std::size_t m, const Subspace& containing) {
    std::vector<Subspace> out;
    SuperspaceStream s(m, containing);
    while (auto x = s.next()) out.push_back(*x);
    return out;
}

}  // namespace flie

#endif
