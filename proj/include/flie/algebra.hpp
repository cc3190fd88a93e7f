#ifndef FLIE_ALGEBRA_HPP
#define FLIE_ALGEBRA_HPP

#include "flie/subspace.hpp"

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace flie {

/// Structure-constant table of a Lie algebra: entries c_{ij}^k for
/// 1 <= i < j <= n, brackets with i > j derived by sign flip, [e_i,e_i] = 0.
/// The Jacobi identity is validated at construction unless built unchecked.
class StructureTable {
  public:
    using ConstantMap = std::map<std::tuple<int, int, int>, Scalar>;

    static StructureTable make(std::size_t dim, FieldSpec field, const ConstantMap& constants,
                               std::string label = "") {
        StructureTable g = make_unchecked(dim, field, constants, std::move(label));
        g.validate_jacobi();
        return g;
    }

    static StructureTable make_unchecked(std::size_t dim, FieldSpec field,
                                         const ConstantMap& constants, std::string label = "") {
        StructureTable g(dim, field, std::move(label));
        for (const auto& [key, value] : constants) {
            auto [i, j, k] = key;
            if (i < 1 || j < 1 || k < 1 || i > (int)dim || j > (int)dim || k > (int)dim)
                throw IndexError("structure constant index out of range");
            if (i >= j) throw IndexError("structure constants must be keyed by i < j");
            if (value.field() != field) throw InvalidField("constant from wrong field");
            g.c_[g.slot(i, j, k)] = value;
        }
        return g;
    }

    std::size_t dim() const { return n_; }
    FieldSpec field() const { return field_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }

    /// c_{ij}^k with 1 <= i < j <= n.
    const Scalar& constant(int i, int j, int k) const { return c_[slot(i, j, k)]; }

    /// [e_i, e_j] for any i, j (antisymmetric extension of the stored table).
    Vec bracket_basis(int i, int j) const {
        Vec out = zero_vec(n_, field_);
        if (i == j) return out;
        const bool flip = i > j;
        if (flip) std::swap(i, j);
        for (int k = 1; k <= (int)n_; ++k) {
            const Scalar& c = constant(i, j, k);
            if (!c.is_zero()) out[k - 1] = flip ? -c : c;
        }
        return out;
    }

    Vec bracket(const Vec& u, const Vec& v) const {
        if (u.size() != n_ || v.size() != n_) throw DimensionMismatch("bracket operand size");
        Vec out = zero_vec(n_, field_);
        for (int i = 1; i <= (int)n_; ++i) {
            for (int j = i + 1; j <= (int)n_; ++j) {
                const Scalar coef = u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1];
                if (coef.is_zero()) continue;
                for (int k = 1; k <= (int)n_; ++k) {
                    const Scalar& c = constant(i, j, k);
                    if (!c.is_zero()) out[k - 1] += coef * c;
                }
            }
        }
        return out;
    }

    ConstantMap nonzero_constants() const {
        ConstantMap m;
        for (int i = 1; i <= (int)n_; ++i)
            for (int j = i + 1; j <= (int)n_; ++j)
                for (int k = 1; k <= (int)n_; ++k) {
                    const Scalar& c = constant(i, j, k);
                    if (!c.is_zero()) m[{i, j, k}] = c;
                }
        return m;
    }

    void validate_jacobi() const {
        for (int i = 1; i <= (int)n_; ++i)
            for (int j = i + 1; j <= (int)n_; ++j)
                for (int k = j + 1; k <= (int)n_; ++k) {
                    Vec s = bracket(unit(i), bracket(unit(j), unit(k)));
                    Vec t = bracket(unit(j), bracket(unit(k), unit(i)));
                    Vec u = bracket(unit(k), bracket(unit(i), unit(j)));
                    for (std::size_t a = 0; a < n_; ++a) s[a] += t[a] + u[a];
                    if (!is_zero_vec(s)) throw JacobiViolation(i, j, k);
                }
    }

    Vec unit(int i) const { return unit_vec(n_, i - 1, field_); }

    friend bool operator==(const StructureTable& a, const StructureTable& b) {
        return a.n_ == b.n_ && a.field_ == b.field_ && a.c_ == b.c_;
    }

  private:
    StructureTable(std::size_t dim, FieldSpec field, std::string label)
        : n_(dim), field_(field), label_(std::move(label)),
          c_(dim * (dim > 1 ? dim * (dim - 1) / 2 : 1), Scalar::zero(field)) {
        if (dim < 1) throw DimensionMismatch("dimension must be positive");
    }

    std::size_t slot(int i, int j, int k) const {
        // pairs (i,j), i<j ordered lexicographically
        const std::size_t pair_index =
            (std::size_t)(i - 1) * n_ - (std::size_t)i * (i - 1) / 2 + (std::size_t)(j - i - 1);
        return pair_index * n_ + (std::size_t)(k - 1);
    }

    std::size_t n_;
    FieldSpec field_;
    std::string label_;
    std::vector<Scalar> c_;
};

inline StructureTable make_algebra(std::size_t dim, FieldSpec field,
                                   const StructureTable::ConstantMap& constants,
                                   std::string label = "") {
    return StructureTable::make(dim, field, constants, std::move(label));
}

inline Vec bracket(const StructureTable& g, const Vec& u, const Vec& v) {
    return g.bracket(u, v);
}

/// Cen_g(S) = { u : [u, s] = 0 for every s in S }, the kernel of the stacked
/// maps u -> [u, b] over basis vectors b of S.
inline Subspace centralizer(const StructureTable& g, const Subspace& s) {
    const std::size_t n = g.dim();
    if (s.ambient_dim() != n) throw DimensionMismatch("subspace/algebra mismatch");
    if (s.dim() == 0) return Subspace::full(n, g.field());
    Matrix stacked(n * s.dim(), n, g.field());
    for (std::size_t b = 0; b < s.dim(); ++b) {
        const Vec basis_vec = s.basis().row(b);
        for (std::size_t j = 0; j < n; ++j) {
            Vec w = g.bracket(unit_vec(n, j, g.field()), basis_vec);
            for (std::size_t k = 0; k < n; ++k) stacked.at(b * n + k, j) = w[k];
        }
    }
    return kernel(stacked);
}

inline Subspace center(const StructureTable& g) {
    return centralizer(g, Subspace::full(g.dim(), g.field()));
}

inline bool is_ideal(const StructureTable& g, const Subspace& s) {
    const std::size_t n = g.dim();
    for (std::size_t b = 0; b < s.dim(); ++b) {
        const Vec basis_vec = s.basis().row(b);
        for (std::size_t j = 0; j < n; ++j)
            if (!s.contains(g.bracket(basis_vec, unit_vec(n, j, g.field())))) return false;
    }
    return true;
}

inline bool is_abelian_subspace(const StructureTable& g, const Subspace& s) {
    for (std::size_t a = 0; a < s.dim(); ++a)
        for (std::size_t b = a + 1; b < s.dim(); ++b)
            if (!is_zero_vec(g.bracket(s.basis().row(a), s.basis().row(b)))) return false;
    return true;
}

/// C^1 = g, C^k = [C^{k-1}, g]; the returned chain stops at stabilization
/// (for nilpotent algebras the last term is the zero subspace).
inline std::vector<Subspace> lower_central_series(const StructureTable& g) {
    const std::size_t n = g.dim();
    std::vector<Subspace> series{Subspace::full(n, g.field())};
    while (true) {
        const Subspace& cur = series.back();
        std::vector<Vec> spanners;
        for (std::size_t b = 0; b < cur.dim(); ++b)
            for (std::size_t j = 0; j < n; ++j)
                spanners.push_back(g.bracket(cur.basis().row(b), unit_vec(n, j, g.field())));
        Subspace next = Subspace::span(spanners, n, g.field());
        if (next.dim() == cur.dim()) break;
        series.push_back(next);
        if (next.dim() == 0) break;
    }
    return series;
}

inline std::vector<std::size_t> series_dims(const StructureTable& g) {
    std::vector<std::size_t> dims;
    for (const auto& s : lower_central_series(g)) dims.push_back(s.dim());
    return dims;
}

inline bool is_nilpotent(const StructureTable& g) {
    return lower_central_series(g).back().dim() == 0;
}

/// Smallest m with C^{m+1} = 0.
inline std::size_t nil_index(const StructureTable& g) {
    const auto series = lower_central_series(g);
    if (series.back().dim() != 0) throw Error("nil index of a non-nilpotent algebra");
    return series.size() - 1;
}

inline bool is_filiform(const StructureTable& g) {
    const std::size_t n = g.dim();
    const auto series = lower_central_series(g);
    auto dim_at = [&](std::size_t k) {
        return k - 1 < series.size() ? series[k - 1].dim() : series.back().dim();
    };
    if (series.back().dim() != 0) return false;
    for (std::size_t k = 2; k <= n; ++k)
        if (dim_at(k) != n - k) return false;
    return true;
}

/// {dim g/C^2, dim C^2/C^3, ..., dim C^{m-1}/C^m} where m is the nil index.
inline std::vector<std::size_t> type_sequence(const StructureTable& g) {
    const auto series = lower_central_series(g);
    if (series.back().dim() != 0) throw Error("type of a non-nilpotent algebra");
    const std::size_t m = series.size() - 1;
    auto dim_at = [&](std::size_t k) {
        return k - 1 < series.size() ? series[k - 1].dim() : std::size_t{0};
    };
    std::vector<std::size_t> type;
    for (std::size_t k = 1; k + 1 <= m; ++k) type.push_back(dim_at(k) - dim_at(k + 1));
    return type;
}

struct QuotientResult {
    StructureTable algebra;
    Matrix projection;  // (n - dim h) x n, maps coordinates onto coset representatives
};

/// Quotient by an ideal; coset representatives are the non-pivot coordinates
/// of the ideal's echelon basis.
inline QuotientResult quotient(const StructureTable& g, const Subspace& h) {
    const std::size_t n = g.dim();
    if (!is_ideal(g, h)) throw NotAnIdeal("quotient by a non-ideal");
    const auto piv = h.pivot_columns();
    std::vector<std::size_t> nonpiv;
    for (std::size_t c = 0; c < n; ++c)
        if (std::find(piv.begin(), piv.end(), c) == piv.end()) nonpiv.push_back(c);
    const std::size_t q = nonpiv.size();

    auto project = [&](const Vec& v) {
        Vec red = h.reduce(v);
        Vec out = zero_vec(q, g.field());
        for (std::size_t a = 0; a < q; ++a) out[a] = red[nonpiv[a]];
        return out;
    };

    StructureTable::ConstantMap constants;
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = a + 1; b < q; ++b) {
            Vec w = project(g.bracket(unit_vec(n, nonpiv[a], g.field()),
                                      unit_vec(n, nonpiv[b], g.field())));
            for (std::size_t k = 0; k < q; ++k)
                if (!w[k].is_zero())
                    constants[{(int)a + 1, (int)b + 1, (int)k + 1}] = w[k];
        }

    Matrix proj(q, n, g.field());
    for (std::size_t j = 0; j < n; ++j) {
        Vec col = project(unit_vec(n, j, g.field()));
        for (std::size_t a = 0; a < q; ++a) proj.at(a, j) = col[a];
    }
    std::string label = g.label().empty() ? "" : g.label() + "/h";
    return {StructureTable::make(q, g.field(), constants, label), proj};
}

/// [g^(0), g^(1), ..., g^(depth)] with g^(i) = g^(i-1)/Z(g^(i-1)); stops early
/// when the quotient would be zero-dimensional (abelian stage).
inline std::vector<StructureTable> central_quotient_tower(const StructureTable& g,
                                                          std::size_t depth) {
    std::vector<StructureTable> tower{g};
    for (std::size_t i = 0; i < depth; ++i) {
        const StructureTable& cur = tower.back();
        Subspace z = center(cur);
        if (z.dim() == 0 || z.dim() == cur.dim()) break;
        tower.push_back(quotient(cur, z).algebra);
    }
    return tower;
}

namespace detail {

inline void ideals_rec(const StructureTable& g, std::size_t m,
                       std::set<std::vector<std::int64_t>>& seen, std::vector<Subspace>& out,
                       const std::vector<Matrix>& lift_chain);

/// Lift a subspace of the quotient (coordinates = non-pivot columns of L)
/// back to the ambient space and join with L.
inline Subspace lift_through(const Subspace& quotient_sub, const Subspace& line,
                             std::size_t n, FieldSpec field) {
    const auto piv = line.pivot_columns();
    std::vector<std::size_t> nonpiv;
    for (std::size_t c = 0; c < n; ++c)
        if (std::find(piv.begin(), piv.end(), c) == piv.end()) nonpiv.push_back(c);
    std::vector<Vec> rows = line.basis_rows();
    for (std::size_t r = 0; r < quotient_sub.dim(); ++r) {
        Vec v = zero_vec(n, field);
        for (std::size_t a = 0; a < nonpiv.size(); ++a)
            v[nonpiv[a]] = quotient_sub.basis().at(r, a);
        rows.push_back(v);
    }
    return Subspace::span(rows, n, field);
}

}  // namespace detail

/// Every m-dimensional ideal of a nilpotent algebra over a finite field,
/// exactly once, in a deterministic order. A nonzero ideal of a nilpotent
/// algebra meets the center, so the enumeration recurses through central-line
/// quotients and deduplicates the lifted candidates; is_ideal filters the
/// results.
inline std::vector<Subspace> ideals_of_dim(const StructureTable& g, std::size_t m) {
    if (!g.field().is_finite())
        throw UnsupportedField("ideal enumeration requires a finite field");
    const std::size_t n = g.dim();
    if (m > n) throw DimensionMismatch("ideal dimension exceeds algebra dimension");
    if (m == 0) return {Subspace(n, g.field())};
    if (m == n) return {Subspace::full(n, g.field())};

    const Subspace z = center(g);
    if (z.dim() == n) {
        // abelian: every subspace is an ideal
        return collect_superspaces(m, Subspace(n, g.field()));
    }
    if (z.dim() == 0) throw Error("ideal enumeration requires a nilpotent algebra");

    std::set<std::vector<std::int64_t>> seen;
    std::vector<Subspace> out;
    // every line of the center
    std::vector<Subspace> lines = collect_superspaces(1, Subspace(z.dim(), g.field()));
    for (const Subspace& coords : lines) {
        std::vector<Vec> line_vec;
        Vec v = zero_vec(n, g.field());
        for (std::size_t t = 0; t < z.dim(); ++t) {
            const Scalar c = coords.basis().at(0, t);
            if (c.is_zero()) continue;
            for (std::size_t k = 0; k < n; ++k) v[k] += c * z.basis().at(t, k);
        }
        Subspace line = Subspace::span({v}, n, g.field());
        QuotientResult q = quotient(g, line);
        for (const Subspace& sub : ideals_of_dim(q.algebra, m - 1)) {
            Subspace lifted = detail::lift_through(sub, line, n, g.field());
            if (lifted.dim() != m) continue;
            auto key = lifted.key();
            if (!seen.insert(key).second) continue;
            if (is_ideal(g, lifted)) out.push_back(lifted);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Subspace& a, const Subspace& b) { return a.key() < b.key(); });
    return out;
}

/// Invertible change of basis; new basis vectors are the columns of the matrix:
/// e'_j = sum_i P_{ij} e_i.
struct BasisChange {
    Matrix matrix;

    explicit BasisChange(Matrix p) : matrix(std::move(p)) {
        if (!is_invertible(matrix)) throw SingularMatrix("basis change must be invertible");
    }
};

/// Transport of structure constants: bracket'(u, v) = P^{-1} [P u, P v].
inline StructureTable apply_basis_change(const StructureTable& g, const BasisChange& change) {
    const std::size_t n = g.dim();
    if (change.matrix.rows() != n || change.matrix.cols() != n)
        throw DimensionMismatch("basis change size mismatch");
    const Matrix inv = inverse(change.matrix);
    StructureTable::ConstantMap constants;
    for (int i = 1; i <= (int)n; ++i)
        for (int j = i + 1; j <= (int)n; ++j) {
            Vec w = inv.apply(g.bracket(change.matrix.col(i - 1), change.matrix.col(j - 1)));
            for (int k = 1; k <= (int)n; ++k)
                if (!w[k - 1].is_zero()) constants[{i, j, k}] = w[k - 1];
        }
    return StructureTable::make(n, g.field(), constants, g.label());
}

/// True when the coordinate basis of g is a filiform basis: it is compatible
/// with the lower central series (C^k is spanned by e_2..e_{n-k+1}) and for
/// each i in {3..n} either [e_1,e_i] = e_{i-1} or [e_i,e_n] = e_{i-1}.
inline bool has_filiform_basis_form(const StructureTable& g) {
    const std::size_t n = g.dim();
    if (n < 3) return is_filiform(g);
    const auto series = lower_central_series(g);
    auto dim_at = [&](std::size_t k) {
        return k - 1 < series.size() ? series[k - 1].dim() : series.back().dim();
    };
    if (series.back().dim() != 0) return false;
    for (std::size_t k = 2; k <= n; ++k) {
        if (dim_at(k) != n - k) return false;
        if (k - 1 >= series.size()) continue;
        // C^k must equal span{e_2, ..., e_{n-k+1}}
        std::vector<Vec> coords;
        for (std::size_t i = 2; i <= n - k + 1; ++i) coords.push_back(g.unit((int)i));
        if (!(Subspace::span(coords, n, g.field()) == series[k - 1])) return false;
    }
    for (std::size_t i = 3; i <= n; ++i) {
        Vec target = g.unit((int)i - 1);
        if (g.bracket_basis(1, (int)i) == target) continue;
        if (g.bracket_basis((int)i, (int)n) == target) continue;
        return false;
    }
    return true;
}

/// For a table already in filiform-basis form: 1 when [e_1,e_i] = e_{i-1},
/// else 2 (so [e_i,e_n] = e_{i-1}), for i in {3..n}.
inline std::vector<int> filiform_relation_kinds(const StructureTable& g) {
    const std::size_t n = g.dim();
    std::vector<int> kinds(n + 1, 0);
    for (std::size_t i = 3; i <= n; ++i) {
        Vec target = g.unit((int)i - 1);
        if (g.bracket_basis(1, (int)i) == target)
            kinds[i] = 1;
        else if (g.bracket_basis((int)i, (int)n) == target)
            kinds[i] = 2;
        else
            throw NotFiliform("table is not in filiform-basis form");
    }
    return kinds;
}

/// Deterministic construction of a filiform basis. The pair (e_1, e_n) only
/// matters modulo C^2, so candidates are enumerated over the 2-dimensional
/// quotient g/C^2 in lexicographic order; the chain e_{i-1} := [e_1, e_i] or
/// [e_i, e_n] is built downward and each step is validated against the series.
inline BasisChange filiform_basis(const StructureTable& g) {
    const std::size_t n = g.dim();
    if (!is_filiform(g)) throw NotFiliform("filiform basis of a non-filiform algebra");
    if (!g.field().is_finite())
        throw UnsupportedField("filiform basis search requires a finite field");
    if (n < 3) return BasisChange(Matrix::identity(n, g.field()));

    const auto series = lower_central_series(g);
    auto member = [&](std::size_t k, const Vec& v) {
        if (k - 1 >= series.size()) return is_zero_vec(v);
        return series[k - 1].contains(v);
    };

    // coordinates of the 2-dimensional complement of C^2
    const Subspace c2 = series[1];
    const auto piv = c2.pivot_columns();
    std::vector<std::size_t> comp;
    for (std::size_t c = 0; c < n; ++c)
        if (std::find(piv.begin(), piv.end(), c) == piv.end()) comp.push_back(c);

    const std::int64_t p = g.field().characteristic();
    auto lift = [&](std::int64_t a, std::int64_t b) {
        Vec v = zero_vec(n, g.field());
        v[comp[0]] = Scalar(g.field(), a);
        v[comp[1]] = Scalar(g.field(), b);
        return v;
    };

    for (std::int64_t a1 = 0; a1 < p; ++a1)
        for (std::int64_t b1 = 0; b1 < p; ++b1) {
            if (a1 == 0 && b1 == 0) continue;
            for (std::int64_t a2 = 0; a2 < p; ++a2)
                for (std::int64_t b2 = 0; b2 < p; ++b2) {
                    if ((a1 * b2 - a2 * b1) % p == 0) continue;
                    Vec e1 = lift(a1, b1), en = lift(a2, b2);
                    std::vector<Vec> chain(n + 1, zero_vec(n, g.field()));
                    chain[1] = e1;
                    chain[n] = en;
                    bool ok = true;
                    for (std::size_t i = n; i >= 3 && ok; --i) {
                        // e_{i-1} must generate C^{n-i+2} modulo C^{n-i+3}
                        Vec first = g.bracket(chain[1], chain[i]);
                        if (!member(n - i + 3, first)) {
                            chain[i - 1] = first;
                            continue;
                        }
                        Vec second = g.bracket(chain[i], chain[n]);
                        if (!member(n - i + 3, second)) {
                            chain[i - 1] = second;
                            continue;
                        }
                        ok = false;
                    }
                    if (!ok) continue;
                    Matrix pmat(n, n, g.field());
                    for (std::size_t j = 1; j <= n; ++j) pmat.set_col(j - 1, chain[j]);
                    if (!is_invertible(pmat)) continue;
                    BasisChange change(pmat);
                    if (has_filiform_basis_form(apply_basis_change(g, change))) return change;
                }
        }
    throw NotFiliform("no filiform basis found; input is not filiform");
}

}  // namespace flie

#endif
