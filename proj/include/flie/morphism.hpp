#ifndef FLIE_MORPHISM_HPP
#define FLIE_MORPHISM_HPP

#include "flie/invariants.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace flie {

struct IsoWitness {
    Matrix F;
    std::string source, target;
};

struct IsotopyWitness {
    Matrix f, g, h;
    std::string source, target;
};

enum class Certificate { ExhaustedSearch, FingerprintMismatch };

struct Verdict {
    enum class Kind { Isomorphic, NotIsomorphic, Isotopic, NotSeparated };
    Kind kind;
    std::optional<IsoWitness> iso_witness;
    std::optional<IsotopyWitness> isotopy_witness;
    std::optional<Certificate> certificate;
    std::string detail;
};

/// F is an isomorphism gA -> gB iff it is invertible and
/// F [e_i, e_j]_A = [F e_i, F e_j]_B on every basis pair.
inline bool verify_isomorphism(const StructureTable& gA, const StructureTable& gB,
                               const Matrix& F) {
    const std::size_t n = gA.dim();
    if (gB.dim() != n) throw DimensionMismatch("isomorphism between different dimensions");
    if (F.rows() != n || F.cols() != n) throw DimensionMismatch("witness matrix size");
    if (gA.field() != gB.field()) throw InvalidField("algebras over different fields");
    if (!is_invertible(F)) return false;
    for (int i = 1; i <= (int)n; ++i)
        for (int j = i + 1; j <= (int)n; ++j) {
            const Vec lhs = F.apply(gA.bracket_basis(i, j));
            const Vec rhs = gB.bracket(F.col(i - 1), F.col(j - 1));
            if (lhs != rhs) return false;
        }
    return true;
}

/// (f, g, h) is an isotopism gA -> gB iff all three are invertible and
/// [f u, g v]_B = h([u, v]_A) on every (ordered) basis pair.
inline bool verify_isotopism(const StructureTable& gA, const StructureTable& gB,
                             const Matrix& f, const Matrix& g, const Matrix& h) {
    const std::size_t n = gA.dim();
    if (gB.dim() != n) throw DimensionMismatch("isotopism between different dimensions");
    if (f.rows() != n || f.cols() != n || g.rows() != n || g.cols() != n || h.rows() != n ||
        h.cols() != n)
        throw DimensionMismatch("witness matrix size");
    if (!is_invertible(f) || !is_invertible(g) || !is_invertible(h)) return false;
    for (int i = 1; i <= (int)n; ++i)
        for (int j = 1; j <= (int)n; ++j) {
            const Vec lhs = gB.bracket(f.col(i - 1), g.col(j - 1));
            const Vec rhs = h.apply(gA.bracket_basis(i, j));
            if (lhs != rhs) return false;
        }
    return true;
}

struct FindOptions {
    std::uint64_t max_nodes = 0;  // 0 = unlimited; exceeding throws SearchBudgetExceeded
};

namespace detail {

/// Affine form c0 + cx*X + cz*Z over F_p, where (X, Z) is the symbolic pair of
/// the current search stage. `dep` is the set of decision levels the numeric
/// part actually depends on, used for conflict-directed backjumping.
struct Aff {
    std::int64_t c0 = 0, cx = 0, cz = 0;
    std::uint32_t dep = 0;
};

/// Constrained backtracking over the two free columns of the witness matrix.
/// Interior columns are derived grade by grade; each stage solves an affine
/// system for its pair of unknowns. A violated constraint whose value is
/// untouched by the deeper free choices jumps the search directly back to the
/// deepest decision that can change it.
class StagedSearch {
  public:
    StagedSearch(const StructureTable& src, const StructureTable& tgt, FindOptions opts)
        : n_((int)src.dim()), p_(tgt.field().characteristic()), opts_(opts) {
        kinds_ = filiform_relation_kinds(src);
        cs_.assign(n_ * n_ * n_, 0);
        ct_.assign(n_ * n_ * n_, 0);
        load(src, cs_);
        load(tgt, ct_);
        defining_.assign(n_ + 1, std::vector<bool>(n_ + 1, false));
        for (int j = 2; j <= n_ - 1; ++j) {
            if (kinds_[j + 1] == 1)
                defining_[1][j + 1] = true;
            else
                defining_[j + 1][n_] = true;
        }
        tpairs_.assign(n_ + 1, {});
        for (int s = 2; s <= n_ - 1; ++s)
            for (int a = 1; a <= n_; ++a)
                for (int b = a + 1; b <= n_; ++b) {
                    const std::int64_t c = ct(a, b, s);
                    if (c) tpairs_[s].push_back({a, b, c});
                }
        M_.assign((n_ + 1) * (n_ + 1), 0);
        dep_.assign((n_ + 1) * (n_ + 1), 0);
        field_ = tgt.field();
    }

    /// Visits fully verified candidate matrices in a fixed deterministic order.
    /// Returns true when the visitor stopped the enumeration.
    bool run(const std::function<bool(const Matrix&)>& visit) {
        visit_ = &visit;
        stopped_ = false;
        if (n_ == 1) {
            for (std::int64_t x1 = 1; x1 < p_ && !stopped_; ++x1) {
                set(1, 1, x1);
                emit_candidate();
            }
            return stopped_;
        }
        if (n_ == 2) {
            for (std::int64_t x1 = 0; x1 < p_ && !stopped_; ++x1)
                for (std::int64_t zn = 0; zn < p_ && !stopped_; ++zn)
                    for (std::int64_t xn = 0; xn < p_ && !stopped_; ++xn)
                        for (std::int64_t z1 = 0; z1 < p_ && !stopped_; ++z1) {
                            if (mod(x1 * zn - xn * z1) == 0) continue;
                            set(1, 1, x1);
                            set(2, 2, zn);
                            set(2, 1, xn);
                            set(1, 2, z1);
                            emit_candidate();
                        }
            return stopped_;
        }
        // decision levels: 0 = x1, 1 = zn, 2 = xn, 3 = z1, then the stage
        // pairs (x_k, z_k) for k = n-1 down to 3 at levels 4, 5, ...
        for (std::int64_t x1 = 1; x1 < p_; ++x1) {
            bool advance_x1 = false;
            for (std::int64_t zn = 1; zn < p_ && !advance_x1; ++zn) {
                bool advance_zn = false;
                for (std::int64_t xn = 0; xn < p_ && !advance_zn; ++xn) {
                    bool advance_xn = false;
                    for (std::int64_t z1 = 0; z1 < p_ && !advance_xn; ++z1) {
                        if (mod(x1 * zn - xn * z1) == 0) continue;
                        set(1, 1, x1);
                        set(n_, n_, zn);
                        set(n_, 1, xn);
                        set(1, n_, z1);
                        const int jump = stage(n_ - 1);
                        if (stopped_) return true;
                        if (jump < 0) return stopped_;  // structurally impossible
                        if (jump <= 2) advance_xn = true;
                        if (jump <= 1) advance_zn = true;
                        if (jump <= 0) advance_x1 = true;
                    }
                }
            }
        }
        return stopped_;
    }

  private:
    static int top_level(std::uint32_t m) {
        int lv = -1;
        while (m) {
            ++lv;
            m >>= 1;
        }
        return lv;
    }

    static void load(const StructureTable& g, std::vector<std::int64_t>& c) {
        const int n = (int)g.dim();
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                if (i == j) continue;
                const Vec w = g.bracket_basis(i, j);
                for (int k = 1; k <= n; ++k)
                    c[((i - 1) * n + (j - 1)) * n + (k - 1)] = w[k - 1].residue();
            }
    }

    std::int64_t mod(std::int64_t v) const {
        v %= p_;
        return v < 0 ? v + p_ : v;
    }
    std::int64_t cs(int i, int j, int k) const {
        return cs_[((i - 1) * n_ + (j - 1)) * n_ + (k - 1)];
    }
    std::int64_t ct(int a, int b, int k) const {
        return ct_[((a - 1) * n_ + (b - 1)) * n_ + (k - 1)];
    }
    std::int64_t get(int r, int c) const { return M_[r * (n_ + 1) + c]; }
    void set(int r, int c, std::int64_t v) { M_[r * (n_ + 1) + c] = v; }
    std::uint32_t get_dep(int r, int c) const { return dep_[r * (n_ + 1) + c]; }
    void set_dep(int r, int c, std::uint32_t d) { dep_[r * (n_ + 1) + c] = d; }

    int pair_level(int k) const { return 4 + (n_ - 1 - k); }  // pair (x_k, z_k)

    /// Entry (row, col) as an affine form with its dependency set; the
    /// symbolic cells are row `srow` of columns 1 and n.
    Aff entry(int row, int col, int srow) const {
        if (row == srow && col == 1) return {0, 1, 0, 0};
        if (row == srow && col == n_) return {0, 0, 1, 0};
        const bool corner_col = (col == 1 || col == n_);
        if (!corner_col && (row == 1 || row == n_)) return {0, 0, 0, 0};  // structural zero
        std::uint32_t dep;
        if (corner_col) {
            if (row == 1)
                dep = col == 1 ? 1u << 0 : 1u << 3;
            else if (row == n_)
                dep = col == 1 ? 1u << 2 : 1u << 1;
            else
                dep = 1u << pair_level(row);
        } else {
            dep = get_dep(row, col);
        }
        return {get(row, col), 0, 0, dep};
    }

    /// Soft-zero aware product: a factor that is currently zero gates the
    /// product, so only the decisions feeding that factor can change it.
    Aff mul(const Aff& a, const Aff& b) const {
        const bool asym = a.cx || a.cz, bsym = b.cx || b.cz;
        if (asym && bsym) throw Error("internal: affine search multiplied two symbols");
        const bool azero = !asym && a.c0 == 0;
        const bool bzero = !bsym && b.c0 == 0;
        std::uint32_t dep;
        if (azero && bzero)
            dep = std::min(a.dep, b.dep) == 0 ? 0 : (a.dep & b.dep ? a.dep & b.dep : a.dep);
        else if (azero)
            dep = a.dep;
        else if (bzero)
            dep = b.dep;
        else
            dep = a.dep | b.dep;
        if (azero || bzero) return {0, 0, 0, dep};
        if (!asym) return {a.c0 * b.c0 % p_, a.c0 * b.cx % p_, a.c0 * b.cz % p_, dep};
        return {a.c0 * b.c0 % p_, a.cx * b.c0 % p_, a.cz * b.c0 % p_, dep};
    }

    Aff add(const Aff& a, const Aff& b) const {
        return {mod(a.c0 + b.c0), mod(a.cx + b.cx), mod(a.cz + b.cz), a.dep | b.dep};
    }

    Aff scale(const Aff& a, std::int64_t f) const {
        if (mod(f) == 0) return {0, 0, 0, 0};
        return {mod(a.c0 * f), mod(a.cx * f), mod(a.cz * f), a.dep};
    }

    /// Grade-s component of [column u, column v] in the target algebra.
    Aff component(int colu, int colv, int s, int srow) const {
        Aff acc{0, 0, 0, 0};
        for (const auto& [a, b, cval] : tpairs_[s]) {
            const Aff ua = entry(a, colu, srow), vb = entry(b, colv, srow);
            const Aff ub = entry(b, colu, srow), va = entry(a, colv, srow);
            Aff term = mul(ua, vb);
            const Aff term2 = mul(ub, va);
            term = add(term, scale(term2, -1));
            acc = add(acc, scale(term, cval));
        }
        return acc;
    }

    std::int64_t inv(std::int64_t v) const {
        std::int64_t acc = 1, b = mod(v), e = p_ - 2;
        while (e) {
            if (e & 1) acc = acc * b % p_;
            b = b * b % p_;
            e >>= 1;
        }
        return acc;
    }

    /// Derive row s, enforce the grade-s constraints, branch on the stage pair.
    /// Returns the decision level the caller should unwind to.
    int stage(int s) {
        if (opts_.max_nodes && ++nodes_ > opts_.max_nodes)
            throw SearchBudgetExceeded("isomorphism search exceeded the node budget");
        const int srow = (s <= n_ - 2) ? s + 1 : 0;
        const int my_level = srow ? pair_level(srow) : 4;

        std::vector<Aff> row(n_ + 1, Aff{});
        for (int j = n_ - 1; j >= 2; --j) {
            if (kinds_[j + 1] == 1)
                row[j] = component(1, j + 1, s, srow);
            else
                row[j] = component(j + 1, n_, s, srow);
        }

        std::vector<std::array<std::int64_t, 3>> eqs;
        int const_fail_jump = INT32_MAX;
        std::uint32_t all_deps = 0;
        for (int i = 1; i <= n_; ++i)
            for (int j = i + 1; j <= n_; ++j) {
                if (defining_[i][j]) continue;
                Aff lhs = component(i, j, s, srow);
                for (int k = 2; k <= n_ - 1; ++k) {
                    const std::int64_t c = cs(i, j, k);
                    if (c) lhs = add(lhs, scale(row[k], -c));
                }
                if (!lhs.c0 && !lhs.cx && !lhs.cz) continue;
                all_deps |= lhs.dep;
                if (!lhs.cx && !lhs.cz)
                    const_fail_jump = std::min(const_fail_jump, top_level(lhs.dep));
                eqs.push_back({lhs.c0, lhs.cx, lhs.cz});
            }
        if (const_fail_jump != INT32_MAX) return const_fail_jump;

        const auto solutions = solve_stage(eqs, srow != 0);
        if (solutions.empty()) return top_level(all_deps);

        for (const auto& [x, z] : solutions) {
            if (srow) {
                set(srow, 1, x);
                set(srow, n_, z);
            }
            bool ok = true;
            for (int j = 2; j <= n_ - 1 && ok; ++j) {
                const std::int64_t v = mod(row[j].c0 + row[j].cx * x + row[j].cz * z);
                set(s, j, v);
                set_dep(s, j,
                        row[j].dep | ((row[j].cx || row[j].cz) ? (1u << my_level) : 0u));
                if (j == s && v == 0) ok = false;
            }
            int child = my_level;
            if (ok) {
                if (s == 2)
                    emit_candidate();
                else
                    child = stage(s - 1);
            }
            for (int j = 2; j <= n_ - 1; ++j) {
                set(s, j, 0);
                set_dep(s, j, 0);
            }
            if (srow) {
                set(srow, 1, 0);
                set(srow, n_, 0);
            }
            if (stopped_) return 0;
            if (child < my_level) return child;
        }
        return my_level - 1;
    }

    /// All (X, Z) solving the affine system, sorted lexicographically.
    /// Without symbols the system must hold identically.
    std::vector<std::pair<std::int64_t, std::int64_t>> solve_stage(
        const std::vector<std::array<std::int64_t, 3>>& eqs, bool symbolic) const {
        if (!symbolic) {
            for (const auto& e : eqs)
                if (mod(e[0]) != 0) return {};
            return {{0, 0}};
        }
        // normalized pivot rows: X + g1 Z + a1 = 0 and Z + a2 = 0
        bool have1 = false, have2 = false;
        std::int64_t g1 = 0, a1 = 0, a2 = 0;
        for (const auto& e : eqs) {
            std::int64_t alpha = mod(e[0]), beta = mod(e[1]), gamma = mod(e[2]);
            if (have1 && beta) {
                gamma = mod(gamma - beta * g1);
                alpha = mod(alpha - beta * a1);
                beta = 0;
            }
            if (have2 && gamma) {
                alpha = mod(alpha - gamma * a2);
                gamma = 0;
            }
            if (beta) {
                const std::int64_t bi = inv(beta);
                g1 = mod(gamma * bi);
                a1 = mod(alpha * bi);
                have1 = true;
            } else if (gamma) {
                a2 = mod(alpha * inv(gamma));
                have2 = true;
                if (have1 && g1) {
                    a1 = mod(a1 - g1 * a2);
                    g1 = 0;
                }
            } else if (alpha) {
                return {};
            }
        }
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        if (have1 && have2) {
            out.push_back({mod(-a1), mod(-a2)});
        } else if (have1) {
            for (std::int64_t z = 0; z < p_; ++z) out.push_back({mod(-a1 - g1 * z), z});
        } else if (have2) {
            for (std::int64_t x = 0; x < p_; ++x) out.push_back({x, mod(-a2)});
        } else {
            for (std::int64_t x = 0; x < p_; ++x)
                for (std::int64_t z = 0; z < p_; ++z) out.push_back({x, z});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    void emit_candidate() {
        Matrix F(n_, n_, field_);
        for (int r = 1; r <= n_; ++r)
            for (int c = 1; c <= n_; ++c) F.at(r - 1, c - 1) = Scalar(field_, get(r, c));
        if ((*visit_)(F)) stopped_ = true;
    }

    int n_;
    std::int64_t p_;
    FindOptions opts_;
    FieldSpec field_ = FieldSpec(2);
    std::vector<int> kinds_;
    std::vector<std::int64_t> cs_, ct_, M_;
    std::vector<std::uint32_t> dep_;
    std::vector<std::vector<bool>> defining_;
    std::vector<std::vector<std::tuple<int, int, std::int64_t>>> tpairs_;
    const std::function<bool(const Matrix&)>* visit_ = nullptr;
    std::uint64_t nodes_ = 0;
    bool stopped_ = false;
};

struct FiliformForm {
    StructureTable table;
    BasisChange change;  // original -> form coordinates: table = transport of input
};

inline FiliformForm to_filiform_form(const StructureTable& g) {
    if (has_filiform_basis_form(g))
        return {g, BasisChange(Matrix::identity(g.dim(), g.field()))};
    BasisChange change = filiform_basis(g);
    return {apply_basis_change(g, change), change};
}

}  // namespace detail

/// Enumerates isomorphisms gA -> gB (both filiform, finite field) through the
/// two-free-column backtracking search with the normalization f_{21} = f_{2n} = 0;
/// each candidate passed to the visitor is a fully verified witness. The
/// enumeration covers every normalized isomorphism, so visiting none proves
/// there is no isomorphism at all.
inline bool for_each_isomorphism(const StructureTable& gA, const StructureTable& gB,
                                 const std::function<bool(const Matrix&)>& visit,
                                 FindOptions opts = {}) {
    if (gA.dim() != gB.dim()) throw DimensionMismatch("different dimensions");
    if (gA.field() != gB.field()) throw InvalidField("different fields");
    if (!gA.field().is_finite())
        throw UnsupportedField("isomorphism search requires a finite field; "
                               "over the rationals only witness verification is offered");
    if (!is_filiform(gA) || !is_filiform(gB)) throw NotFiliform("search requires filiform inputs");

    const auto formA = detail::to_filiform_form(gA);
    const auto formB = detail::to_filiform_form(gB);
    const Matrix pa_inv = inverse(formA.change.matrix);
    const Matrix& pb = formB.change.matrix;

    detail::StagedSearch search(formA.table, formB.table, opts);
    return search.run([&](const Matrix& F) {
        if (!verify_isomorphism(formA.table, formB.table, F)) return false;
        const Matrix original = pb * F * pa_inv;
        if (!verify_isomorphism(gA, gB, original)) return false;
        return visit(original);
    });
}

inline Verdict find_isomorphism(const StructureTable& gA, const StructureTable& gB,
                                FindOptions opts = {}) {
    std::optional<Matrix> found;
    for_each_isomorphism(
        gA, gB,
        [&](const Matrix& F) {
            found = F;
            return true;
        },
        opts);
    if (found)
        return {Verdict::Kind::Isomorphic, IsoWitness{*found, gA.label(), gB.label()},
                std::nullopt, std::nullopt, ""};
    return {Verdict::Kind::NotIsomorphic, std::nullopt, std::nullopt,
            Certificate::ExhaustedSearch, "normalized two-column search space exhausted"};
}

/// Decision table for isomorphism of the 7-dimensional adapted family over F_p,
/// valid when the zero-patterns of (a,b) and (A,B) agree.
inline bool closed_form_iso_g7(const std::array<Scalar, 4>& s, const std::array<Scalar, 4>& t) {
    const auto& [a, b, c, d] = s;
    const auto& [A, B, C, D] = t;
    const FieldSpec field = a.field();
    if (!field.is_finite()) throw UnsupportedField("decision table is for prime fields");
    const bool char2 = field.characteristic() == 2;
    if (a.is_zero() != A.is_zero() || b.is_zero() != B.is_zero())
        throw OutOfScope("zero-patterns of (a,b) differ; the invariant table separates these");

    if (a.is_zero() && b.is_zero()) {
        const bool s_model = c.is_zero() && d.is_zero();
        const bool t_model = C.is_zero() && D.is_zero();
        if (s_model || t_model) return s_model && t_model;
        if (c.is_zero() && C.is_zero()) return !d.is_zero() && !D.is_zero();
        if (d.is_zero() && D.is_zero()) return !c.is_zero() && !C.is_zero();
        return !c.is_zero() && !C.is_zero() && !d.is_zero() && !D.is_zero();
    }
    if (a.is_zero()) {  // b != 0 != B
        return !char2 || c == C;
    }
    if (b.is_zero()) {  // a != 0 != A
        if (char2) return c == C && (c.is_zero() || d == D);
        const Scalar four(field, 4), five(field, 5);
        const Scalar q1 = four * a * d - five * c * c;
        const Scalar q2 = four * A * D - five * C * C;
        if (q1.is_zero() || q2.is_zero()) return q1.is_zero() && q2.is_zero();
        return is_square(q2 * q1.inv());
    }
    // a, b, A, B all nonzero
    if (!(a * B == A * b)) return false;
    if (!char2 && !(a + b).is_zero()) return true;
    return c.is_zero() == C.is_zero();
}

/// Entry relations satisfied by any normalized isomorphism witness between
/// members of the 6-dimensional family with parameters (a,b,c) -> (A,B,C).
inline bool check_dim6_entry_relations(const Matrix& F, const std::array<Scalar, 3>& s,
                                       const std::array<Scalar, 3>& t) {
    const auto& [a, b, c] = s;
    const auto& [A, B, C] = t;
    auto f = [&](int i, int j) { return F.at(i - 1, j - 1); };
    const Scalar two(a.field(), 2);
    const Scalar core = f(1, 1) - A * f(6, 1);
    const Scalar lift = f(6, 6) + a * f(6, 1);
    bool ok = true;
    ok = ok && f(5, 5) == f(1, 1) * f(6, 6);
    ok = ok && f(4, 4) == core * f(5, 5);
    ok = ok && f(3, 3) == core * f(4, 4);
    ok = ok && f(2, 2) == f(1, 1) * f(3, 3);
    ok = ok && f(4, 5) == core * f(5, 6) + A * f(5, 1) * f(6, 6);
    ok = ok && f(3, 4) == core * f(4, 5) - B * f(5, 5) * f(6, 1);
    ok = ok && f(2, 3) == f(1, 1) * f(3, 4) - (A * f(5, 1) + B * f(6, 1)) * f(4, 4);
    ok = ok && f(3, 5) == core * f(4, 6) + A * f(4, 1) * f(6, 6) +
                              B * (f(5, 1) * f(6, 6) - f(5, 6) * f(6, 1));
    ok = ok && f(2, 4) == f(1, 1) * f(3, 5) - (A * f(5, 1) + B * f(6, 1)) * f(4, 5) +
                              (A * f(4, 1) - C * f(6, 1)) * f(5, 5);
    ok = ok && f(2, 5) == f(1, 1) * f(3, 6) + A * (f(4, 1) * f(5, 6) - f(4, 6) * f(5, 1)) +
                              B * (f(4, 1) * f(6, 6) - f(4, 6) * f(6, 1)) +
                              C * (f(5, 1) * f(6, 6) - f(5, 6) * f(6, 1));
    ok = ok && !(f(1, 1) * f(6, 6) * core).is_zero();
    ok = ok && a * f(1, 1) == A * lift;
    ok = ok && b * core * core == B * lift;
    const Scalar cubic =
        f(1, 1) * f(6, 6) *
            (c * f(1, 1) * core * core + b * B * (A * f(6, 1) - two * f(1, 1)) * f(6, 1) +
             two * a * A * f(4, 1) - a * C * f(6, 1) + two * A * f(4, 6) - C * f(6, 6)) -
        A * f(5, 6) * f(5, 6) * core - A * A * (a * f(5, 1) + two * f(5, 6)) * f(5, 1) * f(6, 6);
    ok = ok && cubic.is_zero();
    return ok;
}

/// Entry relations satisfied by any normalized isomorphism witness between
/// members of the 7-dimensional adapted family, (a,b,c,d) -> (A,B,C,D).
inline bool check_dim7_entry_relations(const Matrix& F, const std::array<Scalar, 4>& s,
                                       const std::array<Scalar, 4>& t) {
    const auto& [a, b, c, d] = s;
    const auto& [A, B, C, D] = t;
    auto f = [&](int i, int j) { return F.at(i - 1, j - 1); };
    const FieldSpec field = a.field();
    const Scalar two(field, 2), three(field, 3);
    bool ok = true;
    for (int i = 2; i <= 6; ++i) ok = ok && f(i, i) == f(1, 1).pow(7 - i) * f(7, 7);
    ok = ok && !(f(1, 1) * f(7, 7)).is_zero();
    ok = ok && a * f(1, 1) * f(1, 1) == A * f(7, 7);
    ok = ok && b * f(1, 1) * f(1, 1) == B * f(7, 7);
    const Scalar ab_sum = A + B;
    ok = ok && c * f(1, 1).pow(4) ==
                   two * ab_sum * ab_sum * f(7, 1) * f(7, 7) + C * f(1, 1) * f(7, 7);
    const Scalar lhs = d * f(1, 1).pow(5) * f(7, 7) -
                       (three * A + two * B) * c * f(1, 1).pow(3) * f(7, 1) * f(7, 7) +
                       a * A * A * f(1, 1) * f(7, 1) * f(7, 1) * f(7, 7) +
                       (b * A * A + a * A * B + b * A * B) * f(1, 1) * f(7, 1) * f(7, 1) * f(7, 7) -
                       two * (A * C + B * C) * f(7, 1) * f(7, 7) * f(7, 7) -
                       B * f(1, 1) * f(6, 7) * f(6, 7) + two * B * f(1, 1) * f(5, 7) * f(7, 7);
    ok = ok && lhs == D * f(1, 1) * f(7, 7) * f(7, 7);
    return ok;
}

/// Bilinear product (u, v) -> [f u, g v] on the space of a Lie algebra.
struct BilinearProduct {
    std::size_t dim;
    FieldSpec field;
    std::vector<Vec> table;  // table[(i-1)*dim + (j-1)] = product(e_i, e_j)

    const Vec& of_basis(int i, int j) const { return table[(i - 1) * dim + (j - 1)]; }

    Vec eval(const Vec& u, const Vec& v) const {
        Vec out = zero_vec(dim, field);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                const Scalar coef = u[i] * v[j];
                if (coef.is_zero()) continue;
                const Vec& w = table[i * dim + j];
                for (std::size_t k = 0; k < dim; ++k) out[k] += coef * w[k];
            }
        return out;
    }
};

struct AlbertCheck {
    bool anticommutative = false;
    bool jacobi_condition = false;
    bool is_lie() const { return anticommutative && jacobi_condition; }
};

struct PrincipalIsotope {
    BilinearProduct product;
    AlbertCheck albert;

    /// Structure table of the isotope; requires the anticommutativity condition.
    StructureTable as_table(std::string label = "") const {
        if (!albert.anticommutative)
            throw Error("isotope product is not anticommutative; no structure table");
        StructureTable::ConstantMap constants;
        for (int i = 1; i <= (int)product.dim; ++i)
            for (int j = i + 1; j <= (int)product.dim; ++j) {
                const Vec& w = product.of_basis(i, j);
                for (int k = 1; k <= (int)product.dim; ++k)
                    if (!w[k - 1].is_zero()) constants[{i, j, k}] = w[k - 1];
            }
        return StructureTable::make_unchecked(product.dim, product.field, constants,
                                              std::move(label));
    }
};

/// Principal isotope with respect to (f, g, Id): product (u,v) -> [f u, g v].
/// The two Albert conditions decide whether the isotope is a Lie algebra.
inline PrincipalIsotope principal_isotope(const StructureTable& g, const Matrix& f,
                                          const Matrix& gmap) {
    const std::size_t n = g.dim();
    if (!is_invertible(f) || !is_invertible(gmap))
        throw SingularMatrix("principal isotope requires invertible maps");
    BilinearProduct prod{n, g.field(), {}};
    prod.table.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            prod.table.push_back(g.bracket(f.col(i), gmap.col(j)));

    AlbertCheck albert;
    albert.anticommutative = true;
    for (int i = 1; i <= (int)n && albert.anticommutative; ++i)
        for (int j = 1; j <= (int)n && albert.anticommutative; ++j) {
            Vec s = prod.of_basis(i, j);
            const Vec& t = prod.of_basis(j, i);
            for (std::size_t k = 0; k < n; ++k) s[k] += t[k];
            if (!is_zero_vec(s)) albert.anticommutative = false;
        }
    albert.jacobi_condition = true;
    for (int u = 1; u <= (int)n && albert.jacobi_condition; ++u)
        for (int v = 1; v <= (int)n && albert.jacobi_condition; ++v)
            for (int w = 1; w <= (int)n && albert.jacobi_condition; ++w) {
                const Vec uu = unit_vec(n, u - 1, g.field());
                const Vec vv = unit_vec(n, v - 1, g.field());
                const Vec ww = unit_vec(n, w - 1, g.field());
                Vec s = prod.eval(prod.eval(uu, vv), ww);
                const Vec t1 = prod.eval(prod.eval(uu, ww), vv);
                const Vec t2 = prod.eval(uu, prod.eval(vv, ww));
                for (std::size_t k = 0; k < n; ++k) s[k] -= t1[k] + t2[k];
                if (!is_zero_vec(s)) albert.jacobi_condition = false;
            }
    return {prod, albert};
}

struct NamedIsotopyWitness {
    FamilyParams source, target;
    IsotopyWitness witness;
};

namespace detail {

inline IsotopyWitness checked_isotopy(const FamilyParams& src, const FamilyParams& tgt,
                                      Matrix f, Matrix g, Matrix h) {
    const StructureTable a = build(src), b = build(tgt);
    if (!verify_isotopism(a, b, f, g, h))
        throw Error("internal: stored isotopy witness failed verification for " + src.label());
    return IsotopyWitness{std::move(f), std::move(g), std::move(h), src.label(), tgt.label()};
}

}  // namespace detail

/// The explicit isotopisms used in the dimension-6/7 classifications,
/// parametrized over the field; every returned witness verifies.
/// The published map for the (a,c,d) family with a != 0 fails on the pairs
/// (e_1,e_4) and (e_1,e_5) when c != 0; the corrected companion maps
/// f(e_4) = e_4 - c e_3, f(e_6) = e_6 + c e_5 (and h(e_4), h(e_5) re-derived)
/// are emitted instead.
inline std::vector<NamedIsotopyWitness> paper_isotopy_witnesses(std::size_t dim,
                                                                FieldSpec field) {
    if (dim != 6 && dim != 7) throw UnsupportedDim("witness battery covers dimensions 6 and 7");
    const std::int64_t p = field.characteristic();
    if (p == 0) throw UnsupportedField("witness battery is materialized over prime fields");
    const Scalar zero = Scalar::zero(field), one = Scalar::one(field);
    std::vector<NamedIsotopyWitness> out;

    if (dim == 6) {
        Matrix f = Matrix::identity(6, field), h = Matrix::identity(6, field);
        f.at(2, 3) = -one;  // f(e_4) = e_4 - e_3
        h.at(1, 2) = -one;  // h(e_3) = e_3 - e_2
        out.push_back({FamilyParams::g6(zero, one, one), FamilyParams::g6(zero, one, zero),
                       detail::checked_isotopy(FamilyParams::g6(zero, one, one),
                                               FamilyParams::g6(zero, one, zero), f, f, h)});
        return out;
    }

    {  // (0,0,1,1) -> (0,0,1,0)
        Matrix f = Matrix::identity(7, field), h = Matrix::identity(7, field);
        f.at(2, 3) = -one;
        h.at(1, 2) = -one;
        out.push_back({FamilyParams::g7(zero, zero, one, one),
                       FamilyParams::g7(zero, zero, one, zero),
                       detail::checked_isotopy(FamilyParams::g7(zero, zero, one, one),
                                               FamilyParams::g7(zero, zero, one, zero), f, f, h)});
    }
    {  // (0,1,1,0) -> (0,1,0,0)
        Matrix f = Matrix::identity(7, field), h = Matrix::identity(7, field);
        f.at(6, 0) = one;   // f(e_1) = e_1 + e_7
        f.at(5, 6) = one;   // f(e_7) = e_6 + e_7
        h.at(2, 3) = -one;  // h(e_4) = e_4 - e_3
        h.at(3, 4) = -one;  // h(e_5) = e_5 - e_4
        h.at(4, 5) = one;   // h(e_6) = e_6 + e_5 - e_4
        h.at(3, 5) = -one;
        out.push_back({FamilyParams::g7(zero, one, one, zero),
                       FamilyParams::g7(zero, one, zero, zero),
                       detail::checked_isotopy(FamilyParams::g7(zero, one, one, zero),
                                               FamilyParams::g7(zero, one, zero, zero), f, f, h)});
    }
    // (1,0,c,d) -> (1,0,0,0) for every c, d
    for (std::int64_t ci = 0; ci < p; ++ci)
        for (std::int64_t di = 0; di < p; ++di) {
            if (ci == 0 && di == 0) continue;
            const Scalar c(field, ci), d(field, di);
            const Scalar shift = c * c - d;
            Matrix f = Matrix::identity(7, field), h = Matrix::identity(7, field);
            f.at(2, 3) = -c;     // f(e_4) = e_4 - c e_3
            f.at(2, 4) = shift;  // f(e_5) = e_5 + (c^2 - d) e_3
            f.at(4, 5) = c;      // f(e_6) = e_6 + c e_5
            h.at(1, 2) = -c;     // h(e_3) = e_3 - c e_2
            h.at(1, 3) = shift;  // h(e_4) = e_4 + (c^2 - d) e_2
            h.at(3, 4) = c;      // h(e_5) = e_5 + c e_4
            out.push_back({FamilyParams::g7(one, zero, c, d),
                           FamilyParams::g7(one, zero, zero, zero),
                           detail::checked_isotopy(FamilyParams::g7(one, zero, c, d),
                                                   FamilyParams::g7(one, zero, zero, zero), f, f,
                                                   h)});
        }
    // (1,b,0,0) -> (1,1,0,0) for b in {2..p-2}: diagonal rescaling, needs 1/(b+1) and 1/2
    for (std::int64_t bi = 2; bi + 1 < p; ++bi) {
        const Scalar b(field, bi);
        const Scalar two(field, 2), four(field, 4);
        const Scalar f66 = two * b * (b + one).inv();
        const Scalar f55 = two * (b + one).inv() * f66;
        const Scalar f44 = four * ((b + one) * (b + one)).inv() * f66;
        Matrix f = Matrix::identity(7, field), h = Matrix::identity(7, field);
        f.at(2, 2) = f44;
        f.at(3, 3) = f44;
        f.at(4, 4) = f55;
        f.at(5, 5) = f66;
        h.at(1, 1) = f44;
        h.at(2, 2) = f44;
        h.at(3, 3) = f55;
        h.at(4, 4) = f66;
        out.push_back({FamilyParams::g7(one, b, zero, zero),
                       FamilyParams::g7(one, one, zero, zero),
                       detail::checked_isotopy(FamilyParams::g7(one, b, zero, zero),
                                               FamilyParams::g7(one, one, zero, zero), f, f, h)});
    }
    if (p == 2) {  // principal isotopism between the two type-3 algebras
        Matrix f = Matrix::identity(7, field);
        f.at(2, 3) = one;  // f(e_4) = e_3 + e_4
        out.push_back({FamilyParams::h7_type3(0, field), FamilyParams::h7_type3(1, field),
                       detail::checked_isotopy(FamilyParams::h7_type3(0, field),
                                               FamilyParams::h7_type3(1, field), f, f,
                                               Matrix::identity(7, field))});
    }
    return out;
}

struct HeuristicBudget {
    std::size_t max_entries_per_map = 2;
    std::uint64_t max_candidates = 2000000;
};

namespace detail {

/// Flag-preserving modification slots of the identity, 0-based (row, col):
/// column 0 may pick up any extra row, interior column c any row in [1, c),
/// the last column any row, and every diagonal entry may be rescaled.
inline std::vector<std::pair<int, int>> flag_positions(int n) {
    std::vector<std::pair<int, int>> pos;
    for (int c = 0; c < n; ++c) pos.push_back({c, c});
    for (int r = 1; r < n; ++r) pos.push_back({r, 0});
    for (int c = 1; c + 1 < n; ++c)
        for (int r = 1; r < c; ++r) pos.push_back({r, c});
    for (int r = 0; r + 1 < n; ++r) pos.push_back({r, n - 1});
    return pos;
}

}  // namespace detail

/// Bounded isotopism search over the flag-preserving ansatz: f and g run over
/// identity-plus-few-entries flag maps, h is induced through the defining
/// relations and checked for consistency, and any hit is fully verified.
/// NotSeparated is explicitly not a non-isotopy certificate.
inline Verdict heuristic_isotopism_search(const StructureTable& gA, const StructureTable& gB,
                                          HeuristicBudget budget = {}) {
    if (gA.dim() != gB.dim()) throw DimensionMismatch("different dimensions");
    if (!gA.field().is_finite()) throw UnsupportedField("isotopism search requires a finite field");
    const int n = (int)gA.dim();
    const std::int64_t p = gA.field().characteristic();
    const FieldSpec field = gA.field();

    const auto formA = detail::to_filiform_form(gA);
    const auto formB = detail::to_filiform_form(gB);
    const auto kinds = filiform_relation_kinds(formA.table);
    const Matrix pa_inv = inverse(formA.change.matrix);
    const Matrix& pb = formB.change.matrix;

    const auto positions = detail::flag_positions(n);
    std::uint64_t examined = 0;

    // candidate maps with exactly k modified slots, in deterministic order
    auto enumerate_maps = [&](std::size_t k, const std::function<bool(const Matrix&)>& use) {
        std::vector<std::size_t> idx(k);
        std::function<bool(std::size_t, std::size_t)> choose = [&](std::size_t start,
                                                                   std::size_t depth) {
            if (depth == k) {
                std::vector<std::int64_t> vals(k, 0);
                while (true) {
                    Matrix m = Matrix::identity(n, field);
                    bool valid = true;
                    for (std::size_t t = 0; t < k; ++t) {
                        auto [r, c] = positions[idx[t]];
                        const bool diag = (r == c);
                        const std::int64_t v = diag ? vals[t] + 2 : vals[t] + 1;
                        if (v >= p) {
                            valid = false;
                            break;
                        }
                        m.at(r, c) = Scalar(field, v);
                    }
                    if (valid && use(m)) return true;
                    // advance value odometer
                    std::size_t t = k;
                    bool done = true;
                    while (t-- > 0) {
                        auto [r, c] = positions[idx[t]];
                        const std::int64_t top = (r == c) ? p - 2 : p - 1;
                        if (++vals[t] < top) {
                            done = false;
                            break;
                        }
                        vals[t] = 0;
                    }
                    if (done) break;
                }
                return false;
            }
            for (std::size_t i = start; i < positions.size(); ++i) {
                auto [r, c] = positions[i];
                if (r == c && p == 2) continue;  // no non-trivial rescale over F_2
                idx[depth] = i;
                if (choose(i + 1, depth + 1)) return true;
            }
            return false;
        };
        return choose(0, 0);
    };

    const StructureTable& A = formA.table;
    const StructureTable& B = formB.table;

    auto try_pair = [&](const Matrix& f, const Matrix& g) -> std::optional<IsotopyWitness> {
        if (++examined > budget.max_candidates) throw SearchBudgetExceeded("budget");
        // induce h on e_2..e_{n-1} through the defining relations
        std::vector<Vec> h_img(n + 1, zero_vec(n, field));
        for (int i = n; i >= 3; --i) {
            if (kinds[i] == 1)
                h_img[i - 1] = B.bracket(f.col(0), g.col(i - 1));
            else
                h_img[i - 1] = B.bracket(f.col(i - 1), g.col(n - 1));
        }
        // consistency on all remaining pairs
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                if (i == 1 && kinds[j] == 1 && j >= 3) continue;
                if (j == n && i >= 3 && kinds[i] == 2) continue;
                Vec rhs = zero_vec(n, field);
                const Vec br = A.bracket_basis(i, j);
                for (int k = 2; k <= n - 1; ++k)
                    if (!br[k - 1].is_zero())
                        for (int t = 0; t < n; ++t) rhs[t] += br[k - 1] * h_img[k][t];
                if (B.bracket(f.col(i - 1), g.col(j - 1)) != rhs) return std::nullopt;
            }
        // complete h to a regular map with two standard basis vectors
        std::vector<Vec> rows;
        for (int k = 2; k <= n - 1; ++k) rows.push_back(h_img[k]);
        Subspace span = Subspace::span(rows, n, field);
        if ((int)span.dim() != n - 2) return std::nullopt;
        bool first_done = false;
        for (int t = 0; t < n && (int)span.dim() < n; ++t) {
            Vec cand = unit_vec(n, t, field);
            if (span.contains(cand)) continue;
            h_img[first_done ? n : 1] = cand;
            first_done = true;
            span = span.sum(Subspace::span({cand}, n, field));
        }
        Matrix h(n, n, field);
        for (int k = 1; k <= n; ++k) h.set_col(k - 1, h_img[k]);
        if (!verify_isotopism(A, B, f, g, h)) return std::nullopt;
        const Matrix fo = pb * f * pa_inv, go = pb * g * pa_inv, ho = pb * h * pa_inv;
        if (!verify_isotopism(gA, gB, fo, go, ho)) return std::nullopt;
        return IsotopyWitness{fo, go, ho, gA.label(), gB.label()};
    };

    std::optional<IsotopyWitness> hit;
    try {
        for (std::size_t total = 0; total <= 2 * budget.max_entries_per_map && !hit; ++total) {
            for (std::size_t kf = 0; kf <= std::min(total, budget.max_entries_per_map) && !hit;
                 ++kf) {
                const std::size_t kg = total - kf;
                if (kg > budget.max_entries_per_map) continue;
                enumerate_maps(kf, [&](const Matrix& f) {
                    return enumerate_maps(kg, [&](const Matrix& g) {
                        if (auto w = try_pair(f, g)) {
                            hit = w;
                            return true;
                        }
                        return false;
                    });
                });
            }
        }
    } catch (const SearchBudgetExceeded&) {
        // fall through to NotSeparated with the budget note
    }
    if (hit) return {Verdict::Kind::Isotopic, std::nullopt, hit, std::nullopt, ""};
    return {Verdict::Kind::NotSeparated, std::nullopt, std::nullopt, std::nullopt,
            "flag-preserving ansatz, <=" + std::to_string(budget.max_entries_per_map) +
                " entries per map, " + std::to_string(examined) + " candidates examined"};
}

}  // namespace flie

#endif
