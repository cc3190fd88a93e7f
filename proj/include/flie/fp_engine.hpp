#ifndef FLIE_FP_ENGINE_HPP
#define FLIE_FP_ENGINE_HPP

#include "flie/algebra.hpp"

#include <array>
#include <cstdint>
#include <set>
#include <vector>

// Allocation-free mod-p engine behind the invariant computations over finite
// fields. Mirrors the Subspace-based reference implementations; the test suite
// checks the two paths against each other.

namespace flie::fpfast {

inline constexpr int kMaxDim = 7;

struct Alg {
    int n = 0;
    std::int64_t p = 0;
    std::int64_t br[kMaxDim][kMaxDim][kMaxDim] = {};  // [e_i, e_j] coordinates
};

inline Alg from_table(const StructureTable& g) {
    Alg a;
    a.n = (int)g.dim();
    a.p = g.field().characteristic();
    for (int i = 1; i <= a.n; ++i)
        for (int j = 1; j <= a.n; ++j) {
            if (i == j) continue;
            const Vec w = g.bracket_basis(i, j);
            for (int k = 1; k <= a.n; ++k) a.br[i - 1][j - 1][k - 1] = w[k - 1].residue();
        }
    return a;
}

/// Row-canonical basis of a subspace; rows <= kMaxDim.
struct RowMat {
    int rows = 0, cols = 0;
    std::int64_t a[kMaxDim][kMaxDim] = {};
};

inline std::int64_t inv_mod(std::int64_t v, std::int64_t p) {
    std::int64_t acc = 1, b = v % p, e = p - 2;
    while (e) {
        if (e & 1) acc = acc * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return acc;
}

/// In-place Gauss-Jordan on a row-major buffer; rows are compacted to the
/// leading `rank` slots in canonical form.
inline int rref_buffer(std::int64_t* m, int rows, int cols, std::int64_t p) {
    int lead = 0;
    for (int c = 0; c < cols && lead < rows; ++c) {
        int sel = -1;
        for (int r = lead; r < rows; ++r)
            if (m[r * cols + c] % p) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        if (sel != lead)
            for (int j = 0; j < cols; ++j) std::swap(m[sel * cols + j], m[lead * cols + j]);
        const std::int64_t iv = inv_mod(m[lead * cols + c], p);
        for (int j = 0; j < cols; ++j) m[lead * cols + j] = m[lead * cols + j] * iv % p;
        for (int r = 0; r < rows; ++r) {
            if (r == lead) continue;
            const std::int64_t f = m[r * cols + c] % p;
            if (!f) continue;
            for (int j = 0; j < cols; ++j)
                m[r * cols + j] = ((m[r * cols + j] - f * m[lead * cols + j]) % p + p) % p;
        }
        ++lead;
    }
    return lead;
}

inline RowMat canonicalize(const std::int64_t* vectors, int count, int cols, std::int64_t p) {
    std::int64_t buf[64 * kMaxDim];
    for (int i = 0; i < count * cols; ++i) buf[i] = ((vectors[i] % p) + p) % p;
    const int rank = rref_buffer(buf, count, cols, p);
    RowMat out;
    out.rows = rank;
    out.cols = cols;
    for (int r = 0; r < rank; ++r)
        for (int c = 0; c < cols; ++c) out.a[r][c] = buf[r * cols + c];
    return out;
}

inline bool contains(const RowMat& s, const std::int64_t* v, std::int64_t p) {
    std::int64_t w[kMaxDim];
    for (int c = 0; c < s.cols; ++c) w[c] = ((v[c] % p) + p) % p;
    for (int r = 0; r < s.rows; ++r) {
        int piv = -1;
        for (int c = 0; c < s.cols; ++c)
            if (s.a[r][c]) {
                piv = c;
                break;
            }
        const std::int64_t f = w[piv];
        if (!f) continue;
        for (int c = 0; c < s.cols; ++c) w[c] = ((w[c] - f * s.a[r][c]) % p + p) % p;
    }
    for (int c = 0; c < s.cols; ++c)
        if (w[c]) return false;
    return true;
}

inline bool contains_all(const RowMat& outer, const RowMat& inner, std::int64_t p) {
    for (int r = 0; r < inner.rows; ++r)
        if (!contains(outer, inner.a[r], p)) return false;
    return true;
}

inline void bracket(const Alg& g, const std::int64_t* u, const std::int64_t* v,
                    std::int64_t* out) {
    for (int k = 0; k < g.n; ++k) out[k] = 0;
    for (int i = 0; i < g.n; ++i) {
        if (!u[i]) continue;
        for (int j = 0; j < g.n; ++j) {
            if (i == j || !v[j]) continue;
            const std::int64_t coef = u[i] * v[j] % g.p;
            if (!coef) continue;
            for (int k = 0; k < g.n; ++k) out[k] = (out[k] + coef * g.br[i][j][k]) % g.p;
        }
    }
}

inline RowMat full_space(int n) {
    RowMat m;
    m.rows = n;
    m.cols = n;
    for (int i = 0; i < n; ++i) m.a[i][i] = 1;
    return m;
}

/// Lower central series; last entry is the stabilized term.
inline std::vector<RowMat> series(const Alg& g) {
    std::vector<RowMat> out{full_space(g.n)};
    while (true) {
        const RowMat& cur = out.back();
        std::int64_t buf[64 * kMaxDim];
        int count = 0;
        for (int r = 0; r < cur.rows; ++r)
            for (int j = 0; j < g.n; ++j) {
                std::int64_t ej[kMaxDim] = {};
                ej[j] = 1;
                bracket(g, cur.a[r], ej, buf + count * g.n);
                ++count;
            }
        RowMat next = canonicalize(buf, count, g.n, g.p);
        if (next.rows == cur.rows) break;
        out.push_back(next);
        if (next.rows == 0) break;
    }
    return out;
}

/// Kernel dimension of the stacked maps u -> [u, s]; the centralizer dimension.
inline int centralizer_dim(const Alg& g, const RowMat& s) {
    if (s.rows == 0) return g.n;
    std::int64_t buf[64 * kMaxDim];
    int count = 0;
    for (int r = 0; r < s.rows; ++r) {
        // rows indexed by output coordinate; columns by input basis vector
        std::int64_t cols[kMaxDim][kMaxDim];
        for (int j = 0; j < g.n; ++j) {
            std::int64_t ej[kMaxDim] = {};
            ej[j] = 1;
            bracket(g, ej, s.a[r], cols[j]);
        }
        for (int k = 0; k < g.n; ++k) {
            for (int j = 0; j < g.n; ++j) buf[count * g.n + j] = cols[j][k];
            ++count;
        }
    }
    const int rank = rref_buffer(buf, count, g.n, g.p);
    return g.n - rank;
}

/// Kernel basis of the stacked maps; the centralizer itself.
inline RowMat centralizer(const Alg& g, const RowMat& s) {
    if (s.rows == 0) return full_space(g.n);
    std::int64_t buf[64 * kMaxDim];
    int count = 0;
    for (int r = 0; r < s.rows; ++r) {
        std::int64_t cols[kMaxDim][kMaxDim];
        for (int j = 0; j < g.n; ++j) {
            std::int64_t ej[kMaxDim] = {};
            ej[j] = 1;
            bracket(g, ej, s.a[r], cols[j]);
        }
        for (int k = 0; k < g.n; ++k) {
            for (int j = 0; j < g.n; ++j) buf[count * g.n + j] = cols[j][k];
            ++count;
        }
    }
    const int rank = rref_buffer(buf, count, g.n, g.p);
    // free-column construction of the kernel basis
    int pivcol[kMaxDim];
    bool is_piv[kMaxDim] = {};
    int pr = 0;
    for (int r = 0; r < rank; ++r) {
        for (int c = 0; c < g.n; ++c)
            if (buf[r * g.n + c]) {
                pivcol[pr++] = c;
                is_piv[c] = true;
                break;
            }
    }
    std::int64_t kerbuf[kMaxDim * kMaxDim];
    int kcount = 0;
    for (int fc = 0; fc < g.n; ++fc) {
        if (is_piv[fc]) continue;
        for (int c = 0; c < g.n; ++c) kerbuf[kcount * g.n + c] = 0;
        kerbuf[kcount * g.n + fc] = 1;
        for (int r = 0; r < rank; ++r)
            kerbuf[kcount * g.n + pivcol[r]] = (g.p - buf[r * g.n + fc]) % g.p;
        ++kcount;
    }
    return canonicalize(kerbuf, kcount, g.n, g.p);
}

inline RowMat center(const Alg& g) { return centralizer(g, full_space(g.n)); }

inline bool is_ideal(const Alg& g, const RowMat& s) {
    std::int64_t w[kMaxDim];
    for (int r = 0; r < s.rows; ++r)
        for (int j = 0; j < g.n; ++j) {
            std::int64_t ej[kMaxDim] = {};
            ej[j] = 1;
            bracket(g, s.a[r], ej, w);
            if (!contains(s, w, g.p)) return false;
        }
    return true;
}

inline bool is_abelian(const Alg& g, const RowMat& s) {
    std::int64_t w[kMaxDim];
    for (int r = 0; r < s.rows; ++r)
        for (int t = r + 1; t < s.rows; ++t) {
            bracket(g, s.a[r], s.a[t], w);
            for (int k = 0; k < g.n; ++k)
                if (w[k]) return false;
        }
    return true;
}

/// Quotient by an ideal; coset representatives are the non-pivot coordinates.
inline Alg quotient(const Alg& g, const RowMat& h) {
    int pivcol[kMaxDim];
    bool is_piv[kMaxDim] = {};
    for (int r = 0; r < h.rows; ++r)
        for (int c = 0; c < g.n; ++c)
            if (h.a[r][c]) {
                pivcol[r] = c;
                is_piv[c] = true;
                break;
            }
    int nonpiv[kMaxDim];
    int q = 0;
    for (int c = 0; c < g.n; ++c)
        if (!is_piv[c]) nonpiv[q++] = c;
    auto reduce_project = [&](std::int64_t* v, std::int64_t* out) {
        for (int r = 0; r < h.rows; ++r) {
            const std::int64_t f = v[pivcol[r]];
            if (!f) continue;
            for (int c = 0; c < g.n; ++c) v[c] = ((v[c] - f * h.a[r][c]) % g.p + g.p) % g.p;
        }
        for (int t = 0; t < q; ++t) out[t] = v[nonpiv[t]];
    };
    Alg out;
    out.n = q;
    out.p = g.p;
    std::int64_t w[kMaxDim], pw[kMaxDim];
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
            if (a == b) continue;
            std::int64_t ea[kMaxDim] = {}, eb[kMaxDim] = {};
            ea[nonpiv[a]] = 1;
            eb[nonpiv[b]] = 1;
            bracket(g, ea, eb, w);
            reduce_project(w, pw);
            for (int k = 0; k < q; ++k) out.br[a][b][k] = pw[k];
        }
    return out;
}

inline std::array<std::uint64_t, 4> key_of(const RowMat& m) {
    std::array<std::uint64_t, 4> key{};
    key[3] = ((std::uint64_t)m.rows << 32) | (std::uint64_t)m.cols;
    int bit = 0;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            key[bit / 64] |= (std::uint64_t)(m.a[r][c] & 0xF) << (bit % 64);
            bit += 4;
            if (bit >= 192) return key;  // unreachable at our dimensions
        }
    return key;
}

/// Every m-dimensional subspace of F_p^n in echelon-form order.
inline void all_subspaces(int n, std::int64_t p, int m, std::vector<RowMat>& out) {
    if (m == 0) {
        RowMat z;
        z.cols = n;
        out.push_back(z);
        return;
    }
    int piv[kMaxDim];
    for (int i = 0; i < m; ++i) piv[i] = i;
    while (true) {
        bool is_piv[kMaxDim] = {};
        for (int i = 0; i < m; ++i) is_piv[piv[i]] = true;
        std::pair<int, int> freepos[kMaxDim * kMaxDim];
        int nf = 0;
        for (int r = 0; r < m; ++r)
            for (int c = piv[r] + 1; c < n; ++c)
                if (!is_piv[c]) freepos[nf++] = {r, c};
        std::int64_t vals[kMaxDim * kMaxDim] = {};
        while (true) {
            RowMat s;
            s.rows = m;
            s.cols = n;
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c) s.a[r][c] = 0;
            for (int r = 0; r < m; ++r) s.a[r][piv[r]] = 1;
            for (int t = 0; t < nf; ++t) s.a[freepos[t].first][freepos[t].second] = vals[t];
            out.push_back(s);
            int t = nf;
            bool done = true;
            while (t-- > 0) {
                if (++vals[t] < p) {
                    done = false;
                    break;
                }
                vals[t] = 0;
            }
            if (done) break;
        }
        // next pivot combination
        int i = m;
        bool adv = false;
        while (i-- > 0) {
            if (piv[i] < n - (m - i)) {
                ++piv[i];
                for (int j = i + 1; j < m; ++j) piv[j] = piv[j - 1] + 1;
                adv = true;
                break;
            }
        }
        if (!adv) break;
    }
}

/// m-dimensional ideals via the central-line recursion (each nonzero ideal of
/// a nilpotent algebra meets the center).
inline void ideals_of_dim(const Alg& g, int m, std::vector<RowMat>& out) {
    out.clear();
    if (m == 0) {
        RowMat z;
        z.cols = g.n;
        out.push_back(z);
        return;
    }
    if (m == g.n) {
        out.push_back(full_space(g.n));
        return;
    }
    const RowMat z = center(g);
    if (z.rows == g.n) {
        all_subspaces(g.n, g.p, m, out);
        return;
    }
    std::set<std::array<std::uint64_t, 4>> seen;
    // canonical lines of the center: leading coefficient 1 over the z-basis
    std::int64_t coeff[kMaxDim] = {};
    std::vector<RowMat> sub;
    const int zd = z.rows;
    auto emit_line = [&](const std::int64_t* co) {
        std::int64_t line[kMaxDim] = {};
        for (int t = 0; t < zd; ++t)
            for (int c = 0; c < g.n; ++c) line[c] = (line[c] + co[t] * z.a[t][c]) % g.p;
        RowMat lm = canonicalize(line, 1, g.n, g.p);
        const Alg q = quotient(g, lm);
        // non-pivot coordinates used by the lift
        int pivc = -1;
        for (int c = 0; c < g.n; ++c)
            if (lm.a[0][c]) {
                pivc = c;
                break;
            }
        sub.clear();
        ideals_of_dim(q, m - 1, sub);
        for (const RowMat& s : sub) {
            std::int64_t buf[(kMaxDim + 1) * kMaxDim];
            int count = 0;
            for (int c = 0; c < g.n; ++c) buf[c] = lm.a[0][c];
            ++count;
            for (int r = 0; r < s.rows; ++r) {
                int t = 0;
                for (int c = 0; c < g.n; ++c)
                    buf[count * g.n + c] = (c == pivc) ? 0 : s.a[r][t++];
                ++count;
            }
            RowMat lifted = canonicalize(buf, count, g.n, g.p);
            if (lifted.rows != m) continue;
            if (!seen.insert(key_of(lifted)).second) continue;
            if (is_ideal(g, lifted)) out.push_back(lifted);
        }
    };
    // odometer over canonical line coefficients: first nonzero coefficient is 1
    for (int lead = 0; lead < zd; ++lead) {
        for (int t = 0; t < zd; ++t) coeff[t] = 0;
        coeff[lead] = 1;
        while (true) {
            emit_line(coeff);
            int t = zd;
            bool done = true;
            while (t-- > lead + 1) {
                if (++coeff[t] < g.p) {
                    done = false;
                    break;
                }
                for (int u = t; u < zd; ++u) coeff[u] = 0;
            }
            if (done) break;
        }
    }
}

inline std::vector<int> d_sequence(const Alg& g) {
    std::vector<int> out;
    std::vector<RowMat> ideals;
    for (int m = 1; m <= g.n; ++m) {
        ideals_of_dim(g, m, ideals);
        int best = 0;
        for (const RowMat& h : ideals) best = std::max(best, centralizer_dim(g, h));
        out.push_back(best);
    }
    return out;
}

inline const RowMat& series_at(const std::vector<RowMat>& s, int k) {
    return (k - 1) < (int)s.size() ? s[k - 1] : s.back();
}

inline int z1(const Alg& g) {
    const auto s = series(g);
    const RowMat& c2 = series_at(s, 2);
    int best = 0;
    for (int k = 1; k <= g.n; ++k) {
        const RowMat cen = centralizer(g, series_at(s, g.n - k + 2));
        if (cen.rows > c2.rows && contains_all(cen, c2, g.p)) best = k;
    }
    return best;
}

inline int z2(const Alg& g) {
    const auto s = series(g);
    int best = 0;
    for (int k = 1; k <= g.n; ++k)
        if (is_abelian(g, series_at(s, g.n - k + 1))) best = k;
    return best;
}

inline std::vector<int> type_sequence(const Alg& g) {
    const auto s = series(g);
    std::vector<int> out;
    const int m = (int)s.size() - 1;
    auto dim_at = [&](int k) { return (k - 1) < (int)s.size() ? s[k - 1].rows : 0; };
    for (int k = 1; k + 1 <= m; ++k) out.push_back(dim_at(k) - dim_at(k + 1));
    return out;
}

}  // namespace flie::fpfast

#endif
