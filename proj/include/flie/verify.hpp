#ifndef FLIE_VERIFY_HPP
#define FLIE_VERIFY_HPP

#include "flie/classify.hpp"

#include <chrono>
#include <functional>
#include <set>

namespace flie {

struct ClaimResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct VerifyReport {
    std::vector<ClaimResult> claims;
    std::vector<std::string> out_of_scope;
    bool all_pass() const {
        for (const auto& c : claims)
            if (!c.pass) return false;
        return true;
    }
};

struct VerifyScope {
    bool dim5 = true, dim6 = true, dim7 = true, tables = true, witnesses = true;
    std::vector<std::uint32_t> primes;  // empty = per-claim defaults

    static VerifyScope all() { return {}; }
    static VerifyScope only(const std::string& what) {
        VerifyScope s;
        s.dim5 = s.dim6 = s.dim7 = s.tables = s.witnesses = false;
        if (what == "dim5") s.dim5 = true;
        else if (what == "dim6") s.dim6 = true;
        else if (what == "dim7") s.dim7 = true;
        else if (what == "tables") s.tables = true;
        else if (what == "witnesses") s.witnesses = true;
        else if (what == "all") s = VerifyScope{};
        else throw Error("unknown scope '" + what + "'");
        return s;
    }
};

namespace published {

/// Reference d-sequence tables from the classification literature. The rows
/// marked "as published" disagree with direct computation; the verification
/// claims report those discrepancies rather than silently patching them.
inline std::vector<int> d6_row(bool a0, bool b0, bool c0) {
    if (a0 && b0 && c0) return {6, 5, 5, 5, 5, 1};
    if (a0 && b0) return {6, 5, 3, 2, 2, 1};  // as published; computed {6,5,5,4,3,1}
    if (a0) return {6, 5, 4, 4, 2, 1};
    return {6, 5, 3, 2, 2, 1};
}

inline std::vector<int> d7_row(bool a0, bool b0, bool c0, bool d0) {
    if (a0 && b0 && c0 && d0) return {7, 6, 6, 6, 6, 6, 1};
    if (a0 && b0 && c0) return {7, 6, 6, 6, 5, 4, 1};
    if (a0 && b0) return {7, 6, 6, 5, 5, 3, 1};
    if (a0) return {7, 6, 6, 4, 3, 3, 1};
    if (b0) return {7, 6, 5, 5, 5, 2, 1};
    return {7, 6, 5, 4, 3, 2, 1};
}

inline std::vector<int> d7_type2() { return {7, 6, 4, 4, 2, 2, 1}; }
inline std::vector<int> d7_type3() { return {7, 6, 5, 4, 3, 2, 1}; }  // as published; computed {7,6,4,4,2,2,1}

inline std::vector<int> d7_quotient_row(bool ab0, bool c0) {
    if (ab0 && c0) return {6, 5, 5, 5, 5, 1};
    if (ab0) return {6, 5, 5, 4, 3, 1};
    return {6, 5, 4, 4, 2, 1};
}

inline std::vector<int> d7_type3_quotient() { return {6, 5, 4, 3, 2, 1}; }  // as published; computed {6,5,3,2,2,1}

}  // namespace published

namespace detail {

inline std::string seq_str(const std::vector<int>& v) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "}";
    return os.str();
}

class ClaimRunner {
  public:
    explicit ClaimRunner(VerifyReport& report) : report_(report) {}

    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        ClaimResult r;
        r.name = name;
        try {
            auto [pass, detail] = fn();
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report_.claims.push_back(std::move(r));
    }

  private:
    VerifyReport& report_;
};

inline std::vector<std::uint32_t> pick_primes(const VerifyScope& scope,
                                              std::initializer_list<std::uint32_t> defaults) {
    if (scope.primes.empty()) return defaults;
    std::vector<std::uint32_t> out;
    std::set<std::uint32_t> wanted(scope.primes.begin(), scope.primes.end());
    for (auto p : defaults)
        if (wanted.count(p)) out.push_back(p);
    return out;
}

}  // namespace detail

/// Recompute the classification statements from scratch and compare against
/// the embedded expected table; per-claim pass/fail with timings. Failures are
/// report content, not errors.
inline VerifyReport verify_paper(const VerifyScope& scope = {}) {
    VerifyReport report;
    detail::ClaimRunner runner(report);

    report.out_of_scope = {
        "counts of 8- and 9-dimensional filiform Lie algebras over F_2 (47 and 124): not "
        "reproduced at desk scale",
        "statements over algebraically closed fields: checked only through their prime-field "
        "shadows"};

    if (scope.dim5) {
        for (auto p : detail::pick_primes(scope, {2, 3, 5})) {
            runner.run("dim5/F_" + std::to_string(p) + ": 2 isomorphism and 2 isotopism classes",
                       [p]() -> std::pair<bool, std::string> {
                           auto rep = classify_dim(5, p, true);
                           const bool counts =
                               rep.iso_classes.size() == 2 && rep.isotopy_classes.size() == 2;
                           const auto d_model = d_sequence(model_algebra(5, FieldSpec(p)));
                           const auto d_nm = d_sequence(dim5_nonmodel(FieldSpec(p)));
                           const bool d4 = d_model[3] == 4 && d_nm[3] == 2;
                           return {counts && d4,
                                   "iso=" + std::to_string(rep.iso_classes.size()) +
                                       " isotopy=" + std::to_string(rep.isotopy_classes.size()) +
                                       " d4=" + std::to_string(d_model[3]) + "/" +
                                       std::to_string(d_nm[3])};
                       });
        }
    }

    if (scope.dim6) {
        for (auto p : detail::pick_primes(scope, {2, 3, 5, 7})) {
            runner.run("dim6/F_" + std::to_string(p) + ": isomorphism class count",
                       [p]() -> std::pair<bool, std::string> {
                           auto rep = classify_dim(6, p, false);
                           const std::size_t expect = p == 2 ? 6 : 5;
                           return {rep.iso_classes.size() == expect,
                                   "found " + std::to_string(rep.iso_classes.size()) +
                                       ", expected " + std::to_string(expect)};
                       });
        }
        runner.run("dim6/F_2: the six representatives", []() -> std::pair<bool, std::string> {
            auto rep = classify_dim(6, 2, false);
            std::set<std::string> found, expected;
            for (const auto& cls : rep.iso_classes) found.insert(cls.representative.label());
            const FieldSpec f2(2);
            for (auto t : std::vector<std::array<int, 3>>{
                     {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {1, 1, 0}})
                expected.insert(FamilyParams::g6(Scalar(f2, t[0]), Scalar(f2, t[1]),
                                                 Scalar(f2, t[2]))
                                    .label());
            return {found == expected, "representatives match the expected list"};
        });
        for (auto p : detail::pick_primes(scope, {2, 3, 5})) {
            runner.run("dim6/F_" + std::to_string(p) + ": 5 isotopism classes",
                       [p]() -> std::pair<bool, std::string> {
                           auto rep = classify_dim(6, p, true);
                           return {rep.isotopy_classes.size() == 5,
                                   "found " + std::to_string(rep.isotopy_classes.size())};
                       });
        }
    }

    if (scope.dim7) {
        for (auto p : detail::pick_primes(scope, {2, 3, 5, 7, 11, 13})) {
            runner.run("dim7/F_" + std::to_string(p) + ": isomorphism class count",
                       [p]() -> std::pair<bool, std::string> {
                           auto rep = classify_dim(7, p, false);
                           const std::size_t expect = p == 2 ? 15 : p + 8;
                           return {rep.iso_classes.size() == expect,
                                   "found " + std::to_string(rep.iso_classes.size()) +
                                       ", expected " + std::to_string(expect)};
                       });
        }
        runner.run("dim7/F_2: the fifteen representatives", []() -> std::pair<bool, std::string> {
            auto rep = classify_dim(7, 2, false);
            std::set<std::string> found, expected;
            for (const auto& cls : rep.iso_classes) found.insert(cls.representative.label());
            const FieldSpec f2(2);
            auto g7l = [&](int a, int b, int c, int d) {
                return FamilyParams::g7(Scalar(f2, a), Scalar(f2, b), Scalar(f2, c),
                                        Scalar(f2, d))
                    .label();
            };
            for (auto t : std::vector<std::array<int, 4>>{{0, 0, 0, 0},
                                                          {0, 0, 0, 1},
                                                          {0, 0, 1, 0},
                                                          {0, 0, 1, 1},
                                                          {0, 1, 0, 0},
                                                          {0, 1, 1, 0},
                                                          {1, 0, 0, 0},
                                                          {1, 0, 1, 0},
                                                          {1, 0, 1, 1},
                                                          {1, 1, 0, 0},
                                                          {1, 1, 1, 0}})
                expected.insert(g7l(t[0], t[1], t[2], t[3]));
            expected.insert(FamilyParams::g7_type2(0, f2).label());
            expected.insert(FamilyParams::g7_type2(1, f2).label());
            expected.insert(FamilyParams::h7_type3(0, f2).label());
            expected.insert(FamilyParams::h7_type3(1, f2).label());
            std::string diff;
            for (const auto& e : expected)
                if (!found.count(e)) diff += " missing:" + e;
            for (const auto& f : found)
                if (!expected.count(f)) diff += " extra:" + f;
            return {found == expected, diff.empty() ? "exact match" : diff};
        });
        for (auto p : detail::pick_primes(scope, {2, 3, 5, 7})) {
            runner.run("dim7/F_" + std::to_string(p) + ": isotopism class count",
                       [p]() -> std::pair<bool, std::string> {
                           auto rep = classify_dim(7, p, true);
                           const std::size_t expect = p == 2 ? 10 : 8;
                           return {rep.isotopy_classes.size() == expect,
                                   "found " + std::to_string(rep.isotopy_classes.size()) +
                                       ", expected " + std::to_string(expect)};
                       });
        }
    }

    if (scope.tables) {
        for (auto p : detail::pick_primes(scope, {2, 3, 5})) {
            runner.run("published d-table, 6-dim family, F_" + std::to_string(p),
                       [p]() -> std::pair<bool, std::string> {
                           const FieldSpec f(p);
                           std::size_t bad = 0;
                           std::string first;
                           for (std::int64_t a = 0; a < p; ++a)
                               for (std::int64_t b = 0; b < p; ++b)
                                   for (std::int64_t c = 0; c < p; ++c) {
                                       const auto got = d_sequence(g6_algebra(
                                           Scalar(f, a), Scalar(f, b), Scalar(f, c)));
                                       const auto want =
                                           published::d6_row(a == 0, b == 0, c == 0);
                                       if (got != want) {
                                           ++bad;
                                           if (first.empty())
                                               first = "(" + std::to_string(a) + "," +
                                                       std::to_string(b) + "," +
                                                       std::to_string(c) + "): computed " +
                                                       detail::seq_str(got) + " vs published " +
                                                       detail::seq_str(want);
                                       }
                                   }
                           return {bad == 0,
                                   bad ? std::to_string(bad) + " mismatches, first " + first
                                       : "all rows match"};
                       });
        }
        for (auto p : detail::pick_primes(scope, {2, 3})) {
            runner.run("published d-table, 7-dim family, F_" + std::to_string(p),
                       [p]() -> std::pair<bool, std::string> {
                           const FieldSpec f(p);
                           std::size_t bad = 0;
                           for (std::int64_t a = 0; a < p; ++a)
                               for (std::int64_t b = 0; b < p; ++b)
                                   for (std::int64_t c = 0; c < p; ++c)
                                       for (std::int64_t d = 0; d < p; ++d) {
                                           const auto got = d_sequence(
                                               g7_algebra(Scalar(f, a), Scalar(f, b),
                                                          Scalar(f, c), Scalar(f, d)));
                                           if (got != published::d7_row(a == 0, b == 0, c == 0,
                                                                        d == 0))
                                               ++bad;
                                       }
                           return {bad == 0, bad ? std::to_string(bad) + " mismatches"
                                                 : "all rows match"};
                       });
            runner.run("published quotient d-table, 7-dim family, F_" + std::to_string(p),
                       [p]() -> std::pair<bool, std::string> {
                           const FieldSpec f(p);
                           std::size_t bad = 0;
                           for (std::int64_t a = 0; a < p; ++a)
                               for (std::int64_t b = 0; b < p; ++b)
                                   for (std::int64_t c = 0; c < p; ++c)
                                       for (std::int64_t d = 0; d < p; ++d) {
                                           const auto g = g7_algebra(Scalar(f, a), Scalar(f, b),
                                                                     Scalar(f, c), Scalar(f, d));
                                           const auto tower = central_quotient_tower(g, 1);
                                           const auto got = d_sequence(tower[1]);
                                           const bool ab0 = (a + b) % p == 0;
                                           if (got != published::d7_quotient_row(ab0, c == 0))
                                               ++bad;
                                       }
                           return {bad == 0, bad ? std::to_string(bad) + " mismatches"
                                                 : "all rows match"};
                       });
        }
        runner.run("published d, characteristic-2 type 2", []() -> std::pair<bool, std::string> {
            const FieldSpec f2(2);
            for (int a : {0, 1})
                if (d_sequence(g7_type2(a, f2)) != published::d7_type2())
                    return {false, "mismatch at a=" + std::to_string(a)};
            return {true, "both rows match"};
        });
        runner.run("published d, characteristic-2 type 3", []() -> std::pair<bool, std::string> {
            const FieldSpec f2(2);
            std::string detail;
            bool ok = true;
            for (int a : {0, 1}) {
                const auto got = d_sequence(h7_type3(a, f2));
                if (got != published::d7_type3()) {
                    ok = false;
                    detail = "computed " + detail::seq_str(got) + " vs published " +
                             detail::seq_str(published::d7_type3());
                }
            }
            return {ok, ok ? "both rows match" : detail};
        });
        runner.run("published quotient d, characteristic-2 type 3",
                   []() -> std::pair<bool, std::string> {
                       const FieldSpec f2(2);
                       std::string detail;
                       bool ok = true;
                       for (int a : {0, 1}) {
                           const auto tower = central_quotient_tower(h7_type3(a, f2), 1);
                           const auto got = d_sequence(tower[1]);
                           if (got != published::d7_type3_quotient()) {
                               ok = false;
                               detail = "computed " + detail::seq_str(got) + " vs published " +
                                        detail::seq_str(published::d7_type3_quotient());
                           }
                       }
                       return {ok, ok ? "both rows match" : detail};
                   });
        runner.run("recomputed 6-dim d-table consistent with 7-dim central quotients",
                   []() -> std::pair<bool, std::string> {
                       // d(g7_abcd / center) must match the recomputed 6-dim value at
                       // parameters (0, a+b, c); checked over F_3
                       const FieldSpec f(3);
                       for (std::int64_t a = 0; a < 3; ++a)
                           for (std::int64_t b = 0; b < 3; ++b)
                               for (std::int64_t c = 0; c < 3; ++c)
                                   for (std::int64_t d = 0; d < 3; ++d) {
                                       const auto g = g7_algebra(Scalar(f, a), Scalar(f, b),
                                                                 Scalar(f, c), Scalar(f, d));
                                       const auto q = central_quotient_tower(g, 1)[1];
                                       const auto direct = d_sequence(q);
                                       const auto via6 = d_sequence(
                                           g6_algebra(Scalar(f, 0), Scalar(f, (a + b) % 3),
                                                      Scalar(f, c)));
                                       if (direct != via6) return {false, "inconsistent"};
                                   }
                       return {true, "quotient reduction agrees"};
                   });
    }

    if (scope.witnesses) {
        for (auto p : detail::pick_primes(scope, {2, 3, 5, 7, 11, 13})) {
            runner.run("explicit isotopy witness battery over F_" + std::to_string(p),
                       [p]() -> std::pair<bool, std::string> {
                           std::size_t count = 0;
                           for (std::size_t dim : {std::size_t{6}, std::size_t{7}}) {
                               // construction verifies each witness and throws on failure
                               auto list = paper_isotopy_witnesses(dim, FieldSpec(p));
                               for (const auto& nw : list) {
                                   const auto a = build(nw.source), b = build(nw.target);
                                   if (!verify_isotopism(a, b, nw.witness.f, nw.witness.g,
                                                         nw.witness.h))
                                       return {false, "witness failed: " + nw.source.label()};
                                   if (d_sequence(a) != d_sequence(b))
                                       return {false,
                                               "d-sequence differs across a verified witness"};
                                   ++count;
                               }
                           }
                           return {true, std::to_string(count) + " witnesses verified"};
                       });
            if (p == 2) continue;
            runner.run("6-dim scaling isomorphisms over F_" + std::to_string(p),
                       [p]() -> std::pair<bool, std::string> {
                           const FieldSpec f(p);
                           for (std::int64_t c = 1; c < p; ++c)
                               for (std::int64_t C = 1; C < p; ++C) {
                                   const auto src = FamilyParams::g6(
                                       Scalar::zero(f), Scalar::zero(f), Scalar(f, c));
                                   const auto tgt = FamilyParams::g6(
                                       Scalar::zero(f), Scalar::zero(f), Scalar(f, C));
                                   const Matrix w = detail::g6_scaling_witness(src, tgt);
                                   if (!verify_isomorphism(build(src), build(tgt), w))
                                       return {false, "scaling failed"};
                               }
                           return {true, "all scalings verify"};
                       });
        }
    }

    return report;
}
}  // namespace flie

#endif
