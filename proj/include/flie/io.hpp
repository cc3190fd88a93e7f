#ifndef FLIE_IO_HPP
#define FLIE_IO_HPP

#include "flie/classify.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

namespace flie {

/// Text format, one algebra per file:
///   FLIE 1
///   dim <n>
///   char <p>           (0 means exact rationals)
///   label <text>       (optional)
///   <i> <j> <k> <coeff>   one line per nonzero c_{ij}^k, i < j required
/// '#' starts a comment; omitted entries are zero; coefficients are residues
/// in [0, p-1] over F_p and integers or num/den fractions over the rationals.
inline std::string render_algebra(const StructureTable& g) {
    std::ostringstream os;
    os << "FLIE 1\n";
    os << "dim " << g.dim() << "\n";
    os << "char " << g.field().characteristic() << "\n";
    if (!g.label().empty()) os << "label " << g.label() << "\n";
    for (const auto& [key, value] : g.nonzero_constants()) {
        const auto& [i, j, k] = key;
        os << i << " " << j << " " << k << " " << value.str() << "\n";
    }
    return os.str();
}

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char)s[b])) ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline Scalar parse_coeff(const std::string& tok, FieldSpec field, int line) {
    try {
        if (field.is_finite()) {
            std::size_t pos = 0;
            const long long v = std::stoll(tok, &pos);
            if (pos != tok.size()) throw ParseError(line, "bad coefficient '" + tok + "'");
            if (v < 0 || v >= field.characteristic())
                throw ParseError(line, "coefficient out of canonical range [0, p-1]");
            return Scalar(field, v);
        }
        return Scalar(field, Rational(tok));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line, "bad coefficient '" + tok + "'");
    }
}

}  // namespace detail

inline StructureTable parse_algebra(const std::string& text, bool unchecked = false) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::vector<std::pair<int, std::string>> lines;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        raw = detail::strip(raw);
        if (!raw.empty()) lines.push_back({lineno, raw});
    }
    if (lines.empty()) throw ParseError(1, "empty input");
    if (lines[0].second != "FLIE 1")
        throw ParseError(lines[0].first, "expected header 'FLIE 1'");
    std::size_t at = 1;
    auto expect_kv = [&](const std::string& keyword) -> std::pair<int, std::string> {
        if (at >= lines.size())
            throw ParseError(lineno + 1, "missing '" + keyword + "' line");
        auto [ln, text_line] = lines[at];
        std::istringstream ls(text_line);
        std::string kw, rest;
        ls >> kw;
        if (kw != keyword) throw ParseError(ln, "expected '" + keyword + "'");
        std::getline(ls, rest);
        ++at;
        return {ln, detail::strip(rest)};
    };
    const auto [dim_line, dim_str] = expect_kv("dim");
    const auto [char_line, char_str] = expect_kv("char");
    std::size_t n = 0;
    std::uint32_t p = 0;
    try {
        n = std::stoul(dim_str);
    } catch (...) {
        throw ParseError(dim_line, "bad dimension '" + dim_str + "'");
    }
    try {
        p = std::stoul(char_str);
    } catch (...) {
        throw ParseError(char_line, "bad characteristic '" + char_str + "'");
    }
    FieldSpec field(0);
    try {
        field = FieldSpec(p);
    } catch (const InvalidField& e) {
        throw ParseError(char_line, e.what());
    }
    std::string label;
    if (at < lines.size() && lines[at].second.rfind("label", 0) == 0 &&
        (lines[at].second.size() == 5 || std::isspace((unsigned char)lines[at].second[5]))) {
        label = detail::strip(lines[at].second.substr(5));
        ++at;
    }
    StructureTable::ConstantMap constants;
    for (; at < lines.size(); ++at) {
        auto [ln, text_line] = lines[at];
        std::istringstream ls(text_line);
        int i = 0, j = 0, k = 0;
        std::string coeff;
        if (!(ls >> i >> j >> k >> coeff))
            throw ParseError(ln, "expected '<i> <j> <k> <coeff>'");
        std::string extra;
        if (ls >> extra) throw ParseError(ln, "trailing content '" + extra + "'");
        if (i < 1 || j < 1 || k < 1 || i > (int)n || j > (int)n || k > (int)n)
            throw ParseError(ln, "index out of range");
        if (i >= j) throw ParseError(ln, "entries require i < j");
        if (constants.count({i, j, k}))
            throw ParseError(ln, "duplicate entry for (" + std::to_string(i) + "," +
                                     std::to_string(j) + "," + std::to_string(k) + ")");
        constants[{i, j, k}] = detail::parse_coeff(coeff, field, ln);
    }
    if (unchecked) return StructureTable::make_unchecked(n, field, constants, label);
    return StructureTable::make(n, field, constants, label);
}

inline StructureTable load_algebra_file(const std::string& path, bool unchecked = false) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_algebra(buffer.str(), unchecked);
}

inline void save_algebra_file(const StructureTable& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << render_algebra(g);
}

/// FNV-1a content hash of the canonical rendering, for report references.
inline std::string content_hash(const StructureTable& g) {
    const std::string text = render_algebra(g);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// ----- family labels (used by reports to reference algebras) -----

/// Parse a label of the shape emitted by FamilyParams::label(), e.g.
/// "g7[1,0,2,3]@F_5", "model6@F_3", "h7[1]@F_2".
inline FamilyParams parse_family_label(const std::string& label) {
    const auto atpos = label.rfind('@');
    if (atpos == std::string::npos) throw Error("bad family label '" + label + "'");
    const std::string fieldpart = label.substr(atpos + 1);
    FieldSpec field(0);
    if (fieldpart == "Q")
        field = FieldSpec::rationals();
    else if (fieldpart.rfind("F_", 0) == 0)
        field = FieldSpec((std::uint32_t)std::stoul(fieldpart.substr(2)));
    else
        throw Error("bad field in label '" + label + "'");
    std::string head = label.substr(0, atpos);
    std::vector<Scalar> params;
    const auto lb = head.find('[');
    if (lb != std::string::npos) {
        if (head.back() != ']') throw Error("bad label '" + label + "'");
        std::string inside = head.substr(lb + 1, head.size() - lb - 2);
        head = head.substr(0, lb);
        std::istringstream ps(inside);
        std::string tok;
        while (std::getline(ps, tok, ','))
            params.push_back(field.is_finite() ? Scalar(field, std::stoll(tok))
                                               : Scalar(field, Rational(tok)));
    }
    if (head == "g6" && params.size() == 3)
        return FamilyParams::g6(params[0], params[1], params[2]);
    if (head == "g7" && params.size() == 4)
        return FamilyParams::g7(params[0], params[1], params[2], params[3]);
    if (head == "g7t2" && params.size() == 1)
        return FamilyParams::g7_type2(params[0].residue(), field);
    if (head == "h7" && params.size() == 1)
        return FamilyParams::h7_type3(params[0].residue(), field);
    if (head == "dim5nm") return FamilyParams::dim5_nonmodel(field);
    if (head.rfind("model", 0) == 0)
        return FamilyParams::model(std::stoul(head.substr(5)), field);
    throw Error("unknown family label '" + label + "'");
}

// ----- JSON report serialization -----

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(row);
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()},
                {"char", m.field().characteristic()}, {"entries", rows}};
}

inline Matrix matrix_from_json(const json& j) {
    const FieldSpec field(j.at("char").get<std::uint32_t>());
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), field);
    const auto& rows = j.at("entries");
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const std::string tok = rows[i][c].get<std::string>();
            m.at(i, c) = field.is_finite() ? Scalar(field, std::stoll(tok))
                                           : Scalar(field, Rational(tok));
        }
    return m;
}

inline json fingerprint_to_json(const Fingerprint& fp) {
    return json{{"dim", fp.dim},   {"char", fp.characteristic}, {"type", fp.type_seq},
                {"d0", fp.d0},     {"d1", fp.d1},               {"d2", fp.d2},
                {"z1", fp.z1},     {"z2", fp.z2}};
}

inline json report_to_json(const ClassificationReport& r) {
    json out;
    out["tool_version"] = r.tool_version;
    out["dim"] = r.dim;
    out["char"] = r.characteristic;
    out["candidate_count"] = r.candidate_count;
    out["seed"] = r.seed;
    out["timings"] = {{"iso_seconds", r.iso_seconds}, {"isotopy_seconds", r.isotopy_seconds}};
    if (r.expected_iso) out["expected_iso_classes"] = *r.expected_iso;
    if (r.expected_isotopy) out["expected_isotopy_classes"] = *r.expected_isotopy;
    out["match"] = r.match;

    json classes = json::array();
    for (const auto& cls : r.iso_classes) {
        json c;
        c["representative"] = cls.representative.label();
        c["representative_hash"] = content_hash(build(cls.representative));
        json members = json::array();
        for (const auto& m : cls.members) members.push_back(m.label());
        c["members"] = members;
        c["fingerprint"] = fingerprint_to_json(cls.fingerprint);
        json merges = json::array();
        for (const auto& m : cls.merges) {
            json g{{"member", m.member},
                   {"representative", m.representative},
                   {"provenance", to_string(m.provenance)},
                   {"rule", m.rule}};
            if (m.witness) g["witness"] = matrix_to_json(m.witness->F);
            merges.push_back(g);
        }
        c["merges"] = merges;
        classes.push_back(c);
    }
    out["iso_classes"] = classes;

    json seps = json::array();
    for (const auto& s : r.iso_separations)
        seps.push_back(json{{"a", s.rep_a},
                            {"b", s.rep_b},
                            {"certificate", to_string(s.certificate)},
                            {"detail", s.detail}});
    out["iso_separations"] = seps;

    if (r.isotopy_computed) {
        json iclasses = json::array();
        for (const auto& cls : r.isotopy_classes) {
            json c{{"representative", cls.representative}, {"members", cls.members}};
            json merges = json::array();
            for (const auto& m : cls.merges)
                merges.push_back(json{{"member", m.member},
                                      {"representative", m.representative},
                                      {"f", matrix_to_json(m.witness.f)},
                                      {"g", matrix_to_json(m.witness.g)},
                                      {"h", matrix_to_json(m.witness.h)},
                                      {"source", m.witness.source},
                                      {"target", m.witness.target}});
            c["merges"] = merges;
            iclasses.push_back(c);
        }
        out["isotopy_classes"] = iclasses;
        json iseps = json::array();
        for (const auto& s : r.isotopy_separations)
            iseps.push_back(json{{"a", s.rep_a},
                                 {"b", s.rep_b},
                                 {"certificate", to_string(s.certificate)},
                                 {"detail", s.detail}});
        out["isotopy_separations"] = iseps;
    }
    return out;
}

/// Re-verify every witness embedded in a serialized report against freshly
/// rebuilt algebras. Returns the number of re-verified witnesses; throws on
/// any failure.
inline std::size_t reverify_report(const json& report) {
    std::size_t count = 0;
    auto rebuild = [](const std::string& label) { return build(parse_family_label(label)); };
    for (const auto& cls : report.at("iso_classes")) {
        for (const auto& m : cls.at("merges")) {
            if (!m.contains("witness")) continue;
            const StructureTable src = rebuild(m.at("member").get<std::string>());
            const StructureTable tgt = rebuild(m.at("representative").get<std::string>());
            if (!verify_isomorphism(src, tgt, matrix_from_json(m.at("witness"))))
                throw Error("re-verification failed for a stored isomorphism witness");
            ++count;
        }
    }
    if (report.contains("isotopy_classes"))
        for (const auto& cls : report.at("isotopy_classes"))
            for (const auto& m : cls.at("merges")) {
                const StructureTable src = rebuild(m.at("source").get<std::string>());
                const StructureTable tgt = rebuild(m.at("target").get<std::string>());
                if (!verify_isotopism(src, tgt, matrix_from_json(m.at("f")),
                                      matrix_from_json(m.at("g")), matrix_from_json(m.at("h"))))
                    throw Error("re-verification failed for a stored isotopism witness");
                ++count;
            }
    return count;
}

/// Plain-text summary mirroring the expected-count statements.
inline std::string report_summary(const ClassificationReport& r) {
    std::ostringstream os;
    os << "classification of " << r.dim << "-dimensional filiform Lie algebras over F_"
       << r.characteristic << "\n";
    os << "  candidates: " << r.candidate_count << "\n";
    os << "  isomorphism classes: " << r.iso_classes.size();
    if (r.expected_iso) os << " (expected " << *r.expected_iso << ")";
    os << "\n  representatives:";
    for (const auto& cls : r.iso_classes) os << " " << cls.representative.label();
    os << "\n";
    if (r.isotopy_computed) {
        os << "  isotopism classes: " << r.isotopy_classes.size();
        if (r.expected_isotopy) os << " (expected " << *r.expected_isotopy << ")";
        os << "\n  isotopy representatives:";
        for (const auto& cls : r.isotopy_classes) os << " " << cls.representative;
        os << "\n";
        std::size_t heuristic = 0;
        for (const auto& s : r.isotopy_separations)
            if (s.certificate == SeparationCert::HeuristicOnly) ++heuristic;
        if (heuristic)
            os << "  separations labeled HeuristicOnly: " << heuristic
               << " (not certified by invariants)\n";
    }
    os << "  match: " << (r.match ? "yes" : "NO") << "\n";
    return os.str();
}

}  // namespace flie

#endif
