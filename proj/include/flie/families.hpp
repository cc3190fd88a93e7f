#ifndef FLIE_FAMILIES_HPP
#define FLIE_FAMILIES_HPP

#include "flie/algebra.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace flie {

/// Tags for the normal-form families of filiform Lie algebras of dimension <= 7.
enum class FamilyTag { Model, Dim5NonModel, G6, G7, G7Type2, H7Type3 };

struct FamilyParams {
    FamilyTag tag = FamilyTag::Model;
    FieldSpec field = FieldSpec(2);
    std::size_t dim = 0;             // Model only
    std::vector<Scalar> params;      // G6: (a,b,c); G7: (a,b,c,d); Type2/Type3: (a)

    static FamilyParams model(std::size_t n, FieldSpec f) {
        return {FamilyTag::Model, f, n, {}};
    }
    static FamilyParams dim5_nonmodel(FieldSpec f) {
        return {FamilyTag::Dim5NonModel, f, 5, {}};
    }
    static FamilyParams g6(Scalar a, Scalar b, Scalar c) {
        return {FamilyTag::G6, a.field(), 6, {a, b, c}};
    }
    static FamilyParams g7(Scalar a, Scalar b, Scalar c, Scalar d) {
        return {FamilyTag::G7, a.field(), 7, {a, b, c, d}};
    }
    static FamilyParams g7_type2(std::int64_t a, FieldSpec f) {
        return {FamilyTag::G7Type2, f, 7, {Scalar(f, a)}};
    }
    static FamilyParams h7_type3(std::int64_t a, FieldSpec f) {
        return {FamilyTag::H7Type3, f, 7, {Scalar(f, a)}};
    }

    std::string label() const {
        std::ostringstream os;
        switch (tag) {
            case FamilyTag::Model: os << "model" << dim; break;
            case FamilyTag::Dim5NonModel: os << "dim5nm"; break;
            case FamilyTag::G6: os << "g6"; break;
            case FamilyTag::G7: os << "g7"; break;
            case FamilyTag::G7Type2: os << "g7t2"; break;
            case FamilyTag::H7Type3: os << "h7"; break;
        }
        if (!params.empty()) {
            os << "[";
            for (std::size_t i = 0; i < params.size(); ++i)
                os << (i ? "," : "") << params[i].str();
            os << "]";
        }
        os << "@" << field.name();
        return os.str();
    }

    friend bool operator==(const FamilyParams& a, const FamilyParams& b) {
        return a.tag == b.tag && a.field == b.field && a.dim == b.dim && a.params == b.params;
    }

    /// Deterministic ordering: by tag, then parameter residues.
    std::vector<std::int64_t> key() const {
        std::vector<std::int64_t> k{static_cast<std::int64_t>(tag),
                                    static_cast<std::int64_t>(dim)};
        for (const auto& s : params)
            k.push_back(s.field().is_finite() ? s.residue() : 0);
        return k;
    }
};

namespace detail {

inline void add_model_brackets(StructureTable::ConstantMap& c, std::size_t n, FieldSpec f) {
    for (std::size_t i = 2; i + 1 <= n; ++i)
        c[{1, (int)i + 1, (int)i}] = Scalar::one(f);
}

inline void put(StructureTable::ConstantMap& c, int i, int j, int k, const Scalar& v) {
    if (!v.is_zero()) c[{i, j, k}] = v;
}

}  // namespace detail

/// The model algebra: only nonzero brackets [e_1, e_{i+1}] = e_i.
inline StructureTable model_algebra(std::size_t n, FieldSpec field) {
    StructureTable::ConstantMap c;
    detail::add_model_brackets(c, n, field);
    return StructureTable::make(n, field, c, FamilyParams::model(n, field).label());
}

/// The non-model 5-dimensional class: model brackets plus [e_4,e_5] = e_2.
inline StructureTable dim5_nonmodel(FieldSpec field) {
    StructureTable::ConstantMap c;
    detail::add_model_brackets(c, 5, field);
    c[{4, 5, 2}] = Scalar::one(field);
    return StructureTable::make(5, field, c, FamilyParams::dim5_nonmodel(field).label());
}

/// Six-dimensional family: model brackets plus
/// [e_4,e_5] = a e_2, [e_4,e_6] = b e_2 + a e_3, [e_5,e_6] = c e_2 + b e_3 + a e_4.
inline StructureTable g6_algebra(const Scalar& a, const Scalar& b, const Scalar& c) {
    const FieldSpec f = a.field();
    StructureTable::ConstantMap m;
    detail::add_model_brackets(m, 6, f);
    detail::put(m, 4, 5, 2, a);
    detail::put(m, 4, 6, 2, b);
    detail::put(m, 4, 6, 3, a);
    detail::put(m, 5, 6, 2, c);
    detail::put(m, 5, 6, 3, b);
    detail::put(m, 5, 6, 4, a);
    return StructureTable::make(6, f, m, FamilyParams::g6(a, b, c).label());
}

/// Seven-dimensional adapted family: model brackets plus
/// [e_4,e_7] = a e_2, [e_5,e_6] = b e_2, [e_5,e_7] = c e_2 + (a+b) e_3,
/// [e_6,e_7] = d e_2 + c e_3 + (a+b) e_4.
inline StructureTable g7_algebra(const Scalar& a, const Scalar& b, const Scalar& c,
                                 const Scalar& d) {
    const FieldSpec f = a.field();
    const Scalar ab = a + b;
    StructureTable::ConstantMap m;
    detail::add_model_brackets(m, 7, f);
    detail::put(m, 4, 7, 2, a);
    detail::put(m, 5, 6, 2, b);
    detail::put(m, 5, 7, 2, c);
    detail::put(m, 5, 7, 3, ab);
    detail::put(m, 6, 7, 2, d);
    detail::put(m, 6, 7, 3, c);
    detail::put(m, 6, 7, 4, ab);
    return StructureTable::make(7, f, m, FamilyParams::g7(a, b, c, d).label());
}

/// Characteristic-2 type with filiform basis
/// [e_1,e_3] = [e_4,e_6] = [e_5,e_7] = e_2, [e_4,e_7] = [e_5,e_6] = e_3,
/// [e_1,e_5] = e_4, [e_1,e_6] = e_5, [e_1,e_7] = e_6, [e_6,e_7] = e_3 + a e_4.
inline StructureTable g7_type2(std::int64_t a, FieldSpec field) {
    if (field.characteristic() != 2)
        throw WrongCharacteristic("this family exists only in characteristic 2");
    if (a != 0 && a != 1) throw IndexError("parameter must be 0 or 1");
    const Scalar one = Scalar::one(field);
    StructureTable::ConstantMap m;
    m[{1, 3, 2}] = one;
    m[{4, 6, 2}] = one;
    m[{5, 7, 2}] = one;
    m[{4, 7, 3}] = one;
    m[{5, 6, 3}] = one;
    m[{1, 5, 4}] = one;
    m[{1, 6, 5}] = one;
    m[{1, 7, 6}] = one;
    m[{6, 7, 3}] = one;
    if (a) m[{6, 7, 4}] = one;
    return StructureTable::make(7, field, m, FamilyParams::g7_type2(a, field).label());
}

/// Characteristic-2 type with filiform basis
/// [e_3,e_7] = [e_4,e_6] = e_2, [e_1,e_4] = [e_5,e_6] = e_3,
/// [e_5,e_7] = e_4, [e_6,e_7] = e_5, [e_1,e_7] = e_6, [e_4,e_7] = a e_2.
inline StructureTable h7_type3(std::int64_t a, FieldSpec field) {
    if (field.characteristic() != 2)
        throw WrongCharacteristic("this family exists only in characteristic 2");
    if (a != 0 && a != 1) throw IndexError("parameter must be 0 or 1");
    const Scalar one = Scalar::one(field);
    StructureTable::ConstantMap m;
    m[{3, 7, 2}] = one;
    m[{4, 6, 2}] = one;
    m[{1, 4, 3}] = one;
    m[{5, 6, 3}] = one;
    m[{5, 7, 4}] = one;
    m[{6, 7, 5}] = one;
    m[{1, 7, 6}] = one;
    if (a) m[{4, 7, 2}] = one;
    return StructureTable::make(7, field, m, FamilyParams::h7_type3(a, field).label());
}

inline StructureTable build(const FamilyParams& fp) {
    switch (fp.tag) {
        case FamilyTag::Model: return model_algebra(fp.dim, fp.field);
        case FamilyTag::Dim5NonModel: return dim5_nonmodel(fp.field);
        case FamilyTag::G6: return g6_algebra(fp.params[0], fp.params[1], fp.params[2]);
        case FamilyTag::G7:
            return g7_algebra(fp.params[0], fp.params[1], fp.params[2], fp.params[3]);
        case FamilyTag::G7Type2: return g7_type2(fp.params[0].residue(), fp.field);
        case FamilyTag::H7Type3: return h7_type3(fp.params[0].residue(), fp.field);
    }
    throw Error("unknown family tag");
}

}  // namespace flie

#endif
