#ifndef FLIE_FIELD_HPP
#define FLIE_FIELD_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace flie {

using Rational = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidField : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct UnsupportedField : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct NotAnIdeal : Error { using Error::Error; };
struct NotFiliform : Error { using Error::Error; };
struct WrongCharacteristic : Error { using Error::Error; };
struct UnsupportedDim : Error { using Error::Error; };
struct OutOfScope : Error { using Error::Error; };
struct SearchBudgetExceeded : Error { using Error::Error; };

struct JacobiViolation : Error {
    int i, j, k;
    JacobiViolation(int i_, int j_, int k_)
        : Error("Jacobi identity fails on basis triple (" + std::to_string(i_) + "," +
                std::to_string(j_) + "," + std::to_string(k_) + ")"),
          i(i_), j(j_), k(k_) {}
};

struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& reason)
        : Error("parse error at line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

/// A prime field F_p (characteristic p) or the rationals (characteristic 0).
class FieldSpec {
  public:
    explicit FieldSpec(std::uint32_t characteristic) : char_(characteristic) {
        if (char_ != 0 && !is_prime(char_))
            throw InvalidField("characteristic must be 0 or a prime, got " +
                               std::to_string(char_));
    }

    static FieldSpec rationals() { return FieldSpec(0); }

    std::uint32_t characteristic() const { return char_; }
    bool is_finite() const { return char_ != 0; }

    std::string name() const {
        return char_ == 0 ? std::string("Q") : "F_" + std::to_string(char_);
    }

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
    friend auto operator<=>(const FieldSpec&, const FieldSpec&) = default;

  private:
    static bool is_prime(std::uint32_t n) {
        if (n < 2) return false;
        for (std::uint32_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

    std::uint32_t char_;
};

/// Exact field element in canonical form: residue in [0, p-1] over F_p,
/// reduced fraction with positive denominator over Q.
class Scalar {
  public:
    Scalar() : field_(0), v_(Rational(0)) {}

    Scalar(FieldSpec field, std::int64_t value) : field_(field), v_(std::int64_t{0}) {
        if (field_.is_finite()) {
            const std::int64_t p = field_.characteristic();
            std::int64_t r = value % p;
            if (r < 0) r += p;
            v_ = r;
        } else {
            v_ = Rational(value);
        }
    }

    Scalar(FieldSpec field, Rational value) : field_(field), v_(std::int64_t{0}) {
        if (field_.is_finite())
            throw InvalidField("rational-valued scalar requires characteristic 0");
        v_ = std::move(value);  // cpp_rational keeps itself reduced, denominator > 0
    }

    static Scalar zero(FieldSpec field) { return Scalar(field, 0); }
    static Scalar one(FieldSpec field) { return Scalar(field, 1); }

    FieldSpec field() const { return field_; }

    bool is_zero() const {
        if (field_.is_finite()) return std::get<std::int64_t>(v_) == 0;
        return std::get<Rational>(v_) == 0;
    }

    std::int64_t residue() const {
        if (!field_.is_finite()) throw InvalidField("residue() requires a finite field");
        return std::get<std::int64_t>(v_);
    }

    const Rational& rational() const {
        if (field_.is_finite()) throw InvalidField("rational() requires characteristic 0");
        return std::get<Rational>(v_);
    }

    Scalar operator-() const {
        if (field_.is_finite()) return Scalar(field_, -residue());
        return Scalar(field_, Rational(-rational()));
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        a.require_same_field(b);
        if (a.field_.is_finite()) return Scalar(a.field_, a.residue() + b.residue());
        return Scalar(a.field_, Rational(a.rational() + b.rational()));
    }

    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        a.require_same_field(b);
        if (a.field_.is_finite()) return Scalar(a.field_, a.residue() * b.residue());
        return Scalar(a.field_, Rational(a.rational() * b.rational()));
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar inv() const {
        if (is_zero()) throw DivisionByZero("inverse of zero");
        if (field_.is_finite()) {
            const std::int64_t p = field_.characteristic();
            return Scalar(field_, pow_mod(residue(), p - 2, p));
        }
        return Scalar(field_, Rational(1 / rational()));
    }

    Scalar pow(std::uint64_t e) const {
        Scalar acc = one(field_), base = *this;
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.field_ == b.field_ && a.v_ == b.v_;
    }

    std::string str() const {
        if (field_.is_finite()) return std::to_string(residue());
        return rational().str();
    }

  private:
    void require_same_field(const Scalar& o) const {
        if (field_ != o.field_) throw InvalidField("scalars from different fields");
    }

    static std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t p) {
        std::int64_t acc = 1 % p;
        b %= p;
        while (e) {
            if (e & 1) acc = acc * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return acc;
    }

    FieldSpec field_;
    std::variant<std::int64_t, Rational> v_;
};

inline Scalar field_inv(const Scalar& x) { return x.inv(); }

/// Euler criterion: x is a square in F_p (p an odd prime) iff x^((p-1)/2) is 0 or 1.
inline bool is_square(const Scalar& x) {
    if (!x.field().is_finite())
        throw UnsupportedField("squareness test is defined over odd prime fields only");
    const std::uint32_t p = x.field().characteristic();
    if (p == 2)
        throw UnsupportedField("squareness test requires an odd prime (every element of F_2 is a square)");
    const Scalar e = x.pow((p - 1) / 2);
    return e.is_zero() || e == Scalar::one(x.field());
}

/// Smallest non-square residue of F_p, p an odd prime.
inline Scalar least_nonsquare(FieldSpec field) {
    const std::uint32_t p = field.characteristic();
    if (p < 3) throw UnsupportedField("non-squares exist only for odd primes");
    for (std::uint32_t q = 2; q < p; ++q) {
        Scalar s(field, q);
        if (!is_square(s)) return s;
    }
    throw Error("unreachable: every odd prime field has a non-square");
}

}  // namespace flie

#endif
