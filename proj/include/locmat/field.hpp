#pragma once

#include <compare>
#include <cstdint>
#include <random>
#include <string>

#include <gmpxx.h>

#include "locmat/error.hpp"

namespace locmat {

enum class FieldKind { Rationals, PrimeField };

/// Ground field description: the rationals, or GF(p) for a prime p.
struct FieldSpec {
    FieldKind kind = FieldKind::Rationals;
    long characteristic = 0; // 0 for the rationals, p for GF(p)

    static FieldSpec rationals() { return FieldSpec{FieldKind::Rationals, 0}; }
    static FieldSpec gf(long p);

    bool operator==(const FieldSpec&) const = default;
    std::string str() const;
};

bool is_prime(long n);

/// Exact field scalar. Rationals are arbitrary-precision fractions; GF(p)
/// values are residues stored canonically in [0, p).
class Scalar {
public:
    explicit Scalar(FieldSpec field) : field_(field), value_(0) {}

    static Scalar zero(FieldSpec field) { return Scalar(field); }
    static Scalar one(FieldSpec field) { return from_int(field, 1); }
    static Scalar from_int(FieldSpec field, long num, long den = 1);
    static Scalar from_mpq(FieldSpec field, mpq_class v);
    /// Parses "a" or "a/b" with optional leading '-'.
    static Scalar from_string(FieldSpec field, const std::string& text);

    const FieldSpec& field() const { return field_; }
    const mpq_class& value() const { return value_; }

    bool is_zero() const { return value_ == 0; }
    bool is_one() const { return value_ == 1; }
    /// True for negative rationals; GF(p) residues are never negative.
    bool is_negative() const { return sgn(value_) < 0; }

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator-() const;
    Scalar inverse() const; // throws NotInvertible on zero
    Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }

    bool operator==(const Scalar& o) const { return field_ == o.field_ && value_ == o.value_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    /// Deterministic total order (used for canonical printing and merging).
    bool operator<(const Scalar& o) const { return value_ < o.value_; }

    std::string str() const;
    /// str() of the absolute value.
    std::string str_abs() const;

private:
    Scalar(FieldSpec field, mpq_class v) : field_(field), value_(std::move(v)) { reduce(); }
    void reduce();

    FieldSpec field_;
    mpq_class value_;
};

inline void check_same_field(const FieldSpec& a, const FieldSpec& b) {
    if (!(a == b)) fail(Errc::FieldMismatch, "field mismatch: " + a.str() + " vs " + b.str());
}

/// Deterministic scalar draw for seeded search stages. Rationals come out as
/// small integers in [-3, 3]; GF(p) values are uniform residues.
Scalar random_scalar(FieldSpec field, std::mt19937_64& rng);

} // namespace locmat
