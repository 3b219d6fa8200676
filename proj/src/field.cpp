#include "locmat/field.hpp"

namespace locmat {

bool is_prime(long n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (long d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

FieldSpec FieldSpec::gf(long p) {
    if (!is_prime(p)) fail(Errc::IndexOutOfRange, "characteristic must be prime, got " + std::to_string(p));
    return FieldSpec{FieldKind::PrimeField, p};
}

std::string FieldSpec::str() const {
    return kind == FieldKind::Rationals ? "q" : "gf:" + std::to_string(characteristic);
}

void Scalar::reduce() {
    value_.canonicalize();
    if (field_.kind == FieldKind::PrimeField) {
        const long p = field_.characteristic;
        mpz_class den = value_.get_den();
        mpz_class num = value_.get_num();
        mpz_class pz(p);
        if (den != 1) {
            // invert the denominator mod p
            mpz_class dred = den % pz;
            if (dred < 0) dred += pz;
            if (dred == 0) fail(Errc::NotInvertible, "denominator divisible by the characteristic");
            mpz_class inv;
            mpz_invert(inv.get_mpz_t(), dred.get_mpz_t(), pz.get_mpz_t());
            num *= inv;
        }
        num %= pz;
        if (num < 0) num += pz;
        value_ = mpq_class(num);
    }
}

Scalar Scalar::from_int(FieldSpec field, long num, long den) {
    if (den == 0) fail(Errc::NotInvertible, "zero denominator");
    return Scalar(field, mpq_class(num, den));
}

Scalar Scalar::from_mpq(FieldSpec field, mpq_class v) { return Scalar(field, std::move(v)); }

Scalar Scalar::from_string(FieldSpec field, const std::string& text) {
    mpq_class v;
    if (v.set_str(text, 10) != 0) fail(Errc::SyntaxError, "bad scalar literal: " + text);
    if (v.get_den() == 0) fail(Errc::NotInvertible, "zero denominator in scalar literal: " + text);
    return Scalar(field, v);
}

Scalar Scalar::operator+(const Scalar& o) const {
    check_same_field(field_, o.field_);
    return Scalar(field_, value_ + o.value_);
}

Scalar Scalar::operator-(const Scalar& o) const {
    check_same_field(field_, o.field_);
    return Scalar(field_, value_ - o.value_);
}

Scalar Scalar::operator*(const Scalar& o) const {
    check_same_field(field_, o.field_);
    return Scalar(field_, value_ * o.value_);
}

Scalar Scalar::operator-() const { return Scalar(field_, -value_); }

Scalar Scalar::inverse() const {
    if (is_zero()) fail(Errc::NotInvertible, "inverse of zero");
    return Scalar(field_, 1 / value_);
}

std::string Scalar::str() const { return value_.get_str(); }

std::string Scalar::str_abs() const { return mpq_class(abs(value_)).get_str(); }

Scalar random_scalar(FieldSpec field, std::mt19937_64& rng) {
    if (field.kind == FieldKind::PrimeField) {
        long r = static_cast<long>(rng() % static_cast<unsigned long>(field.characteristic));
        return Scalar::from_int(field, r);
    }
    long r = static_cast<long>(rng() % 7) - 3; // -3..3
    return Scalar::from_int(field, r);
}

} // namespace locmat
