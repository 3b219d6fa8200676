#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "locmat/dense.hpp"
#include "locmat/field.hpp"

namespace locmat {

/// N x N matrix with finitely many nonzero entries, 1-based indices.
class FinitaryMatrix {
public:
    explicit FinitaryMatrix(FieldSpec field) : field_(field) {}

    static FinitaryMatrix unit(FieldSpec field, long row, long col);

    const FieldSpec& field() const { return field_; }
    const std::map<std::pair<long, long>, Scalar>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    void add_entry(long row, long col, const Scalar& v);
    Scalar entry(long row, long col) const;

    FinitaryMatrix add(const FinitaryMatrix& o) const;
    FinitaryMatrix sub(const FinitaryMatrix& o) const;
    FinitaryMatrix scale(const Scalar& c) const;
    FinitaryMatrix mul(const FinitaryMatrix& o) const;

    bool operator==(const FinitaryMatrix& o) const { return field_ == o.field_ && entries_ == o.entries_; }

    std::string str() const;

private:
    FieldSpec field_;
    std::map<std::pair<long, long>, Scalar> entries_;
};

/// Affine shifted-diagonal family: entries at (row_a*i + row_b,
/// col_a*i + col_b) for i >= start. Both index maps are injective
/// (row_a, col_a >= 1) and stay >= 1 on the range.
struct AffineFamily {
    long row_a, row_b;
    long col_a, col_b;
    long start;

    long row(long i) const { return row_a * i + row_b; }
    long col(long i) const { return col_a * i + col_b; }

    auto operator<=>(const AffineFamily&) const = default;
};

/// Infinite N x N matrix that is a finitary part plus finitely many affine
/// families with constant coefficients; closed under products via the
/// Diophantine index-matching rule. Normal form merges families with equal
/// maps, peels start mismatches into the finitary part, and extends families
/// backward over matching finitary entries, giving unique representations.
class PatternMatrix {
public:
    explicit PatternMatrix(FieldSpec field) : field_(field), finitary_(field) {}

    static PatternMatrix from_finitary(FinitaryMatrix m);
    static PatternMatrix family(FieldSpec field, Scalar coeff, AffineFamily fam);
    static PatternMatrix identity(FieldSpec field);

    const FieldSpec& field() const { return field_; }
    const FinitaryMatrix& finitary() const { return finitary_; }
    const std::vector<std::pair<Scalar, AffineFamily>>& families() const { return families_; }

    void add_finitary(long row, long col, const Scalar& v);
    void add_family(const Scalar& coeff, const AffineFamily& fam);

    PatternMatrix add(const PatternMatrix& o) const;
    PatternMatrix sub(const PatternMatrix& o) const;
    PatternMatrix scale(const Scalar& c) const;

    bool is_zero() const { return finitary_.is_zero() && families_.empty(); }
    bool operator==(const PatternMatrix& o) const;

    /// Entries with row, col <= n as a dense window (oracle bridge).
    DenseMatrix window_eval(long n) const;

    void normalize();

    std::string str() const;

private:
    FieldSpec field_;
    FinitaryMatrix finitary_;
    std::vector<std::pair<Scalar, AffineFamily>> families_;
};

PatternMatrix pattern_mul(const PatternMatrix& x, const PatternMatrix& y);
PatternMatrix pattern_commutator(const PatternMatrix& x, const PatternMatrix& y);

/// [m, x] for finitary x; the bracket of a pattern with a finitary matrix is
/// always finitary (NotFinitaryResult guards the downcast).
FinitaryMatrix ad_apply(const PatternMatrix& m, const FinitaryMatrix& x);

/// z = sum_i e_{2i, 2i+2}.
PatternMatrix build_z_minf(FieldSpec field);
/// y_k = sum_i e_{2i, 2i+2k-1}.
PatternMatrix build_yk_minf(FieldSpec field, int k);
/// diag(0, f(1), f(2), ...) for f given on a finite prefix, zero beyond.
PatternMatrix build_df(FieldSpec field, const std::vector<Scalar>& f);
/// Id + sum_i f(i) e_{2i-1, 2i} for f given on a finite prefix.
PatternMatrix build_af(FieldSpec field, const std::vector<Scalar>& f);

/// a_f^{-1} x a_f; the nilpotent part of a_f squares to zero, so the inverse
/// is Id - sum_i f(i) e_{2i-1, 2i}.
FinitaryMatrix conjugate_by_af(const std::vector<Scalar>& f, const FinitaryMatrix& x);

} // namespace locmat
