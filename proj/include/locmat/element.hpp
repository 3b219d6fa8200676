#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locmat/dense.hpp"
#include "locmat/field.hpp"
#include "locmat/shape.hpp"

namespace locmat {

/// One matrix-unit factor e_{row,col} sitting at a tensor site.
struct MonomialEntry {
    int site;
    int row;
    int col;
    auto operator<=>(const MonomialEntry&) const = default;
};

/// Canonical tensor monomial: matrix units at finitely many sites, ascending
/// site order, no (1,1) labels (those are rewritten away), implicit identity
/// at absent sites. The empty monomial is the unit.
class Monomial {
public:
    Monomial() = default;
    /// Sorts by site; rejects duplicate sites and (1,1) labels.
    static Monomial from_entries(std::vector<MonomialEntry> entries);

    const std::vector<MonomialEntry>& entries() const { return entries_; }
    bool is_unit() const { return entries_.empty(); }
    std::vector<int> support() const;
    std::optional<MonomialEntry> entry_at(int site) const;
    int max_site() const { return entries_.empty() ? 0 : entries_.back().site; }
    int min_site() const { return entries_.empty() ? 0 : entries_.front().site; }

    auto operator<=>(const Monomial&) const = default;

private:
    std::vector<MonomialEntry> entries_;
};

/// A raw (not yet canonical) term: matrix-unit labels per site, may contain
/// (1,1) entries, paired with a coefficient.
using RawTerm = std::pair<std::vector<MonomialEntry>, Scalar>;

/// Finitely supported element of the tensor product of matrix algebras, in
/// the canonical monomial basis: a map from canonical monomials to nonzero
/// coefficients. Representation is unique, so equality is map equality.
class Element {
public:
    Element(FieldSpec field, SiteShape shape) : field_(field), shape_(std::move(shape)) {}

    static Element zero(FieldSpec field, const SiteShape& shape) { return Element(field, shape); }
    static Element one(FieldSpec field, const SiteShape& shape);
    /// e_pq at a site; p = q = 1 is rewritten through 1 - sum_{p>=2} e_pp.
    static Element matrix_unit(FieldSpec field, const SiteShape& shape, int site, int p, int q);
    static Element from_raw(FieldSpec field, const SiteShape& shape, const std::vector<RawTerm>& raw);

    const FieldSpec& field() const { return field_; }
    const SiteShape& shape() const { return shape_; }
    const std::map<Monomial, Scalar>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    /// Union of the term supports, ascending.
    std::vector<int> support() const;
    int max_site() const;
    /// Coefficient of the unit monomial (the F*1 component).
    Scalar unit_coefficient() const;

    Element add(const Element& o) const;
    Element sub(const Element& o) const;
    Element scale(const Scalar& c) const;
    Element negate() const;
    Element mul(const Element& o) const;

    /// Kronecker representation on the listed sites (ascending order,
    /// identity inserted at absent sites). Requires support() within sites.
    DenseMatrix dense_expand(const std::vector<int>& sites) const;
    static Element from_dense(FieldSpec field, const SiteShape& shape, const std::vector<int>& sites,
                              const DenseMatrix& m);

    /// Exact inverse via dense expansion over the support; NotInvertible on
    /// singular input.
    Element invert() const;
    std::optional<Element> try_invert() const;

    /// True iff x commutes with every matrix unit at the site, i.e. x lies in
    /// the complementary tensor factor.
    bool centralizer_check(int site) const;
    /// Identity on elements passing centralizer_check; NotInCentralizer otherwise.
    Element factor_site(int site) const;

    /// Normalized trace: 1 on the unit, multiplicative over sites, dimension
    /// independent. CharacteristicDividesSize when 1/n_i does not exist.
    Scalar normalized_trace() const;

    /// Translates every site index by k (coefficients unchanged).
    Element shift(int k) const;

    bool operator==(const Element& o) const { return field_ == o.field_ && terms_ == o.terms_; }
    bool operator!=(const Element& o) const { return !(*this == o); }
    /// Deterministic total order, for use as a map key.
    bool operator<(const Element& o) const;

    /// Canonical textual form, parseable by the expression grammar.
    std::string str() const;

private:
    void add_term(const Monomial& m, const Scalar& c);
    void accumulate_raw(const std::vector<MonomialEntry>& raw, const Scalar& coeff);
    friend Element operator*(const Element& a, const Element& b);

    FieldSpec field_;
    SiteShape shape_;
    std::map<Monomial, Scalar> terms_;
};

inline Element operator+(const Element& a, const Element& b) { return a.add(b); }
inline Element operator-(const Element& a, const Element& b) { return a.sub(b); }
inline Element operator*(const Element& a, const Element& b) { return a.mul(b); }

Element commutator(const Element& x, const Element& y);

/// a^{-1} * x * a for invertible a.
Element conjugate(const Element& a, const Element& x);

/// e*u*e for an idempotent e (NotIdempotent otherwise).
Element peirce_project(const Element& u, const Element& e);

/// Identifies a generator image: the matrix unit (p, q) at a site.
struct GeneratorKey {
    int site;
    int p;
    int q;
    auto operator<=>(const GeneratorKey&) const = default;
};

} // namespace locmat
