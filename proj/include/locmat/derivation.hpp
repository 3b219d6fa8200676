#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "locmat/element.hpp"

namespace locmat {

using SiteSet = std::set<int>;

/// One explicitly listed member of a sparse system: an element supported
/// inside its site set.
struct FiniteMember {
    SiteSet sites;
    Element coeff;
};

/// Infinite translation-invariant family of members: the template shifted by
/// i - 1 for every i >= start. Templates are normalized to minimal site 1.
struct ShiftFamily {
    Element templ;
    int start = 1;

    int window() const { return templ.max_site(); }
};

/// Sparse family of coefficient elements indexing a convergent sum of inner
/// derivations: a finite part plus finitely many shift families. Every site
/// meets only finitely many member supports.
class SparseSystem {
public:
    SparseSystem(FieldSpec field, SiteShape shape) : field_(field), shape_(std::move(shape)) {}

    void add_member(SiteSet sites, Element coeff);
    void add_family(Element templ, int start);

    const FieldSpec& field() const { return field_; }
    const SiteShape& shape() const { return shape_; }
    const std::vector<FiniteMember>& finite_members() const { return finite_; }
    const std::vector<ShiftFamily>& families() const { return families_; }
    bool empty() const { return finite_.empty() && families_.empty(); }

    /// Members whose support meets the finite target set, explicitly listed.
    std::vector<FiniteMember> members_intersecting(const SiteSet& target) const;

    /// Merges finite members by site set and families by (template, start);
    /// families sharing a template but not a start have their leading members
    /// peeled into the finite part first.
    void normalize();

    bool operator==(const SparseSystem& o) const;

private:
    FieldSpec field_;
    SiteShape shape_;
    std::vector<FiniteMember> finite_;
    std::vector<ShiftFamily> families_;
};

/// A derivation: ad(a) for an element a, or a sparse-system sum of inner
/// derivations.
class Derivation {
public:
    enum class Kind { Inner, SparseSum };

    static Derivation inner(Element a);
    static Derivation sparse(SparseSystem s);

    Kind kind() const { return kind_; }
    const Element& inner_element() const { return inner_; }
    const SparseSystem& system() const { return system_; }
    const FieldSpec& field() const { return inner_.field(); }
    const SiteShape& shape() const { return inner_.shape(); }

    /// Evaluates the derivation; only the finitely many members meeting the
    /// support of x contribute.
    Element apply(const Element& x) const;

    /// View as a sparse system (an inner derivation becomes one member).
    SparseSystem as_system() const;

private:
    Derivation(Kind k, Element a, SparseSystem s) : kind_(k), inner_(std::move(a)), system_(std::move(s)) {}
    Kind kind_;
    Element inner_;
    SparseSystem system_;
};

bool leibniz_check(const Derivation& d, const Element& x, const Element& y);

/// Exact check of d(xy) = d(x)y + x d(y) for an arbitrary linear map given as
/// a callable; backs the non-derivation counterexamples in the test suite.
bool leibniz_check_map(const std::function<Element(const Element&)>& f, const Element& x, const Element& y);

/// Inner witness on the sites S: returns b with d(x) = [b, x] for all x in
/// A_S, computed as b = sum_k d(E_{k1}) E_{1k} over the flattened matrix
/// units of A_S. The postcondition is verified on all S-generators;
/// NotADerivation if verification fails.
Element inner_solve_local(const Derivation& d, const SiteSet& sites);

/// Coefficient expansion of a sparse-sum derivation over the canonical basis
/// ad(e): finite coefficients plus per-family template expansions.
struct BasisExpansion {
    std::map<Monomial, Scalar> finite;
    struct FamilyPart {
        std::map<Monomial, Scalar> templ;
        int start;
    };
    std::vector<FamilyPart> families;

    /// All coefficients from members whose (shifted) basis monomials fit
    /// inside [1, n].
    std::map<Monomial, Scalar> truncate(int n) const;
};

BasisExpansion expand_basis(const Derivation& d);

/// Lie bracket of derivations. Inner x Inner stays Inner; otherwise the
/// member-by-member bracket system: finite pairs with meeting supports, and
/// family pairs reduced to finitely many relative offsets.
Derivation derivation_commutator(const Derivation& d1, const Derivation& d2);

/// Pointwise agreement on all matrix-unit generators at sites 1..n.
bool equal_on_truncation(const Derivation& d1, const Derivation& d2, int n);

/// The shift-family derivations z (template e12(1) e11(2)) and y_k (template
/// e12(1) ... e12(k)), both starting at 1.
Derivation build_z(FieldSpec field, const SiteShape& shape);
Derivation build_yk(FieldSpec field, const SiteShape& shape, int k);

/// Peels a derivation of the truncation at level n, presented by generator
/// images, into elements a_1, ..., a_n with d = sum_k ad(a_k) on the
/// truncation and supp(a_k) disjoint from sites < k. Images must be
/// Leibniz-consistent (NotADerivation otherwise); zero steps are omitted.
std::vector<std::pair<SiteSet, Element>> peel_derivation(FieldSpec field, const SiteShape& shape,
                                                         const std::map<GeneratorKey, Element>& images, int n);

/// Shared backend for inner_solve_local and the peeling loop: inner witness
/// for an arbitrary evaluator on A_S.
Element solve_inner_from_apply(FieldSpec field, const SiteShape& shape,
                               const std::function<Element(const Element&)>& apply_fn, const SiteSet& sites);

} // namespace locmat
