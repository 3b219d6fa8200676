#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locmat/element.hpp"

namespace locmat {

/// Unital homomorphism of the truncation at source_level into a larger
/// truncation, presented by images of the matrix-unit generators. Images of
/// e_11 are derived from the partition of unity and need not be supplied.
class UnitalEndo {
public:
    UnitalEndo(FieldSpec field, SiteShape shape, int source_level, std::map<GeneratorKey, Element> images);

    static UnitalEndo identity(FieldSpec field, const SiteShape& shape, int level);
    /// x |-> u^{-1} x u presented generatorwise.
    static UnitalEndo from_conjugator(const Element& u, int source_level);

    const FieldSpec& field() const { return field_; }
    const SiteShape& shape() const { return shape_; }
    int source_level() const { return source_level_; }
    int target_level() const { return target_level_; }

    /// Image of e_pq(site); (1,1) images are derived.
    Element image(int site, int p, int q) const;

    /// First violated matrix-unit relation, if any.
    std::optional<std::string> validate() const;
    bool validate_endo() const { return !validate().has_value(); }

    /// Multiplicative-linear extension of the image map; SupportExceedsSource
    /// when x is not supported in [1, source_level].
    Element apply(const Element& x) const;

private:
    FieldSpec field_;
    SiteShape shape_;
    int source_level_;
    int target_level_;
    std::map<GeneratorKey, Element> images_; // complete for (p,q) != (1,1), sites <= source_level
};

/// Invertible conjugator a in A_T with phi(x) = a^{-1} x a for all x in A_S.
/// The intertwining space {a : x a = a phi(x)} is swept deterministically
/// (basis parameter first, then seeded pseudo-random draws); the result is
/// normalized so its first nonzero canonical coefficient is 1 and the
/// postcondition is verified in-op. NoConjugatorFound when the budget is
/// exhausted (possible only over very small finite fields).
Element skolem_noether(const UnitalEndo& phi, const std::vector<int>& source_sites, std::vector<int> ambient_sites,
                       std::uint64_t seed = 0, int budget = 10000);

/// The sequence a_1, a_2, ... of conjugating elements produced by the
/// level-by-level factorization; each a_k is invertible and centralizes all
/// sites < k. Forward sequences represent conj(a_1) o conj(a_2) o ...;
/// Inverse marks the elementwise-inverted sequence fed to the integrability
/// analyzer.
class ConjugatorSeq {
public:
    enum class Direction { Forward, Inverse };

    ConjugatorSeq(std::vector<Element> elements, Direction direction);

    const std::vector<Element>& elements() const { return elements_; }
    Direction direction() const { return direction_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const Element& element(int k) const { return elements_.at(static_cast<size_t>(k) - 1); } // 1-based

    /// Elementwise inverse with the direction flag toggled.
    ConjugatorSeq inverse() const;

private:
    std::vector<Element> elements_;
    Direction direction_;
};

/// Factorizes a valid unital endomorphism into conjugators a_1..a_N with
/// conj(a_1) o ... o conj(a_N) = phi on the source truncation. ambient_pad
/// widens each step's ambient site set; padded runs give an independent
/// factorization whose per-site actions must coincide with the unpadded one.
ConjugatorSeq factorize(const UnitalEndo& phi, std::uint64_t seed = 0, int ambient_pad = 0);

/// conj(a_1) o conj(a_2) o ... o conj(a_N) applied to x.
Element recompose_apply(const ConjugatorSeq& seq, const Element& x);

/// Entry n is dim span{a, psi_1(a), ..., psi_n...psi_1(a)} where psi_k is
/// conjugation by the k-th element; n runs 1..n_max. Monotone nondecreasing.
std::vector<int> integrability_profile(const ConjugatorSeq& seq, const Element& a, int n_max);

/// Sequence of conjugations by invertible site-local elements a_k in A_k;
/// its inverse sequence is integrable.
ConjugatorSeq example1_sequence(const std::vector<Element>& units);

/// The non-integrable sequence: k-th conjugator (1 + a_k)^{-1} = 1 - a_k with
/// a_k = e11(k) e12(k+1).
ConjugatorSeq example2_sequence(FieldSpec field, const SiteShape& shape, int n_max);

/// sum_{k=1}^{i+1} e12(1) ... e12(k): the closed form of the iterated
/// conjugation orbit of e12(1).
Element example2_closed_form(FieldSpec field, const SiteShape& shape, int i);

} // namespace locmat
