#include "locmat/derivation.hpp"

#include <algorithm>

namespace locmat {

namespace {

SiteSet to_set(const std::vector<int>& v) { return SiteSet(v.begin(), v.end()); }

bool intersects(const SiteSet& a, const SiteSet& b) {
    auto it1 = a.begin();
    auto it2 = b.begin();
    while (it1 != a.end() && it2 != b.end()) {
        if (*it1 == *it2) return true;
        if (*it1 < *it2)
            ++it1;
        else
            ++it2;
    }
    return false;
}

} // namespace

void SparseSystem::add_member(SiteSet sites, Element coeff) {
    check_same_field(field_, coeff.field());
    check_same_shape(shape_, coeff.shape());
    if (coeff.is_zero()) return;
    for (int i : coeff.support())
        if (!sites.count(i)) fail(Errc::SupportExceedsSource, "member element not supported inside its site set");
    finite_.push_back({std::move(sites), std::move(coeff)});
}

void SparseSystem::add_family(Element templ, int start) {
    check_same_field(field_, templ.field());
    check_same_shape(shape_, templ.shape());
    if (start < 1) fail(Errc::IndexOutOfRange, "family start must be >= 1");
    if (templ.is_zero()) return;
    std::vector<int> sup = templ.support();
    if (sup.empty()) return; // scalar template: ad vanishes
    // normalize the template to minimal site 1
    const int lo = sup.front();
    if (lo > 1) {
        templ = templ.shift(1 - lo);
        start += lo - 1;
    }
    families_.push_back({std::move(templ), start});
}

std::vector<FiniteMember> SparseSystem::members_intersecting(const SiteSet& target) const {
    std::vector<FiniteMember> out;
    if (target.empty()) return out;
    for (const auto& m : finite_)
        if (intersects(m.sites, target)) out.push_back(m);
    const int lo_t = *target.begin();
    const int hi_t = *target.rbegin();
    for (const auto& f : families_) {
        const int w = f.window();
        // member i occupies the shifted template support within [i, i+w-1]
        const int i_min = std::max(f.start, lo_t - w + 1);
        for (int i = i_min; i <= hi_t; ++i) {
            Element member = f.templ.shift(i - 1);
            if (intersects(to_set(member.support()), target)) out.push_back({to_set(member.support()), std::move(member)});
        }
    }
    return out;
}

void SparseSystem::normalize() {
    // finite part: merge members with the same site set, drop zeros
    std::map<SiteSet, Element> merged;
    for (auto& m : finite_) {
        auto it = merged.find(m.sites);
        if (it == merged.end())
            merged.emplace(m.sites, std::move(m.coeff));
        else
            it->second = it->second.add(m.coeff);
    }
    finite_.clear();
    for (auto& [s, e] : merged)
        if (!e.is_zero()) finite_.push_back({s, std::move(e)});

    // families: group by template; align starts within a group by peeling the
    // leading members of earlier-starting families into the finite part
    std::map<Element, std::vector<ShiftFamily>> groups;
    for (auto& f : families_) groups[f.templ].push_back(f);
    families_.clear();
    for (auto& [templ, fams] : groups) {
        int s_max = 0;
        for (const auto& f : fams) s_max = std::max(s_max, f.start);
        int multiplicity = 0;
        for (const auto& f : fams) {
            for (int i = f.start; i < s_max; ++i) {
                Element member = templ.shift(i - 1);
                finite_.push_back({to_set(member.support()), std::move(member)});
            }
            ++multiplicity;
        }
        Element total = templ.scale(Scalar::from_int(field_, multiplicity));
        if (!total.is_zero()) families_.push_back({std::move(total), s_max});
    }
    std::sort(families_.begin(), families_.end(),
              [](const ShiftFamily& a, const ShiftFamily& b) {
                  if (a.start != b.start) return a.start < b.start;
                  return a.templ < b.templ;
              });
    if (!finite_.empty()) { // merging may have added peeled members
        std::map<SiteSet, Element> again;
        for (auto& m : finite_) {
            auto it = again.find(m.sites);
            if (it == again.end())
                again.emplace(m.sites, std::move(m.coeff));
            else
                it->second = it->second.add(m.coeff);
        }
        finite_.clear();
        for (auto& [s, e] : again)
            if (!e.is_zero()) finite_.push_back({s, std::move(e)});
    }
}

bool SparseSystem::operator==(const SparseSystem& o) const {
    if (!(field_ == o.field_) || !(shape_ == o.shape_)) return false;
    if (finite_.size() != o.finite_.size() || families_.size() != o.families_.size()) return false;
    for (size_t i = 0; i < finite_.size(); ++i)
        if (finite_[i].sites != o.finite_[i].sites || !(finite_[i].coeff == o.finite_[i].coeff)) return false;
    for (size_t i = 0; i < families_.size(); ++i)
        if (families_[i].start != o.families_[i].start || !(families_[i].templ == o.families_[i].templ)) return false;
    return true;
}

Derivation Derivation::inner(Element a) {
    SparseSystem empty(a.field(), a.shape());
    return Derivation(Kind::Inner, std::move(a), std::move(empty));
}

Derivation Derivation::sparse(SparseSystem s) {
    Element none(s.field(), s.shape());
    return Derivation(Kind::SparseSum, std::move(none), std::move(s));
}

Element Derivation::apply(const Element& x) const {
    check_same_field(field(), x.field());
    check_same_shape(shape(), x.shape());
    if (kind_ == Kind::Inner) return commutator(inner_, x);
    Element r(x.field(), x.shape());
    SiteSet target = to_set(x.support());
    for (const auto& m : system_.members_intersecting(target)) r = r.add(commutator(m.coeff, x));
    return r;
}

SparseSystem Derivation::as_system() const {
    if (kind_ == Kind::SparseSum) return system_;
    SparseSystem s(field(), shape());
    std::vector<int> sup = inner_.support();
    if (!sup.empty()) {
        // drop the unit component: ad(1) = 0
        Element body = inner_.sub(Element::one(field(), shape()).scale(inner_.unit_coefficient()));
        s.add_member(to_set(sup), std::move(body));
    }
    return s;
}

bool leibniz_check(const Derivation& d, const Element& x, const Element& y) {
    return leibniz_check_map([&d](const Element& v) { return d.apply(v); }, x, y);
}

bool leibniz_check_map(const std::function<Element(const Element&)>& f, const Element& x, const Element& y) {
    Element lhs = f(x.mul(y));
    Element rhs = f(x).mul(y).add(x.mul(f(y)));
    return lhs == rhs;
}

namespace {

// Flattened matrix unit E_{kl} of A_S (1-based dense indices).
Element flattened_unit(FieldSpec field, const SiteShape& shape, const std::vector<int>& sites, long long k,
                       long long l) {
    std::vector<int> dims;
    dims.reserve(sites.size());
    for (int i : sites) dims.push_back(shape.size(i));
    std::vector<MonomialEntry> raw(sites.size());
    long long r = k - 1, c = l - 1;
    for (size_t t = sites.size(); t-- > 0;) {
        raw[t] = {sites[t], static_cast<int>(r % dims[t]) + 1, static_cast<int>(c % dims[t]) + 1};
        r /= dims[t];
        c /= dims[t];
    }
    return Element::from_raw(field, shape, {{raw, Scalar::one(field)}});
}

} // namespace

Element solve_inner_from_apply(FieldSpec field, const SiteShape& shape,
                               const std::function<Element(const Element&)>& apply_fn, const SiteSet& sites) {
    if (sites.empty()) fail(Errc::IndexOutOfRange, "inner solve needs a nonempty site set");
    std::vector<int> s(sites.begin(), sites.end());
    long long dim = 1;
    for (int i : s) dim *= shape.size(i);
    Element b(field, shape);
    for (long long k = 1; k <= dim; ++k) {
        Element ek1 = flattened_unit(field, shape, s, k, 1);
        Element e1k = flattened_unit(field, shape, s, 1, k);
        b = b.add(apply_fn(ek1).mul(e1k));
    }
    // verify on all generators of A_S
    for (int i : s) {
        const int n = shape.size(i);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q) {
                if (p == 1 && q == 1) continue;
                Element g = Element::matrix_unit(field, shape, i, p, q);
                if (!(apply_fn(g) == commutator(b, g)))
                    fail(Errc::NotADerivation, "inner witness verification failed; input is not a derivation");
            }
    }
    return b;
}

Element inner_solve_local(const Derivation& d, const SiteSet& sites) {
    return solve_inner_from_apply(d.field(), d.shape(), [&d](const Element& x) { return d.apply(x); }, sites);
}

std::map<Monomial, Scalar> BasisExpansion::truncate(int n) const {
    std::map<Monomial, Scalar> out;
    auto add = [&](const Monomial& m, const Scalar& c) {
        auto it = out.find(m);
        if (it == out.end()) {
            if (!c.is_zero()) out.emplace(m, c);
            return;
        }
        it->second = it->second + c;
        if (it->second.is_zero()) out.erase(it);
    };
    for (const auto& [m, c] : finite)
        if (m.max_site() <= n) add(m, c);
    for (const auto& f : families) {
        int w = 0;
        for (const auto& [m, c] : f.templ) w = std::max(w, m.max_site());
        for (int i = f.start; i + w - 1 <= n; ++i) {
            for (const auto& [m, c] : f.templ) {
                std::vector<MonomialEntry> entries = m.entries();
                for (auto& e : entries) e.site += i - 1;
                add(Monomial::from_entries(std::move(entries)), c);
            }
        }
    }
    return out;
}

BasisExpansion expand_basis(const Derivation& d) {
    SparseSystem sys = d.as_system();
    BasisExpansion out;
    for (const auto& m : sys.finite_members()) {
        for (const auto& [mono, c] : m.coeff.terms()) {
            if (mono.is_unit()) continue; // ad(1) = 0
            auto it = out.finite.find(mono);
            if (it == out.finite.end()) {
                out.finite.emplace(mono, c);
                continue;
            }
            it->second = it->second + c;
            if (it->second.is_zero()) out.finite.erase(it);
        }
    }
    for (const auto& f : sys.families()) {
        BasisExpansion::FamilyPart part;
        part.start = f.start;
        for (const auto& [mono, c] : f.templ.terms()) {
            if (mono.is_unit()) continue;
            part.templ.emplace(mono, c);
        }
        if (!part.templ.empty()) out.families.push_back(std::move(part));
    }
    return out;
}

Derivation derivation_commutator(const Derivation& d1, const Derivation& d2) {
    if (d1.kind() == Derivation::Kind::Inner && d2.kind() == Derivation::Kind::Inner)
        return Derivation::inner(commutator(d1.inner_element(), d2.inner_element()));

    const FieldSpec field = d1.field();
    const SiteShape& shape = d1.shape();
    check_same_field(field, d2.field());
    check_same_shape(shape, d2.shape());
    SparseSystem s1 = d1.as_system();
    SparseSystem s2 = d2.as_system();
    SparseSystem out(field, shape);

    auto add_bracket = [&](const Element& a, const Element& b) {
        Element c = commutator(a, b);
        if (c.is_zero()) return;
        SiteSet u = to_set(a.support());
        for (int i : b.support()) u.insert(i);
        out.add_member(std::move(u), std::move(c));
    };

    // finite x finite: only pairs with meeting supports contribute
    for (const auto& m1 : s1.finite_members())
        for (const auto& m2 : s2.finite_members())
            if (intersects(m1.sites, m2.sites)) add_bracket(m1.coeff, m2.coeff);

    // finite x family and family x finite
    auto cross = [&](const FiniteMember& m, const ShiftFamily& f, bool member_first) {
        SiteSet msup = to_set(m.coeff.support());
        if (msup.empty()) return;
        const int w = f.window();
        const int lo = *msup.begin(), hi = *msup.rbegin();
        for (int i = std::max(f.start, lo - w + 1); i <= hi; ++i) {
            Element fm = f.templ.shift(i - 1);
            if (!intersects(to_set(fm.support()), msup)) continue;
            if (member_first)
                add_bracket(m.coeff, fm);
            else
                add_bracket(fm, m.coeff);
        }
    };
    for (const auto& m1 : s1.finite_members())
        for (const auto& f2 : s2.families()) cross(m1, f2, true);
    for (const auto& f1 : s1.families())
        for (const auto& m2 : s2.finite_members()) cross(m2, f1, false);

    // family x family: members meet only at finitely many relative offsets;
    // each surviving offset yields a new shift family
    for (const auto& f1 : s1.families()) {
        for (const auto& f2 : s2.families()) {
            const auto sup1 = f1.templ.support();
            const auto sup2 = f2.templ.support();
            const int lo1 = sup1.front(), hi1 = sup1.back();
            const int lo2 = sup2.front(), hi2 = sup2.back();
            for (int delta = lo1 - hi2; delta <= hi1 - lo2; ++delta) {
                const int m = std::max(0, -delta);
                Element r = commutator(f1.templ.shift(m), f2.templ.shift(m + delta));
                if (r.is_zero()) continue;
                // members: i >= max(start1, start2 - delta), value shift(r, i-1-m);
                // reindexed so the member at i0 becomes the family start
                const int i0 = std::max(f1.start, f2.start - delta);
                out.add_family(std::move(r), i0 - m);
            }
        }
    }

    out.normalize();
    return Derivation::sparse(std::move(out));
}

bool equal_on_truncation(const Derivation& d1, const Derivation& d2, int n) {
    const FieldSpec field = d1.field();
    const SiteShape& shape = d1.shape();
    for (int i = 1; i <= n; ++i) {
        const int sz = shape.size(i);
        for (int p = 1; p <= sz; ++p)
            for (int q = 1; q <= sz; ++q) {
                if (p == 1 && q == 1) continue;
                Element g = Element::matrix_unit(field, shape, i, p, q);
                if (!(d1.apply(g) == d2.apply(g))) return false;
            }
    }
    return true;
}

Derivation build_z(FieldSpec field, const SiteShape& shape) {
    Element t = Element::matrix_unit(field, shape, 1, 1, 2).mul(Element::matrix_unit(field, shape, 2, 1, 1));
    SparseSystem s(field, shape);
    s.add_family(std::move(t), 1);
    return Derivation::sparse(std::move(s));
}

Derivation build_yk(FieldSpec field, const SiteShape& shape, int k) {
    if (k < 1) fail(Errc::IndexOutOfRange, "y_k needs k >= 1");
    Element t = Element::one(field, shape);
    for (int i = 1; i <= k; ++i) t = t.mul(Element::matrix_unit(field, shape, i, 1, 2));
    SparseSystem s(field, shape);
    s.add_family(std::move(t), 1);
    return Derivation::sparse(std::move(s));
}

namespace {

// Evaluates generator images on an arbitrary element by the Leibniz product
// rule along each canonical monomial (ascending site order).
class ImageEvaluator {
public:
    ImageEvaluator(FieldSpec field, const SiteShape& shape, const std::map<GeneratorKey, Element>& images)
        : field_(field), shape_(shape), images_(&images) {}

    Element image(int site, int p, int q) const {
        if (p == 1 && q == 1) {
            // d(e11) = -sum_{p>=2} d(e_pp), from differentiating the unity partition
            Element r(field_, shape_);
            for (int t = 2; t <= shape_.size(site); ++t) r = r.sub(image(site, t, t));
            return r;
        }
        auto it = images_->find({site, p, q});
        if (it == images_->end())
            fail(Errc::NotADerivation, "missing generator image at site " + std::to_string(site));
        return it->second;
    }

    Element operator()(const Element& x) const {
        Element r(field_, shape_);
        for (const auto& [mono, c] : x.terms()) {
            const auto& entries = mono.entries();
            for (size_t k = 0; k < entries.size(); ++k) {
                Element piece = Element::one(field_, shape_).scale(c);
                for (size_t j = 0; j < entries.size(); ++j) {
                    const auto& e = entries[j];
                    if (j == k)
                        piece = piece.mul(image(e.site, e.row, e.col));
                    else
                        piece = piece.mul(Element::matrix_unit(field_, shape_, e.site, e.row, e.col));
                }
                r = r.add(piece);
            }
        }
        return r;
    }

private:
    FieldSpec field_;
    const SiteShape& shape_;
    const std::map<GeneratorKey, Element>* images_;
};

} // namespace

std::vector<std::pair<SiteSet, Element>> peel_derivation(FieldSpec field, const SiteShape& shape,
                                                         const std::map<GeneratorKey, Element>& images, int n) {
    if (n < 1) fail(Errc::IndexOutOfRange, "truncation level must be >= 1");
    // images must be complete for (p,q) != (1,1) at sites 1..n; a supplied
    // (1,1) image must agree with the derived one
    std::map<GeneratorKey, Element> work;
    for (const auto& [key, img] : images) {
        if (key.site < 1 || key.site > n) fail(Errc::IndexOutOfRange, "image site outside the truncation");
        const int sz = shape.size(key.site);
        if (key.p < 1 || key.p > sz || key.q < 1 || key.q > sz)
            fail(Errc::IndexOutOfRange, "generator label out of range");
        if (!(key.p == 1 && key.q == 1)) work.emplace(key, img);
    }
    for (int i = 1; i <= n; ++i) {
        const int sz = shape.size(i);
        for (int p = 1; p <= sz; ++p)
            for (int q = 1; q <= sz; ++q) {
                if (p == 1 && q == 1) continue;
                if (!work.count({i, p, q})) fail(Errc::NotADerivation, "incomplete generator images");
            }
    }
    ImageEvaluator d(field, shape, work);
    for (const auto& [key, img] : images)
        if (key.p == 1 && key.q == 1 && !(img == d.image(key.site, 1, 1)))
            fail(Errc::NotADerivation, "supplied e11 image conflicts with the unity partition");

    // Leibniz consistency: differentiate the defining matrix-unit relations
    auto gen = [&](int i, int p, int q) { return Element::matrix_unit(field, shape, i, p, q); };
    for (int i = 1; i <= n; ++i) {
        const int sz = shape.size(i);
        for (int p = 1; p <= sz; ++p)
            for (int q = 1; q <= sz; ++q)
                for (int r = 1; r <= sz; ++r)
                    for (int s = 1; s <= sz; ++s) {
                        // d(e_pq e_rs) = d(e_pq) e_rs + e_pq d(e_rs)
                        Element lhs = q == r ? d.image(i, p, s) : Element::zero(field, shape);
                        Element rhs = d.image(i, p, q).mul(gen(i, r, s)).add(gen(i, p, q).mul(d.image(i, r, s)));
                        if (!(lhs == rhs)) fail(Errc::NotADerivation, "images violate a product relation");
                    }
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const int si = shape.size(i), sj = shape.size(j);
            for (int p = 1; p <= si; ++p)
                for (int q = 1; q <= si; ++q)
                    for (int r = 1; r <= sj; ++r)
                        for (int s = 1; s <= sj; ++s) {
                            Element lhs = d.image(i, p, q).mul(gen(j, r, s)).add(gen(i, p, q).mul(d.image(j, r, s)));
                            Element rhs = d.image(j, r, s).mul(gen(i, p, q)).add(gen(j, r, s).mul(d.image(i, p, q)));
                            if (!(lhs == rhs)) fail(Errc::NotADerivation, "images violate cross-site commutation");
                        }
        }

    // peel site by site: the inner witness at site k, then subtract
    std::vector<std::pair<SiteSet, Element>> out;
    std::map<GeneratorKey, Element> residual = work;
    for (int k = 1; k <= n; ++k) {
        ImageEvaluator dk(field, shape, residual);
        Element b = solve_inner_from_apply(field, shape, [&dk](const Element& x) { return dk(x); }, SiteSet{k});
        if (!b.is_zero()) {
            for (int j = 1; j < k; ++j)
                if (!b.centralizer_check(j))
                    fail(Errc::InternalCheck, "peeled element fails to centralize earlier sites");
            out.emplace_back(to_set(b.support()), b);
            for (auto& [key, img] : residual)
                img = img.sub(commutator(b, Element::matrix_unit(field, shape, key.site, key.p, key.q)));
        }
        for (int p = 1; p <= shape.size(k); ++p)
            for (int q = 1; q <= shape.size(k); ++q) {
                if (p == 1 && q == 1) continue;
                if (!residual.at({k, p, q}).is_zero())
                    fail(Errc::InternalCheck, "residual does not vanish on the peeled site");
            }
    }
    return out;
}

} // namespace locmat
