#include "locmat/endo.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace locmat {

UnitalEndo::UnitalEndo(FieldSpec field, SiteShape shape, int source_level, std::map<GeneratorKey, Element> images)
    : field_(field), shape_(std::move(shape)), source_level_(source_level), target_level_(source_level) {
    if (source_level_ < 1) fail(Errc::IndexOutOfRange, "source level must be >= 1");
    for (auto& [key, img] : images) {
        if (key.site < 1 || key.site > source_level_)
            fail(Errc::IndexOutOfRange, "image site outside the source truncation");
        const int n = shape_.size(key.site);
        if (key.p < 1 || key.p > n || key.q < 1 || key.q > n)
            fail(Errc::IndexOutOfRange, "generator label out of range");
        check_same_field(field_, img.field());
        if (key.p == 1 && key.q == 1) continue; // derived from the unity partition
        target_level_ = std::max(target_level_, img.max_site());
        images_.emplace(key, std::move(img));
    }
    for (int i = 1; i <= source_level_; ++i) {
        const int n = shape_.size(i);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q) {
                if (p == 1 && q == 1) continue;
                if (!images_.count({i, p, q}))
                    fail(Errc::InvalidRestriction, "missing image of a generator at site " + std::to_string(i));
            }
    }
}

UnitalEndo UnitalEndo::identity(FieldSpec field, const SiteShape& shape, int level) {
    std::map<GeneratorKey, Element> images;
    for (int i = 1; i <= level; ++i) {
        const int n = shape.size(i);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q) {
                if (p == 1 && q == 1) continue;
                images.emplace(GeneratorKey{i, p, q}, Element::matrix_unit(field, shape, i, p, q));
            }
    }
    return UnitalEndo(field, shape, level, std::move(images));
}

UnitalEndo UnitalEndo::from_conjugator(const Element& u, int source_level) {
    Element uinv = u.invert();
    std::map<GeneratorKey, Element> images;
    for (int i = 1; i <= source_level; ++i) {
        const int n = u.shape().size(i);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q) {
                if (p == 1 && q == 1) continue;
                Element g = Element::matrix_unit(u.field(), u.shape(), i, p, q);
                images.emplace(GeneratorKey{i, p, q}, uinv.mul(g).mul(u));
            }
    }
    return UnitalEndo(u.field(), u.shape(), source_level, std::move(images));
}

Element UnitalEndo::image(int site, int p, int q) const {
    if (site < 1 || site > source_level_) fail(Errc::SupportExceedsSource, "generator site outside the source");
    const int n = shape_.size(site);
    if (p < 1 || p > n || q < 1 || q > n) fail(Errc::IndexOutOfRange, "generator label out of range");
    if (p == 1 && q == 1) {
        Element r = Element::one(field_, shape_);
        for (int t = 2; t <= n; ++t) r = r.sub(images_.at({site, t, t}));
        return r;
    }
    return images_.at({site, p, q});
}

std::optional<std::string> UnitalEndo::validate() const {
    auto name = [](int i, int p, int q) {
        return "e[" + std::to_string(i) + "](" + std::to_string(p) + "," + std::to_string(q) + ")";
    };
    for (int i = 1; i <= source_level_; ++i) {
        const int n = shape_.size(i);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q)
                for (int r = 1; r <= n; ++r)
                    for (int s = 1; s <= n; ++s) {
                        Element lhs = image(i, p, q).mul(image(i, r, s));
                        Element rhs = q == r ? image(i, p, s) : Element::zero(field_, shape_);
                        if (!(lhs == rhs))
                            return "product relation fails: " + name(i, p, q) + " * " + name(i, r, s);
                    }
        Element sum(field_, shape_);
        for (int p = 1; p <= n; ++p) sum = sum.add(image(i, p, p));
        if (!(sum == Element::one(field_, shape_))) return "unity partition fails at site " + std::to_string(i);
    }
    for (int i = 1; i <= source_level_; ++i)
        for (int j = i + 1; j <= source_level_; ++j) {
            const int ni = shape_.size(i), nj = shape_.size(j);
            for (int p = 1; p <= ni; ++p)
                for (int q = 1; q <= ni; ++q)
                    for (int r = 1; r <= nj; ++r)
                        for (int s = 1; s <= nj; ++s)
                            if (!commutator(image(i, p, q), image(j, r, s)).is_zero())
                                return "cross-site images do not commute: " + name(i, p, q) + ", " + name(j, r, s);
        }
    return std::nullopt;
}

Element UnitalEndo::apply(const Element& x) const {
    check_same_field(field_, x.field());
    check_same_shape(shape_, x.shape());
    if (x.max_site() > source_level_)
        fail(Errc::SupportExceedsSource, "element support exceeds the source truncation");
    Element r(field_, shape_);
    for (const auto& [mono, c] : x.terms()) {
        Element piece = Element::one(field_, shape_).scale(c);
        for (const auto& e : mono.entries()) piece = piece.mul(image(e.site, e.row, e.col));
        r = r.add(piece);
    }
    return r;
}

namespace {

// Flattened matrix units E_{1k}, E_{k1} of A_S and their endo images.
struct FlattenedUnits {
    std::vector<Element> ek1, phi_e1k;
    long long dim;
};

FlattenedUnits flatten_for(const UnitalEndo& phi, const std::vector<int>& sites) {
    const FieldSpec field = phi.field();
    const SiteShape& shape = phi.shape();
    long long dim = 1;
    std::vector<int> dims;
    for (int i : sites) {
        dims.push_back(shape.size(i));
        dim *= shape.size(i);
    }
    auto digits = [&](long long idx) {
        std::vector<int> d(dims.size(), 1);
        for (size_t t = dims.size(); t-- > 0;) {
            d[t] = static_cast<int>(idx % dims[t]) + 1;
            idx /= dims[t];
        }
        return d;
    };
    FlattenedUnits out;
    out.dim = dim;
    for (long long k = 1; k <= dim; ++k) {
        std::vector<int> kd = digits(k - 1);
        Element ek1 = Element::one(field, shape);
        Element phi_e1k = Element::one(field, shape);
        for (size_t t = 0; t < sites.size(); ++t) {
            ek1 = ek1.mul(Element::matrix_unit(field, shape, sites[t], kd[t], 1));
            phi_e1k = phi_e1k.mul(phi.image(sites[t], 1, kd[t]));
        }
        out.ek1.push_back(std::move(ek1));
        out.phi_e1k.push_back(std::move(phi_e1k));
    }
    return out;
}

// Canonical basis monomials of A_T in monomial order (unit first).
std::vector<Element> ambient_basis(FieldSpec field, const SiteShape& shape, const std::vector<int>& sites) {
    std::vector<Monomial> monomials{Monomial{}};
    for (int i : sites) {
        const int n = shape.size(i);
        std::vector<Monomial> next;
        for (const auto& m : monomials) {
            next.push_back(m);
            for (int p = 1; p <= n; ++p)
                for (int q = 1; q <= n; ++q) {
                    if (p == 1 && q == 1) continue;
                    auto entries = m.entries();
                    entries.push_back({i, p, q});
                    next.push_back(Monomial::from_entries(std::move(entries)));
                }
        }
        monomials = std::move(next);
    }
    std::sort(monomials.begin(), monomials.end());
    std::vector<Element> basis;
    basis.reserve(monomials.size());
    for (const auto& m : monomials) {
        std::vector<MonomialEntry> raw = m.entries();
        basis.push_back(Element::from_raw(field, shape, {{raw, Scalar::one(field)}}));
    }
    return basis;
}

} // namespace

Element skolem_noether(const UnitalEndo& phi, const std::vector<int>& source_sites, std::vector<int> ambient_sites,
                       std::uint64_t seed, int budget) {
    const FieldSpec field = phi.field();
    const SiteShape& shape = phi.shape();
    std::vector<int> S = source_sites;
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());
    if (S.empty()) fail(Errc::IndexOutOfRange, "empty source site set");

    std::set<int> T(ambient_sites.begin(), ambient_sites.end());
    for (int i : S)
        if (!T.count(i)) fail(Errc::InvalidRestriction, "source sites must lie in the ambient set");
    // restriction must satisfy the matrix-unit relations and land inside A_T
    std::vector<Element> gens, gen_images;
    for (int i : S) {
        const int n = shape.size(i);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q) {
                if (p == 1 && q == 1) continue;
                Element img = phi.image(i, p, q);
                for (int site : img.support())
                    if (!T.count(site))
                        fail(Errc::InvalidRestriction, "generator image leaves the ambient site set");
                gens.push_back(Element::matrix_unit(field, shape, i, p, q));
                gen_images.push_back(std::move(img));
            }
        for (int j : S)
            if (j > i) {
                // cross-site commutation within the restriction
                const int nj = shape.size(j);
                for (int p = 1; p <= shape.size(i); ++p)
                    for (int q = 1; q <= shape.size(i); ++q)
                        for (int r = 1; r <= nj; ++r)
                            for (int s = 1; s <= nj; ++s) {
                                if ((p == 1 && q == 1) || (r == 1 && s == 1)) continue;
                                if (!commutator(phi.image(i, p, q), phi.image(j, r, s)).is_zero())
                                    fail(Errc::InvalidRestriction, "restricted images do not commute across sites");
                            }
            }
        const int n2 = shape.size(i);
        for (int p = 1; p <= n2; ++p)
            for (int q = 1; q <= n2; ++q)
                for (int r = 1; r <= n2; ++r)
                    for (int s = 1; s <= n2; ++s) {
                        Element lhs = phi.image(i, p, q).mul(phi.image(i, r, s));
                        Element rhs = q == r ? phi.image(i, p, s) : Element::zero(field, shape);
                        if (!(lhs == rhs)) fail(Errc::InvalidRestriction, "restricted images violate a product relation");
                    }
    }

    FlattenedUnits units = flatten_for(phi, S);
    // every intertwiner is sum_k E_{k1} w phi(E_{1k}) for some w in A_T, so a
    // deterministic sweep over w covers the whole solution space
    auto candidate = [&](const Element& w) {
        Element a(field, shape);
        for (long long k = 0; k < units.dim; ++k) a = a.add(units.ek1[k].mul(w).mul(units.phi_e1k[k]));
        return a;
    };
    auto finish = [&](Element a) {
        a = a.scale(a.terms().begin()->second.inverse()); // first nonzero canonical coefficient -> 1
        for (size_t g = 0; g < gens.size(); ++g)
            if (!(gens[g].mul(a) == a.mul(gen_images[g])))
                fail(Errc::InternalCheck, "conjugator fails the intertwining identity");
        return a;
    };
    auto try_candidate = [&](const Element& w) -> std::optional<Element> {
        Element a = candidate(w);
        if (a.is_zero() || !a.try_invert()) return std::nullopt;
        return finish(std::move(a));
    };

    std::vector<int> Tsorted(T.begin(), T.end());
    std::vector<Element> basis = ambient_basis(field, shape, Tsorted);
    int tried = 0;
    // stage 1: single basis monomials
    for (const auto& w : basis) {
        if (tried++ >= budget) break;
        if (auto a = try_candidate(w)) return *a;
    }
    // stage 2: small integer combinations of leading basis pairs
    const size_t head = std::min<size_t>(basis.size(), 8);
    for (size_t i = 0; i < head && tried < budget; ++i)
        for (size_t j = i + 1; j < head && tried < budget; ++j)
            for (int ci = -2; ci <= 2 && tried < budget; ++ci)
                for (int cj = -2; cj <= 2 && tried < budget; ++cj) {
                    if (ci == 0 && cj == 0) continue;
                    ++tried;
                    Element w = basis[i].scale(Scalar::from_int(field, ci)).add(basis[j].scale(Scalar::from_int(field, cj)));
                    if (auto a = try_candidate(w)) return *a;
                }
    // stage 3: seeded pseudo-random draws
    std::mt19937_64 rng(seed);
    while (tried++ < budget) {
        Element w(field, shape);
        for (const auto& b : basis) {
            Scalar c = random_scalar(field, rng);
            if (!c.is_zero()) w = w.add(b.scale(c));
        }
        if (auto a = try_candidate(w)) return *a;
    }
    fail(Errc::NoConjugatorFound,
         "no invertible conjugator found within the search budget; consider a larger ground field");
}

ConjugatorSeq::ConjugatorSeq(std::vector<Element> elements, Direction direction)
    : elements_(std::move(elements)), direction_(direction) {
    for (size_t k = 0; k < elements_.size(); ++k) {
        if (!elements_[k].try_invert()) fail(Errc::NotInvertible, "conjugator " + std::to_string(k + 1) + " is singular");
        for (int j = 1; j < static_cast<int>(k) + 1; ++j)
            if (!elements_[k].centralizer_check(j))
                fail(Errc::WrongSupport,
                     "conjugator " + std::to_string(k + 1) + " does not centralize site " + std::to_string(j));
    }
}

ConjugatorSeq ConjugatorSeq::inverse() const {
    std::vector<Element> inv;
    inv.reserve(elements_.size());
    for (const auto& e : elements_) inv.push_back(e.invert());
    return ConjugatorSeq(std::move(inv), direction_ == Direction::Forward ? Direction::Inverse : Direction::Forward);
}

ConjugatorSeq factorize(const UnitalEndo& phi, std::uint64_t seed, int ambient_pad) {
    if (auto violation = phi.validate())
        fail(Errc::InvalidRestriction, "endomorphism invalid: " + *violation);
    const FieldSpec field = phi.field();
    const SiteShape& shape = phi.shape();
    const int n = phi.source_level();

    // residual generator images, conjugated step by step
    std::map<GeneratorKey, Element> residual;
    for (int i = 1; i <= n; ++i)
        for (int p = 1; p <= shape.size(i); ++p)
            for (int q = 1; q <= shape.size(i); ++q) {
                if (p == 1 && q == 1) continue;
                residual.emplace(GeneratorKey{i, p, q}, phi.image(i, p, q));
            }

    std::vector<Element> conjugators;
    for (int k = 1; k <= n; ++k) {
        bool already_fixed = true;
        std::set<int> T{k};
        for (int p = 1; p <= shape.size(k) && already_fixed; ++p)
            for (int q = 1; q <= shape.size(k); ++q) {
                if (p == 1 && q == 1) continue;
                if (!(residual.at({k, p, q}) == Element::matrix_unit(field, shape, k, p, q))) {
                    already_fixed = false;
                    break;
                }
            }
        Element a_k = Element::one(field, shape);
        if (!already_fixed) {
            for (int p = 1; p <= shape.size(k); ++p)
                for (int q = 1; q <= shape.size(k); ++q) {
                    if (p == 1 && q == 1) continue;
                    for (int site : residual.at({k, p, q}).support()) T.insert(site);
                }
            int hi = *T.rbegin();
            for (int pad = 0; pad < ambient_pad; ++pad) T.insert(++hi);

            UnitalEndo step(field, shape, n, residual);
            a_k = skolem_noether(step, {k}, std::vector<int>(T.begin(), T.end()), seed);
            Element a_inv = a_k.invert();
            for (auto& [key, img] : residual)
                if (key.site >= k) img = a_k.mul(img).mul(a_inv);
        }
        // residual now fixes A_k pointwise and maps the later sites into
        // the centralizer of everything up to k
        for (int p = 1; p <= shape.size(k); ++p)
            for (int q = 1; q <= shape.size(k); ++q) {
                if (p == 1 && q == 1) continue;
                if (!(residual.at({k, p, q}) == Element::matrix_unit(field, shape, k, p, q)))
                    fail(Errc::InternalCheck, "residual does not fix the current site");
            }
        for (const auto& [key, img] : residual)
            if (key.site > k)
                for (int j = 1; j <= k; ++j)
                    if (!img.centralizer_check(j)) fail(Errc::InternalCheck, "residual image escapes the centralizer");
        conjugators.push_back(std::move(a_k));
    }
    return ConjugatorSeq(std::move(conjugators), ConjugatorSeq::Direction::Forward);
}

Element recompose_apply(const ConjugatorSeq& seq, const Element& x) {
    Element v = x;
    for (auto it = seq.elements().rbegin(); it != seq.elements().rend(); ++it) v = conjugate(*it, v);
    return v;
}

std::vector<int> integrability_profile(const ConjugatorSeq& seq, const Element& a, int n_max) {
    if (n_max > seq.size()) fail(Errc::IndexOutOfRange, "profile length exceeds the sequence length");
    const FieldSpec field = a.field();

    // coordinates over the union of canonical monomials seen so far
    std::vector<Element> orbit{a};
    Element v = a;
    for (int k = 1; k <= n_max; ++k) {
        v = conjugate(seq.element(k), v);
        orbit.push_back(v);
    }
    std::set<Monomial> coords;
    for (const auto& e : orbit)
        for (const auto& [m, c] : e.terms()) coords.insert(m);
    std::vector<Monomial> axis(coords.begin(), coords.end());
    auto coordinates = [&](const Element& e) {
        std::vector<Scalar> vec;
        vec.reserve(axis.size());
        for (const auto& m : axis) {
            auto it = e.terms().find(m);
            vec.push_back(it == e.terms().end() ? Scalar::zero(field) : it->second);
        }
        return vec;
    };
    RankTracker tracker(field);
    tracker.insert(coordinates(orbit[0]));
    std::vector<int> profile;
    for (int k = 1; k <= n_max; ++k) profile.push_back(tracker.insert(coordinates(orbit[static_cast<size_t>(k)])));
    return profile;
}

ConjugatorSeq example1_sequence(const std::vector<Element>& units) {
    for (size_t k = 0; k < units.size(); ++k) {
        const int site = static_cast<int>(k) + 1;
        for (int i : units[k].support())
            if (i != site)
                fail(Errc::WrongSupport, "conjugator " + std::to_string(site) + " must be supported on its own site");
        if (!units[k].try_invert()) fail(Errc::NotInvertible, "conjugator " + std::to_string(site) + " is singular");
    }
    return ConjugatorSeq(units, ConjugatorSeq::Direction::Forward);
}

ConjugatorSeq example2_sequence(FieldSpec field, const SiteShape& shape, int n_max) {
    std::vector<Element> elements;
    Element one = Element::one(field, shape);
    for (int k = 1; k <= n_max; ++k) {
        Element a_k = Element::matrix_unit(field, shape, k, 1, 1).mul(Element::matrix_unit(field, shape, k + 1, 1, 2));
        elements.push_back(one.sub(a_k)); // (1 + a_k)^{-1} = 1 - a_k
    }
    return ConjugatorSeq(std::move(elements), ConjugatorSeq::Direction::Forward);
}

Element example2_closed_form(FieldSpec field, const SiteShape& shape, int i) {
    if (i < 0) fail(Errc::IndexOutOfRange, "closed form index must be >= 0");
    Element sum(field, shape);
    Element product = Element::one(field, shape);
    for (int k = 1; k <= i + 1; ++k) {
        product = product.mul(Element::matrix_unit(field, shape, k, 1, 2));
        sum = sum.add(product);
    }
    return sum;
}

} // namespace locmat
