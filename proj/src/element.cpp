#include "locmat/element.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace locmat {

Monomial Monomial::from_entries(std::vector<MonomialEntry> entries) {
    std::sort(entries.begin(), entries.end());
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.site < 1) fail(Errc::IndexOutOfRange, "site index must be >= 1");
        if (e.row == 1 && e.col == 1) fail(Errc::InternalCheck, "monomial carries a (1,1) label");
        if (i > 0 && entries[i - 1].site == e.site) fail(Errc::InternalCheck, "duplicate site in monomial");
    }
    Monomial m;
    m.entries_ = std::move(entries);
    return m;
}

std::vector<int> Monomial::support() const {
    std::vector<int> s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.push_back(e.site);
    return s;
}

std::optional<MonomialEntry> Monomial::entry_at(int site) const {
    for (const auto& e : entries_) {
        if (e.site == site) return e;
        if (e.site > site) break;
    }
    return std::nullopt;
}

Element Element::one(FieldSpec field, const SiteShape& shape) {
    Element e(field, shape);
    e.terms_.emplace(Monomial{}, Scalar::one(field));
    return e;
}

Element Element::matrix_unit(FieldSpec field, const SiteShape& shape, int site, int p, int q) {
    return from_raw(field, shape, {{{{site, p, q}}, Scalar::one(field)}});
}

void Element::add_term(const Monomial& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
}

// Expands a raw monomial (may contain (1,1) labels) through the rewrite
// e11 = 1 - sum_{p>=2} e_pp at each offending site, then accumulates.
void Element::accumulate_raw(const std::vector<MonomialEntry>& raw, const Scalar& coeff) {
    if (coeff.is_zero()) return;
    std::vector<MonomialEntry> fixed;
    std::vector<int> ones; // sites holding a (1,1) label
    for (const auto& e : raw) {
        if (e.site < 1) fail(Errc::IndexOutOfRange, "site index must be >= 1");
        const int n = shape_.size(e.site);
        if (e.row < 1 || e.row > n || e.col < 1 || e.col > n)
            fail(Errc::IndexOutOfRange, "matrix-unit label out of range at site " + std::to_string(e.site));
        if (e.row == 1 && e.col == 1)
            ones.push_back(e.site);
        else
            fixed.push_back(e);
    }
    std::vector<std::pair<std::vector<MonomialEntry>, Scalar>> partial{{fixed, coeff}};
    for (int site : ones) {
        const int n = shape_.size(site);
        std::vector<std::pair<std::vector<MonomialEntry>, Scalar>> next;
        next.reserve(partial.size() * static_cast<size_t>(n));
        for (auto& [entries, c] : partial) {
            next.emplace_back(entries, c); // identity branch
            for (int p = 2; p <= n; ++p) {
                auto with = entries;
                with.push_back({site, p, p});
                next.emplace_back(std::move(with), -c);
            }
        }
        partial = std::move(next);
    }
    for (auto& [entries, c] : partial) add_term(Monomial::from_entries(std::move(entries)), c);
}

Element Element::from_raw(FieldSpec field, const SiteShape& shape, const std::vector<RawTerm>& raw) {
    Element e(field, shape);
    for (const auto& [entries, c] : raw) {
        check_same_field(field, c.field());
        for (size_t i = 0; i < entries.size(); ++i)
            for (size_t j = i + 1; j < entries.size(); ++j)
                if (entries[i].site == entries[j].site) fail(Errc::IndexOutOfRange, "duplicate site in raw term");
        e.accumulate_raw(entries, c);
    }
    return e;
}

std::vector<int> Element::support() const {
    std::set<int> s;
    for (const auto& [m, c] : terms_)
        for (const auto& e : m.entries()) s.insert(e.site);
    return {s.begin(), s.end()};
}

int Element::max_site() const {
    int mx = 0;
    for (const auto& [m, c] : terms_) mx = std::max(mx, m.max_site());
    return mx;
}

Scalar Element::unit_coefficient() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Scalar::zero(field_) : it->second;
}

Element Element::add(const Element& o) const {
    check_same_field(field_, o.field_);
    check_same_shape(shape_, o.shape_);
    Element r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Element Element::sub(const Element& o) const {
    check_same_field(field_, o.field_);
    check_same_shape(shape_, o.shape_);
    Element r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Element Element::scale(const Scalar& c) const {
    check_same_field(field_, c.field());
    Element r(field_, shape_);
    if (c.is_zero()) return r;
    for (const auto& [m, v] : terms_) r.add_term(m, v * c);
    return r;
}

Element Element::negate() const { return scale(-Scalar::one(field_)); }

Element Element::mul(const Element& o) const {
    check_same_field(field_, o.field_);
    check_same_shape(shape_, o.shape_);
    Element r(field_, shape_);
    for (const auto& [m1, c1] : terms_) {
        for (const auto& [m2, c2] : o.terms_) {
            // sitewise matrix-unit composition with identity absorption
            std::vector<MonomialEntry> raw;
            raw.reserve(m1.entries().size() + m2.entries().size());
            auto it1 = m1.entries().begin(), end1 = m1.entries().end();
            auto it2 = m2.entries().begin(), end2 = m2.entries().end();
            bool dead = false;
            while (it1 != end1 || it2 != end2) {
                if (it2 == end2 || (it1 != end1 && it1->site < it2->site)) {
                    raw.push_back(*it1++);
                } else if (it1 == end1 || it2->site < it1->site) {
                    raw.push_back(*it2++);
                } else {
                    if (it1->col != it2->row) {
                        dead = true;
                        break;
                    }
                    raw.push_back({it1->site, it1->row, it2->col});
                    ++it1, ++it2;
                }
            }
            if (!dead) r.accumulate_raw(raw, c1 * c2);
        }
    }
    return r;
}

namespace {

struct SiteIndexer {
    std::vector<int> sites;
    std::vector<int> dims;
    long long total = 1;

    SiteIndexer(const SiteShape& shape, const std::vector<int>& s) : sites(s) {
        dims.reserve(sites.size());
        for (int i : sites) {
            dims.push_back(shape.size(i));
            total *= shape.size(i);
        }
    }

    // digits are 1-based labels, one per site, most significant first
    long long flatten(const std::vector<int>& digits) const {
        long long idx = 0;
        for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + (digits[k] - 1);
        return idx;
    }

    std::vector<int> unflatten(long long idx) const {
        std::vector<int> digits(dims.size(), 1);
        for (size_t k = dims.size(); k-- > 0;) {
            digits[k] = static_cast<int>(idx % dims[k]) + 1;
            idx /= dims[k];
        }
        return digits;
    }
};

} // namespace

DenseMatrix Element::dense_expand(const std::vector<int>& sites) const {
    std::vector<int> ordered = sites;
    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
    for (int i : support())
        if (!std::binary_search(ordered.begin(), ordered.end(), i))
            fail(Errc::SupportExceedsSource, "support not contained in the expansion sites");

    SiteIndexer ix(shape_, ordered);
    DenseMatrix m(field_, static_cast<int>(ix.total), static_cast<int>(ix.total));
    for (const auto& [mono, coeff] : terms_) {
        // absent sites carry the identity: enumerate their diagonal digits
        std::vector<size_t> free_pos;
        std::vector<int> rdig(ordered.size()), cdig(ordered.size());
        for (size_t k = 0; k < ordered.size(); ++k) {
            if (auto e = mono.entry_at(ordered[k])) {
                rdig[k] = e->row;
                cdig[k] = e->col;
            } else {
                free_pos.push_back(k);
                rdig[k] = cdig[k] = 1;
            }
        }
        while (true) {
            long long r = ix.flatten(rdig), c = ix.flatten(cdig);
            m.at(static_cast<int>(r), static_cast<int>(c)) =
                m.at(static_cast<int>(r), static_cast<int>(c)) + coeff;
            // advance the identity digits (odometer)
            size_t k = 0;
            for (; k < free_pos.size(); ++k) {
                size_t pos = free_pos[k];
                if (rdig[pos] < ix.dims[pos]) {
                    ++rdig[pos], ++cdig[pos];
                    break;
                }
                rdig[pos] = cdig[pos] = 1;
            }
            if (k == free_pos.size()) break;
        }
    }
    return m;
}

Element Element::from_dense(FieldSpec field, const SiteShape& shape, const std::vector<int>& sites,
                            const DenseMatrix& m) {
    std::vector<int> ordered = sites;
    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
    SiteIndexer ix(shape, ordered);
    if (m.rows() != ix.total || m.cols() != ix.total) fail(Errc::ShapeMismatch, "dense dimension does not match sites");
    Element e(field, shape);
    for (long long r = 0; r < ix.total; ++r) {
        std::vector<int> rdig = ix.unflatten(r);
        for (long long c = 0; c < ix.total; ++c) {
            const Scalar& v = m.at(static_cast<int>(r), static_cast<int>(c));
            if (v.is_zero()) continue;
            std::vector<int> cdig = ix.unflatten(c);
            std::vector<MonomialEntry> raw;
            raw.reserve(ordered.size());
            for (size_t k = 0; k < ordered.size(); ++k) raw.push_back({ordered[k], rdig[k], cdig[k]});
            e.accumulate_raw(raw, v);
        }
    }
    return e;
}

std::optional<Element> Element::try_invert() const {
    std::vector<int> s = support();
    if (s.empty()) {
        Scalar c = unit_coefficient();
        if (c.is_zero()) return std::nullopt;
        return one(field_, shape_).scale(c.inverse());
    }
    auto inv = dense_expand(s).inverse();
    if (!inv) return std::nullopt;
    return from_dense(field_, shape_, s, *inv);
}

Element Element::invert() const {
    auto inv = try_invert();
    if (!inv) fail(Errc::NotInvertible, "element is not invertible");
    return *inv;
}

bool Element::centralizer_check(int site) const {
    const int n = shape_.size(site);
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q) {
            if (p == 1 && q == 1) continue;
            Element g = matrix_unit(field_, shape_, site, p, q);
            if (!commutator(g, *this).is_zero()) return false;
        }
    return true;
}

Element Element::factor_site(int site) const {
    if (!centralizer_check(site)) fail(Errc::NotInCentralizer, "element does not centralize site " + std::to_string(site));
    // canonical form of a centralizing element carries no entry at the site
    for (const auto& [m, c] : terms_)
        if (m.entry_at(site)) fail(Errc::InternalCheck, "centralizing element carries a site entry");
    return *this;
}

Scalar Element::normalized_trace() const {
    if (field_.kind == FieldKind::PrimeField)
        for (int i : support())
            if (shape_.size(i) % field_.characteristic == 0)
                fail(Errc::CharacteristicDividesSize, "characteristic divides the size of site " + std::to_string(i));
    Scalar t = Scalar::zero(field_);
    for (const auto& [m, c] : terms_) {
        Scalar f = c;
        bool diagonal = true;
        for (const auto& e : m.entries()) {
            if (e.row != e.col) {
                diagonal = false;
                break;
            }
            f = f * Scalar::from_int(field_, 1, shape_.size(e.site));
        }
        if (diagonal) t = t + f;
    }
    return t;
}

Element Element::shift(int k) const {
    Element r(field_, shape_);
    for (const auto& [m, c] : terms_) {
        std::vector<MonomialEntry> entries;
        entries.reserve(m.entries().size());
        for (const auto& e : m.entries()) {
            const int site = e.site + k;
            if (site < 1) fail(Errc::ShiftOutOfRange, "shift moves site " + std::to_string(e.site) + " below 1");
            const int n = shape_.size(site);
            if (e.row > n || e.col > n)
                fail(Errc::ShapeMismatchAtShiftedSite, "label out of range at shifted site " + std::to_string(site));
            entries.push_back({site, e.row, e.col});
        }
        r.add_term(Monomial::from_entries(std::move(entries)), c);
    }
    return r;
}

bool Element::operator<(const Element& o) const {
    auto it1 = terms_.begin(), it2 = o.terms_.begin();
    for (; it1 != terms_.end() && it2 != o.terms_.end(); ++it1, ++it2) {
        if (it1->first != it2->first) return it1->first < it2->first;
        if (it1->second != it2->second) return it1->second < it2->second;
    }
    return it1 == terms_.end() && it2 != o.terms_.end();
}

std::string Element::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        const bool neg = c.is_negative();
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        std::string mag = c.str_abs();
        if (m.is_unit()) {
            os << mag;
        } else {
            if (mag != "1")
                os << mag << "*";
            else if (first && neg)
                os << "1*"; // a bare '-' cannot open a factor in the grammar
            bool inner_first = true;
            for (const auto& e : m.entries()) {
                if (!inner_first) os << "*";
                inner_first = false;
                os << "e[" << e.site << "](" << e.row << "," << e.col << ")";
            }
        }
        first = false;
    }
    return os.str();
}

Element commutator(const Element& x, const Element& y) { return x.mul(y).sub(y.mul(x)); }

Element conjugate(const Element& a, const Element& x) {
    Element ainv = a.invert();
    return ainv.mul(x).mul(a);
}

Element peirce_project(const Element& u, const Element& e) {
    if (!(e.mul(e) == e)) fail(Errc::NotIdempotent, "projection element is not idempotent");
    return e.mul(u).mul(e);
}

} // namespace locmat
