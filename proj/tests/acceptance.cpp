// Acceptance suite: one line per criterion, exact checks throughout.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "locmat/cli.hpp"
#include "locmat/derivation.hpp"
#include "locmat/endo.hpp"
#include "locmat/minf.hpp"
#include "test_util.hpp"

using namespace locmat;
using namespace locmat::testutil;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F5 = FieldSpec::gf(5);
const SiteShape S2(2);

Element unit(FieldSpec f, int site, int p, int q) { return Element::matrix_unit(f, S2, site, p, q); }

bool require(bool cond, const std::string& what) {
    if (!cond) std::cout << "    failed: " << what << "\n";
    return cond;
}

// ---- criterion 1: the square-zero orbit identity and its growing profile ----
bool criterion1() {
    bool ok = true;
    for (FieldSpec field : {Q, F5}) {
        ConjugatorSeq seq = example2_sequence(field, S2, 10);
        Element v = unit(field, 1, 1, 2);
        for (int i = 1; i <= 10; ++i) {
            v = conjugate(seq.element(i), v);
            ok &= require(v == example2_closed_form(field, S2, i), "closed form at i=" + std::to_string(i));
        }
        std::vector<int> profile = integrability_profile(seq.inverse(), unit(field, 1, 1, 2), 10);
        for (int n = 1; n <= 10; ++n)
            ok &= require(profile[static_cast<size_t>(n) - 1] == n + 1, "profile entry " + std::to_string(n));
    }
    return ok;
}

// ---- criterion 2: site-local sequences have bounded, stabilizing orbits ----
bool criterion2() {
    std::mt19937_64 rng(211);
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Element> units;
        for (int k = 1; k <= 10; ++k) units.push_back(random_invertible(Q, S2, {k}, rng, 3));
        ConjugatorSeq seq = example1_sequence(units).inverse();
        std::vector<Element> tests{unit(Q, 1, 1, 2), unit(Q, 1, 2, 1).mul(unit(Q, 2, 1, 2)),
                                   random_element(Q, S2, {1, 2}, rng)};
        for (const Element& a : tests) {
            std::vector<int> profile = integrability_profile(seq, a, 10);
            for (size_t i = 1; i < profile.size(); ++i)
                ok &= require(profile[i] == profile[1], "profile stabilizes by n=2");
            ok &= require(profile.back() <= 16, "profile bounded by dim A_{1,2}");
        }
    }
    return ok;
}

// ---- criterion 3: the tensor-side derivation ladder ----
bool criterion3() {
    bool ok = true;
    Derivation z = build_z(Q, S2);
    Derivation cur = build_yk(Q, S2, 1);
    for (int k = 1; k <= 5; ++k) {
        cur = derivation_commutator(z, cur);
        Derivation expected = build_yk(Q, S2, k + 1);
        ok &= require(cur.as_system() == expected.as_system(), "syntactic ladder at k=" + std::to_string(k));
        ok &= require(equal_on_truncation(cur, expected, 8), "truncation ladder at k=" + std::to_string(k));
    }
    return ok;
}

// ---- criterion 4: the finitary-matrix ladder ----
bool criterion4() {
    bool ok = true;
    PatternMatrix z = build_z_minf(Q);
    for (int k = 1; k <= 6; ++k) {
        PatternMatrix lhs = pattern_commutator(z, build_yk_minf(Q, k));
        PatternMatrix rhs = build_yk_minf(Q, k + 1);
        ok &= require(lhs == rhs, "pattern ladder at k=" + std::to_string(k));
        ok &= require(lhs.window_eval(40) == rhs.window_eval(40), "window agreement at k=" + std::to_string(k));
    }
    return ok;
}

// ---- criterion 5: constructive innerness on finite site sets ----
bool criterion5() {
    std::mt19937_64 rng(223);
    bool ok = true;
    const std::vector<SiteSet> subsets{{1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
    for (int trial = 0; trial < 50; ++trial) {
        SparseSystem sys(Q, S2);
        const int members = static_cast<int>(rng() % 3);
        for (int m = 0; m < members; ++m) {
            int lo = static_cast<int>(rng() % 4) + 1;
            SiteSet sites{lo};
            if (rng() % 2) sites.insert(lo + 1);
            std::vector<int> sv(sites.begin(), sites.end());
            Element e = random_element(Q, S2, sv, rng, 3);
            if (!e.is_zero()) sys.add_member(sites, e);
        }
        for (int f = 0; f < 1 + static_cast<int>(rng() % 2); ++f) {
            std::vector<int> window{1};
            if (rng() % 2) window.push_back(2);
            Element t = random_element(Q, S2, window, rng, 2);
            if (!t.is_zero()) sys.add_family(t, static_cast<int>(rng() % 3) + 1);
        }
        Derivation d = Derivation::sparse(sys);
        for (const SiteSet& s : subsets) {
            Element b = inner_solve_local(d, s); // verifies on generators in-op
            std::vector<int> sv(s.begin(), s.end());
            for (int i = 0; i < 100 / 7 + 1; ++i) {
                Element x = random_element(Q, S2, sv, rng, 3);
                ok &= require(d.apply(x) == commutator(b, x), "inner witness on a random element");
            }
        }
    }
    return ok;
}

// ---- criterion 6: conjugator solver on conjugations and embeddings ----
bool criterion6() {
    bool ok = true;
    for (FieldSpec field : {Q, F5}) {
        std::mt19937_64 rng(227);
        for (int trial = 0; trial < 25; ++trial) { // 50 conjugation endos across both fields
            Element u = random_invertible(field, S2, {1, 2}, rng);
            UnitalEndo phi = UnitalEndo::from_conjugator(u, 1);
            Element a = skolem_noether(phi, {1}, {1, 2});
            ok &= require(a.try_invert().has_value(), "conjugator invertible");
            for (int p = 1; p <= 2; ++p)
                for (int q = 1; q <= 2; ++q) {
                    if (p == 1 && q == 1) continue;
                    Element g = unit(field, 1, p, q);
                    ok &= require(g.mul(a) == a.mul(phi.apply(g)), "intertwining identity");
                }
        }
        for (int trial = 0; trial < 10; ++trial) { // 20 doubling embeddings across both fields
            Element w = random_invertible(field, S2, {1, 2}, rng);
            Element winv = w.invert();
            std::map<GeneratorKey, Element> images;
            for (int p = 1; p <= 2; ++p)
                for (int q = 1; q <= 2; ++q) {
                    if (p == 1 && q == 1) continue;
                    images.emplace(GeneratorKey{1, p, q}, winv.mul(unit(field, 1, p, q)).mul(w));
                }
            UnitalEndo emb(field, S2, 1, std::move(images));
            Element a = skolem_noether(emb, {1}, {1, 2});
            ok &= require(a.try_invert().has_value(), "embedding conjugator invertible");
            for (int p = 1; p <= 2; ++p)
                for (int q = 1; q <= 2; ++q) {
                    if (p == 1 && q == 1) continue;
                    Element g = unit(field, 1, p, q);
                    ok &= require(g.mul(a) == a.mul(emb.apply(g)), "embedding intertwining identity");
                }
        }
    }
    return ok;
}

// ---- criterion 7: factorization into conjugations at level 5 ----
bool criterion7() {
    bool ok = true;
    const int n = 5;
    for (FieldSpec field : {Q, F5}) {
        std::mt19937_64 rng(229);
        for (int trial = 0; trial < 25; ++trial) { // 50 products across both fields
            Element prod = Element::one(field, S2);
            const int count = 1 + static_cast<int>(rng() % 5);
            for (int j = 0; j < count; ++j) {
                int site = static_cast<int>(rng() % n) + 1;
                std::vector<int> window{site};
                if (site < n) window.push_back(site + 1);
                prod = prod.mul(random_invertible(field, S2, window, rng, 2));
            }
            UnitalEndo phi = UnitalEndo::from_conjugator(prod, n);
            ConjugatorSeq f1 = factorize(phi, 0, 0);
            ConjugatorSeq f2 = factorize(phi, 1, 1); // independent padded run
            for (int i = 1; i <= n; ++i) {
                for (int j = 1; j < i; ++j)
                    ok &= require(f1.element(i).centralizer_check(j), "conjugator centralizes earlier sites");
                for (int p = 1; p <= 2; ++p)
                    for (int q = 1; q <= 2; ++q) {
                        if (p == 1 && q == 1) continue;
                        Element g = unit(field, i, p, q);
                        ok &= require(recompose_apply(f1, g) == phi.apply(g), "recomposition");
                        ok &= require(conjugate(f1.element(i), g) == conjugate(f2.element(i), g),
                                      "site actions agree across factorizations");
                    }
            }
        }
    }
    return ok;
}

// ---- criterion 8: basis expansion reconstructs members; zero is empty ----
bool criterion8() {
    std::mt19937_64 rng(233);
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> sites;
        for (int i = 1; i <= 3; ++i)
            if (rng() % 2) sites.push_back(i);
        if (sites.empty()) sites.push_back(static_cast<int>(rng() % 3) + 1);
        Element a = random_element(Q, S2, sites, rng, 4);
        auto exp = expand_basis(Derivation::inner(a));
        Element rebuilt = Element::one(Q, S2).scale(a.unit_coefficient());
        for (const auto& [m, c] : exp.finite) rebuilt = rebuilt.add(Element::from_raw(Q, S2, {{m.entries(), c}}));
        ok &= require(rebuilt == a, "expansion reconstructs the member");
    }
    SparseSystem zero(Q, S2);
    auto ez = expand_basis(Derivation::sparse(zero));
    ok &= require(ez.finite.empty() && ez.families.empty(), "zero derivation expands to nothing");
    return ok;
}

// ---- criterion 9: independence of the ladder modulo inner derivations ----
bool criterion9() {
    bool ok = true;
    const int n = 12;
    // fixed 20-vector test set of nonzero rational coefficient vectors
    const std::vector<std::vector<std::pair<long, long>>> alphas{
        {{1, 1}, {0, 1}, {0, 1}, {0, 1}},  {{0, 1}, {1, 1}, {0, 1}, {0, 1}},
        {{0, 1}, {0, 1}, {1, 1}, {0, 1}},  {{0, 1}, {0, 1}, {0, 1}, {1, 1}},
        {{1, 1}, {1, 1}, {0, 1}, {0, 1}},  {{1, 1}, {-1, 1}, {0, 1}, {0, 1}},
        {{1, 2}, {0, 1}, {1, 3}, {0, 1}},  {{2, 1}, {3, 1}, {5, 1}, {7, 1}},
        {{-1, 1}, {0, 1}, {0, 1}, {2, 1}}, {{1, 1}, {1, 1}, {1, 1}, {1, 1}},
        {{0, 1}, {1, 2}, {0, 1}, {-1, 2}}, {{3, 1}, {0, 1}, {-2, 1}, {0, 1}},
        {{1, 7}, {2, 7}, {3, 7}, {4, 7}},  {{-5, 1}, {5, 1}, {-5, 1}, {5, 1}},
        {{1, 1}, {0, 1}, {1, 1}, {0, 1}},  {{0, 1}, {2, 3}, {0, 1}, {0, 1}},
        {{9, 1}, {-9, 1}, {0, 1}, {1, 1}}, {{1, 1}, {2, 1}, {-3, 1}, {0, 1}},
        {{0, 1}, {0, 1}, {1, 5}, {1, 5}},  {{-1, 3}, {1, 3}, {-1, 3}, {1, 3}},
    };
    for (const auto& alpha : alphas) {
        SparseSystem sys(Q, S2);
        for (int k = 1; k <= 4; ++k) {
            Scalar c = Scalar::from_int(Q, alpha[static_cast<size_t>(k) - 1].first,
                                        alpha[static_cast<size_t>(k) - 1].second);
            if (c.is_zero()) continue;
            Element t = Element::one(Q, S2);
            for (int i = 1; i <= k; ++i) t = t.mul(unit(Q, i, 1, 2));
            sys.add_family(t.scale(c), 1);
        }
        auto coeffs = expand_basis(Derivation::sparse(sys)).truncate(n);
        int nonzero = 0;
        for (const auto& [m, c] : coeffs)
            if (!c.is_zero()) ++nonzero;
        ok &= require(nonzero >= 8, "at least 8 distinct interval coefficients survive");
    }
    return ok;
}

// ---- criterion 10: the diagonal and unipotent constructions ----
bool criterion10() {
    bool ok = true;
    for (FieldSpec field : {Q, F5}) {
        std::mt19937_64 rng(239);
        std::vector<Scalar> f;
        for (int i = 0; i < 10; ++i) f.push_back(random_scalar(field, rng));
        for (long i = 1; i <= 10; ++i) {
            FinitaryMatrix x = FinitaryMatrix::unit(field, 1, 2 * i - 1);
            FinitaryMatrix expected = x;
            expected.add_entry(1, 2 * i, f[static_cast<size_t>(i) - 1]);
            ok &= require(conjugate_by_af(f, x) == expected, "unipotent conjugation identity");
        }
        PatternMatrix df = build_df(field, f);
        for (int trial = 0; trial < 50; ++trial) { // 100 finitary inputs across both fields
            FinitaryMatrix x(field);
            for (int t = 0; t < 5; ++t)
                x.add_entry(static_cast<long>(rng() % 15) + 1, static_cast<long>(rng() % 15) + 1,
                            random_scalar(field, rng));
            try {
                ad_apply(df, x);
            } catch (const Error&) {
                ok = require(false, "diagonal bracket left the finitary algebra");
            }
        }
    }
    return ok;
}

// ---- criterion 11: property fuzz suites ----
bool criterion11() {
    bool ok = true;
    std::mt19937_64 rng(241);

    // Leibniz, 500 cases
    Derivation z = build_z(Q, S2);
    for (int trial = 0; trial < 500; ++trial) {
        Derivation d = [&]() {
            switch (trial % 4) {
            case 0: return Derivation::inner(random_element(Q, S2, {1, 2}, rng, 3));
            case 1: return z;
            case 2: return build_yk(Q, S2, static_cast<int>(rng() % 3) + 1);
            default: {
                SparseSystem s(Q, S2);
                Element t = random_element(Q, S2, {1, 2}, rng, 2);
                if (!t.is_zero()) s.add_family(t, static_cast<int>(rng() % 2) + 1);
                Element m = random_element(Q, S2, {2, 3}, rng, 2);
                if (!m.is_zero()) s.add_member({2, 3}, m);
                return Derivation::sparse(s);
            }
            }
        }();
        Element x = random_element(Q, S2, {1, 2, 3}, rng, 3);
        Element y = random_element(Q, S2, {1, 2, 3}, rng, 3);
        ok &= require(leibniz_check(d, x, y), "Leibniz law");
    }

    // ring axioms with the dense oracle, 500 cases
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> sites = trial % 10 == 0 ? std::vector<int>{1, 2, 3} : std::vector<int>{1, 2};
        Element x = random_element(Q, S2, sites, rng, 3);
        Element y = random_element(Q, S2, sites, rng, 3);
        Element zz = random_element(Q, S2, sites, rng, 3);
        ok &= require(x.mul(y).mul(zz) == x.mul(y.mul(zz)), "associativity");
        ok &= require(x.mul(y.add(zz)) == x.mul(y).add(x.mul(zz)), "distributivity");
        ok &= require(x.mul(y).dense_expand(sites) == x.dense_expand(sites).mul(y.dense_expand(sites)),
                      "dense homomorphism");
    }

    // centralizer equivalence, 200 cases
    for (int trial = 0; trial < 200; ++trial) {
        Element e = trial % 2 ? random_element(Q, S2, {2, 3}, rng, 3) : random_element(Q, S2, {1, 2}, rng, 3);
        bool central = e.centralizer_check(1);
        bool dense_central = true;
        for (int p = 1; p <= 2 && dense_central; ++p)
            for (int q = 1; q <= 2; ++q) {
                if (p == 1 && q == 1) continue;
                if (!commutator(unit(Q, 1, p, q), e).is_zero()) {
                    dense_central = false;
                    break;
                }
            }
        ok &= require(central == dense_central, "centralizer equivalence");
        bool extracted = true;
        try {
            e.factor_site(1);
        } catch (const Error&) {
            extracted = false;
        }
        ok &= require(extracted == central, "tensor factor extraction agrees");
    }

    // Peirce identity, 200 cases
    Element e11 = unit(Q, 1, 1, 1);
    Element comp = Element::one(Q, S2).sub(e11);
    for (int trial = 0; trial < 200; ++trial) {
        Element u = random_element(Q, S2, {1, 2}, rng, 3);
        if (trial % 2 == 0) {
            Element v = random_element(Q, S2, {1, 2}, rng, 3);
            u = e11.mul(u).mul(e11).add(comp.mul(v).mul(comp));
        }
        Element x = e11.mul(random_element(Q, S2, {1, 2}, rng, 3)).mul(e11);
        Element br = commutator(u, x);
        if (!(e11.mul(br).mul(e11) == br)) continue;
        ok &= require(commutator(peirce_project(u, e11), x) == br, "Peirce identity");
    }
    return ok;
}

struct Criterion {
    int number;
    std::string label;
    std::function<bool()> fn;
};

} // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "square-zero conjugation orbit: closed form and profile 2..11 over Q and GF(5)", criterion1},
        {2, "site-local sequences: profiles stabilize by n=2 and stay within dim A_{1,2}", criterion2},
        {3, "derivation ladder [z, y_k] = y_{k+1} for k <= 5, syntactic and on truncation 8", criterion3},
        {4, "pattern ladder [z, y_k] = y_{k+1} for k <= 6 with 40x40 window agreement", criterion4},
        {5, "inner witnesses for 50 random sparse sums on every subset of {1,2,3}", criterion5},
        {6, "conjugator solver on 50 conjugations and 20 doubling embeddings over Q and GF(5)", criterion6},
        {7, "factorization of 50 conjugator products at level 5: recomposition and uniqueness", criterion7},
        {8, "basis expansion reconstructs 200 random members; zero expands to nothing", criterion8},
        {9, "truncated ladder combinations keep >= 8 independent interval coefficients", criterion9},
        {10, "unipotent conjugation identity and finitary diagonal brackets over Q and GF(5)", criterion10},
        {11, "property fuzz: Leibniz (500), ring axioms + dense oracle (500), centralizer (200), Peirce (200)",
         criterion11},
    };

    bool all_ok = true;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            std::cout << "    exception: " << e.what() << "\n";
        }
        auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": " << c.label << " (" << ms
                  << " ms)\n";
        all_ok &= ok;
    }
    return all_ok ? 0 : 1;
}
