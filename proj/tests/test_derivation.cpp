#include <doctest.h>

#include "locmat/derivation.hpp"
#include "test_util.hpp"

using namespace locmat;
using namespace locmat::testutil;

namespace {
const FieldSpec Q = FieldSpec::rationals();
const SiteShape S2(2);

Element unit(int site, int p, int q) { return Element::matrix_unit(Q, S2, site, p, q); }

SparseSystem random_system(std::mt19937_64& rng) {
    SparseSystem sys(Q, S2);
    const int members = static_cast<int>(rng() % 3);
    for (int m = 0; m < members; ++m) {
        SiteSet sites;
        int lo = static_cast<int>(rng() % 4) + 1;
        sites.insert(lo);
        if (rng() % 2) sites.insert(lo + 1);
        std::vector<int> site_vec(sites.begin(), sites.end());
        Element e = random_element(Q, S2, site_vec, rng, 3);
        if (!e.is_zero()) sys.add_member(sites, e);
    }
    const int fams = 1 + static_cast<int>(rng() % 2);
    for (int f = 0; f < fams; ++f) {
        std::vector<int> window{1};
        if (rng() % 2) window.push_back(2);
        Element t = random_element(Q, S2, window, rng, 2);
        if (!t.is_zero()) sys.add_family(t, static_cast<int>(rng() % 3) + 1);
    }
    return sys;
}
} // namespace

TEST_CASE("member enumeration against finite targets") {
    // y_1: window-1 family, one member meets {3}
    SparseSystem y1(Q, S2);
    y1.add_family(unit(1, 1, 2), 1);
    auto hits = y1.members_intersecting({3});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].coeff == unit(3, 1, 2));

    // z: window-2 family, shifts 1 and 2 both meet {2}
    SparseSystem z(Q, S2);
    z.add_family(unit(1, 1, 2).mul(unit(2, 1, 1)), 1);
    CHECK(z.members_intersecting({2}).size() == 2);
    CHECK(z.members_intersecting({1}).size() == 1); // the window starts at 1

    SparseSystem fin(Q, S2);
    fin.add_member({5}, unit(5, 1, 2));
    CHECK(fin.members_intersecting({1}).empty());
}

TEST_CASE("derivations kill the unit and evaluate memberwise") {
    Derivation z = build_z(Q, S2);
    CHECK(z.apply(Element::one(Q, S2)).is_zero());
    CHECK(Derivation::inner(unit(1, 1, 2)).apply(Element::one(Q, S2)).is_zero());

    // z(e12(2)): the shift-1 member contributes e12(1)[e11(2), e12(2)], the
    // shift-2 member dies; checked against the dense oracle on sites {1,2,3}
    Element got = z.apply(unit(2, 1, 2));
    CHECK(got == unit(1, 1, 2).mul(unit(2, 1, 2)));
    Element manual = commutator(unit(1, 1, 2).mul(unit(2, 1, 1)), unit(2, 1, 2))
                         .add(commutator(unit(2, 1, 2).mul(unit(3, 1, 1)), unit(2, 1, 2)));
    CHECK(got.dense_expand({1, 2, 3}) == manual.dense_expand({1, 2, 3}));

    // ad(e12)(e21) = e11 - e22; in characteristic 2 this collapses to 1
    CHECK(Derivation::inner(unit(1, 1, 2)).apply(unit(1, 2, 1)) ==
          Element::one(Q, S2).sub(unit(1, 2, 2).scale(Scalar::from_int(Q, 2))));
    FieldSpec f2 = FieldSpec::gf(2);
    Element e12_2 = Element::matrix_unit(f2, S2, 1, 1, 2);
    Element e21_2 = Element::matrix_unit(f2, S2, 1, 2, 1);
    CHECK(Derivation::inner(e12_2).apply(e21_2) == Element::one(f2, S2));
}

TEST_CASE("Leibniz law") {
    std::mt19937_64 rng(41);
    Derivation z = build_z(Q, S2);
    CHECK(leibniz_check(z, unit(2, 1, 2), unit(2, 2, 1)));
    for (int trial = 0; trial < 25; ++trial) {
        Element a = random_element(Q, S2, {1, 2}, rng);
        Derivation d = Derivation::inner(a);
        Element x = random_element(Q, S2, {1, 2, 3}, rng);
        Element y = random_element(Q, S2, {1, 2, 3}, rng);
        CHECK(leibniz_check(d, x, y));
        CHECK(leibniz_check(z, x, y));
    }
    // left multiplication is linear but no derivation
    auto shim = [](const Element& v) { return Element::matrix_unit(Q, SiteShape(2), 1, 1, 2).mul(v); };
    Element one = Element::one(Q, S2);
    CHECK(!leibniz_check_map(shim, one, one));
}

TEST_CASE("inner witness on finite site sets") {
    // ad(e12(1)) on {1}: the solver formula reproduces e12(1) on the nose
    CHECK(inner_solve_local(Derivation::inner(unit(1, 1, 2)), {1}) == unit(1, 1, 2));

    SparseSystem empty(Q, S2);
    CHECK(inner_solve_local(Derivation::sparse(empty), {1, 2}).is_zero());

    // y_1 on {1,2} acts as ad(e12(1) + e12(2)); members j >= 3 never touch A_S
    Derivation y1 = build_yk(Q, S2, 1);
    Element b = inner_solve_local(y1, {1, 2});
    Derivation expected = Derivation::inner(unit(1, 1, 2).add(unit(2, 1, 2)));
    for (int i = 1; i <= 2; ++i)
        for (int p = 1; p <= 2; ++p)
            for (int q = 1; q <= 2; ++q) {
                if (p == 1 && q == 1) continue;
                Element g = unit(i, p, q);
                CHECK(y1.apply(g) == commutator(b, g));
                CHECK(y1.apply(g) == expected.apply(g));
            }

    // random sparse sums are inner on every finite truncation
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        Derivation d = Derivation::sparse(random_system(rng));
        for (const SiteSet& s : std::vector<SiteSet>{{1}, {2}, {1, 2}, {1, 2, 3}}) {
            Element w = inner_solve_local(d, s);
            std::vector<int> site_vec(s.begin(), s.end());
            for (int trial2 = 0; trial2 < 5; ++trial2) {
                Element x = random_element(Q, S2, site_vec, rng);
                CHECK(d.apply(x) == commutator(w, x));
            }
        }
    }
}

TEST_CASE("basis expansion") {
    // ad(1) = 0: empty expansion
    Derivation d1 = Derivation::inner(Element::one(Q, S2));
    CHECK(expand_basis(d1).finite.empty());
    CHECK(expand_basis(d1).families.empty());

    Derivation d2 = Derivation::inner(unit(1, 1, 2));
    auto e2 = expand_basis(d2);
    REQUIRE(e2.finite.size() == 1);
    CHECK(e2.finite.begin()->second == Scalar::one(Q));

    // e11(1) e12(2) rewrites to e12(2) - e22(1) e12(2)
    Derivation d3 = Derivation::inner(unit(1, 1, 1).mul(unit(2, 1, 2)));
    auto e3 = expand_basis(d3);
    REQUIRE(e3.finite.size() == 2);
    Monomial m_e12_2 = Monomial::from_entries({{2, 1, 2}});
    Monomial m_pair = Monomial::from_entries({{1, 2, 2}, {2, 1, 2}});
    CHECK(e3.finite.at(m_e12_2) == Scalar::one(Q));
    CHECK(e3.finite.at(m_pair) == Scalar::from_int(Q, -1));

    // faithfulness: the expansion plus the dropped unit component recovers the
    // member, and elements differing by a multiple of 1 expand identically
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<int> sites;
        for (int i = 1; i <= 3; ++i)
            if (rng() % 2) sites.push_back(i);
        if (sites.empty()) sites.push_back(1);
        Element a = random_element(Q, S2, sites, rng);
        if (a.is_zero()) continue;
        auto exp = expand_basis(Derivation::inner(a));
        Element rebuilt = Element::one(Q, S2).scale(a.unit_coefficient());
        for (const auto& [m, c] : exp.finite) {
            std::vector<MonomialEntry> entries = m.entries();
            rebuilt = rebuilt.add(Element::from_raw(Q, S2, {{entries, c}}));
        }
        CHECK(rebuilt == a);

        Element shifted = a.add(Element::one(Q, S2).scale(Scalar::from_int(Q, 7)));
        auto exp2 = expand_basis(Derivation::inner(shifted));
        CHECK(exp.finite == exp2.finite);
    }

    // family expansion stays a finite description: z has a two-term template
    auto ez = expand_basis(build_z(Q, S2));
    CHECK(ez.finite.empty());
    REQUIRE(ez.families.size() == 1);
    CHECK(ez.families[0].start == 1);
    CHECK(ez.families[0].templ.size() == 2);
}

TEST_CASE("derivation brackets") {
    Derivation z = build_z(Q, S2);
    Derivation y1 = build_yk(Q, S2, 1);

    // [z, y_1] = y_2, both syntactically and on the truncation
    Derivation zy = derivation_commutator(z, y1);
    CHECK(zy.as_system() == build_yk(Q, S2, 2).as_system());
    CHECK(equal_on_truncation(zy, build_yk(Q, S2, 2), 8));

    // [ad a, ad b] = ad [a, b]
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        Element a = random_element(Q, S2, {1, 2}, rng);
        Element b = random_element(Q, S2, {2, 3}, rng);
        Derivation d = derivation_commutator(Derivation::inner(a), Derivation::inner(b));
        REQUIRE(d.kind() == Derivation::Kind::Inner);
        CHECK(d.inner_element() == commutator(a, b));
    }

    // [y_1, y_1] = 0 after simplification
    Derivation yy = derivation_commutator(y1, y1);
    CHECK(yy.as_system().empty());

    // iterated ladder: k-fold brackets of z against y_1 climb to y_{k+1}
    Derivation cur = y1;
    for (int k = 1; k <= 5; ++k) {
        cur = derivation_commutator(z, cur);
        CHECK(cur.as_system() == build_yk(Q, S2, k + 1).as_system());
        CHECK(equal_on_truncation(cur, build_yk(Q, S2, k + 1), 8));
    }

    // bracket coherence on generators up to site 6
    for (int k = 1; k <= 3; ++k) {
        Derivation yk = build_yk(Q, S2, k);
        Derivation bracket = derivation_commutator(z, yk);
        for (int i = 1; i <= 6; ++i)
            for (int p = 1; p <= 2; ++p)
                for (int q = 1; q <= 2; ++q) {
                    if (p == 1 && q == 1) continue;
                    Element g = unit(i, p, q);
                    CHECK(bracket.apply(g) == z.apply(yk.apply(g)).sub(yk.apply(z.apply(g))));
                }
    }
    for (int trial = 0; trial < 5; ++trial) {
        Derivation da = Derivation::sparse(random_system(rng));
        Derivation db = Derivation::sparse(random_system(rng));
        Derivation bracket = derivation_commutator(da, db);
        for (int i = 1; i <= 6; ++i) {
            Element g = unit(i, 1, 2);
            CHECK(bracket.apply(g) == da.apply(db.apply(g)).sub(db.apply(da.apply(g))));
        }
    }
}

TEST_CASE("agreement on truncations") {
    Derivation z = build_z(Q, S2);
    Derivation y1 = build_yk(Q, S2, 1);
    Derivation y2 = build_yk(Q, S2, 2);
    for (int n = 1; n <= 6; ++n) CHECK(equal_on_truncation(z, z, n));
    CHECK(equal_on_truncation(derivation_commutator(z, y1), y2, 8));
    CHECK(!equal_on_truncation(y1, y2, 2)); // they differ already on e21(1)
    CHECK(!(y1.apply(unit(1, 2, 1)) == y2.apply(unit(1, 2, 1))));
}

TEST_CASE("shift-family constructors") {
    Derivation y1 = build_yk(Q, S2, 1);
    CHECK(y1.apply(unit(2, 2, 1)) == Element::one(Q, S2).sub(unit(2, 2, 2).scale(Scalar::from_int(Q, 2))));

    Derivation z = build_z(Q, S2);
    CHECK(z.system().members_intersecting({1}).size() == 1);

    Derivation y3 = build_yk(Q, S2, 3);
    REQUIRE(y3.system().families().size() == 1);
    CHECK(y3.system().families()[0].templ.support() == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(build_yk(Q, S2, 0), Error);
}

TEST_CASE("independence of the y_k ladder at a truncation") {
    // any nonzero combination sum alpha_k y_k keeps at least N - K distinct
    // interval basis coefficients in its truncated expansion
    const int N = 12;
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Scalar> alpha;
        bool nonzero = false;
        for (int k = 1; k <= 4; ++k) {
            Scalar c = random_scalar(Q, rng);
            nonzero = nonzero || !c.is_zero();
            alpha.push_back(c);
        }
        if (!nonzero) alpha[0] = Scalar::one(Q);

        SparseSystem sys(Q, S2);
        for (int k = 1; k <= 4; ++k) {
            if (alpha[static_cast<size_t>(k) - 1].is_zero()) continue;
            Element t = Element::one(Q, S2);
            for (int i = 1; i <= k; ++i) t = t.mul(unit(i, 1, 2));
            sys.add_family(t.scale(alpha[static_cast<size_t>(k) - 1]), 1);
        }
        auto coeffs = expand_basis(Derivation::sparse(sys)).truncate(N);
        int distinct_nonzero = 0;
        for (const auto& [m, c] : coeffs)
            if (!c.is_zero()) ++distinct_nonzero;
        CHECK(distinct_nonzero >= N - 4);
    }
}

TEST_CASE("peeling a truncated derivation into disjointly supported pieces") {
    auto images_of = [&](const Derivation& d, int n) {
        std::map<GeneratorKey, Element> images;
        for (int i = 1; i <= n; ++i)
            for (int p = 1; p <= 2; ++p)
                for (int q = 1; q <= 2; ++q) {
                    if (p == 1 && q == 1) continue;
                    images.emplace(GeneratorKey{i, p, q}, d.apply(unit(i, p, q)));
                }
        return images;
    };

    // ad(e12(1)) at level 1 peels to the single element e12(1)
    auto peeled = peel_derivation(Q, S2, images_of(Derivation::inner(unit(1, 1, 2)), 1), 1);
    REQUIRE(peeled.size() == 1);
    CHECK(peeled[0].second == unit(1, 1, 2));

    // the zero derivation peels to nothing
    SparseSystem empty(Q, S2);
    CHECK(peel_derivation(Q, S2, images_of(Derivation::sparse(empty), 2), 2).empty());

    // y_1 on sites 1..3 peels into ad(e12(1)), ad(e12(2)), ad(e12(3))
    auto steps = peel_derivation(Q, S2, images_of(build_yk(Q, S2, 1), 3), 3);
    REQUIRE(steps.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(steps[static_cast<size_t>(k)].second == unit(k + 1, 1, 2));

    // random sparse systems: the peel remainder annihilates the truncation
    // and each piece centralizes the earlier sites
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 8; ++trial) {
        Derivation d = Derivation::sparse(random_system(rng));
        const int n = 3;
        auto parts = peel_derivation(Q, S2, images_of(d, n), n);
        int step = 0;
        for (const auto& [sites, a] : parts) {
            for (int j = 1; j <= step; ++j)
                if (sites.count(j)) CHECK(a.centralizer_check(j));
            ++step;
        }
        for (int i = 1; i <= n; ++i)
            for (int p = 1; p <= 2; ++p)
                for (int q = 1; q <= 2; ++q) {
                    if (p == 1 && q == 1) continue;
                    Element g = unit(i, p, q);
                    Element acc = d.apply(g);
                    for (const auto& [sites, a] : parts) acc = acc.sub(commutator(a, g));
                    CHECK(acc.is_zero());
                }
    }

    // broken images are rejected
    auto bad = images_of(Derivation::inner(unit(1, 1, 2)), 1);
    bad.at({1, 1, 2}) = unit(1, 2, 1);
    CHECK_THROWS_AS(peel_derivation(Q, S2, bad, 1), Error);
}
