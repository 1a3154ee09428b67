#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fkit/poly.hpp"

using namespace fkit;

namespace {
Poly rnd_poly(FieldSpec s, const std::vector<std::string>& vars, int maxdeg, int nterms, Rng& rng) {
    Poly r(s);
    for (int i = 0; i < nterms; ++i) {
        Poly t = Poly::constant(
            s, s.kind() == FieldKind::rationals
                   ? FieldElement::from_int(s, rng.range(-9, 9))
                   : element_by_index(s, rng.below(*s.size())));
        for (const auto& v : vars)
            t = t * Poly::var(s, v).pow(static_cast<unsigned>(rng.below(maxdeg + 1)));
        r = r + t;
    }
    return r;
}
} // namespace

TEST_CASE("basic arithmetic and divisibility") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x"), y = Poly::var(q, "y");
    CHECK((x + y) * (x - y) == x * x - y * y);
    CHECK(exact_div(x * x - y * y, x - y) == x + y);
    CHECK_THROWS_WITH_AS(exact_div(x * x + Poly::constant(q, 1), x),
                         doctest::Contains("NotDivisible"), Error);
    CHECK((x - x).is_zero());
    CHECK((x - x).total_degree() == deg_minus_infinity);
    CHECK(divides(x - y, x * x - y * y));
    CHECK(!divides(x + Poly::constant(q, 1), x * x + Poly::constant(q, 1)));
}

TEST_CASE("ring axioms and exact_div round trip on random instances") {
    Rng rng(4);
    for (FieldSpec s : {rationals(), prime_field(101)}) {
        for (int t = 0; t < 40; ++t) {
            Poly a = rnd_poly(s, {"x", "y"}, 3, 4, rng);
            Poly b = rnd_poly(s, {"x", "y"}, 3, 4, rng);
            Poly c = rnd_poly(s, {"x", "y"}, 2, 3, rng);
            CHECK((a + b) * c == a * c + b * c);
            CHECK(a * b == b * a);
            if (!b.is_zero()) CHECK(exact_div(a * b, b) == a);
        }
    }
}

TEST_CASE("gcd") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x");
    Poly one = Poly::constant(q, 1);
    CHECK(gcd(x * x - one, x - one) == x - one);
    // Euclid by hand: x^2+1 = (x+1)(x-1) + 2, so the gcd is 1
    CHECK(gcd(x * x + one, x + one) == one);
    CHECK(gcd(Poly(q), x.pow(3)) == x.pow(3));
    CHECK_THROWS_WITH_AS(gcd_univariate(Poly(q), Poly(q), "x"), doctest::Contains("BothZero"),
                         Error);

    // multivariate: common factor recovered up to normalization
    Poly y = Poly::var(q, "y");
    Poly g = x * y + Poly::constant(q, 2);
    Poly a = g * (x + y);
    Poly b = g * (x - y + Poly::constant(q, 1));
    CHECK(gcd(a, b) == g.normalized());
}

TEST_CASE("squarefree decomposition") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x");
    Poly one = Poly::constant(q, 1);

    SUBCASE("(x-1)^2 (x-2)") {
        Poly f = (x - one).pow(2) * (x - Poly::constant(q, 2));
        auto d = squarefree_decomposition(f);
        REQUIRE(d.components.size() == 2);
        CHECK(d.components[0] == x - Poly::constant(q, 2));
        CHECK(d.components[1] == x - one);
    }
    SUBCASE("x^3: P_1 = P_2 = 1, P_3 = x") {
        auto d = squarefree_decomposition(x.pow(3));
        REQUIRE(d.components.size() == 3);
        CHECK(d.components[0] == one);
        CHECK(d.components[1] == one);
        CHECK(d.components[2] == x);
    }
    SUBCASE("(x^2+1)(x-1)^2 over F_7") {
        FieldSpec f7 = prime_field(7);
        Poly z = Poly::var(f7, "x");
        Poly i1 = Poly::constant(f7, 1);
        Poly f = (z * z + i1) * (z - i1).pow(2);
        auto d = squarefree_decomposition(f);
        REQUIRE(d.components.size() == 2);
        CHECK(d.components[0] == z * z + i1);
        CHECK(d.components[1] == z - i1);
    }
    SUBCASE("char p blocks: (x+1)^p and mixed multiplicities over F_3") {
        FieldSpec f3 = prime_field(3);
        Poly z = Poly::var(f3, "x");
        Poly w = Poly::var(f3, "w");
        Poly i1 = Poly::constant(f3, 1);
        Poly f = (z + i1).pow(3) * (z + w).pow(2) * z;
        auto d = squarefree_decomposition(f);
        REQUIRE(d.components.size() == 3);
        CHECK(d.components[0] == z);
        CHECK(d.components[1] == (z + w).normalized());
        CHECK(d.components[2] == (z + i1).normalized());
        // reassembly
        Poly re = Poly::constant(f3, d.unit);
        for (size_t i = 0; i < d.components.size(); ++i)
            re = re * d.components[i].pow(static_cast<unsigned>(i + 1));
        CHECK(re == f);
    }
    SUBCASE("random reassembly, char 0 and char p") {
        Rng rng(8);
        for (FieldSpec s : {rationals(), prime_field(2), prime_field(3), prime_field(7)}) {
            for (int t = 0; t < 15; ++t) {
                Poly f = Poly::constant(s, 1);
                for (int j = 0; j < 3; ++j) {
                    Poly g = rnd_poly(s, {"x", "w"}, 1, 2, rng) +
                             Poly::var(s, "x").pow(static_cast<unsigned>(1 + rng.below(2)));
                    f = f * g.pow(static_cast<unsigned>(1 + rng.below(4)));
                }
                if (f.is_constant()) continue;
                auto d = squarefree_decomposition(f);
                Poly re = Poly::constant(s, d.unit);
                for (size_t i = 0; i < d.components.size(); ++i) {
                    re = re * d.components[i].pow(static_cast<unsigned>(i + 1));
                    for (size_t j = i + 1; j < d.components.size(); ++j)
                        CHECK(gcd(d.components[i], d.components[j]).is_constant());
                }
                CHECK(re == f);
            }
        }
    }
}

TEST_CASE("resultant and discriminant") {
    FieldSpec q = rationals();
    Poly y = Poly::var(q, "y"), a = Poly::var(q, "a"), b = Poly::var(q, "b");

    // pins the Sylvester layout convention
    CHECK(resultant(y - a, y - b, "y") == a - b);
    CHECK(discriminant(y * y, "y").is_zero());
    CHECK(!discriminant(y * y - Poly::constant(q, 1), "y").is_zero());
    CHECK_THROWS_WITH_AS(resultant(a, b, "y"), doctest::Contains("DegreeZeroInput"), Error);

    // resultant <-> gcd duality with Bezout witnesses, random univariate pairs
    Rng rng(15);
    for (FieldSpec s : {rationals(), prime_field(101)}) {
        Poly z = Poly::var(s, "z");
        for (int t = 0; t < 60; ++t) {
            Poly P = rnd_poly(s, {"z"}, 4, 4, rng) + z.pow(static_cast<unsigned>(1 + rng.below(4)));
            Poly Q = rnd_poly(s, {"z"}, 4, 4, rng) + z.pow(static_cast<unsigned>(1 + rng.below(4)));
            if (P.degree_in("z") < 1 || Q.degree_in("z") < 1) continue;
            Poly r = resultant(P, Q, "z");
            Poly g = gcd(P, Q);
            CHECK(r.is_zero() == (g.degree_in("z") >= 1));
        }
    }
}

TEST_CASE("hom components, truncation, diagonal") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x"), y = Poly::var(q, "y"), t = Poly::var(q, "t");
    Poly f = x * x + x * y + y;
    CHECK(hom_component(f, {"x", "y"}, 2) == x * x + x * y);
    CHECK(hom_component(f, {"x"}, 1) == x * y);

    Poly g = Poly::constant(q, 1) + t + t.pow(3);
    CHECK(Series(g, 2).body() == Poly::constant(q, 1) + t);

    CHECK(diagonal(t * y, "t", "y") == t);
    CHECK(diagonal((t + y).pow(2), "t", "y") == t.scaled(FieldElement::from_int(q, 2)));

    // D(1/(1-t-y)) = central binomial coefficients 1, 2, 6, 20
    Series one(Poly::constant(q, 1), 6);
    Series den(Poly::constant(q, 1) - t - y, 6);
    Series inv = den.inv();
    CHECK((inv * den).body() == Poly::constant(q, 1));
    Poly diag = diagonal(inv.body(), "t", "y");
    Poly want = Poly::constant(q, 1) + t.scaled(FieldElement::from_int(q, 2)) +
                t.pow(2).scaled(FieldElement::from_int(q, 6)) +
                t.pow(3).scaled(FieldElement::from_int(q, 20));
    CHECK(diag == want);
}

TEST_CASE("hasse derivatives") {
    FieldSpec q = rationals();
    Poly y = Poly::var(q, "y");
    CHECK(hasse_derivative(y * y, "y", 1) == y.scaled(FieldElement::from_int(q, 2)));
    CHECK(hasse_derivative(y * y, "y", 2) == Poly::constant(q, 1));

    FieldSpec f2 = prime_field(2);
    Poly y2 = Poly::var(f2, "y");
    CHECK(hasse_derivative(y2 * y2, "y", 1).is_zero()); // 2y = 0 in F_2
    CHECK(hasse_derivative(y2 * y2, "y", 2) == Poly::constant(f2, 1));

    // product rule over several characteristics
    Rng rng(31);
    for (FieldSpec s : {prime_field(2), prime_field(3), prime_field(5), rationals()}) {
        for (int t = 0; t < 25; ++t) {
            Poly G = rnd_poly(s, {"t", "y"}, 3, 4, rng);
            Poly H = rnd_poly(s, {"t", "y"}, 3, 4, rng);
            unsigned k = static_cast<unsigned>(rng.below(5));
            Poly lhs = hasse_derivative(G * H, "y", k);
            Poly rhs(s);
            for (unsigned i = 0; i <= k; ++i)
                rhs = rhs + hasse_derivative(G, "y", i) * hasse_derivative(H, "y", k - i);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("substitution") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x"), y = Poly::var(q, "y"), t = Poly::var(q, "t");
    CHECK(substitute(x * x, {{"x", t * x}}) == t * t * x * x);
    CHECK(substitute(x + y, {{"x", x + y.scaled(FieldElement::from_int(q, 2)) +
                                       Poly::constant(q, 3)}}) ==
          x + y.scaled(FieldElement::from_int(q, 3)) + Poly::constant(q, 3));
    Poly a = Poly::var(q, "a"), b = Poly::var(q, "b");
    CHECK(substitute(x * y, {{"x", t * x + a * y + b}}) == t * x * y + a * y * y + b * y);
}

TEST_CASE("pseudo-division") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x"), y = Poly::var(q, "y");
    Poly f = y * y * x + y + Poly::constant(q, 1);
    Poly g = y.scaled(FieldElement::from_int(q, 2)) + x;
    auto pd = pseudo_div(f, g, "y");
    Poly lc = Poly::constant(q, 2);
    CHECK(lc.pow(pd.scale_pow) * f == pd.quot * g + pd.rem);
    CHECK(pd.rem.degree_in("y") < 1);
}

TEST_CASE("text format round trip") {
    FieldSpec q = rationals();
    Poly p = parse_poly(q, "3/4*x1^2*x2 + -1*x2 + 5");
    CHECK(p.coeff_of_mono({"x1", "x2"}, {2, 1}).str() == "3/4");
    CHECK(p.coeff_of_mono({"x1", "x2"}, {0, 1}).str() == "-1");
    CHECK(p.constant_term().str() == "5");
    CHECK(parse_poly(q, p.str()) == p);

    Rng rng(42);
    for (FieldSpec s : {rationals(), prime_field(13)}) {
        for (int t = 0; t < 30; ++t) {
            Poly f = rnd_poly(s, {"x1", "x2", "t"}, 3, 5, rng);
            CHECK(parse_poly(s, f.str()) == f);
        }
    }
    // extension-field coefficients round-trip through {c0,c1} literals
    Rng rng2(3);
    FieldSpec f9 = extension_field(3, 2, &rng2);
    Poly z = Poly::var(f9, "z");
    Poly g = z.scaled(element_by_index(f9, 5)) + Poly::constant(f9, element_by_index(f9, 7));
    CHECK(parse_poly(f9, g.str()) == g);
}

TEST_CASE("series arithmetic") {
    FieldSpec q = rationals();
    Poly t = Poly::var(q, "t");
    Series s(t + Poly::constant(q, 1), 4);
    Series inv = s.inv();
    CHECK((inv * s).body() == Poly::constant(q, 1));
    // min-order rule
    Series a(t, 5), b(t, 3);
    CHECK((a * b).order() == 3);
    CHECK_THROWS_WITH_AS(Series(t, 4).inv(), doctest::Contains("NonUnitConstantTerm"), Error);
}
