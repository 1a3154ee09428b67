#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fkit/field.hpp"
#include "fkit/poly.hpp"
#include "fkit/ufactor.hpp"

using namespace fkit;

TEST_CASE("descriptors and construction") {
    FieldSpec q = make_field("Q");
    CHECK(q.kind() == FieldKind::rationals);
    CHECK(q.characteristic() == 0);

    FieldSpec f7 = make_field("Fp:7");
    CHECK(f7.kind() == FieldKind::prime);
    CHECK(f7.characteristic() == 7);
    CHECK(f7 == prime_field(7));

    // degree-1 extension of F_2: any monic linear modulus is fine
    Rng rng(3);
    FieldSpec f2e = extension_field(2, 1, &rng);
    CHECK(f2e.ext_degree() == 1);
    CHECK(f2e.modulus().back() == 1);

    FieldSpec f25 = extension_field(5, 2, &rng);
    CHECK(f25.characteristic() == 5);
    CHECK(f25.size() == 25);

    CHECK_THROWS_WITH_AS(make_field("Fp:6"), doctest::Contains("NotPrime"), Error);
    CHECK_THROWS_AS(make_field("nonsense"), Error);
    // z^2 - 1 = (z-1)(z+1) is reducible over F_5
    CHECK_THROWS_WITH_AS(extension_field(5, {4, 0, 1}), doctest::Contains("ReducibleModulus"),
                         Error);

    // round-trip through the descriptor text
    CHECK(make_field(f25.descriptor()) == f25);
}

TEST_CASE("irreducible quadratics over F_5: exhaustive cross-check") {
    // oracle: z^2 + a z + b irreducible over F_5 iff it has no root in F_5
    FieldSpec f5 = prime_field(5);
    int checked = 0;
    for (std::uint64_t a = 0; a < 5; ++a) {
        for (std::uint64_t b = 0; b < 5; ++b) {
            bool has_root = false;
            for (std::uint64_t z = 0; z < 5; ++z)
                if ((z * z + a * z + b) % 5 == 0) has_root = true;
            if (!has_root) {
                FieldSpec e = extension_field(5, {b, a, 1});
                CHECK(e.size() == 25);
                ++checked;
            } else {
                CHECK_THROWS_AS(extension_field(5, {b, a, 1}), Error);
            }
        }
    }
    CHECK(checked == 10); // (25 - 5)/2 monic irreducible quadratics
    (void)f5;
}

TEST_CASE("rational arithmetic") {
    FieldSpec q = rationals();
    FieldElement half = parse_element(q, "1/2");
    FieldElement third = parse_element(q, "1/3");
    CHECK((half + third).str() == "5/6");
    CHECK((half * third).str() == "1/6");
    CHECK((half - half).is_zero());
    CHECK(half.pow(-2).str() == "4");
    CHECK_THROWS_WITH_AS(FieldElement::zero(q).inv(), doctest::Contains("DivisionByZero"), Error);
}

TEST_CASE("prime field arithmetic") {
    FieldSpec f7 = prime_field(7);
    FieldElement a = FieldElement::from_int(f7, 3);
    FieldElement b = FieldElement::from_int(f7, 5);
    CHECK((a * b).is_one()); // 15 mod 7 = 1
    CHECK((a + b).residue() == 1);
    CHECK((-a).residue() == 4);
    CHECK(a.pow(6).is_one());

    FieldSpec f5 = prime_field(5);
    FieldElement c = FieldElement::from_int(f5, 2);
    CHECK_THROWS_WITH_AS(a + c, doctest::Contains("SpecMismatch"), Error);
}

TEST_CASE("field axioms on random triples") {
    Rng rng(12);
    std::vector<FieldSpec> specs = {rationals(), prime_field(101), extension_field(5, 2, &rng),
                                    jet_field(rationals(), 6)};
    for (FieldSpec s : specs) {
        for (int i = 0; i < 200; ++i) {
            auto rnd = [&]() {
                if (s.kind() == FieldKind::rationals)
                    return FieldElement::from_mpq(
                        s, mpq_class(rng.range(-20, 20), rng.range(1, 9)));
                if (s.kind() == FieldKind::eps_jet) {
                    // short jets: triple products stay inside the window, so
                    // the ring axioms hold exactly
                    std::vector<FieldElement> c;
                    for (int j = 0; j < 2; ++j)
                        c.push_back(FieldElement::from_int(s.jet_base(), rng.range(-5, 5)));
                    return FieldElement::jet(s, 0, c);
                }
                return element_by_index(s, rng.below(*s.size()));
            };
            FieldElement a = rnd(), b = rnd(), c = rnd();
            CHECK((a + b) * c == a * c + b * c);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a + (-a) == FieldElement::zero(s));
            if (!b.is_zero()) CHECK(a / b * b == a);
        }
    }
}

TEST_CASE("Frobenius is additive over F_{p^k}") {
    Rng rng(5);
    FieldSpec f9 = extension_field(3, 2, &rng);
    for (int i = 0; i < 100; ++i) {
        FieldElement a = element_by_index(f9, rng.below(9));
        FieldElement b = element_by_index(f9, rng.below(9));
        CHECK((a + b).pow(3) == a.pow(3) + b.pow(3));
    }
}

TEST_CASE("eps-jet arithmetic") {
    FieldSpec j3 = jet_field(rationals(), 3);
    FieldSpec q = rationals();
    FieldElement one = FieldElement::one(j3);
    FieldElement eps = FieldElement::jet(j3, 1, {FieldElement::one(q)});
    // inv(1 - eps) = 1 + eps + eps^2 (geometric series truncation)
    FieldElement g = (one - eps).inv();
    CHECK(g == FieldElement::jet(j3, 0,
                                 {FieldElement::one(q), FieldElement::one(q), FieldElement::one(q)}));
    // Laurent: 1/eps^2 has valuation -2
    FieldElement e2inv = (eps * eps).inv();
    CHECK(e2inv.jet_valuation() == -2);
    CHECK((e2inv * eps * eps).is_one());
    CHECK(jet_order0(one + eps).is_one());
    CHECK_THROWS_WITH_AS(jet_order0(e2inv), doctest::Contains("NonUnitConstantTerm"), Error);

    // jets against exact rational-function arithmetic at eps = 1/q for the
    // visible window: (a0 + a1 e + a2 e^2)(b0 + ...) matches convolution
    Rng rng(77);
    for (int t = 0; t < 100; ++t) {
        std::vector<FieldElement> ac, bc;
        for (int i = 0; i < 3; ++i) {
            ac.push_back(FieldElement::from_int(q, rng.range(-9, 9)));
            bc.push_back(FieldElement::from_int(q, rng.range(-9, 9)));
        }
        FieldElement a = FieldElement::jet(j3, 0, ac);
        FieldElement b = FieldElement::jet(j3, 0, bc);
        FieldElement prod = a * b;
        for (int k = 0; k < 3; ++k) {
            FieldElement want = FieldElement::zero(q);
            for (int i = 0; i <= k; ++i) want = want + ac[i] * bc[k - i];
            FieldElement got = FieldElement::zero(q);
            if (!prod.is_zero()) {
                std::int64_t v = prod.jet_valuation();
                const auto& pc = prod.jet_coeffs();
                if (k >= v && k - v < static_cast<std::int64_t>(pc.size()))
                    got = pc[static_cast<size_t>(k - v)];
            }
            CHECK(got == want);
        }
    }
}

TEST_CASE("univariate factorization over finite fields") {
    Rng rng(9);
    FieldSpec f7 = prime_field(7);
    Poly z = Poly::var(f7, "z");

    SUBCASE("z^2 - 1 over F_7 splits into two distinct linear factors") {
        Poly f = z * z - Poly::constant(f7, 1);
        auto fac = univariate_factor_ff(f, "z", rng);
        REQUIRE(fac.factors.size() == 2);
        CHECK(fac.factors[0].second == 1);
        CHECK(fac.factors[1].second == 1);
        Poly prod = Poly::constant(f7, fac.lead);
        for (auto& [g, m] : fac.factors) prod = prod * g.pow(m);
        CHECK(prod == f);
        // roots are 1 and 6
        Poly r1 = z - Poly::constant(f7, 1);
        Poly r2 = z + Poly::constant(f7, 1);
        CHECK(((fac.factors[0].first == r1 && fac.factors[1].first == r2) ||
               (fac.factors[0].first == r2 && fac.factors[1].first == r1)));
    }

    SUBCASE("z^2 + 1 irreducible over F_3 (no root exists)") {
        FieldSpec f3 = prime_field(3);
        for (std::uint64_t v = 0; v < 3; ++v) CHECK((v * v + 1) % 3 != 0);
        Poly z3 = Poly::var(f3, "z");
        Poly f = z3 * z3 + Poly::constant(f3, 1);
        auto fac = univariate_factor_ff(f, "z", rng);
        REQUIRE(fac.factors.size() == 1);
        CHECK(fac.factors[0].second == 1);
        CHECK(fac.factors[0].first == f);
        CHECK(is_irreducible_ff(f, "z", rng));
    }

    SUBCASE("z^2 + 1 = (z-2)(z-3) over F_5 since 2^2 = 3^2 = -1") {
        FieldSpec f5 = prime_field(5);
        Poly z5 = Poly::var(f5, "z");
        Poly f = z5 * z5 + Poly::constant(f5, 1);
        auto fac = univariate_factor_ff(f, "z", rng);
        REQUIRE(fac.factors.size() == 2);
        Poly a = z5 - Poly::constant(f5, 2);
        Poly b = z5 - Poly::constant(f5, 3);
        CHECK(((fac.factors[0].first == a && fac.factors[1].first == b) ||
               (fac.factors[0].first == b && fac.factors[1].first == a)));
    }

    SUBCASE("reassembly on random polynomials, several fields") {
        std::vector<FieldSpec> specs = {prime_field(7), prime_field(2), extension_field(2, 2, &rng),
                                        extension_field(3, 2, &rng)};
        for (FieldSpec s : specs) {
            Poly zz = Poly::var(s, "z");
            for (int t = 0; t < 12; ++t) {
                Poly f = Poly::constant(s, 1);
                int deg = 2 + static_cast<int>(rng.below(5));
                for (int i = 0; i < deg; ++i) {
                    Poly lin = zz + Poly::constant(s, element_by_index(s, rng.below(*s.size())));
                    f = f * lin;
                }
                // sprinkle an irreducible-looking quadratic
                f = f * (zz * zz + zz + Poly::constant(s, 1));
                auto fac = univariate_factor_ff(f, "z", rng);
                Poly prod = Poly::constant(s, fac.lead);
                for (auto& [g, m] : fac.factors) {
                    prod = prod * g.pow(m);
                    CHECK(g.leading_coeff().is_one());
                }
                CHECK(prod == f);
                // distinct factors are coprime
                for (size_t i = 0; i < fac.factors.size(); ++i)
                    for (size_t j = i + 1; j < fac.factors.size(); ++j) {
                        Poly g = gcd(fac.factors[i].first, fac.factors[j].first);
                        CHECK(g.is_constant());
                    }
            }
        }
    }

    SUBCASE("rationals are rejected") {
        Poly f = Poly::var(rationals(), "z");
        CHECK_THROWS_WITH_AS(univariate_factor_ff(f, "z", rng), doctest::Contains("InfiniteField"),
                             Error);
    }
}

TEST_CASE("embeddings and splitting fields") {
    Rng rng(21);
    FieldSpec f2 = prime_field(2);
    Poly z = Poly::var(f2, "z");
    // z^2 + z + 1 splits over F_4
    Poly f = z * z + z + Poly::constant(f2, 1);
    auto sf = splitting_field(f, "z", rng);
    CHECK(sf.field.ext_degree() == 2);
    auto roots = roots_in(f, "z", sf.embed, rng);
    REQUIRE(roots.size() == 2);
    for (const auto& r : roots) {
        // r^2 + r + 1 = 0
        CHECK((r * r + r + FieldElement::one(sf.field)).is_zero());
        CHECK(!in_subfield(r, 1));
    }

    // embedding F_4 -> F_16 preserves arithmetic
    FieldSpec f4 = extension_field(2, 2, &rng);
    FieldSpec f16 = extension_field(2, 4, &rng);
    FieldHom h = make_embedding(f4, f16, rng);
    for (std::uint64_t i = 0; i < 4; ++i)
        for (std::uint64_t j = 0; j < 4; ++j) {
            FieldElement a = element_by_index(f4, i);
            FieldElement b = element_by_index(f4, j);
            CHECK(h(a * b) == h(a) * h(b));
            CHECK(h(a + b) == h(a) + h(b));
            CHECK(h.down(h(a)) == a);
        }
}
