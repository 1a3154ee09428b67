#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fkit/roots.hpp"
#include "fkit/ufactor.hpp"
#include "helpers.hpp"

using namespace fkit;
using namespace fkit::testing;
using fkit::testing::map_to;

namespace {

Poly catalan_series(FieldSpec s, const std::string& t, unsigned d) {
    // y^2 - y + t = 0, phi = sum C_n t^n starting at n = 1: 1, 1, 2, 5, 14, ...
    std::vector<long> cat{0, 1, 1, 2, 5, 14, 42, 132, 429};
    Poly r(s);
    for (unsigned i = 1; i <= d && i < cat.size(); ++i)
        r = r + Poly::var(s, t).pow(i).scaled(FieldElement::from_int(s, cat[i]));
    return r;
}

} // namespace

TEST_CASE("newton oracle") {
    FieldSpec q = rationals();
    Poly y = Poly::var(q, "y"), x = Poly::var(q, "x"), t = Poly::var(q, "t");

    CHECK(newton_root_oracle(y - x, "y", FieldElement::zero(q), 5).body() == x);

    Series cat = newton_root_oracle(y * y - y + t, "y", FieldElement::zero(q), 5);
    CHECK(cat.body() == catalan_series(q, "t", 5));

    Poly planted = (y - t - t * t) * (y - Poly::constant(q, 1));
    CHECK(newton_root_oracle(planted, "y", FieldElement::zero(q), 4).body() == t + t * t);
    // the conjugate root lifts from alpha = 1
    Series other = newton_root_oracle(planted, "y", FieldElement::one(q), 4);
    CHECK(other.body().constant_term().is_one());

    CHECK_THROWS_WITH_AS(newton_root_oracle(y * y - t, "y", FieldElement::zero(q), 3),
                         doctest::Contains("SingularRoot"), Error);
    CHECK_THROWS_WITH_AS(newton_root_oracle(y - Poly::constant(q, 1) - t, "y",
                                            FieldElement::zero(q), 3),
                         doctest::Contains("NoRoot"), Error);
}

TEST_CASE("furstenberg variants on pinned instances") {
    FieldSpec q = rationals();
    Poly y = Poly::var(q, "y"), t = Poly::var(q, "t");
    RootSpec r0{FieldElement::zero(q), 1, 0};

    for (auto v : {FurstenbergVariant::diagonal, FurstenbergVariant::hasse_closed_form,
                   FurstenbergVariant::char0_closed_form}) {
        CHECK(furstenberg_series(y - t, "y", r0, 6, v).body() == t);
        CHECK(furstenberg_series(y * y - y + t, "y", r0, 5, v).body() ==
              catalan_series(q, "t", 5));
    }

    // planted double root (y - t)^2 (y + 1): e = 2 branch
    RootSpec r2{FieldElement::zero(q), 2, 0};
    Poly P2 = (y - t).pow(2) * (y + Poly::constant(q, 1));
    for (auto v : {FurstenbergVariant::diagonal, FurstenbergVariant::hasse_closed_form,
                   FurstenbergVariant::char0_closed_form})
        CHECK(furstenberg_series(P2, "y", r2, 4, v).body() == t);

    // nonzero alpha: shift handling
    Poly Ps = (y - Poly::constant(q, 1) - t) * (y + Poly::constant(q, 2));
    RootSpec rs{FieldElement::one(q), 1, 0};
    CHECK(furstenberg_series(Ps, "y", rs, 4, FurstenbergVariant::diagonal).body() ==
          t + Poly::constant(q, 1));

    // char divides e is rejected
    FieldSpec f2 = prime_field(2);
    Poly y2 = Poly::var(f2, "y"), t2 = Poly::var(f2, "t");
    RootSpec re{FieldElement::zero(f2), 2, 0};
    CHECK_THROWS_WITH_AS(
        furstenberg_series((y2 - t2).pow(2) * (y2 + Poly::constant(f2, 1)), "y", re, 3,
                           FurstenbergVariant::diagonal),
        doctest::Contains("CharDividesE"), Error);
}

TEST_CASE("three-way agreement with the newton oracle on planted instances") {
    Rng srng(100);
    std::vector<FieldSpec> fields = {rationals(), prime_field(101), extension_field(5, 2, &srng)};
    Rng rng(1001);
    for (FieldSpec s : fields) {
        for (int inst = 0; inst < 12; ++inst) {
            unsigned n = 1 + static_cast<unsigned>(rng.below(2));
            std::vector<std::string> sv;
            for (unsigned i = 0; i < n; ++i) sv.push_back("x" + std::to_string(i + 1));
            unsigned e = 1 + static_cast<unsigned>(rng.below(3));
            if (s.characteristic() != 0 && e % s.characteristic() == 0) e = 1;
            unsigned d = 3 + static_cast<unsigned>(rng.below(3));
            auto inst_data = plant_root(s, sv, "y", e, 2, rng);
            RootSpec rs{FieldElement::zero(s), e, 0};
            Series want(hom_upto(inst_data.phi, sv, d), d);
            Series diag = furstenberg_series(inst_data.P, "y", rs, d, FurstenbergVariant::diagonal);
            Series hasse =
                furstenberg_series(inst_data.P, "y", rs, d, FurstenbergVariant::hasse_closed_form);
            CHECK(diag == want);
            CHECK(hasse == want);
            if (s.characteristic() == 0) {
                Series c0 = furstenberg_series(inst_data.P, "y", rs, d,
                                               FurstenbergVariant::char0_closed_form);
                CHECK(c0 == want);
            }
            if (e == 1) {
                Series newton = newton_root_oracle(inst_data.P, "y", FieldElement::zero(s), d);
                CHECK(newton == want);
            }
        }
    }
}

TEST_CASE("truncation cutoff tightness: one extra term adds nothing") {
    // recompute the hasse closed form with the cutoff + 1 by comparing
    // a precision-(d) run against a precision-d slice of a bigger run
    FieldSpec q = rationals();
    Rng rng(5);
    for (int inst = 0; inst < 5; ++inst) {
        auto pr = plant_root(q, {"x1"}, "y", 1 + static_cast<unsigned>(rng.below(2)), 2, rng);
        RootSpec rs{FieldElement::zero(q), pr.e, 0};
        unsigned d = 4;
        Series a = furstenberg_series(pr.P, "y", rs, d, FurstenbergVariant::hasse_closed_form);
        Series b = furstenberg_series(pr.P, "y", rs, d + 2, FurstenbergVariant::hasse_closed_form);
        CHECK(a.body() == hom_upto(b.body(), b.body().vars(), d));
    }
}

TEST_CASE("charp root powers") {
    SUBCASE("F_2 planted square: phi = t, ell = 1 gives t^2") {
        FieldSpec f2 = prime_field(2);
        Poly y = Poly::var(f2, "y"), t = Poly::var(f2, "t");
        Poly P = (y - t).pow(2) * (y + Poly::constant(f2, 1));
        RootSpec r{FieldElement::zero(f2), 1, 1};
        CHECK(charp_root_power(P, "y", r, 4).body() == t * t);
    }
    SUBCASE("F_3 planted cube of t + t^2") {
        FieldSpec f3 = prime_field(3);
        Poly y = Poly::var(f3, "y"), t = Poly::var(f3, "t");
        Poly P = (y - t - t * t).pow(3) * (Poly::constant(f3, 1) + y);
        RootSpec r{FieldElement::zero(f3), 1, 1};
        // (t + t^2)^3 = t^3 + t^6 over F_3
        CHECK(charp_root_power(P, "y", r, 6).body() == t.pow(3) + t.pow(6));
    }
    SUBCASE("random planted instances match Frobenius powers") {
        Rng srng(7);
        std::vector<FieldSpec> fields = {prime_field(2), prime_field(3),
                                         extension_field(2, 2, &srng), extension_field(3, 2, &srng)};
        Rng rng(99);
        for (FieldSpec s : fields) {
            std::uint64_t p = s.characteristic();
            for (int inst = 0; inst < 8; ++inst) {
                unsigned ell = 1 + static_cast<unsigned>(rng.below(2));
                unsigned e = 1;
                if (p >= 3 && rng.below(2)) e = 2;
                unsigned d = 4 + static_cast<unsigned>(rng.below(3));
                auto pr = plant_root(s, {"t"}, "y", 1, 2, rng);
                // raise the planted factor to multiplicity p^ell * e
                Poly y = Poly::var(s, "y");
                mpz_class q_mpz;
                mpz_ui_pow_ui(q_mpz.get_mpz_t(), p, ell);
                unsigned q = static_cast<unsigned>(q_mpz.get_ui());
                Poly P = (y - pr.phi).pow(q * e) *
                         (Poly::constant(s, 1) + Poly::var(s, "t") * y);
                RootSpec r{FieldElement::zero(s), e, ell};
                Series got = charp_root_power(P, "y", r, d);
                Poly frob(s);
                // phi^(p^ell) termwise (Frobenius is additive)
                for (const auto& [m, c] : pr.phi.terms()) {
                    Poly mono = Poly::from_terms(s, pr.phi.vars(), {{m, FieldElement::one(s)}});
                    frob = frob + mono.pow(q).scaled(c.pow(static_cast<long>(q)));
                }
                CHECK(got.body() == hom_upto(frob, {"t"}, d));
            }
        }
    }
}

TEST_CASE("root circuit") {
    FieldSpec q = rationals();
    SUBCASE("linear: y - x1 - x2") {
        Circuit c = parse_circuit(q, "(- y (+ x1 x2))");
        auto rt = root_circuit(c, "y", 3, 1, 1);
        ExpandOptions o;
        o.degree_cap = 3;
        o.truncated = true;
        CHECK(expand(rt.circuit, o) == Poly::var(q, "x1") + Poly::var(q, "x2"));
    }
    SUBCASE("catalan circuit: y^2 - y + x1") {
        Circuit c = parse_circuit(q, "(+ (* y y) (- 0 y) x1)");
        auto rt = root_circuit(c, "y", 4, 2, 1);
        ExpandOptions o;
        o.degree_cap = 4;
        o.truncated = true;
        CHECK(expand(rt.circuit, o) == catalan_series(q, "x1", 4));
    }
    SUBCASE("semantics + substitution check on random planted instances") {
        Rng rng(17);
        for (FieldSpec s : {rationals(), prime_field(101)}) {
            for (int inst = 0; inst < 6; ++inst) {
                auto pr = plant_root(s, {"x1", "x2"}, "y", 1, 2, rng);
                // normalize dP/dy(0,0) = nonzero guaranteed by e=1 and Q(0,0) != 0
                unsigned d = 2 + static_cast<unsigned>(rng.below(3));
                Circuit c = sigma_pi_circuit(pr.P);
                unsigned dy = static_cast<unsigned>(pr.P.degree_in("y"));
                unsigned dx = static_cast<unsigned>(pr.P.degree_in_set({"x1", "x2"}));
                auto rt = root_circuit(c, "y", d, dy, dx);
                ExpandOptions o;
                o.degree_cap = d;
                o.truncated = true;
                Poly got = expand(rt.circuit, o);
                Series want = newton_root_oracle(map_to(pr.P, rt.circuit.spec()), "y",
                                                 FieldElement::zero(rt.circuit.spec()), d);
                CHECK(got == want.body());
                // substitution check: P(x, phi) = 0 mod degree d+1
                Poly Pbig = map_to(pr.P, rt.circuit.spec());
                Poly comp = substitute(Pbig, {{"y", got}});
                CHECK(hom_upto(comp, {"x1", "x2"}, d).is_zero());
            }
        }
    }
    SUBCASE("depth increment constant across a small sweep") {
        Rng rng(29);
        std::vector<int> incs;
        for (unsigned sz : {3u, 6u, 12u}) {
            Poly f(rationals());
            Poly y = Poly::var(rationals(), "y");
            for (unsigned k = 0; k < sz; ++k)
                f = f + Poly::var(rationals(), "x1").pow(static_cast<unsigned>(1 + rng.below(2))) *
                            Poly::var(rationals(), "x2").pow(static_cast<unsigned>(rng.below(2))) *
                            Poly::constant(rationals(), static_cast<long>(1 + rng.below(5)));
            Poly P = y - Poly::var(rationals(), "x1") * f - Poly::var(rationals(), "x1");
            Circuit c = sigma_pi_circuit(P);
            auto rt = root_circuit(c, "y", 3, 1, (unsigned)std::max(P.degree_in_set({"x1", "x2"}), 1));
            incs.push_back(rt.report.depth_increment);
        }
        CHECK(incs[0] == incs[1]);
        CHECK(incs[1] == incs[2]);
    }
}

TEST_CASE("border root circuit") {
    FieldSpec q = rationals();
    SUBCASE("simple root through a huge-degree padded circuit") {
        // P = y - t plus 0 * (t+y)^1024 padding
        Circuit c(q);
        std::uint32_t t = c.add_input("t");
        std::uint32_t y = c.add_input("y");
        std::uint32_t body = c.add_sum({y, t}, {FieldElement::one(q), -FieldElement::one(q)});
        std::uint32_t one = c.add_const(FieldElement::one(q));
        std::uint32_t s1 = c.add_sum({one, t, y, c.add_prod({t, y})});
        std::uint32_t junk = s1;
        for (int i = 0; i < 10; ++i) junk = c.add_prod({junk, junk});
        c.set_output(c.add_sum({body, junk}, {FieldElement::one(q), FieldElement::zero(q)}));
        CHECK(c.degree_bound() >= 2048);
        // exact expansion of (1+t)^1024 (1+y)^1024 blows past the term cap
        ExpandOptions guard;
        guard.term_limit = 2000;
        CHECK_THROWS_WITH_AS(expand(c, guard), doctest::Contains("DegreeCapExceeded"), Error);

        auto bt = border_root_circuit(c, "t", "y", 1, 3);
        ExpandOptions o;
        o.degree_cap = 3;
        o.truncated = true;
        Poly got = expand(bt.circuit, o);
        // drop O(eps): every coefficient must be exact at eps-order 0
        FieldSpec J = bt.circuit.spec();
        Poly tpoly = Poly::var(q, "t");
        Poly want = tpoly;
        Poly got0(q);
        for (const auto& [m, cf] : got.terms()) {
            FieldElement c0 = jet_order0(cf);
            if (c0.is_zero()) continue;
            got0 = got0 + Poly::from_terms(q, got.vars(), {{m, c0}});
        }
        CHECK(got0 == want);
        (void)J;
    }
    SUBCASE("catalan through the border construction") {
        Circuit c = parse_circuit(q, "(+ (* y y) (- 0 y) t)");
        auto bt = border_root_circuit(c, "t", "y", 1, 3);
        ExpandOptions o;
        o.degree_cap = 3;
        o.truncated = true;
        Poly got = expand(bt.circuit, o);
        Poly want = catalan_series(q, "t", 3);
        Poly got0(q);
        for (const auto& [m, cf] : got.terms()) {
            FieldElement c0 = jet_order0(cf);
            if (c0.is_zero()) continue;
            got0 = got0 + Poly::from_terms(q, got.vars(), {{m, c0}});
        }
        CHECK(got0 == want);
    }
    SUBCASE("planted e = 2 instance") {
        // P = (y-t)^2 (1 + t y)
        Circuit c = parse_circuit(q, "(* (- y t) (- y t) (+ 1 (* t y)))");
        auto bt = border_root_circuit(c, "t", "y", 2, 2);
        ExpandOptions o;
        o.degree_cap = 2;
        o.truncated = true;
        Poly got = expand(bt.circuit, o);
        Poly got0(q);
        for (const auto& [m, cf] : got.terms()) {
            FieldElement c0 = jet_order0(cf);
            if (c0.is_zero()) continue;
            got0 = got0 + Poly::from_terms(q, got.vars(), {{m, c0}});
        }
        CHECK(got0 == Poly::var(q, "t"));
    }
}
