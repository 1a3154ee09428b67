#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fkit/circuit.hpp"
#include "helpers.hpp"

using namespace fkit;
using fkit::testing::random_poly;

namespace {

// random layered circuit for cross-checks
Circuit random_circuit(FieldSpec s, const std::vector<std::string>& vars, unsigned layers,
                       unsigned width, Rng& rng) {
    Circuit c(s);
    std::vector<std::uint32_t> pool;
    for (const auto& v : vars) pool.push_back(c.add_input(v));
    pool.push_back(c.add_const(fkit::testing::random_element(s, rng)));
    for (unsigned l = 0; l < layers; ++l) {
        std::vector<std::uint32_t> next;
        for (unsigned w = 0; w < width; ++w) {
            unsigned fanin = 2 + static_cast<unsigned>(rng.below(2));
            std::vector<std::uint32_t> ch;
            for (unsigned f = 0; f < fanin; ++f)
                ch.push_back(pool[rng.below(pool.size())]);
            if (rng.below(2)) {
                std::vector<FieldElement> sc;
                for (unsigned f = 0; f < fanin; ++f)
                    sc.push_back(fkit::testing::random_element(s, rng));
                next.push_back(c.add_sum(std::move(ch), std::move(sc)));
            } else {
                next.push_back(c.add_prod(std::move(ch)));
            }
        }
        pool.insert(pool.end(), next.begin(), next.end());
    }
    c.set_output(pool.back());
    return c;
}

} // namespace

TEST_CASE("metrics") {
    FieldSpec q = rationals();
    Circuit c = parse_circuit(q, "g0=var x1\ng1=var x2\ng2=mul g0 g1\nout g2\n");
    CHECK(c.size() == 2);
    CHECK(c.depth() == 1);
    CHECK(c.degree_bound() == 2);

    Circuit k = parse_circuit(q, "g0=const 3\nout g0\n");
    CHECK(k.size() == 0);
    CHECK(k.depth() == 0);

    // balanced product tree over 8 variables: size 14, depth 3
    Circuit t(q);
    std::vector<std::uint32_t> level;
    for (int i = 0; i < 8; ++i) level.push_back(t.add_input("x" + std::to_string(i + 1)));
    while (level.size() > 1) {
        std::vector<std::uint32_t> up;
        for (size_t i = 0; i < level.size(); i += 2) up.push_back(t.add_prod({level[i], level[i + 1]}));
        level = up;
    }
    t.set_output(level[0]);
    CHECK(t.size() == 14);
    CHECK(t.depth() == 3);
    CHECK(t.degree_bound() == 8);

    // sigma-pi encoding of a 5-term cubic has depth 2
    Rng rng(7);
    Poly f = random_poly(q, {"x1", "x2"}, 3, 5, rng) + Poly::var(q, "x1").pow(3);
    Circuit sp = sigma_pi_circuit(f);
    CHECK(sp.depth() == 2);
    CHECK(expand(sp) == f);
}

TEST_CASE("eval and expand") {
    FieldSpec q = rationals();
    Circuit c = parse_circuit(q, "(* (+ x 1) (- x 1))");
    CHECK(eval_circuit(c, {{"x", FieldElement::from_int(q, 5)}}) == FieldElement::from_int(q, 24));
    Poly x = Poly::var(q, "x");
    CHECK(expand(c) == x * x - Poly::constant(q, 1));

    // (x+y)^2
    Circuit sq = parse_circuit(q, "(* (+ x y) (+ x y))");
    Poly y = Poly::var(q, "y");
    CHECK(expand(sq) == x * x + (x * y).scaled(FieldElement::from_int(q, 2)) + y * y);

    // x^8 via three squarings, exact cap
    Circuit p8 = parse_circuit(q, "g0=var x\ng1=mul g0 g0\ng2=mul g1 g1\ng3=mul g2 g2\nout g3\n");
    ExpandOptions o;
    o.degree_cap = 8;
    CHECK(expand(p8, o) == x.pow(8));
    o.degree_cap = 7;
    CHECK_THROWS_WITH_AS(expand(p8, o), doctest::Contains("DegreeCapExceeded"), Error);

    // truncated mode: (1+x)^10 cut at degree 2
    Circuit b(q);
    std::uint32_t xv = b.add_input("x");
    std::uint32_t e = b.add_sum({xv, b.add_const(FieldElement::one(q))});
    b.set_output(b.add_prod(std::vector<std::uint32_t>(10, e)));
    ExpandOptions t;
    t.degree_cap = 2;
    t.truncated = true;
    Poly got = expand(b, t);
    CHECK(got == Poly::constant(q, 1) + x.scaled(FieldElement::from_int(q, 10)) +
                     x.pow(2).scaled(FieldElement::from_int(q, 45)));

    // random circuits: eval at points == expand-then-eval
    Rng rng(11);
    for (FieldSpec s : {rationals(), prime_field(101)}) {
        for (int i = 0; i < 10; ++i) {
            Circuit rc = random_circuit(s, {"x1", "x2", "x3"}, 3, 3, rng);
            Poly ex = expand(rc);
            for (int j = 0; j < 5; ++j) {
                std::map<std::string, FieldElement> pt;
                for (const auto& v : {"x1", "x2", "x3"})
                    pt[v] = fkit::testing::random_element(s, rng);
                CHECK(eval_circuit(rc, pt) == eval(ex, pt));
            }
        }
    }
}

TEST_CASE("serialization round trip") {
    Rng rng(23);
    for (FieldSpec s : {rationals(), prime_field(13)}) {
        for (int i = 0; i < 10; ++i) {
            Circuit c = random_circuit(s, {"x1", "x2"}, 4, 4, rng);
            std::string text = serialize(c);
            Circuit back = parse_circuit(s, text);
            CHECK(serialize(back) == text);
            CHECK(expand(back) == expand(c));
        }
    }
    FieldSpec q = rationals();
    CHECK_THROWS_WITH_AS(parse_circuit(q, "g0=mul g1 g1\nout g0\n"),
                         doctest::Contains("CycleDetected"), Error);
    CHECK_THROWS_WITH_AS(parse_circuit(q, "g0=var x\n"), doctest::Contains("ParseError"), Error);
}

TEST_CASE("coefficient extraction transforms") {
    FieldSpec q = rationals();
    Poly x = Poly::var(q, "x"), y = Poly::var(q, "y");

    // C = y^2 + x y + 1, coefficient of y^1 is x
    Circuit c = parse_circuit(q, "(+ (* y y) (* x y) 1)");
    auto t = coeff_extract_circuit(c, "y", 1, 2);
    CHECK(expand(t.circuit) == x);
    CHECK(t.report.depth_increment <= 2);

    // C = y^3, d/dy -> 3y^2
    Circuit c3 = parse_circuit(q, "(* y y y)");
    auto dt = partial_derivative_circuit(c3, "y", 1, 3);
    CHECK(expand(dt.circuit) == (y * y).scaled(FieldElement::from_int(q, 3)));
    CHECK(dt.report.depth_increment <= 2);
    auto dt2 = partial_derivative_circuit(c3, "y", 2, 3);
    CHECK(expand(dt2.circuit) == y.scaled(FieldElement::from_int(q, 6)));

    // Hom_{x1,x2},2 of (x1+x2+y)^2
    Circuit h = parse_circuit(q, "(* (+ x1 x2 y) (+ x1 x2 y))");
    auto ht = hom_component_circuit(h, {"x1", "x2"}, 2, 2);
    Poly x1 = Poly::var(q, "x1"), x2 = Poly::var(q, "x2");
    CHECK(expand(ht.circuit) == x1 * x1 + (x1 * x2).scaled(FieldElement::from_int(q, 2)) + x2 * x2);
    CHECK(ht.report.depth_increment <= 2);

    // transform == poly-level op on random circuits, several fields; depth
    // increment <= 2 across a d-sweep
    Rng rng(31);
    for (FieldSpec s : {rationals(), prime_field(101), prime_field(5)}) {
        for (unsigned d = 2; d <= 8; d += 3) {
            Circuit rc = random_circuit(s, {"x1", "y"}, 2, 3, rng);
            Poly ex = expand(rc);
            unsigned dy = static_cast<unsigned>(std::max(ex.degree_in("y"), 1));
            if (dy > d) continue;
            (void)dy;
            for (unsigned idx = 0; idx <= std::min(d, 3u); ++idx) {
                auto ct = coeff_extract_circuit(rc, "y", idx, d);
                Poly want = ex.coeff_of("y", idx);
                // the transform may move to an extension field
                if (ct.circuit.spec() == s) {
                    CHECK(expand(ct.circuit) == want);
                } else {
                    FieldSpec big = ct.circuit.spec();
                    Poly wb(big);
                    for (const auto& [m, cf] : want.terms())
                        wb = wb + Poly::from_terms(big, want.vars(), {{m, embed(cf, big)}});
                    CHECK(expand(ct.circuit) == wb);
                }
                CHECK(ct.report.depth_increment <= 2);
            }
        }
    }
}

TEST_CASE("border coefficient extraction") {
    FieldSpec q = rationals();
    FieldSpec j = jet_field(q, 4);
    auto lift = [&](const FieldElement& e) { return embed(e, j); };

    // C = t^2, d = 2: exact coefficient 1 + O(eps)
    Circuit c(j);
    std::uint32_t t = c.add_input("t");
    c.set_output(c.add_prod({t, t}));
    auto bt = border_coeff_extract(c, "t", 2);
    FieldElement v = eval_circuit(bt.circuit, {});
    CHECK(jet_order0(v).is_one());
    CHECK(bt.report.depth_increment <= 1);

    // C = 1 + t + t^2 + t^9, d = 2: high-degree term lands in O(eps)
    Circuit h(j);
    std::uint32_t th = h.add_input("t");
    std::uint32_t one = h.add_const(FieldElement::one(j));
    std::uint32_t t2 = h.add_prod({th, th});
    std::uint32_t t9 = h.add_prod(std::vector<std::uint32_t>(9, th));
    h.set_output(h.add_sum({one, th, t2, t9}));
    auto bh = border_coeff_extract(h, "t", 2);
    CHECK(jet_order0(eval_circuit(bh.circuit, {})).is_one());

    // C = t, d = 2: zero + O(eps)
    Circuit l(j);
    l.set_output(l.add_input("t"));
    auto bl = border_coeff_extract(l, "t", 2);
    CHECK(jet_order0(eval_circuit(bl.circuit, {})).is_zero());

    // only d+1 evaluations regardless of degree
    CHECK(bh.circuit.gates().size() <= 3 * h.gates().size() + 10);
    (void)lift;
}

TEST_CASE("polynomial identity lemma harness") {
    // nonzero polynomials of degree d vanish on at most d/|S| of a grid
    FieldSpec s = prime_field(101);
    Rng rng(47);
    int zeros = 0, trials = 1000;
    Circuit c = random_circuit(s, {"x1", "x2", "x3"}, 3, 3, rng);
    Poly ex = expand(c);
    while (ex.is_zero()) {
        c = random_circuit(s, {"x1", "x2", "x3"}, 3, 3, rng);
        ex = expand(c);
    }
    int d = ex.total_degree();
    std::size_t S = std::min<std::size_t>(101, 10 * static_cast<std::size_t>(d));
    for (int i = 0; i < trials; ++i) {
        std::map<std::string, FieldElement> pt;
        for (const auto& v : {"x1", "x2", "x3"}) pt[v] = element_by_index(s, rng.below(S));
        if (eval_circuit(c, pt).is_zero()) ++zeros;
    }
    CHECK(zeros <= trials * 15 / 100);
}
