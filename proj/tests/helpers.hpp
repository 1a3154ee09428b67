// shared generators for randomized suites
#ifndef FKIT_TESTS_HELPERS_HPP
#define FKIT_TESTS_HELPERS_HPP

#include "fkit/poly.hpp"
#include "fkit/rng.hpp"

namespace fkit::testing {

inline FieldElement random_element(FieldSpec s, Rng& rng, long lo = -9, long hi = 9) {
    if (s.kind() == FieldKind::rationals) return FieldElement::from_int(s, rng.range(lo, hi));
    return element_by_index(s, rng.below(*s.size()));
}

inline FieldElement random_nonzero(FieldSpec s, Rng& rng) {
    for (;;) {
        FieldElement e = random_element(s, rng);
        if (!e.is_zero()) return e;
    }
}

// embed a polynomial's coefficients into a larger field (prime -> extension)
inline Poly map_to(const Poly& f, FieldSpec target) {
    if (f.spec() == target) return f;
    PolyBuilder b(target, f.vars());
    for (const auto& [m, c] : f.terms()) b.add(m, embed(c, target));
    return b.take();
}

inline Poly random_poly(FieldSpec s, const std::vector<std::string>& vars, unsigned maxdeg,
                        unsigned nterms, Rng& rng) {
    Poly r(s);
    for (unsigned i = 0; i < nterms; ++i) {
        Poly t = Poly::constant(s, random_element(s, rng));
        for (const auto& v : vars)
            t = t * Poly::var(s, v).pow(static_cast<unsigned>(rng.below(maxdeg + 1)));
        r = r + t;
    }
    return r;
}

// power series root instance: P = (y - phi)^e * Q over the series variables
// `sv`, with phi(0) = 0 and Q(0,0) != 0
struct PlantedRoot {
    Poly P;
    Poly phi;   // polynomial truncation of the planted root
    unsigned e;
};

inline PlantedRoot plant_root(FieldSpec s, const std::vector<std::string>& sv,
                              const std::string& yvar, unsigned e, unsigned phideg, Rng& rng) {
    Poly phi(s);
    for (const auto& v : sv) {
        Poly t = Poly::var(s, v).scaled(random_element(s, rng));
        for (unsigned k = 2; k <= phideg; ++k)
            t = t + Poly::var(s, v).pow(k).scaled(random_element(s, rng));
        phi = phi + t;
    }
    Poly y = Poly::var(s, yvar);
    Poly Q = Poly::constant(s, random_nonzero(s, rng)) + random_poly(s, sv, 2, 3, rng) * y +
             (random_poly(s, sv, 2, 2, rng) + y).scaled(random_element(s, rng)) *
                 Poly::var(s, sv[0]);
    // make sure Q(0,0) survived the additions
    std::map<std::string, Poly> zero_map;
    for (const auto& v : sv) zero_map[v] = Poly(s);
    zero_map[yvar] = Poly(s);
    if (substitute(Q, zero_map).is_zero()) Q = Q + Poly::constant(s, 1);
    PlantedRoot out;
    out.P = (y - phi).pow(e) * Q;
    out.phi = phi;
    out.e = e;
    return out;
}

} // namespace fkit::testing

#endif
