/** @file ufactor.hpp
 *  @brief Univariate factorization over finite fields (squarefree split,
 *         distinct-degree, Cantor-Zassenhaus / trace-map equal-degree),
 *         splitting fields and field embeddings.
 */
#ifndef FKIT_UFACTOR_HPP
#define FKIT_UFACTOR_HPP

#include <vector>

#include "fkit/poly.hpp"
#include "fkit/rng.hpp"

namespace fkit {

struct UnivariateFactors {
    std::vector<std::pair<Poly, unsigned>> factors; // monic irreducible, multiplicity
    FieldElement lead;
};

// f nonzero univariate in v over F_p or F_{p^k}
UnivariateFactors univariate_factor_ff(const Poly& f, const std::string& v, Rng& rng);

bool is_irreducible_ff(const Poly& f, const std::string& v, Rng& rng);

// embedding of a prime field or F_{p^j} into F_{p^K} (j | K); deterministic
// given the rng seed (the generator image is the canonically smallest root).
class FieldHom {
public:
    FieldHom() = default;
    FieldHom(FieldSpec from, FieldSpec to, FieldElement gen_image);
    FieldSpec from() const { return from_; }
    FieldSpec to() const { return to_; }
    FieldElement operator()(const FieldElement& x) const;
    // preimage; raises SpecMismatch when x is outside the image
    FieldElement down(const FieldElement& x) const;

private:
    FieldSpec from_, to_;
    FieldElement gen_image_;
    std::vector<FieldElement> gen_pows_;
};

FieldHom make_embedding(FieldSpec from, FieldSpec to, Rng& rng);

// smallest-degree extension of the prime field containing every root of f;
// returns the spec and the embedding of f's coefficient field into it
struct SplittingField {
    FieldSpec field;
    FieldHom embed; // f's spec -> field
};
SplittingField splitting_field(const Poly& f, const std::string& v, Rng& rng);

// all roots of f (with multiplicity dropped) inside `ext`, sorted canonically;
// `hom` maps f's coefficients into ext
std::vector<FieldElement> roots_in(const Poly& f, const std::string& v, const FieldHom& hom,
                                   Rng& rng);

// does x lie in the image of the prime field / subfield j (Frobenius fix test)
bool in_subfield(const FieldElement& x, unsigned subfield_degree);

Poly map_coeffs(const Poly& f, const FieldHom& hom);

} // namespace fkit

#endif
