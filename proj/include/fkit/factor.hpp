/** @file factor.hpp
 *  @brief From power series roots to factors: pre-processing maps, the
 *         truncated rational root family R_F(z), elementary symmetric
 *         functions of root values through companion-matrix power sums, and
 *         the constant-depth-increment factor circuit construction.
 */
#ifndef FKIT_FACTOR_HPP
#define FKIT_FACTOR_HPP

#include "fkit/circuit.hpp"
#include "fkit/poly.hpp"

namespace fkit {

// x_i -> t x_i + a_i y + b_i
struct PreprocessMap {
    std::vector<std::string> xvars; // sorted; parallel to a and b
    std::vector<FieldElement> a, b;
    unsigned degree = 0; // total degree of the target polynomial
};

// the two validity conditions: Hom_deg(F)(a) != 0 and the squarefree part of
// F, shifted x_i -> a_i y + b_i, stays squarefree in y (nonzero discriminant)
bool preprocessing_valid(const Poly& F, const PreprocessMap& psi, const std::string& yvar,
                         std::string* why = nullptr);

PreprocessMap find_preprocessing(const Poly& F, const std::string& yvar, unsigned trials,
                                 Rng& rng);

Poly apply_preprocessing(const Poly& F, const PreprocessMap& psi, const std::string& tvar,
                         const std::string& yvar);
Circuit apply_preprocessing_circuit(const Circuit& C, const PreprocessMap& psi,
                                    const std::string& tvar, const std::string& yvar);

// inverse map x_i -> x_i - a_i y - b_i, t -> 1
Poly undo_preprocessing(const Poly& g, const PreprocessMap& psi, const std::string& tvar,
                        const std::string& yvar);
Circuit undo_preprocessing_circuit(const Circuit& g, const PreprocessMap& psi,
                                   const std::string& tvar, const std::string& yvar);

// truncated rational family R_G(z) = num(z) / w(z)^(2d+3), w = d_y G(0,z);
// evaluating z at a root alpha of G(0,y) yields the series root lifted from
// alpha, modulo t^(d+1)
struct RationalRootFamily {
    Poly num;      // in (x.., t, z)
    Poly den;      // w^(2d+3), univariate in z with constant coefficients
    Poly w;        // d_y G(0, z)
    unsigned precision = 0;
    std::string tvar, zvar;
};
RationalRootFamily rational_root_truncation(const Poly& G, const std::string& tvar,
                                            const std::string& yvar, const std::string& zvar,
                                            unsigned precision);

// Esym_r(g(a_1)/h(a_1), ..., g(a_D)/h(a_D)) over the roots a_i of monic f,
// computed from coefficients only (companion-matrix power sums followed by
// Newton's identities); result stays in the base field
FieldElement esym_at_roots(const Poly& f, const Poly& g, const Poly& h, unsigned r,
                           const std::string& var);

// the factor of G = psi(P) whose boundary at t = 0 is `boundary` (monic, all
// coefficients constants, divides G(0,y)); exact value-level reconstruction
Poly reconstruct_factor_value(const Poly& G, const Poly& boundary, const std::string& tvar,
                              const std::string& yvar, unsigned precision);

// circuit-level version of the same construction; C computes the squarefree
// P(x), psi is a valid pre-processing map for it, and the output computes the
// factor g(t, y) of psi(P) with the given boundary, monic in y
CircuitTransform factor_circuit(const Circuit& C, const PreprocessMap& psi, const Poly& boundary,
                                const std::string& tvar, const std::string& yvar,
                                unsigned precision);

} // namespace fkit

#endif
