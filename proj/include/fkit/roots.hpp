/** @file roots.hpp
 *  @brief Power series roots of polynomials: Newton-iteration oracle, the
 *         diagonal identity and its closed forms (including the small
 *         characteristic variant computing phi^(p^ell)), and the circuit
 *         constructions for truncated roots (exact and border).
 */
#ifndef FKIT_ROOTS_HPP
#define FKIT_ROOTS_HPP

#include "fkit/circuit.hpp"
#include "fkit/poly.hpp"

namespace fkit {

// unique power series root phi with phi(0) = alpha of P(x.., y), truncated to
// total degree `precision` in the non-y variables; requires a simple root:
// P(0, alpha) = 0, dP/dy(0, alpha) != 0
Series newton_root_oracle(const Poly& P, const std::string& yvar, const FieldElement& alpha,
                          unsigned precision);

enum class FurstenbergVariant {
    diagonal,          // D(y^2 dP(ty,y) / (e P(ty,y)))
    hasse_closed_form, // derivative-weighted coefficient sum; any characteristic
    char0_closed_form, // 1/m-weighted; characteristic 0 (or > the cutoff)
};

// root with multiplicity e (invertible in the field), phi(0) = root.alpha;
// all variants agree with the Newton oracle to the requested precision
Series furstenberg_series(const Poly& P, const std::string& yvar, const RootSpec& root,
                          unsigned precision, FurstenbergVariant variant);

// characteristic p: P = (y - phi)^(p^ell e) Q with gcd(p, e) = 1; computes
// Hom_{<=precision}[phi^(p^ell)] via Hasse derivatives
Series charp_root_power(const Poly& P, const std::string& yvar, const RootSpec& root,
                        unsigned precision);

// exact division by y^e (monomial shift); NotDivisible if any term is lower
Poly divide_by_var_power(const Poly& f, const std::string& v, unsigned e);

// circuit computing Hom_{<=precision}[phi] for the simple root of the
// polynomial computed by C, with phi(0) = 0 and dP/dy(0,0) != 0.
// deg_y / deg_x are caller-supplied degree bounds of C in y resp. the rest.
CircuitTransform root_circuit(const Circuit& C, const std::string& yvar, unsigned precision,
                              unsigned deg_y, unsigned deg_x);

// border construction: C computes bivariate P(t,y) = (y - phi)^e (1 + Q),
// Q(0,0) = 0, of possibly huge syntactic degree; the output circuit over an
// eps-jet field computes Hom_{<=precision}[phi] + O(eps)
CircuitTransform border_root_circuit(const Circuit& C, const std::string& tvar,
                                     const std::string& yvar, unsigned e, unsigned precision);

// forward-mode derivative circuit: computes d(output)/d(var) over the same
// inputs (size grows by the fan-in factor; depth is not preserved)
Circuit derivative_circuit(const Circuit& c, const std::string& var);

} // namespace fkit

#endif
