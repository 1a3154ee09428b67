/** @file circuit.hpp
 *  @brief Algebraic circuit IR: gate DAG with unbounded fan-in, scalar edge
 *         weights on sums, wire-count size and gate-layer depth, plus the
 *         interpolation-based coefficient / derivative / homogeneous-part
 *         extraction transforms.
 */
#ifndef FKIT_CIRCUIT_HPP
#define FKIT_CIRCUIT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkit/poly.hpp"

namespace fkit {

struct Gate {
    enum class Kind { input, constant, add, mul };
    Kind kind = Kind::constant;
    std::string name;                      // input
    FieldElement value;                    // constant
    std::vector<std::uint32_t> children;   // add/mul
    std::vector<FieldElement> scalars;     // add: edge weights, parallel to children
};

class Circuit {
public:
    Circuit() = default;
    explicit Circuit(FieldSpec s) : spec_(s) {}

    std::uint32_t add_input(const std::string& name);
    std::uint32_t add_const(const FieldElement& v);
    // weighted sum; scalars parallel to children
    std::uint32_t add_sum(std::vector<std::uint32_t> children, std::vector<FieldElement> scalars);
    std::uint32_t add_sum(std::vector<std::uint32_t> children); // all weights 1
    std::uint32_t add_prod(std::vector<std::uint32_t> children);
    void set_output(std::uint32_t g);

    FieldSpec spec() const { return spec_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::uint32_t output() const;
    bool has_output() const { return output_.has_value(); }
    std::vector<std::string> input_vars() const; // sorted, unique

    std::size_t size() const;      // number of wires
    unsigned depth() const;        // gate layers on the longest output-to-leaf path
    mpz_class degree_bound() const; // syntactic degree of the output gate

private:
    void check_child(std::uint32_t c) const;
    FieldSpec spec_;
    std::vector<Gate> gates_;
    std::optional<std::uint32_t> output_;
};

struct TransformReport {
    std::string construction;
    std::size_t input_size = 0;
    unsigned input_depth = 0;
    std::size_t output_size = 0;
    unsigned output_depth = 0;
    int depth_increment = 0;
    std::vector<std::pair<std::string, std::string>> notes;

    void fill(const Circuit& in, const Circuit& out, const std::string& name);
    void note(const std::string& k, const std::string& v) { notes.emplace_back(k, v); }
    std::string render() const; // key=value lines
};

// line format: `g<k>=var x1` | `g<k>=const <lit>` | `g<k>=add <c>*g<i> ...` |
// `g<k>=mul g<i> g<j> ...` | `out g<k>`; alternatively one s-expression.
Circuit parse_circuit(FieldSpec s, const std::string& text);
std::string serialize(const Circuit& c);

FieldElement eval_circuit(const Circuit& c, const std::map<std::string, FieldElement>& point);

struct ExpandOptions {
    std::optional<unsigned> degree_cap; // required in truncated mode
    bool truncated = false;             // keep only total degree <= degree_cap throughout
    std::size_t term_limit = 1u << 21;  // blow-up guard
};
Poly expand(const Circuit& c, const ExpandOptions& opts = {});
// evaluate gates over the polynomial ring (substituting polynomials for inputs)
Poly expand_at(const Circuit& c, const std::map<std::string, Poly>& images,
               const ExpandOptions& opts = {});

// appends a copy of src into dst; input leaves are produced by leaf_fn
// (returning a dst gate index), constants pass through const_fn
std::uint32_t graft(Circuit& dst, const Circuit& src,
                    const std::function<std::uint32_t(const std::string&)>& leaf_fn,
                    const std::function<FieldElement(const FieldElement&)>& const_fn = {});

// same circuit over another coefficient field
Circuit map_constants(const Circuit& c, FieldSpec target,
                      const std::function<FieldElement(const FieldElement&)>& fn);

struct CircuitTransform {
    Circuit circuit;
    TransformReport report;
};

// interpolation transforms (Ben-Or style): the caller supplies the degree
// bound in the relevant variable. If the field has fewer than degree_bound+1
// elements the construction moves to an extension field automatically; the
// output circuit's spec records that.
CircuitTransform coeff_extract_circuit(const Circuit& c, const std::string& y, unsigned index,
                                       unsigned degree_bound);
CircuitTransform partial_derivative_circuit(const Circuit& c, const std::string& y, unsigned order,
                                            unsigned degree_bound);
CircuitTransform hom_component_circuit(const Circuit& c, const std::vector<std::string>& vars,
                                       unsigned degree, unsigned degree_bound);

// border interpolation: extracts Coeff_{t^index} + O(eps) with index+1
// evaluations regardless of the syntactic degree; input must be over an
// eps-jet spec
CircuitTransform border_coeff_extract(const Circuit& c, const std::string& t, unsigned index);

// interpolation node set + inverse Vandermonde row helpers (shared with the
// root/factor constructions)
std::vector<FieldElement> interpolation_nodes(FieldSpec s, std::size_t count);
// rows[i][j]: weight of f(node_j) in Coeff_{t^i}(f), for deg f < count
std::vector<std::vector<FieldElement>> inverse_vandermonde(const std::vector<FieldElement>& nodes);

// smallest spec of the same characteristic with at least `count` elements
// (possibly an extension), plus an embedding for constants
FieldSpec ensure_field_size(FieldSpec s, std::size_t count,
                            std::function<FieldElement(const FieldElement&)>& embed_fn);

// depth-2 sum-of-monomials encoding of a polynomial value
Circuit sigma_pi_circuit(const Poly& f);

} // namespace fkit

#endif
