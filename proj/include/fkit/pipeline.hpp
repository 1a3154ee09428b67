/** @file pipeline.hpp
 *  @brief End-to-end deterministic factorization: squarefree split,
 *         pre-processing, variable reduction through a pluggable generator,
 *         base factorization by power-series recombination, factor
 *         reconstruction and certificates.
 */
#ifndef FKIT_PIPELINE_HPP
#define FKIT_PIPELINE_HPP

#include "fkit/factor.hpp"

namespace fkit {

// variable-reduction seam: x_i -> image polynomial in w-variables
struct GeneratorSpec {
    std::string name = "passthrough";
    std::uint64_t seed = 0;
    unsigned width = 0; // |w|
    std::map<std::string, Poly> images;

    static GeneratorSpec passthrough();
    static GeneratorSpec affine(FieldSpec s, const std::vector<std::string>& xvars, unsigned width,
                                std::uint64_t seed);
    static GeneratorSpec custom(std::map<std::string, Poly> images);
    std::string describe() const;
};

// applies the generator to the x variables only; touching t or y is an error
Poly variable_reduce(const Poly& F, const GeneratorSpec& gen, const std::string& tvar,
                     const std::string& yvar);

// f | g, by exact pseudo-division in the main variable
bool divisibility_test(const Poly& f, const Poly& g, const std::string& yvar);

// ---------------------------------------------------------------------------
// dense oracle factorization (finite fields)

struct OracleFactor {
    Poly poly; // canonically normalized irreducible
    unsigned multiplicity;
};
struct OracleFactorization {
    std::vector<OracleFactor> factors;
    FieldElement unit;
    Poly reassemble() const;
};

OracleFactorization oracle_factorize(const Poly& f, Rng& rng);
bool oracle_irreducible(const Poly& f, Rng& rng);

// factors of a pre-processed polynomial G(x.., t, y): monic in y up to a
// constant, G(0,y) squarefree. Lifts every root of G(0,y) to a power series
// and recombines minimal base-field subsets (accepted subsets never re-enter).
std::vector<Poly> recombination_factorize(const Poly& G, const std::string& tvar,
                                          const std::string& yvar, Rng& rng);

// ---------------------------------------------------------------------------
// irreducibility preservation harness

struct PreservationReport {
    bool preserved = false;
    unsigned factors_before = 0;
    unsigned factors_after = 0;
    std::string detail;
};
// F must satisfy: monic in y (constant leading coefficient), every monomial
// containing an x also contains t, and F(0,0,y) squarefree
PreservationReport irreducibility_preservation_check(const Poly& F, const GeneratorSpec& gen,
                                                     const std::string& tvar,
                                                     const std::string& yvar, Rng& rng);

// ---------------------------------------------------------------------------
// full pipeline

struct PipelineConfig {
    std::string tvar = "t";
    std::string yvar = "y";
    std::uint64_t seed = 1;
    unsigned degree_cap = 16;
    unsigned trials = 400;
    bool emit_circuits = true;
    unsigned pit_samples = 20;
    GeneratorSpec generator;          // empty images + name "affine" => seeded per input
    std::vector<Poly> planted_factors; // rational mode runs with planted boundaries
};

struct FactorEntry {
    Poly expansion; // canonical normalized irreducible factor
    unsigned multiplicity = 1;
    bool has_circuit = false;
    Circuit circuit; // constant-depth-increment construction, undone
    TransformReport report;
};

struct FactorizationResult {
    std::vector<FactorEntry> factors;
    FieldElement unit;
    bool certificate_ok = false;
    unsigned pit_samples = 0;
    std::string certificate_detail;
    Poly input_expansion;
};

// squarefree components re-encoded as depth-2 circuits plus multiplicities
struct SquarefreePipeline {
    std::vector<std::pair<Circuit, unsigned>> components;
    std::vector<Poly> dense;
    FieldElement unit;
};
SquarefreePipeline squarefree_part_pipeline(const Circuit& C, unsigned degree_cap);

FactorizationResult factorize_full(const Circuit& C, const PipelineConfig& cfg);

} // namespace fkit

#endif
