#ifndef FKIT_ERROR_HPP
#define FKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fkit {

enum class errc {
    // field
    not_prime,
    reducible_modulus,
    unsupported_descriptor,
    division_by_zero,
    spec_mismatch,
    zero_polynomial,
    infinite_field,
    // poly
    not_divisible,
    both_zero,
    degree_zero_input,
    // circuit
    parse_error,
    cycle_detected,
    unknown_variable,
    missing_assignment,
    degree_cap_exceeded,
    field_too_small,
    degree_bound_violated,
    // roots
    singular_root,
    no_root,
    non_unit_constant_term,
    char_divides_e,
    nonzero_q_at_origin,
    // factor
    trials_exhausted,
    invalid_map,
    not_squarefree_at_zero,
    h_vanishes_at_root,
    char_too_small_for_newton,
    boundary_not_in_base_field,
    not_a_factor,
    // pipeline
    generator_touches_ty,
    precision_too_low,
    hypothesis_violated,
    certificate_failed,
    internal,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::not_prime: return "NotPrime";
    case errc::reducible_modulus: return "ReducibleModulus";
    case errc::unsupported_descriptor: return "UnsupportedDescriptor";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::spec_mismatch: return "SpecMismatch";
    case errc::zero_polynomial: return "ZeroPolynomial";
    case errc::infinite_field: return "InfiniteField";
    case errc::not_divisible: return "NotDivisible";
    case errc::both_zero: return "BothZero";
    case errc::degree_zero_input: return "DegreeZeroInput";
    case errc::parse_error: return "ParseError";
    case errc::cycle_detected: return "CycleDetected";
    case errc::unknown_variable: return "UnknownVariable";
    case errc::missing_assignment: return "MissingAssignment";
    case errc::degree_cap_exceeded: return "DegreeCapExceeded";
    case errc::field_too_small: return "FieldTooSmall";
    case errc::degree_bound_violated: return "DegreeBoundViolated";
    case errc::singular_root: return "SingularRoot";
    case errc::no_root: return "NoRoot";
    case errc::non_unit_constant_term: return "NonUnitConstantTerm";
    case errc::char_divides_e: return "CharDividesE";
    case errc::nonzero_q_at_origin: return "NonzeroQAtOrigin";
    case errc::trials_exhausted: return "TrialsExhausted";
    case errc::invalid_map: return "InvalidMap";
    case errc::not_squarefree_at_zero: return "NotSquarefreeAtZero";
    case errc::h_vanishes_at_root: return "HVanishesAtRoot";
    case errc::char_too_small_for_newton: return "CharTooSmallForNewton";
    case errc::boundary_not_in_base_field: return "BoundaryNotInBaseField";
    case errc::not_a_factor: return "NotAFactor";
    case errc::generator_touches_ty: return "GeneratorTouchesTY";
    case errc::precision_too_low: return "PrecisionTooLow";
    case errc::hypothesis_violated: return "HypothesisViolated";
    case errc::certificate_failed: return "CertificateFailed";
    case errc::internal: return "Internal";
    }
    return "Unknown";
}

} // namespace fkit

#endif
