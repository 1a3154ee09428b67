/** @file field.hpp
 *  @brief Exact coefficient domains: Q, F_p, F_{p^k} and truncated eps-jets
 *         (Laurent jets with an integer valuation).
 */
#ifndef FKIT_FIELD_HPP
#define FKIT_FIELD_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "fkit/error.hpp"
#include "fkit/rng.hpp"

namespace fkit {

enum class FieldKind { rationals, prime, extension, eps_jet };

struct FieldRep;
class FieldElement;

// Lightweight handle to an interned immutable field description. Handles
// compare by identity; interning makes identical descriptors share one rep.
class FieldSpec {
public:
    FieldSpec() : rep_(nullptr) {}
    explicit FieldSpec(const FieldRep* rep) : rep_(rep) {}

    bool valid() const { return rep_ != nullptr; }
    FieldKind kind() const;
    // 0 for rationals and for jets over rationals
    std::uint64_t characteristic() const;
    std::uint64_t prime() const;     // prime/extension kinds
    unsigned ext_degree() const;     // k (1 for prime fields)
    // monic modulus c0..ck with ck = 1, over F_p (extension kind)
    const std::vector<std::uint64_t>& modulus() const;
    FieldSpec jet_base() const;      // eps_jet kind
    unsigned jet_order() const;      // eps_jet kind
    // number of elements, if finite and small enough to enumerate
    std::optional<std::uint64_t> size() const;

    std::string descriptor() const;  // canonical text form, parseable back

    bool operator==(const FieldSpec& o) const { return rep_ == o.rep_; }
    bool operator!=(const FieldSpec& o) const { return rep_ != o.rep_; }
    const FieldRep* rep() const { return rep_; }

private:
    const FieldRep* rep_;
};

// Parsed descriptors: `Q`, `Fp:<p>`, `Fq:<p>^<k>[:<c0,c1,...,ck>]`,
// `eps:<base>:<order>`. Random modulus search (when no modulus is given)
// uses the provided rng; pass a fixed seed for reproducibility.
FieldSpec make_field(const std::string& descriptor, Rng* rng = nullptr);
FieldSpec rationals();
FieldSpec prime_field(std::uint64_t p);
FieldSpec extension_field(std::uint64_t p, unsigned k, Rng* rng = nullptr);
FieldSpec extension_field(std::uint64_t p, const std::vector<std::uint64_t>& modulus);
FieldSpec jet_field(FieldSpec base, unsigned order);

struct JetVal;

// Immutable field element. Arithmetic never mixes specs (SpecMismatch).
class FieldElement {
public:
    using ExtVec = std::vector<std::uint64_t>;
    using JetPtr = std::shared_ptr<const JetVal>;

    FieldElement() : spec_(nullptr), v_(std::uint64_t{0}) {}

    static FieldElement zero(FieldSpec s);
    static FieldElement one(FieldSpec s);
    static FieldElement from_int(FieldSpec s, long v);
    static FieldElement from_mpz(FieldSpec s, const mpz_class& v);
    static FieldElement from_mpq(FieldSpec s, const mpq_class& v); // rationals/jet-over-Q only
    static FieldElement from_residue(FieldSpec s, std::uint64_t r);        // prime kind
    static FieldElement from_coeffs(FieldSpec s, const ExtVec& c);         // extension kind
    // jet with given valuation and base-field coefficients (c[0] != 0 unless empty)
    static FieldElement jet(FieldSpec s, std::int64_t valuation,
                            std::vector<FieldElement> coeffs);

    FieldSpec spec() const { return FieldSpec(spec_); }
    bool is_zero() const;
    bool is_one() const;

    // representation accessors (checked)
    const mpq_class& rat() const;
    std::uint64_t residue() const;
    const ExtVec& coeffs() const;
    std::int64_t jet_valuation() const;
    const std::vector<FieldElement>& jet_coeffs() const;

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
    FieldElement operator-() const;
    FieldElement inv() const;
    FieldElement pow(const mpz_class& e) const;
    FieldElement pow(long e) const { return pow(mpz_class(e)); }

    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }
    // total order within one spec; used only for canonical sorting
    bool less(const FieldElement& o) const;

    std::string str() const;

private:
    friend struct FieldOps;
    const FieldRep* spec_;
    std::variant<mpq_class, std::uint64_t, ExtVec, JetPtr> v_;
};

struct JetVal {
    std::int64_t val = 0;                // valuation of leading coefficient
    std::vector<FieldElement> c;         // c[0] != 0; empty means the zero jet
};

// i-th element in the canonical enumeration of the field (Q: 0,1,2,...;
// F_p: residues; F_{p^k}: base-p digit vectors; jets: base elements embedded).
// Throws FieldTooSmall when a finite field has fewer than i+1 elements.
FieldElement element_by_index(FieldSpec s, std::uint64_t i);

// embeddings that need no root data: F_p into F_{p^k}, base field into jets,
// and identity. Anything else raises SpecMismatch.
FieldElement embed(const FieldElement& x, FieldSpec target);

// integer literal parsing for the given spec; extension literals use
// `{c0,c1,...}`, rationals accept `a/b`.
FieldElement parse_element(FieldSpec s, const std::string& text);

// eps-order-0 coefficient of a jet whose valuation is >= 0 (the "drop O(eps)"
// read-off). Raises NonUnitConstantTerm if the valuation is negative.
FieldElement jet_order0(const FieldElement& x);

bool is_prime_u64(std::uint64_t n);

} // namespace fkit

#endif
