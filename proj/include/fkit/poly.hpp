/** @file poly.hpp
 *  @brief Sparse exact multivariate polynomials, truncated power series and
 *         the classical kernels on them (gcd, resultant, squarefree
 *         decomposition, Hasse derivatives, diagonal).
 */
#ifndef FKIT_POLY_HPP
#define FKIT_POLY_HPP

#include <array>
#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fkit/field.hpp"

namespace fkit {

// exponent vector; graded-lex order (total degree first, then lex)
struct Mono {
    static constexpr unsigned max_vars = 12;
    std::uint8_t n = 0;
    std::array<std::uint16_t, max_vars> e{};

    unsigned total() const {
        unsigned s = 0;
        for (unsigned i = 0; i < n; ++i) s += e[i];
        return s;
    }
    bool operator==(const Mono& o) const {
        if (n != o.n) return false;
        for (unsigned i = 0; i < n; ++i)
            if (e[i] != o.e[i]) return false;
        return true;
    }
    bool operator<(const Mono& o) const {
        unsigned ta = total(), tb = o.total();
        if (ta != tb) return ta < tb;
        for (unsigned i = 0; i < n; ++i)
            if (e[i] != o.e[i]) return e[i] < o.e[i];
        return false;
    }
    bool divides(const Mono& o) const {
        for (unsigned i = 0; i < n; ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }
};

struct MonoHash {
    std::size_t operator()(const Mono& m) const {
        std::size_t h = 1469598103934665603ull;
        for (unsigned i = 0; i < m.n; ++i) {
            h ^= m.e[i];
            h *= 1099511628211ull;
        }
        return h;
    }
};

// total degree of the zero polynomial
constexpr int deg_minus_infinity = INT_MIN;

class Poly {
public:
    using Term = std::pair<Mono, FieldElement>;

    Poly() = default;
    explicit Poly(FieldSpec s) : spec_(s) {}

    static Poly constant(FieldSpec s, const FieldElement& c);
    static Poly constant(FieldSpec s, long c) { return constant(s, FieldElement::from_int(s, c)); }
    static Poly var(FieldSpec s, const std::string& name);
    // terms given as (exponents-by-var-name, coefficient)
    static Poly from_terms(FieldSpec s, const std::vector<std::string>& vars,
                           std::vector<Term> terms);

    FieldSpec spec() const { return spec_; }
    bool valid() const { return spec_.valid(); }
    const std::vector<std::string>& vars() const { return vars_; }
    int var_index(const std::string& name) const;
    // ascending graded-lex, no zero coefficients
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    int total_degree() const; // deg_minus_infinity for the zero polynomial
    int degree_in(const std::string& v) const;
    int degree_in_set(const std::vector<std::string>& vs) const;

    FieldElement constant_term() const;
    FieldElement leading_coeff() const; // graded-lex leading term
    FieldElement coeff_of_mono(const std::vector<std::string>& names,
                               const std::vector<unsigned>& exps) const;

    // polynomial in `v`: coefficient of v^j (same spec, v-free)
    Poly coeff_of(const std::string& v, unsigned j) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly operator-() const;
    Poly scaled(const FieldElement& c) const;
    Poly pow(unsigned e) const;
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // monic w.r.t. the graded-lex leading coefficient
    Poly normalized() const;

    std::string str() const;

    // internal: re-expressed over a variable universe (superset of vars())
    Poly with_vars(const std::vector<std::string>& universe) const;

private:
    friend class PolyBuilder;
    FieldSpec spec_;
    std::vector<std::string> vars_; // sorted by name
    std::vector<Term> terms_;       // ascending graded-lex
};

// mutable accumulator used by the kernels
class PolyBuilder {
public:
    PolyBuilder(FieldSpec s, std::vector<std::string> vars) : spec_(s), vars_(std::move(vars)) {}
    void add(const Mono& m, const FieldElement& c);
    Poly take();

private:
    FieldSpec spec_;
    std::vector<std::string> vars_;
    std::unordered_map<Mono, FieldElement, MonoHash> acc_;
};

// ---------------------------------------------------------------------------
// arithmetic beyond the operators

Poly exact_div(const Poly& a, const Poly& b); // NotDivisible on failure
bool divides(const Poly& b, const Poly& a);   // b | a

struct PseudoDiv {
    Poly quot, rem;
    unsigned scale_pow; // lc(g)^scale_pow * f = quot*g + rem
};
PseudoDiv pseudo_div(const Poly& f, const Poly& g, const std::string& v);

// multivariate gcd by primitive PRS over the univariate kernel; result
// normalized monic w.r.t. graded-lex
Poly gcd(const Poly& a, const Poly& b);
Poly gcd_univariate(const Poly& a, const Poly& b, const std::string& v);

Poly content_in(const Poly& f, const std::string& v);
Poly primitive_part_in(const Poly& f, const std::string& v);

Poly derivative(const Poly& f, const std::string& v);
Poly hasse_derivative(const Poly& f, const std::string& v, unsigned i);

// f = unit * prod_i P_i^i with the P_i squarefree and pairwise coprime;
// result[i-1] = P_i (constants trimmed), unit returned separately
struct SquarefreeDecomposition {
    std::vector<Poly> components; // components[i] has multiplicity i+1
    FieldElement unit;
    Poly squarefree_part() const;
};
SquarefreeDecomposition squarefree_decomposition(const Poly& f);

Poly resultant(const Poly& P, const Poly& Q, const std::string& v);
Poly discriminant(const Poly& P, const std::string& v);

// homogeneous component of degree i w.r.t. the given variable subset
Poly hom_component(const Poly& f, const std::vector<std::string>& vs, unsigned i);
Poly hom_upto(const Poly& f, const std::vector<std::string>& vs, unsigned d);
// truncation by degree in a single variable
Poly truncate_in_var(const Poly& f, const std::string& v, unsigned d);

// coefficient of t^i = coefficient of t^i y^i; y is removed from the result
Poly diagonal(const Poly& F, const std::string& tvar, const std::string& yvar);

Poly substitute(const Poly& f, const std::map<std::string, Poly>& images);
FieldElement eval(const Poly& f, const std::map<std::string, FieldElement>& point);

// dense univariate view; f must involve no variable besides v
std::vector<FieldElement> to_dense(const Poly& f, const std::string& v);
Poly from_dense(FieldSpec s, const std::string& v, const std::vector<FieldElement>& c);

Poly parse_poly(FieldSpec s, const std::string& text);

// ---------------------------------------------------------------------------
// truncated power series: all terms of total degree <= order

class Series {
public:
    Series() = default;
    Series(Poly body, unsigned order);
    static Series zero(FieldSpec s, unsigned order) { return Series(Poly(s), order); }

    const Poly& body() const { return body_; }
    unsigned order() const { return order_; }
    FieldSpec spec() const { return body_.spec(); }
    bool is_zero() const { return body_.is_zero(); }

    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);
    friend Series operator*(const Series& a, const Series& b);
    Series operator-() const { return Series(-body_, order_); }
    Series scaled(const FieldElement& c) const { return Series(body_.scaled(c), order_); }
    Series pow(unsigned e) const;
    Series inv() const; // constant term must be a unit
    Series truncated(unsigned order) const;
    bool operator==(const Series& o) const { return order_ == o.order_ && body_ == o.body_; }

    std::string str() const { return body_.str(); }

private:
    Poly body_;
    unsigned order_ = 0;
};

// root multiplicity data: total multiplicity p^ell * e with gcd(char, e) = 1
struct RootSpec {
    FieldElement alpha; // constant term of the root (0 after shifting)
    unsigned e = 1;
    unsigned ell = 0;
};

} // namespace fkit

#endif
