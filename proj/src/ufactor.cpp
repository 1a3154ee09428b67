#include "fkit/ufactor.hpp"

#include <algorithm>
#include <numeric>

namespace fkit {

namespace {

// dense univariate arithmetic over an arbitrary field spec, ascending
// coefficients with no trailing zeros
using Dense = std::vector<FieldElement>;

void dtrim(Dense& a) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
}

int ddeg(const Dense& a) { return static_cast<int>(a.size()) - 1; }

Dense dmul(const Dense& a, const Dense& b, FieldSpec s) {
    if (a.empty() || b.empty()) return {};
    Dense r(a.size() + b.size() - 1, FieldElement::zero(s));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    }
    dtrim(r);
    return r;
}

Dense dsub(Dense a, const Dense& b, FieldSpec s) {
    if (a.size() < b.size()) a.resize(b.size(), FieldElement::zero(s));
    for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] - b[i];
    dtrim(a);
    return a;
}

Dense dmonic(Dense a) {
    dtrim(a);
    if (a.empty() || a.back().is_one()) return a;
    FieldElement inv = a.back().inv();
    for (auto& c : a) c = c * inv;
    return a;
}

Dense drem(Dense a, const Dense& m) {
    // m monic
    dtrim(a);
    while (ddeg(a) >= ddeg(m)) {
        FieldElement c = a.back();
        size_t shift = a.size() - m.size();
        if (!c.is_zero())
            for (size_t i = 0; i < m.size(); ++i) a[i + shift] = a[i + shift] - c * m[i];
        a.pop_back();
        dtrim(a);
    }
    return a;
}

Dense dgcd(Dense a, Dense b) {
    dtrim(a);
    dtrim(b);
    while (!b.empty()) {
        b = dmonic(std::move(b));
        Dense r = drem(std::move(a), b);
        a = std::move(b);
        b = std::move(r);
    }
    return dmonic(std::move(a));
}

Dense dpowmod(Dense base, mpz_class e, const Dense& m, FieldSpec s) {
    Dense r{FieldElement::one(s)};
    base = drem(std::move(base), m);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = drem(dmul(r, base, s), m);
        base = drem(dmul(base, base, s), m);
        e >>= 1;
    }
    return r;
}

Dense dx(FieldSpec s) { return Dense{FieldElement::zero(s), FieldElement::one(s)}; }

Dense drandom(FieldSpec s, int deg, Rng& rng) {
    auto size = s.size();
    Dense r;
    for (int i = 0; i <= deg; ++i)
        r.push_back(element_by_index(s, rng.below(*size)));
    dtrim(r);
    return r;
}

mpz_class field_card(FieldSpec s) {
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), s.prime(), s.ext_degree());
    return q;
}

// exact quotient of monic polynomials (remainder must vanish)
Dense dquot_exact(const Dense& num, const Dense& den, FieldSpec s) {
    Dense a = num;
    Dense quot(static_cast<size_t>(ddeg(num) - ddeg(den)) + 1, FieldElement::zero(s));
    while (ddeg(a) >= ddeg(den)) {
        FieldElement c = a.back();
        size_t shift = a.size() - den.size();
        quot[shift] = c;
        for (size_t i = 0; i < den.size(); ++i) a[i + shift] = a[i + shift] - c * den[i];
        a.pop_back();
        dtrim(a);
    }
    if (!a.empty()) raise(errc::internal, "dense division not exact");
    return quot;
}

// equal-degree splitting: every irreducible factor of g has degree d
void edf(const Dense& g, unsigned d, FieldSpec s, Rng& rng, std::vector<Dense>& out) {
    if (ddeg(g) == static_cast<int>(d)) {
        out.push_back(g);
        return;
    }
    Dense h;
    for (int attempt = 0; attempt < 500 && h.empty(); ++attempt) {
        Dense a = drandom(s, ddeg(g) - 1, rng);
        if (a.empty()) continue;
        Dense u;
        if (s.prime() == 2) {
            // trace map into F_2: a + a^2 + a^4 + ... + a^(2^(k*d-1)) mod g
            unsigned rounds = s.ext_degree() * d;
            Dense acc = drem(a, g);
            Dense cur = acc;
            for (unsigned i = 1; i < rounds; ++i) {
                cur = drem(dmul(cur, cur, s), g);
                if (acc.size() < cur.size()) acc.resize(cur.size(), FieldElement::zero(s));
                for (size_t t = 0; t < cur.size(); ++t) acc[t] = acc[t] + cur[t];
                dtrim(acc);
            }
            u = acc;
        } else {
            mpz_class qd;
            mpz_class q = field_card(s);
            mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), d);
            mpz_class e = (qd - 1) / 2;
            Dense b = dpowmod(a, e, g, s);
            u = dsub(std::move(b), Dense{FieldElement::one(s)}, s);
        }
        Dense cand = dgcd(u, g);
        if (ddeg(cand) > 0 && ddeg(cand) < ddeg(g)) h = dmonic(std::move(cand));
    }
    if (h.empty()) raise(errc::internal, "equal-degree splitting failed");
    Dense quotient = dmonic(dquot_exact(g, h, s));
    edf(h, d, s, rng, out);
    edf(quotient, d, s, rng, out);
}

// distinct-degree factorization of a monic squarefree f
std::vector<std::pair<Dense, unsigned>> ddf(Dense f, FieldSpec s, Rng& rng) {
    std::vector<std::pair<Dense, unsigned>> out;
    mpz_class q = field_card(s);
    Dense h = dx(s);
    unsigned d = 0;
    while (ddeg(f) > 0) {
        ++d;
        if (2 * d > static_cast<unsigned>(ddeg(f))) {
            out.emplace_back(f, static_cast<unsigned>(ddeg(f)));
            break;
        }
        h = dpowmod(std::move(h), q, f, s);
        Dense diff = dsub(Dense(h), dx(s), s);
        Dense g = dgcd(diff, f);
        if (ddeg(g) > 0) {
            out.emplace_back(g, d);
            f = dmonic(dquot_exact(f, g, s));
            h = drem(std::move(h), f);
        }
    }
    std::vector<std::pair<Dense, unsigned>> split;
    for (auto& [g, deg] : out) {
        std::vector<Dense> eq;
        edf(g, deg, s, rng, eq);
        for (auto& e : eq) split.emplace_back(std::move(e), deg);
    }
    return split;
}

} // namespace

UnivariateFactors univariate_factor_ff(const Poly& f, const std::string& v, Rng& rng) {
    FieldSpec s = f.spec();
    if (s.kind() != FieldKind::prime && s.kind() != FieldKind::extension)
        raise(errc::infinite_field, "univariate factorization needs a finite field");
    if (f.is_zero()) raise(errc::zero_polynomial, "factor of 0");
    UnivariateFactors res;
    res.lead = f.leading_coeff();
    if (f.is_constant()) return res;
    auto sq = squarefree_decomposition(f);
    res.lead = sq.unit;
    for (size_t mi = 0; mi < sq.components.size(); ++mi) {
        const Poly& comp = sq.components[mi];
        if (comp.is_constant()) continue;
        Dense d = to_dense(comp, v);
        auto irr = ddf(dmonic(std::move(d)), s, rng);
        for (auto& [fac, deg] : irr) {
            (void)deg;
            res.factors.emplace_back(from_dense(s, v, fac), static_cast<unsigned>(mi + 1));
        }
    }
    std::sort(res.factors.begin(), res.factors.end(), [](const auto& a, const auto& b) {
        if (a.first.total_degree() != b.first.total_degree())
            return a.first.total_degree() < b.first.total_degree();
        return a.first.str() < b.first.str();
    });
    return res;
}

bool is_irreducible_ff(const Poly& f, const std::string& v, Rng& rng) {
    if (f.is_constant()) return false;
    auto fac = univariate_factor_ff(f, v, rng);
    return fac.factors.size() == 1 && fac.factors[0].second == 1;
}

// ---------------------------------------------------------------------------
// embeddings

FieldHom::FieldHom(FieldSpec from, FieldSpec to, FieldElement gen_image)
    : from_(from), to_(to), gen_image_(gen_image) {
    if (from_ == to_) return;
    unsigned j = from_.kind() == FieldKind::extension ? from_.ext_degree() : 1;
    gen_pows_.push_back(FieldElement::one(to_));
    for (unsigned i = 1; i < j; ++i) gen_pows_.push_back(gen_pows_.back() * gen_image_);
}

FieldElement FieldHom::operator()(const FieldElement& x) const {
    if (x.spec() != from_) raise(errc::spec_mismatch, "FieldHom input");
    if (from_ == to_) return x;
    if (from_.kind() == FieldKind::prime)
        return FieldElement::from_mpz(to_, mpz_class(static_cast<unsigned long>(x.residue())));
    FieldElement acc = FieldElement::zero(to_);
    const auto& c = x.coeffs();
    for (size_t i = 0; i < c.size(); ++i) {
        if (!c[i]) continue;
        FieldElement ci = FieldElement::from_mpz(to_, mpz_class(static_cast<unsigned long>(c[i])));
        acc = acc + ci * gen_pows_[i];
    }
    return acc;
}

FieldElement FieldHom::down(const FieldElement& x) const {
    if (x.spec() != to_) raise(errc::spec_mismatch, "FieldHom::down input");
    if (from_ == to_) return x;
    if (from_.kind() == FieldKind::prime) {
        const auto& c = x.coeffs();
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i]) raise(errc::spec_mismatch, "element not in the prime subfield");
        return FieldElement::from_residue(from_, c.empty() ? 0 : c[0]);
    }
    // solve sum_i u_i * gen^i = x over F_p coordinatewise
    unsigned j = from_.ext_degree();
    unsigned K = to_.ext_degree();
    FieldSpec fp = prime_field(to_.prime());
    // columns: gen_pows_[i] as F_p vectors of length K; unknowns u_0..u_{j-1}
    std::vector<std::vector<FieldElement>> aug(K);
    for (unsigned r = 0; r < K; ++r) {
        aug[r].reserve(j + 1);
        for (unsigned i = 0; i < j; ++i) {
            const auto& cv = gen_pows_[i].coeffs();
            aug[r].push_back(FieldElement::from_residue(fp, r < cv.size() ? cv[r] : 0));
        }
        const auto& xv = x.coeffs();
        aug[r].push_back(FieldElement::from_residue(fp, r < xv.size() ? xv[r] : 0));
    }
    // Gaussian elimination on K x (j+1)
    unsigned row = 0;
    std::vector<int> pivot_col(j, -1);
    for (unsigned col = 0; col < j && row < K; ++col) {
        unsigned piv = row;
        while (piv < K && aug[piv][col].is_zero()) ++piv;
        if (piv == K) continue;
        std::swap(aug[piv], aug[row]);
        FieldElement inv = aug[row][col].inv();
        for (auto& e : aug[row]) e = e * inv;
        for (unsigned r = 0; r < K; ++r) {
            if (r == row || aug[r][col].is_zero()) continue;
            FieldElement f = aug[r][col];
            for (unsigned cc = 0; cc <= j; ++cc) aug[r][cc] = aug[r][cc] - f * aug[row][cc];
        }
        pivot_col[col] = static_cast<int>(row);
        ++row;
    }
    std::vector<std::uint64_t> u(j, 0);
    for (unsigned col = 0; col < j; ++col)
        if (pivot_col[col] >= 0) u[col] = aug[static_cast<size_t>(pivot_col[col])][j].residue();
    // consistency: rows past `row` must have zero rhs
    for (unsigned r = row; r < K; ++r)
        if (!aug[r][j].is_zero()) raise(errc::spec_mismatch, "element not in the subfield image");
    FieldElement cand = FieldElement::from_coeffs(from_, u);
    if ((*this)(cand) != x) raise(errc::spec_mismatch, "element not in the subfield image");
    return cand;
}

FieldHom make_embedding(FieldSpec from, FieldSpec to, Rng& rng) {
    if (from == to) return FieldHom(from, to, FieldElement::zero(to));
    if (to.kind() != FieldKind::extension)
        raise(errc::spec_mismatch, "embedding target must be an extension field");
    if (from.kind() == FieldKind::prime) {
        if (from.prime() != to.prime()) raise(errc::spec_mismatch, "different characteristic");
        return FieldHom(from, to, FieldElement::zero(to));
    }
    if (from.kind() != FieldKind::extension || from.prime() != to.prime() ||
        to.ext_degree() % from.ext_degree() != 0)
        raise(errc::spec_mismatch, "no embedding " + from.descriptor() + " -> " + to.descriptor());
    // generator image: root of the source modulus inside `to`
    Poly z = Poly::var(to, "z");
    Poly mod(to);
    const auto& m = from.modulus();
    for (size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        mod = mod + z.pow(static_cast<unsigned>(i))
                        .scaled(FieldElement::from_mpz(to, mpz_class(static_cast<unsigned long>(m[i]))));
    }
    FieldHom id(to, to, FieldElement::zero(to));
    auto roots = roots_in(mod, "z", id, rng);
    if (roots.empty()) raise(errc::internal, "modulus has no root in the target field");
    return FieldHom(from, to, roots.front());
}

std::vector<FieldElement> roots_in(const Poly& f, const std::string& v, const FieldHom& hom,
                                   Rng& rng) {
    Poly g = map_coeffs(f, hom);
    auto fac = univariate_factor_ff(g, v, rng);
    std::vector<FieldElement> roots;
    for (const auto& [irr, mult] : fac.factors) {
        (void)mult;
        if (irr.degree_in(v) != 1) continue;
        // monic z + c -> root -c
        FieldElement c = irr.coeff_of(v, 0).constant_term();
        roots.push_back(-c);
    }
    std::sort(roots.begin(), roots.end(),
              [](const FieldElement& a, const FieldElement& b) { return a.less(b); });
    return roots;
}

SplittingField splitting_field(const Poly& f, const std::string& v, Rng& rng) {
    FieldSpec s = f.spec();
    unsigned j = s.kind() == FieldKind::extension ? s.ext_degree() : 1;
    auto fac = univariate_factor_ff(f, v, rng);
    unsigned l = 1;
    for (const auto& [irr, mult] : fac.factors) {
        (void)mult;
        unsigned d = static_cast<unsigned>(irr.degree_in(v));
        l = std::lcm(l, d);
    }
    unsigned K = j * l;
    SplittingField out;
    if (K == j) {
        out.field = s;
        out.embed = FieldHom(s, s, FieldElement::zero(s));
        return out;
    }
    out.field = extension_field(s.prime(), K, &rng);
    out.embed = make_embedding(s, out.field, rng);
    return out;
}

bool in_subfield(const FieldElement& x, unsigned subfield_degree) {
    FieldSpec s = x.spec();
    if (s.kind() == FieldKind::prime) return true;
    mpz_class e;
    mpz_ui_pow_ui(e.get_mpz_t(), s.prime(), subfield_degree);
    return x.pow(e) == x;
}

Poly map_coeffs(const Poly& f, const FieldHom& hom) {
    PolyBuilder b(hom.to(), f.vars());
    for (const auto& [m, c] : f.terms()) b.add(m, hom(c));
    return b.take();
}

} // namespace fkit
