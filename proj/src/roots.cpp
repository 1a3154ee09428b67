#include "fkit/roots.hpp"

#include <algorithm>

namespace fkit {

namespace {

std::vector<std::string> series_vars(const Poly& P, const std::string& yvar) {
    std::vector<std::string> v;
    for (const auto& n : P.vars())
        if (n != yvar && P.degree_in(n) > 0) v.push_back(n);
    return v;
}

// P with all series variables at 0, as a univariate polynomial in y
Poly boundary_poly(const Poly& P, const std::string& yvar) {
    std::map<std::string, Poly> at0;
    for (const auto& v : series_vars(P, yvar)) at0[v] = Poly(P.spec());
    return substitute(P, at0);
}

Poly shift_y(const Poly& P, const std::string& yvar, const FieldElement& alpha) {
    if (alpha.is_zero()) return P;
    return substitute(P, {{yvar, Poly::var(P.spec(), yvar) + Poly::constant(P.spec(), alpha)}});
}

} // namespace

Poly divide_by_var_power(const Poly& f, const std::string& v, unsigned e) {
    if (e == 0) return f;
    int idx = f.var_index(v);
    PolyBuilder b(f.spec(), f.vars());
    for (const auto& [m, c] : f.terms()) {
        unsigned ev = idx >= 0 ? m.e[idx] : 0;
        if (ev < e) raise(errc::not_divisible, "term below " + v + "^" + std::to_string(e));
        Mono nm = m;
        nm.e[idx] = static_cast<std::uint16_t>(ev - e);
        b.add(nm, c);
    }
    return b.take();
}

// ---------------------------------------------------------------------------
// Newton oracle

Series newton_root_oracle(const Poly& P, const std::string& yvar, const FieldElement& alpha,
                          unsigned precision) {
    FieldSpec s = P.spec();
    auto sv = series_vars(P, yvar);
    Poly b = boundary_poly(P, yvar);
    FieldElement p0 = eval(b, {{yvar, alpha}});
    if (!p0.is_zero()) raise(errc::no_root, "P(0, alpha) != 0");
    FieldElement c = eval(derivative(b, yvar), {{yvar, alpha}});
    if (c.is_zero()) raise(errc::singular_root, "dP/dy(0, alpha) = 0");
    FieldElement cinv = c.inv();

    Poly phi = Poly::constant(s, alpha);
    for (unsigned k = 1; k <= precision; ++k) {
        Poly val = substitute(P, {{yvar, phi}});
        val = hom_upto(val, sv, k);
        phi = hom_upto(phi - val.scaled(cinv), sv, k);
    }
    // verification by substitution
    Poly check = hom_upto(substitute(P, {{yvar, phi}}), sv, precision);
    if (!check.is_zero()) raise(errc::internal, "newton iteration failed to converge");
    return Series(phi, precision);
}

// ---------------------------------------------------------------------------
// Furstenberg variants

namespace {

// leading boundary coefficient Q(0,0) for P = (y - phi)^k Q with phi(0) = 0:
// the coefficient of y^k in P(0, y)
FieldElement boundary_unit(const Poly& P, const std::string& yvar, unsigned k) {
    Poly b = boundary_poly(P, yvar);
    for (unsigned j = 0; j < k; ++j)
        if (!b.coeff_of(yvar, j).is_zero())
            raise(errc::no_root, "P(0,y) has a term below y^" + std::to_string(k));
    FieldElement a = b.coeff_of(yvar, k).constant_term();
    if (a.is_zero()) raise(errc::non_unit_constant_term, "Q(0,0) = 0");
    return a;
}

void check_e_invertible(FieldSpec s, unsigned e) {
    std::uint64_t p = s.characteristic();
    if (p != 0 && e % p == 0) raise(errc::char_divides_e, "e = " + std::to_string(e));
}

// keep only terms with deg_t <= dt and deg_y <= dy; every monomial that ever
// reaches the diagonal window survives this cut (degrees only grow under
// multiplication, and the x-degrees are glued to the t-degrees)
Poly bi_trunc(const Poly& f, const std::string& tvar, unsigned dt, const std::string& yvar,
              unsigned dy) {
    int ti = f.var_index(tvar);
    int yi = f.var_index(yvar);
    PolyBuilder b(f.spec(), f.vars());
    for (const auto& [m, c] : f.terms()) {
        if (ti >= 0 && m.e[ti] > dt) continue;
        if (yi >= 0 && m.e[yi] > dy) continue;
        b.add(m, c);
    }
    return b.take();
}

Series diagonal_variant(const Poly& P0, const std::string& yvar, unsigned e, unsigned d) {
    FieldSpec s = P0.spec();
    auto sv = series_vars(P0, yvar);
    if (sv.empty()) raise(errc::internal, "no series variable");
    // homogenize through an internal t when several series variables exist
    Poly P = P0;
    std::string t;
    bool internal_t = sv.size() > 1;
    if (internal_t) {
        t = "__t";
        Poly tv = Poly::var(s, t);
        std::map<std::string, Poly> mp;
        for (const auto& v : sv) mp[v] = tv * Poly::var(s, v);
        P = substitute(P, mp);
    } else {
        t = sv[0];
    }
    FieldElement aq = boundary_unit(P, yvar, e);
    (void)aq;
    Poly Pd = derivative(P, yvar);
    Poly ty = Poly::var(s, t) * Poly::var(s, yvar);
    Poly G = substitute(P, {{t, ty}});
    Poly Gd = substitute(Pd, {{t, ty}});
    Poly y = Poly::var(s, yvar);
    Poly N = divide_by_var_power(bi_trunc(y * y * Gd, t, d, yvar, d + e), yvar, e);
    Poly D = divide_by_var_power(
        bi_trunc(G.scaled(FieldElement::from_int(s, static_cast<long>(e))), t, d, yvar, d + e),
        yvar, e);
    N = bi_trunc(N, t, d, yvar, d);
    D = bi_trunc(D, t, d, yvar, d);
    // invert D degree-by-degree in t. Its t-degree-0 slice is univariate in y
    // (x-degrees are glued to t-degrees), so W_0 is a cheap dense series
    // inverse; W_k = -W_0 (sum_{j=1..k} D_j W_{k-j}).
    auto tpart = [&](const Poly& q, unsigned k) {
        int ti = q.var_index(t);
        PolyBuilder b(q.spec(), q.vars());
        for (const auto& [m, c] : q.terms())
            if ((ti >= 0 ? m.e[ti] : 0) == k) b.add(m, c);
        return b.take();
    };
    std::vector<Poly> Dp(d + 1), Np(d + 1), Wp(d + 1);
    for (unsigned k = 0; k <= d; ++k) {
        Dp[k] = tpart(D, k);
        Np[k] = tpart(N, k);
    }
    {
        // W_0 = 1 / D_0 as a power series in y mod y^(d+1)
        std::vector<FieldElement> d0(d + 1, FieldElement::zero(s));
        int yi = Dp[0].var_index(yvar);
        for (const auto& [m, c] : Dp[0].terms()) {
            unsigned ye = yi >= 0 ? m.e[yi] : 0;
            if (ye <= d) d0[ye] = c;
        }
        if (d0[0].is_zero()) raise(errc::non_unit_constant_term, "diagonal denominator");
        std::vector<FieldElement> w0(d + 1, FieldElement::zero(s));
        FieldElement inv0 = d0[0].inv();
        w0[0] = inv0;
        for (unsigned k2 = 1; k2 <= d; ++k2) {
            FieldElement acc = FieldElement::zero(s);
            for (unsigned j = 1; j <= k2; ++j) acc = acc + d0[j] * w0[k2 - j];
            w0[k2] = -(inv0 * acc);
        }
        Poly yv = Poly::var(s, yvar);
        Poly W0(s);
        for (unsigned k2 = 0; k2 <= d; ++k2)
            if (!w0[k2].is_zero()) W0 = W0 + yv.pow(k2).scaled(w0[k2]);
        Wp[0] = W0;
    }
    auto ycut = [&](const Poly& q, unsigned dy) { return truncate_in_var(q, yvar, dy); };
    for (unsigned k = 1; k <= d; ++k) {
        Poly acc(s);
        for (unsigned j = 1; j <= k; ++j)
            if (!Dp[j].is_zero() && !Wp[k - j].is_zero()) acc = acc + Dp[j] * Wp[k - j];
        Wp[k] = ycut(-(Wp[0] * ycut(acc, d)), d);
    }
    // diagonal terms of N W: in the t-degree-i slice keep y-degree exactly i
    Poly diag(s);
    for (unsigned i = 0; i <= d; ++i) {
        Poly Si(s);
        for (unsigned j = 0; j <= i; ++j)
            if (!Np[j].is_zero() && !Wp[i - j].is_zero()) Si = Si + Np[j] * ycut(Wp[i - j], i);
        Poly slice = hom_component(Si, {yvar}, i);
        diag = diag + divide_by_var_power(slice, yvar, i);
    }
    if (internal_t) diag = substitute(diag, {{t, Poly::constant(s, 1)}});
    return Series(hom_upto(diag, sv, d), d);
}

Series closed_form_variant(const Poly& P, const std::string& yvar, unsigned e, unsigned d,
                           bool char0_form) {
    FieldSpec s = P.spec();
    auto sv = series_vars(P, yvar);
    FieldElement aq = boundary_unit(P, yvar, e);
    // cutoff: for e = 1 the classical 2d; for e > 1 every monomial of
    // (a y^e - P)^m either carries x-degree > d or exceeds the extracted
    // y-index once m > (e+1)(d+1), by the same t-or-y^(e+1) split
    unsigned M = (e == 1) ? 2 * d : (e + 1) * (d + 1);
    std::uint64_t p = s.characteristic();
    if (char0_form && p != 0 && p <= M)
        raise(errc::char_too_small_for_newton,
              "1/m closed form needs characteristic 0 or > " + std::to_string(M));

    Poly y = Poly::var(s, yvar);
    Poly G = y.pow(e).scaled(aq) - P;
    Poly Pd = derivative(P, yvar);
    // y-degrees above the largest extracted index never contribute
    unsigned ymax = e * (M + 1);
    auto trunc_x = [&](const Poly& q) {
        return truncate_in_var(hom_upto(q, sv, d), yvar, ymax);
    };
    Poly acc(s);
    Poly Gm = Poly::constant(s, 1); // G^m, x-truncated
    FieldElement e_f = FieldElement::from_int(s, static_cast<long>(e));
    FieldElement aq_pow = aq; // aq^(m+1) for the derivative form; aq^m for 1/m form
    for (unsigned m = 0; m <= M; ++m) {
        if (char0_form) {
            if (m >= 1) {
                long idx = static_cast<long>(e) * m - 1;
                Poly term = Gm.coeff_of(yvar, static_cast<unsigned>(idx));
                FieldElement w =
                    (e_f * FieldElement::from_int(s, static_cast<long>(m)) * aq_pow).inv();
                acc = acc + trunc_x(term).scaled(w);
                aq_pow = aq_pow * aq;
            }
        } else {
            long idx = static_cast<long>(e) * (m + 1) - 2;
            if (idx >= 0) {
                Poly term = (Pd * Gm).coeff_of(yvar, static_cast<unsigned>(idx));
                FieldElement w = (e_f * aq_pow).inv();
                acc = acc + trunc_x(term).scaled(w);
            }
            aq_pow = aq_pow * aq;
        }
        if (m < M) Gm = trunc_x(Gm * G);
    }
    return Series(hom_upto(acc, sv, d), d);
}

} // namespace

Series furstenberg_series(const Poly& P0, const std::string& yvar, const RootSpec& root,
                          unsigned precision, FurstenbergVariant variant) {
    FieldSpec s = P0.spec();
    check_e_invertible(s, root.e);
    Poly P = shift_y(P0, yvar, root.alpha);
    Series phi(Poly(s), precision);
    switch (variant) {
    case FurstenbergVariant::diagonal:
        phi = diagonal_variant(P, yvar, root.e, precision);
        break;
    case FurstenbergVariant::hasse_closed_form:
        phi = closed_form_variant(P, yvar, root.e, precision, false);
        break;
    case FurstenbergVariant::char0_closed_form:
        phi = closed_form_variant(P, yvar, root.e, precision, true);
        break;
    }
    if (!root.alpha.is_zero())
        phi = Series(phi.body() + Poly::constant(s, root.alpha), precision);
    return phi;
}

Series charp_root_power(const Poly& P0, const std::string& yvar, const RootSpec& root,
                        unsigned precision) {
    FieldSpec s = P0.spec();
    std::uint64_t p = s.characteristic();
    if (p == 0) raise(errc::internal, "charp_root_power needs positive characteristic");
    check_e_invertible(s, root.e);
    Poly P = shift_y(P0, yvar, root.alpha);
    auto sv = series_vars(P, yvar);
    mpz_class q_mpz;
    mpz_ui_pow_ui(q_mpz.get_mpz_t(), p, root.ell);
    if (!q_mpz.fits_uint_p()) raise(errc::internal, "p^ell too large");
    unsigned q = static_cast<unsigned>(q_mpz.get_ui());
    unsigned e = root.e;
    FieldElement aq = boundary_unit(P, yvar, q * e);
    Poly y = Poly::var(s, yvar);
    Poly G = y.pow(q * e).scaled(aq) - P;
    Poly Pdq = hasse_derivative(P, yvar, q);
    unsigned M = 2 * e * (precision + q);
    unsigned ymax = q * (e * (M + 1));
    auto trunc_x = [&](const Poly& f) {
        return truncate_in_var(hom_upto(f, sv, precision), yvar, ymax);
    };
    Poly acc(s);
    Poly Gm = Poly::constant(s, 1);
    FieldElement e_f = FieldElement::from_int(s, static_cast<long>(e));
    FieldElement aq_pow = aq;
    for (unsigned m = 0; m <= M; ++m) {
        long idx = static_cast<long>(q) * (static_cast<long>(e) * (m + 1) - 2);
        if (idx >= 0) {
            Poly term = (Pdq * Gm).coeff_of(yvar, static_cast<unsigned>(idx));
            acc = acc + trunc_x(term).scaled((e_f * aq_pow).inv());
        }
        aq_pow = aq_pow * aq;
        if (m < M) Gm = trunc_x(Gm * G);
    }
    Poly out = hom_upto(acc, sv, precision);
    if (!root.alpha.is_zero())
        out = out + Poly::constant(s, root.alpha.pow(static_cast<long>(q)));
    return Series(out, precision);
}

// ---------------------------------------------------------------------------
// root circuit (exact, constant depth increment)

CircuitTransform root_circuit(const Circuit& C, const std::string& yvar, unsigned precision,
                              unsigned deg_y, unsigned deg_x) {
    FieldSpec s0 = C.spec();
    unsigned d = precision;
    // boundary data: P(0, y) as a dense univariate
    std::map<std::string, Poly> at0;
    for (const auto& v : C.input_vars())
        if (v != yvar) at0[v] = Poly(s0);
    ExpandOptions bopts;
    bopts.degree_cap = deg_y;
    bopts.truncated = true;
    Poly boundary = expand_at(C, at0, bopts);
    if (!boundary.constant_term().is_zero()) raise(errc::no_root, "P(0,0) != 0");
    FieldElement c = boundary.coeff_of(yvar, 1).constant_term();
    if (c.is_zero()) raise(errc::singular_root, "dP/dy(0,0) = 0");

    std::size_t ny = static_cast<std::size_t>(deg_y) * (2 * d + 1) + 2;
    std::size_t nt = static_cast<std::size_t>(deg_x) * (2 * d + 1) + 2;
    std::function<FieldElement(const FieldElement&)> embed_fn;
    FieldSpec s = ensure_field_size(s0, std::max(ny, nt), embed_fn);
    FieldElement cinv = embed_fn(c).inv();

    Circuit out(s);
    auto ynodes = interpolation_nodes(s, ny);
    auto tnodes = interpolation_nodes(s, nt);
    auto vy = inverse_vandermonde(ynodes);
    auto vt = inverse_vandermonde(tnodes);
    // weights collapsing Hom_{<=d, t} and t = 1: w_k = sum_{i<=d} vt[i][k]
    std::vector<FieldElement> tw(nt, FieldElement::zero(s));
    for (unsigned i = 0; i <= d; ++i)
        for (std::size_t k = 0; k < nt; ++k) tw[k] = tw[k] + vt[i][k];
    // mu_{j'}(beta) = sum_{i>=1} i beta^(i-1) vy[i][j']: derivative combo weights
    auto mu_at = [&](std::size_t jprime, const FieldElement& beta) {
        FieldElement acc = FieldElement::zero(s);
        FieldElement bp = FieldElement::one(s);
        for (std::size_t i = 1; i < ny; ++i) {
            acc = acc + FieldElement::from_mpz(s, mpz_class(static_cast<unsigned long>(i))) *
                            vy[i][jprime] * bp;
            bp = bp * beta;
        }
        return acc;
    };
    std::vector<std::vector<FieldElement>> mu(ny, std::vector<FieldElement>(ny));
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t jp = 0; jp < ny; ++jp) mu[j][jp] = mu_at(jp, ynodes[j]);

    std::map<std::string, std::uint32_t> inputs;
    for (const auto& v : C.input_vars())
        if (v != yvar) inputs[v] = out.add_input(v);
    std::vector<std::uint32_t> ycst(ny);
    for (std::size_t j = 0; j < ny; ++j) ycst[j] = out.add_const(ynodes[j]);

    std::vector<std::uint32_t> top_children;
    std::vector<FieldElement> top_weights;
    for (std::size_t k = 0; k < nt; ++k) {
        if (tw[k].is_zero()) continue; // this t-copy contributes nothing
        // x_i -> nu_k * x_i gadgets
        std::map<std::string, std::uint32_t> scaled;
        for (const auto& [v, g] : inputs) scaled[v] = out.add_sum({g}, {tnodes[k]});
        std::vector<std::uint32_t> E(ny);
        for (std::size_t j = 0; j < ny; ++j) {
            E[j] = graft(
                out, C,
                [&](const std::string& name) {
                    return name == yvar ? ycst[j] : scaled.at(name);
                },
                embed_fn);
        }
        for (std::size_t j = 0; j < ny; ++j) {
            // D = dP/dy(x nu_k, y=alpha_j)/c as a combination of the copies
            std::vector<FieldElement> dw(ny);
            for (std::size_t jp = 0; jp < ny; ++jp) dw[jp] = mu[j][jp] * cinv;
            std::uint32_t D = out.add_sum(E, dw);
            // A = alpha_j - P(x nu_k, alpha_j)/c
            std::uint32_t A = out.add_sum({ycst[j], E[j]}, {FieldElement::one(s), -cinv});
            for (unsigned m = 1; m <= 2 * d; ++m) {
                std::vector<std::uint32_t> ch(m + 1, A);
                ch[0] = D;
                std::uint32_t M = out.add_prod(std::move(ch));
                top_children.push_back(M);
                top_weights.push_back(tw[k] * vy[m - 1][j]);
            }
        }
    }
    if (top_children.empty())
        out.set_output(out.add_const(FieldElement::zero(s)));
    else
        out.set_output(out.add_sum(std::move(top_children), std::move(top_weights)));
    CircuitTransform t;
    t.circuit = std::move(out);
    t.report.fill(C, t.circuit, "root_circuit");
    t.report.note("precision", std::to_string(d));
    t.report.note("y_nodes", std::to_string(ny));
    t.report.note("t_nodes", std::to_string(nt));
    t.report.note("field", t.circuit.spec().descriptor());
    return t;
}

// ---------------------------------------------------------------------------
// forward-mode derivative

Circuit derivative_circuit(const Circuit& c, const std::string& var) {
    Circuit out(c.spec());
    FieldElement zero = FieldElement::zero(c.spec());
    std::vector<std::uint32_t> val(c.gates().size()), der(c.gates().size());
    std::uint32_t zero_gate = out.add_const(zero);
    std::uint32_t one_gate = out.add_const(FieldElement::one(c.spec()));
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const Gate& g = c.gates()[i];
        switch (g.kind) {
        case Gate::Kind::input:
            val[i] = out.add_input(g.name);
            der[i] = g.name == var ? one_gate : zero_gate;
            break;
        case Gate::Kind::constant:
            val[i] = out.add_const(g.value);
            der[i] = zero_gate;
            break;
        case Gate::Kind::add: {
            std::vector<std::uint32_t> vch, dch;
            for (auto ch : g.children) {
                vch.push_back(val[ch]);
                dch.push_back(der[ch]);
            }
            val[i] = out.add_sum(vch, g.scalars);
            std::vector<std::uint32_t> nz;
            std::vector<FieldElement> nzs;
            for (size_t j = 0; j < dch.size(); ++j) {
                if (dch[j] == zero_gate) continue;
                nz.push_back(dch[j]);
                nzs.push_back(g.scalars[j]);
            }
            der[i] = nz.empty() ? zero_gate : out.add_sum(std::move(nz), std::move(nzs));
            break;
        }
        case Gate::Kind::mul: {
            std::vector<std::uint32_t> vch;
            for (auto ch : g.children) vch.push_back(val[ch]);
            val[i] = out.add_prod(vch);
            std::vector<std::uint32_t> terms;
            for (size_t j = 0; j < g.children.size(); ++j) {
                if (der[g.children[j]] == zero_gate) continue;
                std::vector<std::uint32_t> f;
                f.push_back(der[g.children[j]]);
                for (size_t l = 0; l < g.children.size(); ++l)
                    if (l != j) f.push_back(val[g.children[l]]);
                terms.push_back(out.add_prod(std::move(f)));
            }
            der[i] = terms.empty()
                         ? zero_gate
                         : (terms.size() == 1 ? terms[0] : out.add_sum(std::move(terms)));
            break;
        }
        }
    }
    out.set_output(der[c.output()]);
    return out;
}

// ---------------------------------------------------------------------------
// border root circuit

CircuitTransform border_root_circuit(const Circuit& C, const std::string& tvar,
                                     const std::string& yvar, unsigned e, unsigned precision) {
    FieldSpec s0 = C.spec();
    if (s0.kind() == FieldKind::eps_jet) raise(errc::spec_mismatch, "input must be over the base field");
    unsigned n = precision;
    unsigned ord = 2 * n + e + 6;
    FieldSpec J = jet_field(s0, ord);
    auto lift = [&](const FieldElement& x) { return embed(x, J); };
    FieldElement eps = FieldElement::jet(J, 1, {FieldElement::one(s0)});

    // normalization: s0coef = Coeff_{y^e}(P(0, y)) must be nonzero; read it
    // off through border interpolation at the jet level
    FieldElement scale;
    {
        Circuit CJ = map_constants(C, J, lift);
        std::vector<FieldElement> bn;
        for (unsigned i = 1; i <= e + 1; ++i) bn.push_back(element_by_index(s0, i));
        auto vinv = inverse_vandermonde(bn);
        FieldElement acc = FieldElement::zero(J);
        for (unsigned j = 0; j <= e; ++j) {
            std::map<std::string, FieldElement> pt;
            pt[tvar] = FieldElement::zero(J);
            pt[yvar] = lift(bn[j]) * eps;
            acc = acc + lift(vinv[e][j]) * eval_circuit(CJ, pt);
        }
        acc = acc * eps.pow(static_cast<long>(e)).inv();
        scale = jet_order0(acc);
        if (scale.is_zero()) raise(errc::nonzero_q_at_origin, "Coeff_{y^e} P(0,y) = 0");
    }
    FieldElement sinv = lift(scale.inv());
    FieldElement e_inv = lift(FieldElement::from_int(s0, static_cast<long>(e)).inv());

    Circuit DC = derivative_circuit(C, yvar);
    Circuit out(J);
    std::uint32_t tin = out.add_input(tvar);
    std::uint32_t one_gate = out.add_const(FieldElement::one(J));

    std::vector<FieldElement> nodes;
    for (unsigned i = 1; i <= n + 1; ++i) nodes.push_back(element_by_index(s0, i));
    auto vinv = inverse_vandermonde(nodes);

    // C3[i][j] = [y C1 (1 + C2 + ... + C2^(2n))](t = eps a_i, y = eps a_j)
    std::vector<std::vector<std::uint32_t>> C3(n + 1, std::vector<std::uint32_t>(n + 1));
    for (unsigned i = 0; i <= n; ++i) {
        for (unsigned j = 0; j <= n; ++j) {
            FieldElement tv = lift(nodes[i]) * eps;
            FieldElement yv = lift(nodes[j]) * eps;
            std::uint32_t tty = out.add_const(tv * yv);
            auto leaf = [&](const std::string& name) -> std::uint32_t {
                if (name == tvar) return tty;
                if (name == yvar) return out.add_const(yv);
                raise(errc::unknown_variable, name);
            };
            std::uint32_t Ccopy = graft(out, C, leaf, lift);
            std::uint32_t Dcopy = graft(out, DC, leaf, lift);
            // y*C1 = dP/dy(ty,y) y^(2-e) / (e * scale)
            FieldElement c1w = e_inv * sinv * yv.pow(2 - static_cast<long>(e));
            std::uint32_t c1 = out.add_sum({Dcopy}, {c1w});
            // C2 = 1 - P(ty,y)/(scale y^e)
            std::uint32_t c2 =
                out.add_sum({one_gate, Ccopy},
                            {FieldElement::one(J), -(sinv * yv.pow(-static_cast<long>(e)))});
            std::vector<std::uint32_t> geo_children{one_gate};
            for (unsigned k = 1; k <= 2 * n; ++k) {
                std::vector<std::uint32_t> ch(k, c2);
                geo_children.push_back(out.add_prod(std::move(ch)));
            }
            std::uint32_t geo = out.add_sum(std::move(geo_children));
            C3[i][j] = out.add_prod({c1, geo});
        }
    }
    // C5 = sum_{r=1..n} t^r * sum_{i,j} eps^(-2r) v_r[i] v_r[j] C3[i][j]
    std::vector<std::uint32_t> top;
    for (unsigned r = 1; r <= n; ++r) {
        FieldElement er = eps.pow(static_cast<long>(2 * r)).inv();
        std::vector<std::uint32_t> ch;
        std::vector<FieldElement> w;
        for (unsigned i = 0; i <= n; ++i)
            for (unsigned j = 0; j <= n; ++j) {
                ch.push_back(C3[i][j]);
                w.push_back(er * lift(vinv[r][i] * vinv[r][j]));
            }
        std::uint32_t Ar = out.add_sum(std::move(ch), std::move(w));
        std::vector<std::uint32_t> tr(r, tin);
        top.push_back(out.add_prod({out.add_prod(std::move(tr)), Ar}));
    }
    if (top.empty())
        out.set_output(out.add_const(FieldElement::zero(J)));
    else
        out.set_output(out.add_sum(std::move(top)));
    CircuitTransform t;
    t.circuit = std::move(out);
    t.report.fill(C, t.circuit, "border_root_circuit");
    t.report.note("precision", std::to_string(n));
    t.report.note("e", std::to_string(e));
    t.report.note("jet_order", std::to_string(ord));
    t.report.note("syntactic_degree_bound_input", C.degree_bound().get_str());
    return t;
}

} // namespace fkit
