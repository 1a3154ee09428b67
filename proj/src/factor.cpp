#include "fkit/factor.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "fkit/linalg.hpp"

namespace fkit {

// ---------------------------------------------------------------------------
// pre-processing maps

bool preprocessing_valid(const Poly& F, const PreprocessMap& psi, const std::string& yvar,
                         std::string* why) {
    FieldSpec s = F.spec();
    unsigned d = psi.degree;
    // condition 1: Hom_d(F)(a) != 0; the top homogeneous part is over all of
    // (x, y) and a y-monomial maps to y itself, so y evaluates at 1
    std::vector<std::string> all = psi.xvars;
    all.push_back(yvar);
    Poly top = hom_component(F, all, d);
    std::map<std::string, FieldElement> at_a;
    for (size_t i = 0; i < psi.xvars.size(); ++i) at_a[psi.xvars[i]] = psi.a[i];
    at_a[yvar] = FieldElement::one(s);
    if (top.is_zero() || eval(top, at_a).is_zero()) {
        if (why) *why = "Hom_d(F)(a) = 0";
        return false;
    }
    // condition 2: Disc_y(squarefree_part(F)(a y + b)) != 0
    Poly sf = squarefree_decomposition(F).squarefree_part();
    std::map<std::string, Poly> shift;
    Poly y = Poly::var(s, yvar);
    for (size_t i = 0; i < psi.xvars.size(); ++i)
        shift[psi.xvars[i]] = y.scaled(psi.a[i]) + Poly::constant(s, psi.b[i]);
    Poly u = substitute(sf, shift);
    if (u.degree_in(yvar) < 1) {
        if (why) *why = "shifted squarefree part constant in y";
        return false;
    }
    if (discriminant(u, yvar).is_zero()) {
        if (why) *why = "Disc_y of shifted squarefree part = 0";
        return false;
    }
    return true;
}

PreprocessMap find_preprocessing(const Poly& F, const std::string& yvar, unsigned trials,
                                 Rng& rng) {
    if (F.is_zero()) raise(errc::zero_polynomial, "pre-processing of 0");
    FieldSpec s = F.spec();
    PreprocessMap psi;
    for (const auto& v : F.vars())
        if (F.degree_in(v) > 0 && v != yvar) psi.xvars.push_back(v);
    psi.degree = static_cast<unsigned>(std::max(F.total_degree(), 0));
    // sample set size >= 10 d^2 per the identity-lemma budget
    std::uint64_t sample = 10 * static_cast<std::uint64_t>(psi.degree) * psi.degree + 10;
    auto sz = s.size();
    if (sz) sample = std::min(sample, *sz);
    for (unsigned t = 0; t < trials; ++t) {
        psi.a.clear();
        psi.b.clear();
        for (size_t i = 0; i < psi.xvars.size(); ++i) {
            psi.a.push_back(element_by_index(s, rng.below(sample)));
            psi.b.push_back(element_by_index(s, rng.below(sample)));
        }
        if (preprocessing_valid(F, psi, yvar, nullptr)) return psi;
    }
    raise(errc::trials_exhausted,
          "no valid pre-processing map in " + std::to_string(trials) + " trials");
}

Poly apply_preprocessing(const Poly& F, const PreprocessMap& psi, const std::string& tvar,
                         const std::string& yvar) {
    FieldSpec s = F.spec();
    Poly t = Poly::var(s, tvar), y = Poly::var(s, yvar);
    std::map<std::string, Poly> img;
    for (size_t i = 0; i < psi.xvars.size(); ++i)
        img[psi.xvars[i]] =
            t * Poly::var(s, psi.xvars[i]) + y.scaled(psi.a[i]) + Poly::constant(s, psi.b[i]);
    return substitute(F, img);
}

Circuit apply_preprocessing_circuit(const Circuit& C, const PreprocessMap& psi,
                                    const std::string& tvar, const std::string& yvar) {
    FieldSpec s = C.spec();
    Circuit out(s);
    std::uint32_t t = out.add_input(tvar);
    std::uint32_t y = out.add_input(yvar);
    std::uint32_t one = out.add_const(FieldElement::one(s));
    std::map<std::string, std::uint32_t> leaves;
    for (size_t i = 0; i < psi.xvars.size(); ++i) {
        std::uint32_t x = out.add_input(psi.xvars[i]);
        std::uint32_t tx = out.add_prod({t, x});
        leaves[psi.xvars[i]] = out.add_sum({tx, y, one}, {FieldElement::one(s), psi.a[i], psi.b[i]});
    }
    out.set_output(graft(out, C, [&](const std::string& name) {
        auto it = leaves.find(name);
        if (it == leaves.end()) raise(errc::unknown_variable, name);
        return it->second;
    }));
    return out;
}

Poly undo_preprocessing(const Poly& g, const PreprocessMap& psi, const std::string& tvar,
                        const std::string& yvar) {
    FieldSpec s = g.spec();
    Poly y = Poly::var(s, yvar);
    std::map<std::string, Poly> img;
    img[tvar] = Poly::constant(s, 1);
    for (size_t i = 0; i < psi.xvars.size(); ++i)
        img[psi.xvars[i]] =
            Poly::var(s, psi.xvars[i]) - y.scaled(psi.a[i]) - Poly::constant(s, psi.b[i]);
    return substitute(g, img);
}

Circuit undo_preprocessing_circuit(const Circuit& g, const PreprocessMap& psi,
                                   const std::string& tvar, const std::string& yvar) {
    FieldSpec s = g.spec();
    Circuit out(s);
    std::uint32_t y = out.add_input(yvar);
    std::uint32_t one = out.add_const(FieldElement::one(s));
    std::map<std::string, std::uint32_t> leaves;
    leaves[tvar] = one;
    leaves[yvar] = y;
    for (size_t i = 0; i < psi.xvars.size(); ++i) {
        std::uint32_t x = out.add_input(psi.xvars[i]);
        leaves[psi.xvars[i]] =
            out.add_sum({x, y, one}, {FieldElement::one(s), -psi.a[i], -psi.b[i]});
    }
    out.set_output(graft(out, g, [&](const std::string& name) {
        auto it = leaves.find(name);
        if (it != leaves.end()) return it->second;
        std::uint32_t v = out.add_input(name);
        leaves[name] = v;
        return v;
    }));
    return out;
}

// ---------------------------------------------------------------------------
// rational root family

namespace {

Poly boundary_of(const Poly& G, const std::string& tvar, const std::string& yvar) {
    Poly G0 = substitute(G, {{tvar, Poly(G.spec())}});
    for (const auto& v : G0.vars())
        if (v != yvar && G0.degree_in(v) > 0)
            raise(errc::invalid_map, "G(0,y) involves " + v + "; not a pre-processed polynomial");
    return G0;
}

} // namespace

RationalRootFamily rational_root_truncation(const Poly& G, const std::string& tvar,
                                            const std::string& yvar, const std::string& zvar,
                                            unsigned precision) {
    FieldSpec s = G.spec();
    unsigned d = precision;
    Poly G0 = boundary_of(G, tvar, yvar);
    if (discriminant(G0, yvar).is_zero())
        raise(errc::not_squarefree_at_zero, "G(0,y) is not squarefree");
    Poly z = Poly::var(s, zvar);
    Poly w = substitute(derivative(G0, yvar), {{yvar, z}});
    Poly y = Poly::var(s, yvar);
    Poly Gz = substitute(G, {{yvar, y + z}});
    Poly Gdz = substitute(derivative(G, yvar), {{yvar, y + z}});
    unsigned M = 2 * d + 2;
    std::vector<Poly> wpow(M + 2);
    wpow[0] = Poly::constant(s, 1);
    for (unsigned j = 1; j <= M + 1; ++j) wpow[j] = wpow[j - 1] * w;
    Poly lam = y * w - Gz;
    Poly num = z * wpow[M + 1];
    Poly Lm = Poly::constant(s, 1);
    for (unsigned m = 1; m <= M; ++m) {
        // only y-degrees up to M-1 are ever extracted
        Lm = truncate_in_var(truncate_in_var(Lm * lam, tvar, d), yvar, M);
        Poly cm = truncate_in_var((Gdz * Lm).coeff_of(yvar, m - 1), tvar, d);
        num = num + wpow[M - m] * cm;
    }
    RationalRootFamily out;
    out.num = num;
    out.den = wpow[M + 1];
    out.w = w;
    out.precision = d;
    out.tvar = tvar;
    out.zvar = zvar;
    return out;
}

// ---------------------------------------------------------------------------
// companion-matrix machinery

namespace {

struct CompanionData {
    std::vector<FieldElement> fc; // monic coefficients c_0..c_D (c_D = 1)
    unsigned D = 0;
    Mat M;                                      // companion matrix
    std::vector<std::vector<FieldElement>> red; // red[J] = z^J mod f
    std::vector<FieldElement> powsums;          // pi_J = sum over roots of root^J
};

CompanionData companion_of(const Poly& f, const std::string& var, unsigned maxJ) {
    FieldSpec s = f.spec();
    CompanionData cd;
    auto dense = to_dense(f, var);
    if (dense.size() < 2 || !dense.back().is_one())
        raise(errc::boundary_not_in_base_field, "boundary must be monic of degree >= 1");
    cd.fc = dense;
    cd.D = static_cast<unsigned>(dense.size() - 1);
    unsigned D = cd.D;
    cd.M.assign(D, std::vector<FieldElement>(D, FieldElement::zero(s)));
    for (unsigned i = 0; i + 1 < D; ++i) cd.M[i + 1][i] = FieldElement::one(s);
    for (unsigned i = 0; i < D; ++i) cd.M[i][D - 1] = cd.M[i][D - 1] - dense[i];
    // z^J mod f
    std::vector<FieldElement> cur(D, FieldElement::zero(s));
    cur[0] = FieldElement::one(s);
    cd.red.push_back(cur);
    for (unsigned J = 1; J <= maxJ; ++J) {
        std::vector<FieldElement> nxt(D, FieldElement::zero(s));
        FieldElement top = cur[D - 1];
        for (unsigned i = D - 1; i > 0; --i) nxt[i] = cur[i - 1];
        if (!top.is_zero())
            for (unsigned i = 0; i < D; ++i) nxt[i] = nxt[i] - top * dense[i];
        cd.red.push_back(nxt);
        cur = std::move(nxt);
    }
    // power sums of the roots: division-free Newton recurrence
    cd.powsums.assign(maxJ + 1, FieldElement::zero(s));
    cd.powsums[0] = FieldElement::from_int(s, static_cast<long>(D));
    for (unsigned k = 1; k <= maxJ; ++k) {
        FieldElement acc = FieldElement::zero(s);
        for (unsigned i = 1; i < k && i <= D; ++i) acc = acc + dense[D - i] * cd.powsums[k - i];
        if (k <= D)
            acc = acc + dense[D - k] * FieldElement::from_int(s, static_cast<long>(k));
        cd.powsums[k] = -acc;
    }
    return cd;
}

struct Partition {
    std::vector<unsigned> parts;
    mpq_class coeff; // (-1)^(r - len) / z_lambda
};

void enum_partitions(unsigned r, unsigned maxpart, std::vector<unsigned>& cur,
                     std::vector<Partition>& out) {
    if (r == 0) {
        Partition p;
        p.parts = cur;
        std::map<unsigned, unsigned> mult;
        for (unsigned x : cur) mult[x]++;
        mpz_class z = 1;
        for (auto& [part, m] : mult) {
            for (unsigned i = 0; i < m; ++i) z *= part;
            mpz_class fact;
            mpz_fac_ui(fact.get_mpz_t(), m);
            z *= fact;
        }
        unsigned total = 0;
        for (unsigned x : cur) total += x;
        int sign = ((total - cur.size()) % 2 == 0) ? 1 : -1;
        p.coeff = mpq_class(sign) / mpq_class(z);
        out.push_back(std::move(p));
        return;
    }
    for (unsigned p = std::min(r, maxpart); p >= 1; --p) {
        cur.push_back(p);
        enum_partitions(r - p, p, cur, out);
        cur.pop_back();
    }
}

std::vector<Partition> partitions_of(unsigned r) {
    std::vector<Partition> out;
    std::vector<unsigned> cur;
    if (r == 0) {
        Partition p;
        p.coeff = 1;
        out.push_back(p);
        return out;
    }
    enum_partitions(r, r, cur, out);
    return out;
}

void check_char_for_newton(FieldSpec s, unsigned r) {
    std::uint64_t p = s.characteristic();
    if (p != 0 && p <= r)
        raise(errc::char_too_small_for_newton, "need characteristic 0 or > " + std::to_string(r));
}

} // namespace

FieldElement esym_at_roots(const Poly& f, const Poly& g, const Poly& h, unsigned r,
                           const std::string& var) {
    FieldSpec s = f.spec();
    auto fd = to_dense(f, var);
    if (fd.size() < 2) raise(errc::degree_zero_input, "f must have degree >= 1");
    if (!fd.back().is_one()) raise(errc::boundary_not_in_base_field, "f must be monic");
    unsigned D = static_cast<unsigned>(fd.size() - 1);
    if (r > D) raise(errc::internal, "r exceeds deg f");
    check_char_for_newton(s, r);
    if (h.degree_in(var) >= 1 && resultant(f, h, var).is_zero())
        raise(errc::h_vanishes_at_root, "resultant(f, h) = 0");
    CompanionData cd = companion_of(f, var, 1);
    auto matpoly = [&](const Poly& q) {
        auto qc = to_dense(q, var);
        Mat acc(D, std::vector<FieldElement>(D, FieldElement::zero(s)));
        Mat mp = mat_identity(s, D);
        for (size_t j = 0; j < qc.size(); ++j) {
            if (!qc[j].is_zero())
                for (unsigned a = 0; a < D; ++a)
                    for (unsigned b = 0; b < D; ++b) acc[a][b] = acc[a][b] + qc[j] * mp[a][b];
            if (j + 1 < qc.size()) mp = mat_mul(mp, cd.M);
        }
        return acc;
    };
    Mat A = matpoly(g);
    Mat B = matpoly(h);
    auto Binv = mat_inverse(B);
    if (!Binv) raise(errc::h_vanishes_at_root, "h(companion matrix) singular");
    Mat N = mat_mul(A, *Binv);
    std::vector<FieldElement> p(r + 1, FieldElement::zero(s));
    Mat Nk = N;
    for (unsigned k = 1; k <= r; ++k) {
        p[k] = mat_trace(Nk);
        if (k < r) Nk = mat_mul(Nk, N);
    }
    std::vector<FieldElement> e(r + 1, FieldElement::zero(s));
    e[0] = FieldElement::one(s);
    for (unsigned k = 1; k <= r; ++k) {
        FieldElement acc = FieldElement::zero(s);
        int sign = 1;
        for (unsigned i = 1; i <= k; ++i) {
            FieldElement term = e[k - i] * p[i];
            acc = sign > 0 ? acc + term : acc - term;
            sign = -sign;
        }
        e[k] = acc * FieldElement::from_int(s, static_cast<long>(k)).inv();
    }
    return e[r];
}

// ---------------------------------------------------------------------------
// value-level factor reconstruction

Poly reconstruct_factor_value(const Poly& G, const Poly& boundary, const std::string& tvar,
                              const std::string& yvar, unsigned precision) {
    FieldSpec s = G.spec();
    unsigned d = precision;
    Poly G0 = boundary_of(G, tvar, yvar);
    if (discriminant(G0, yvar).is_zero())
        raise(errc::not_squarefree_at_zero, "G(0,y) is not squarefree");
    if (!divides(boundary, G0)) raise(errc::not_a_factor, "boundary does not divide G(0,y)");
    auto bd = to_dense(boundary, yvar);
    if (bd.size() < 2 || !bd.back().is_one())
        raise(errc::boundary_not_in_base_field, "boundary must be monic of degree >= 1");
    unsigned r0 = static_cast<unsigned>(bd.size() - 1);
    check_char_for_newton(s, r0);

    const std::string zv = "__z";
    unsigned Mm = 2 * d + 2;
    unsigned dP = static_cast<unsigned>(std::max(G.total_degree(), 1));
    unsigned maxJ = (Mm + 2) * std::max(dP, 1u) + r0 + r0 * std::max(r0, 1u) + 4;
    CompanionData cd = companion_of(substitute(boundary, {{yvar, Poly::var(s, zv)}}), zv, maxJ);

    // work in F[x,t,y][z]/(f(z)) throughout: reduce z-exponents via the table
    auto zred = [&](const Poly& q) {
        int zi = q.var_index(zv);
        if (zi < 0 || q.degree_in(zv) < static_cast<int>(r0)) return q;
        PolyBuilder b(s, q.vars());
        for (const auto& [m, c] : q.terms()) {
            unsigned J = m.e[zi];
            if (J < r0) {
                b.add(m, c);
                continue;
            }
            const auto& rj = cd.red[J];
            for (unsigned i = 0; i < r0; ++i) {
                if (rj[i].is_zero()) continue;
                Mono nm = m;
                nm.e[zi] = static_cast<std::uint16_t>(i);
                b.add(nm, c * rj[i]);
            }
        }
        return b.take();
    };
    Poly z = Poly::var(s, zv);
    Poly y = Poly::var(s, yvar);
    Poly wz = zred(substitute(derivative(G0, yvar), {{yvar, z}}));
    Poly Gz = zred(substitute(G, {{yvar, y + z}}));
    Poly Gdz = zred(substitute(derivative(G, yvar), {{yvar, y + z}}));
    std::vector<Poly> wpow(Mm + 2);
    wpow[0] = Poly::constant(s, 1);
    for (unsigned j = 1; j <= Mm + 1; ++j) wpow[j] = zred(wpow[j - 1] * wz);
    Poly lam = zred(y * wz - Gz);
    Poly num = zred(z * wpow[Mm + 1]);
    Poly Lm = Poly::constant(s, 1);
    for (unsigned m = 1; m <= Mm; ++m) {
        Lm = truncate_in_var(truncate_in_var(zred(Lm * lam), tvar, d), yvar, Mm);
        Poly cm = truncate_in_var(zred(Gdz * Lm).coeff_of(yvar, m - 1), tvar, d);
        num = num + zred(wpow[Mm - m] * cm);
    }

    // htilde = (w^(Mm+1))^-1 mod f via the companion-matrix inverse
    Mat denM(r0, std::vector<FieldElement>(r0, FieldElement::zero(s)));
    {
        auto dense_den = to_dense(wpow[Mm + 1], zv);
        for (unsigned c = 0; c < r0; ++c)
            for (size_t J = 0; J < dense_den.size(); ++J) {
                if (dense_den[J].is_zero()) continue;
                const auto& rj = cd.red[J + c];
                for (unsigned i = 0; i < r0; ++i) denM[i][c] = denM[i][c] + dense_den[J] * rj[i];
            }
    }
    auto denInv = mat_inverse(denM);
    if (!denInv) raise(errc::h_vanishes_at_root, "denominator not invertible mod boundary");
    std::vector<FieldElement> htilde(r0);
    for (unsigned i = 0; i < r0; ++i) htilde[i] = (*denInv)[i][0];

    // hred[J] = z^J htilde mod f for the reduced z-range
    std::vector<std::vector<FieldElement>> hred(r0,
                                                std::vector<FieldElement>(r0, FieldElement::zero(s)));
    for (unsigned J = 0; J < r0; ++J)
        for (unsigned j2 = 0; j2 < r0; ++j2) {
            if (htilde[j2].is_zero()) continue;
            const auto& rj = cd.red[J + j2];
            for (unsigned i = 0; i < r0; ++i) hred[J][i] = hred[J][i] + htilde[j2] * rj[i];
        }

    // v = num * htilde mod f, with Poly coefficients
    std::vector<Poly> v(r0, Poly(s));
    for (unsigned J = 0; J < r0; ++J) {
        Poly numJ = num.coeff_of(zv, J);
        if (numJ.is_zero()) continue;
        for (unsigned i = 0; i < r0; ++i)
            if (!hred[J][i].is_zero()) v[i] = v[i] + numJ.scaled(hred[J][i]);
    }
    for (auto& q : v) q = truncate_in_var(q, tvar, d);

    // power sums p_k = sum_J Coeff_{z^J}(v^k) pi_J over plain powers of v
    std::vector<Poly> p(r0 + 1, Poly(s));
    std::vector<Poly> vk = v;
    for (unsigned k = 1; k <= r0; ++k) {
        Poly acc(s);
        for (size_t J = 0; J < vk.size(); ++J)
            if (!vk[J].is_zero()) acc = acc + vk[J].scaled(cd.powsums[J]);
        p[k] = truncate_in_var(acc, tvar, d);
        if (k < r0) {
            std::vector<Poly> nxt(vk.size() + v.size() - 1, Poly(s));
            for (size_t i = 0; i < vk.size(); ++i) {
                if (vk[i].is_zero()) continue;
                for (size_t j2 = 0; j2 < v.size(); ++j2)
                    nxt[i + j2] = nxt[i + j2] + truncate_in_var(vk[i] * v[j2], tvar, d);
            }
            vk = std::move(nxt);
        }
    }
    std::vector<Poly> e(r0 + 1, Poly(s));
    e[0] = Poly::constant(s, 1);
    for (unsigned k = 1; k <= r0; ++k) {
        Poly acc(s);
        int sign = 1;
        for (unsigned i = 1; i <= k; ++i) {
            Poly term = e[k - i] * p[i];
            acc = sign > 0 ? acc + term : acc - term;
            sign = -sign;
        }
        e[k] = truncate_in_var(acc, tvar, d)
                   .scaled(FieldElement::from_int(s, static_cast<long>(k)).inv());
    }
    Poly g(s);
    int sign = 1;
    for (unsigned r = 0; r <= r0; ++r) {
        Poly term = y.pow(r0 - r) * e[r];
        g = sign > 0 ? g + term : g - term;
        sign = -sign;
    }
    return truncate_in_var(g, tvar, d);
}

// ---------------------------------------------------------------------------
// factor circuit

CircuitTransform factor_circuit(const Circuit& C, const PreprocessMap& psi, const Poly& boundary,
                                const std::string& tvar, const std::string& yvar,
                                unsigned precision) {
    FieldSpec s0 = C.spec();
    unsigned d = precision;
    unsigned dP = psi.degree;
    auto bd0 = to_dense(boundary, yvar);
    if (bd0.size() < 2 || !bd0.back().is_one())
        raise(errc::boundary_not_in_base_field, "boundary must be monic of degree >= 1");
    unsigned r0 = static_cast<unsigned>(bd0.size() - 1);
    check_char_for_newton(s0, r0);

    // G(0, y) = P(a y + b) as a univariate value
    Poly G0(s0);
    {
        std::map<std::string, Poly> img;
        Poly y = Poly::var(s0, yvar);
        for (size_t i = 0; i < psi.xvars.size(); ++i)
            img[psi.xvars[i]] = y.scaled(psi.a[i]) + Poly::constant(s0, psi.b[i]);
        G0 = expand_at(C, img);
    }
    if (discriminant(G0, yvar).is_zero())
        raise(errc::not_squarefree_at_zero, "G(0,y) not squarefree; invalid map");
    if (!divides(boundary, G0)) raise(errc::not_a_factor, "boundary does not divide G(0,y)");
    Poly w0 = derivative(G0, yvar);

    unsigned Mm = 2 * d + 2;
    std::size_t Ky = static_cast<std::size_t>(Mm + 1) * dP + 1;  // y-interpolation nodes
    std::size_t L = static_cast<std::size_t>(Mm + 1) * dP + 1;   // z nodes
    std::size_t Nin = static_cast<std::size_t>(Mm + 1) * dP + 1; // inner glue nodes
    std::size_t Nout = static_cast<std::size_t>(r0) * d + 1;     // outer glue nodes
    std::size_t Nsig = static_cast<std::size_t>(r0) * std::max(r0 - 1, 1u) + 1; // sigma nodes
    std::size_t need = std::max({Ky, L, Nin, Nout, Nsig});

    std::function<FieldElement(const FieldElement&)> lift;
    FieldSpec s = ensure_field_size(s0, need, lift);
    auto liftp = [&](const Poly& q) {
        PolyBuilder b(s, q.vars());
        for (const auto& [m, c] : q.terms()) b.add(m, lift(c));
        return b.take();
    };

    Poly bnd = liftp(boundary);
    Poly w0b = liftp(w0);
    auto wdense = to_dense(w0b, yvar);

    auto ynodes = interpolation_nodes(s, Ky);
    auto znodes = interpolation_nodes(s, L);
    auto innodes = interpolation_nodes(s, Nin);
    auto outnodes = interpolation_nodes(s, Nout);
    auto signodes = interpolation_nodes(s, Nsig);
    auto Vy = inverse_vandermonde(ynodes);
    auto Vz = inverse_vandermonde(znodes);
    auto Vin = inverse_vandermonde(innodes);
    auto Vout = inverse_vandermonde(outnodes);
    auto Vsig = inverse_vandermonde(signodes);

    unsigned maxJ = static_cast<unsigned>(L) + r0 + static_cast<unsigned>(Nsig) + 2;
    CompanionData cd = companion_of(substitute(bnd, {{yvar, Poly::var(s, "__z")}}), "__z", maxJ);

    auto weval = [&](const FieldElement& zval) {
        FieldElement acc = FieldElement::zero(s);
        FieldElement pw = FieldElement::one(s);
        for (size_t j = 0; j < wdense.size(); ++j) {
            acc = acc + wdense[j] * pw;
            pw = pw * zval;
        }
        return acc;
    };

    // htilde = (w^(Mm+1) mod f)^-1 mod f
    std::vector<FieldElement> htilde(r0);
    {
        auto mulmod = [&](const std::vector<FieldElement>& a, const std::vector<FieldElement>& b) {
            std::vector<FieldElement> prod(a.size() + b.size() - 1, FieldElement::zero(s));
            for (size_t i = 0; i < a.size(); ++i) {
                if (a[i].is_zero()) continue;
                for (size_t j = 0; j < b.size(); ++j) prod[i + j] = prod[i + j] + a[i] * b[j];
            }
            std::vector<FieldElement> red(r0, FieldElement::zero(s));
            for (size_t J = 0; J < prod.size(); ++J) {
                if (prod[J].is_zero()) continue;
                const auto& rj = cd.red[J];
                for (unsigned i = 0; i < r0; ++i) red[i] = red[i] + prod[J] * rj[i];
            }
            return red;
        };
        std::vector<FieldElement> acc(r0, FieldElement::zero(s));
        acc[0] = FieldElement::one(s);
        for (unsigned j = 0; j < Mm + 1; ++j) acc = mulmod(acc, wdense);
        Mat denM(r0, std::vector<FieldElement>(r0, FieldElement::zero(s)));
        for (unsigned c = 0; c < r0; ++c)
            for (unsigned j = 0; j < r0; ++j) {
                if (acc[j].is_zero()) continue;
                const auto& rj = cd.red[j + c];
                for (unsigned i = 0; i < r0; ++i) denM[i][c] = denM[i][c] + acc[j] * rj[i];
            }
        auto inv = mat_inverse(denM);
        if (!inv) raise(errc::h_vanishes_at_root, "denominator not invertible mod boundary");
        for (unsigned i = 0; i < r0; ++i) htilde[i] = (*inv)[i][0];
    }
    std::vector<std::vector<FieldElement>> hred(L,
                                                std::vector<FieldElement>(r0, FieldElement::zero(s)));
    for (std::size_t J = 0; J < L; ++J)
        for (unsigned j2 = 0; j2 < r0; ++j2) {
            if (htilde[j2].is_zero()) continue;
            const auto& rj = cd.red[J + j2];
            for (unsigned i = 0; i < r0; ++i) hred[J][i] = hred[J][i] + htilde[j2] * rj[i];
        }
    // u[q][l]: weight of numcopy at z-node l inside v(sigma_q)
    std::vector<std::vector<FieldElement>> u(Nsig,
                                             std::vector<FieldElement>(L, FieldElement::zero(s)));
    for (std::size_t q = 0; q < Nsig; ++q) {
        std::vector<FieldElement> sp(r0);
        FieldElement pw = FieldElement::one(s);
        for (unsigned j = 0; j < r0; ++j) {
            sp[j] = pw;
            pw = pw * signodes[q];
        }
        for (std::size_t l = 0; l < L; ++l) {
            FieldElement acc = FieldElement::zero(s);
            for (std::size_t J = 0; J < L; ++J) {
                FieldElement hj = FieldElement::zero(s);
                for (unsigned j = 0; j < r0; ++j) hj = hj + sp[j] * hred[J][j];
                acc = acc + Vz[J][l] * hj;
            }
            u[q][l] = acc;
        }
    }
    // power-sum extraction weights over the sigma nodes
    std::vector<std::vector<FieldElement>> ck(r0 + 1,
                                              std::vector<FieldElement>(Nsig, FieldElement::zero(s)));
    for (unsigned k = 1; k <= r0; ++k)
        for (std::size_t q = 0; q < Nsig; ++q) {
            FieldElement acc = FieldElement::zero(s);
            std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k) * (r0 - 1), Nsig - 1);
            for (std::size_t J = 0; J <= top; ++J) acc = acc + Vsig[J][q] * cd.powsums[J];
            ck[k][q] = acc;
        }
    // derivative-combination weights at the y nodes
    std::vector<std::vector<FieldElement>> mu(Ky, std::vector<FieldElement>(Ky));
    for (std::size_t k = 0; k < Ky; ++k)
        for (std::size_t kp = 0; kp < Ky; ++kp) {
            FieldElement acc = FieldElement::zero(s);
            FieldElement bp = FieldElement::one(s);
            for (std::size_t i = 1; i < Ky; ++i) {
                acc = acc + FieldElement::from_mpz(s, mpz_class(static_cast<unsigned long>(i))) *
                                Vy[i][kp] * bp;
                bp = bp * ynodes[k];
            }
            mu[k][kp] = acc;
        }

    std::vector<std::vector<Partition>> partitions(r0 + 1);
    for (unsigned r = 0; r <= r0; ++r) partitions[r] = partitions_of(r);

    // ---------------- gate construction ----------------
    Circuit out(s);
    std::uint32_t tin = out.add_input(tvar);
    std::uint32_t yin = out.add_input(yvar);
    std::uint32_t one = out.add_const(FieldElement::one(s));
    std::map<std::string, std::uint32_t> txs;
    for (const auto& xv : psi.xvars) txs[xv] = out.add_prod({tin, out.add_input(xv)});
    std::vector<FieldElement> a_lift, b_lift;
    for (size_t i = 0; i < psi.xvars.size(); ++i) {
        a_lift.push_back(lift(psi.a[i]));
        b_lift.push_back(lift(psi.b[i]));
    }

    // base copies shared across (y, z) node pairs with equal shift values
    std::vector<std::map<std::string, std::uint32_t>> bcache(Nin);
    auto base_copy = [&](std::size_t tau, const FieldElement& c) {
        std::string key = c.str();
        auto it = bcache[tau].find(key);
        if (it != bcache[tau].end()) return it->second;
        std::map<std::string, std::uint32_t> leaves;
        for (size_t i = 0; i < psi.xvars.size(); ++i)
            leaves[psi.xvars[i]] =
                out.add_sum({txs[psi.xvars[i]], one}, {innodes[tau], a_lift[i] * c + b_lift[i]});
        std::uint32_t g = graft(
            out, C, [&](const std::string& name) { return leaves.at(name); }, lift);
        bcache[tau].emplace(key, g);
        return g;
    };

    std::vector<std::vector<std::uint32_t>> numcopy(Nin, std::vector<std::uint32_t>(L));
    for (std::size_t tau = 0; tau < Nin; ++tau) {
        for (std::size_t l = 0; l < L; ++l) {
            FieldElement wl = weval(znodes[l]);
            std::vector<FieldElement> wlp(Mm + 2);
            wlp[0] = FieldElement::one(s);
            for (unsigned j = 1; j <= Mm + 1; ++j) wlp[j] = wlp[j - 1] * wl;
            std::vector<std::uint32_t> E(Ky);
            for (std::size_t k = 0; k < Ky; ++k) E[k] = base_copy(tau, ynodes[k] + znodes[l]);
            std::vector<std::uint32_t> terms;
            std::vector<FieldElement> weights;
            terms.push_back(one);
            weights.push_back(znodes[l] * wlp[Mm + 1]);
            for (std::size_t k = 0; k < Ky; ++k) {
                std::uint32_t D = out.add_sum(E, mu[k]);
                std::uint32_t A = out.add_sum({one, E[k]}, {ynodes[k] * wl, -FieldElement::one(s)});
                for (unsigned m = 1; m <= Mm; ++m) {
                    std::vector<std::uint32_t> ch(m + 1, A);
                    ch[0] = D;
                    terms.push_back(out.add_prod(std::move(ch)));
                    weights.push_back(wlp[Mm - m] * Vy[m - 1][k]);
                }
            }
            numcopy[tau][l] = out.add_sum(std::move(terms), std::move(weights));
        }
    }
    std::vector<std::vector<std::uint32_t>> numbar(d + 1, std::vector<std::uint32_t>(L));
    for (unsigned i = 0; i <= d; ++i)
        for (std::size_t l = 0; l < L; ++l) {
            std::vector<std::uint32_t> ch(Nin);
            std::vector<FieldElement> wts(Nin);
            for (std::size_t tau = 0; tau < Nin; ++tau) {
                ch[tau] = numcopy[tau][l];
                wts[tau] = Vin[i][tau];
            }
            numbar[i][l] = out.add_sum(std::move(ch), std::move(wts));
        }
    std::vector<std::vector<std::uint32_t>> egate(Nout, std::vector<std::uint32_t>(r0 + 1));
    for (std::size_t tau = 0; tau < Nout; ++tau) {
        std::vector<std::uint32_t> V(Nsig);
        for (std::size_t q = 0; q < Nsig; ++q) {
            std::vector<std::uint32_t> ch;
            std::vector<FieldElement> wts;
            FieldElement th = FieldElement::one(s);
            for (unsigned i = 0; i <= d; ++i) {
                for (std::size_t l = 0; l < L; ++l) {
                    if (u[q][l].is_zero()) continue;
                    ch.push_back(numbar[i][l]);
                    wts.push_back(th * u[q][l]);
                }
                th = th * outnodes[tau];
            }
            V[q] = ch.empty() ? out.add_const(FieldElement::zero(s))
                              : out.add_sum(std::move(ch), std::move(wts));
        }
        std::vector<std::uint32_t> pk(r0 + 1, 0);
        for (unsigned k = 1; k <= r0; ++k) {
            std::vector<std::uint32_t> ch;
            std::vector<FieldElement> wts;
            for (std::size_t q = 0; q < Nsig; ++q) {
                if (ck[k][q].is_zero()) continue;
                ch.push_back(out.add_prod(std::vector<std::uint32_t>(k, V[q])));
                wts.push_back(ck[k][q]);
            }
            pk[k] = ch.empty() ? out.add_const(FieldElement::zero(s))
                               : out.add_sum(std::move(ch), std::move(wts));
        }
        egate[tau][0] = one;
        for (unsigned r = 1; r <= r0; ++r) {
            std::vector<std::uint32_t> ch;
            std::vector<FieldElement> wts;
            for (const auto& part : partitions[r]) {
                std::vector<std::uint32_t> factors;
                for (unsigned part_k : part.parts) factors.push_back(pk[part_k]);
                ch.push_back(out.add_prod(std::move(factors)));
                wts.push_back(FieldElement::from_mpq(s, part.coeff));
            }
            egate[tau][r] = out.add_sum(std::move(ch), std::move(wts));
        }
    }
    // the x-scaled glued components carry their own t powers, so the outer
    // truncation weights are plain scalars: w_tau = sum_{i<=d} Vout[i][tau]
    std::vector<FieldElement> wtau(Nout, FieldElement::zero(s));
    for (unsigned i = 0; i <= d; ++i)
        for (std::size_t tau = 0; tau < Nout; ++tau) wtau[tau] = wtau[tau] + Vout[i][tau];
    std::vector<std::uint32_t> ypow(r0 + 1, one);
    for (unsigned j = 1; j <= r0; ++j) ypow[j] = out.add_prod(std::vector<std::uint32_t>(j, yin));

    std::vector<std::uint32_t> top;
    std::vector<FieldElement> topw;
    for (unsigned r = 0; r <= r0; ++r) {
        FieldElement sgn = (r % 2 == 0) ? FieldElement::one(s) : -FieldElement::one(s);
        for (std::size_t tau = 0; tau < Nout; ++tau) {
            top.push_back(out.add_prod({ypow[r0 - r], egate[tau][r]}));
            topw.push_back(sgn * wtau[tau]);
        }
    }
    out.set_output(out.add_sum(std::move(top), std::move(topw)));

    CircuitTransform t;
    t.circuit = std::move(out);
    t.report.fill(C, t.circuit, "factor_circuit");
    t.report.note("precision", std::to_string(d));
    t.report.note("boundary_degree", std::to_string(r0));
    t.report.note("y_nodes", std::to_string(Ky));
    t.report.note("z_nodes", std::to_string(L));
    t.report.note("glue_nodes", std::to_string(Nin) + "+" + std::to_string(Nout));
    t.report.note("field", s.descriptor());
    return t;
}

} // namespace fkit
