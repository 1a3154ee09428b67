#include "fkit/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "fkit/roots.hpp"
#include "fkit/ufactor.hpp"

namespace fkit {

// ---------------------------------------------------------------------------
// generators

GeneratorSpec GeneratorSpec::passthrough() {
    GeneratorSpec g;
    g.name = "passthrough";
    return g;
}

GeneratorSpec GeneratorSpec::affine(FieldSpec s, const std::vector<std::string>& xvars,
                                    unsigned width, std::uint64_t seed) {
    GeneratorSpec g;
    g.name = "affine";
    g.seed = seed;
    g.width = width;
    Rng rng(seed);
    std::uint64_t sample = s.size() ? std::min<std::uint64_t>(*s.size(), 1000) : 1000;
    for (const auto& xv : xvars) {
        Poly img = Poly::constant(s, element_by_index(s, rng.below(sample)));
        for (unsigned j = 0; j < width; ++j) {
            Poly w = Poly::var(s, "w" + std::to_string(j + 1));
            img = img + w.scaled(element_by_index(s, rng.below(sample)));
        }
        g.images[xv] = img;
    }
    return g;
}

GeneratorSpec GeneratorSpec::custom(std::map<std::string, Poly> images) {
    GeneratorSpec g;
    g.name = "custom";
    g.images = std::move(images);
    return g;
}

std::string GeneratorSpec::describe() const {
    std::ostringstream os;
    os << name << ":seed=" << seed << ":w=" << width;
    return os.str();
}

Poly variable_reduce(const Poly& F, const GeneratorSpec& gen, const std::string& tvar,
                     const std::string& yvar) {
    if (gen.images.empty()) return F;
    for (const auto& [v, img] : gen.images) {
        if (v == tvar || v == yvar)
            raise(errc::generator_touches_ty, "generator maps " + v);
        if (img.degree_in(tvar) > 0 || img.degree_in(yvar) > 0)
            raise(errc::generator_touches_ty, "image of " + v + " involves t or y");
    }
    return substitute(F, gen.images);
}

bool divisibility_test(const Poly& f, const Poly& g, const std::string& yvar) {
    if (f.is_zero()) return g.is_zero();
    if (f.degree_in(yvar) >= 1) return pseudo_div(g, f, yvar).rem.is_zero();
    return divides(f, g);
}

// ---------------------------------------------------------------------------
// canonical normalization: leading graded-lex coefficient 1

namespace {

Poly canonical(const Poly& f) { return f.normalized(); }

std::vector<std::string> xvars_of(const Poly& f, const std::string& tvar,
                                  const std::string& yvar) {
    std::vector<std::string> out;
    for (const auto& v : f.vars())
        if (v != tvar && v != yvar && f.degree_in(v) > 0) out.push_back(v);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// recombination factorization

std::vector<Poly> recombination_factorize(const Poly& G_in, const std::string& tvar,
                                          const std::string& yvar, Rng& rng) {
    FieldSpec s = G_in.spec();
    if (s.kind() != FieldKind::prime && s.kind() != FieldKind::extension)
        raise(errc::infinite_field, "recombination needs a finite field");
    int dy = G_in.degree_in(yvar);
    if (dy < 1) raise(errc::degree_zero_input, "G constant in y");
    Poly lead = G_in.coeff_of(yvar, static_cast<unsigned>(dy));
    if (!lead.is_constant())
        raise(errc::invalid_map, "G not monic in y up to a field constant");
    Poly G = G_in.scaled(lead.constant_term().inv());
    Poly G0 = substitute(G, {{tvar, Poly(s)}});
    for (const auto& v : G0.vars())
        if (v != yvar && G0.degree_in(v) > 0)
            raise(errc::invalid_map, "G(0,y) involves " + v);
    if (discriminant(G0, yvar).is_zero())
        raise(errc::not_squarefree_at_zero, "G(0,y) not squarefree");

    unsigned base_prec = static_cast<unsigned>(std::max(G.total_degree(), 1));
    for (int attempt = 0; attempt < 2; ++attempt) {
        unsigned prec = base_prec << attempt;
        auto sf = splitting_field(G0, yvar, rng);
        FieldSpec K = sf.field;
        Poly GK = map_coeffs(G, sf.embed);
        auto roots = roots_in(G0, yvar, sf.embed, rng);
        if (roots.size() != static_cast<size_t>(dy))
            raise(errc::internal, "splitting field did not split the boundary");
        std::vector<Series> lifts;
        for (const auto& alpha : roots)
            lifts.push_back(newton_root_oracle(GK, yvar, alpha, prec));

        std::vector<std::string> sv;
        for (const auto& v : GK.vars())
            if (v != yvar && GK.degree_in(v) > 0) sv.push_back(v);
        Poly yK = Poly::var(K, yvar);
        unsigned subfield_deg = s.kind() == FieldKind::prime ? 1 : s.ext_degree();

        std::vector<size_t> avail(roots.size());
        for (size_t i = 0; i < avail.size(); ++i) avail[i] = i;
        std::vector<Poly> found;
        bool progress = true;
        while (!avail.empty() && progress) {
            progress = false;
            // subsets of the available roots, smallest first, lexicographic
            for (size_t sz = 1; sz <= avail.size() && !progress; ++sz) {
                std::vector<size_t> idx(sz);
                std::function<bool(size_t, size_t)> rec = [&](size_t pos, size_t start) -> bool {
                    if (pos == sz) {
                        Poly prod = Poly::constant(K, 1);
                        for (size_t i = 0; i < sz; ++i)
                            prod = hom_upto(prod * (yK - lifts[avail[idx[i]]].body()),
                                            sv, prec);
                        Poly cand = hom_upto(prod, sv, prec);
                        // base-field coefficients?
                        PolyBuilder down(s, cand.vars());
                        for (const auto& [m, c] : cand.terms()) {
                            if (!in_subfield(c, subfield_deg)) return false;
                            down.add(m, sf.embed.down(c));
                        }
                        Poly candidate = down.take();
                        if (!divides(candidate, G)) return false;
                        found.push_back(candidate);
                        // accepted roots never re-enter
                        std::vector<size_t> rest;
                        size_t at = 0;
                        for (size_t i = 0; i < avail.size(); ++i) {
                            if (at < sz && idx[at] == i) {
                                ++at;
                                continue;
                            }
                            rest.push_back(avail[i]);
                        }
                        avail = rest;
                        return true;
                    }
                    for (size_t i = start; i + (sz - pos) <= avail.size(); ++i) {
                        idx[pos] = i;
                        if (rec(pos + 1, i + 1)) return true;
                    }
                    return false;
                };
                progress = rec(0, 0);
            }
        }
        if (avail.empty()) {
            // exact reassembly sanity check
            Poly prod = Poly::constant(s, 1);
            for (const auto& f : found) prod = prod * f;
            if (prod == G) return found;
        }
        if (attempt == 1)
            raise(errc::precision_too_low, "recombination failed at doubled precision");
    }
    raise(errc::internal, "unreachable");
}

// ---------------------------------------------------------------------------
// oracle factorization

Poly OracleFactorization::reassemble() const {
    if (factors.empty()) return Poly();
    Poly p = Poly::constant(factors[0].poly.spec(), unit);
    for (const auto& f : factors) p = p * f.poly.pow(f.multiplicity);
    return p;
}

namespace {

std::vector<Poly> factor_squarefree_dense(const Poly& F, Rng& rng) {
    std::vector<std::string> active;
    for (const auto& v : F.vars())
        if (F.degree_in(v) > 0) active.push_back(v);
    if (active.empty()) return {};
    if (F.total_degree() == 1) return {canonical(F)};
    if (active.size() == 1) {
        auto uf = univariate_factor_ff(F, active[0], rng);
        std::vector<Poly> out;
        for (auto& [g, m] : uf.factors)
            for (unsigned i = 0; i < m; ++i) out.push_back(g);
        return out;
    }
    PreprocessMap psi = find_preprocessing(F, "__y", 400, rng);
    Poly G = apply_preprocessing(F, psi, "__t", "__y");
    auto parts = recombination_factorize(G, "__t", "__y", rng);
    std::vector<Poly> out;
    for (const auto& g : parts) out.push_back(canonical(undo_preprocessing(g, psi, "__t", "__y")));
    return out;
}

} // namespace

OracleFactorization oracle_factorize(const Poly& f, Rng& rng) {
    if (f.is_zero()) raise(errc::zero_polynomial, "factorization of 0");
    FieldSpec s = f.spec();
    if (s.kind() != FieldKind::prime && s.kind() != FieldKind::extension)
        raise(errc::infinite_field, "oracle factorization needs a finite field");
    OracleFactorization out;
    auto dec = squarefree_decomposition(f);
    std::map<std::string, std::pair<Poly, unsigned>> acc; // canonical text -> (poly, mult)
    for (size_t i = 0; i < dec.components.size(); ++i) {
        if (dec.components[i].is_constant()) continue;
        for (const auto& g : factor_squarefree_dense(dec.components[i], rng)) {
            auto key = g.str();
            auto it = acc.find(key);
            if (it == acc.end())
                acc.emplace(key, std::make_pair(g, static_cast<unsigned>(i + 1)));
            else
                it->second.second += static_cast<unsigned>(i + 1);
        }
    }
    for (auto& [k, v] : acc) out.factors.push_back({v.first, v.second});
    std::sort(out.factors.begin(), out.factors.end(), [](const OracleFactor& a, const OracleFactor& b) {
        if (a.poly.total_degree() != b.poly.total_degree())
            return a.poly.total_degree() < b.poly.total_degree();
        return a.poly.str() < b.poly.str();
    });
    Poly prod = Poly::constant(s, 1);
    for (const auto& fac : out.factors) prod = prod * fac.poly.pow(fac.multiplicity);
    Poly u = exact_div(f, prod);
    if (!u.is_constant()) raise(errc::internal, "oracle factorization reassembly failed");
    out.unit = u.constant_term();
    return out;
}

bool oracle_irreducible(const Poly& f, Rng& rng) {
    if (f.is_constant()) return false;
    auto fac = oracle_factorize(f, rng);
    return fac.factors.size() == 1 && fac.factors[0].multiplicity == 1;
}

// ---------------------------------------------------------------------------
// irreducibility preservation

PreservationReport irreducibility_preservation_check(const Poly& F, const GeneratorSpec& gen,
                                                     const std::string& tvar,
                                                     const std::string& yvar, Rng& rng) {
    FieldSpec s = F.spec();
    int dy = F.degree_in(yvar);
    if (dy < 1 || !F.coeff_of(yvar, static_cast<unsigned>(dy)).is_constant())
        raise(errc::hypothesis_violated, "not monic in y");
    // every monomial containing an x must contain t
    Poly at_t0 = substitute(F, {{tvar, Poly(s)}});
    for (const auto& v : at_t0.vars())
        if (v != yvar && at_t0.degree_in(v) > 0)
            raise(errc::hypothesis_violated, "F(x,0,y) != F(0,0,y)");
    if (discriminant(at_t0, yvar).is_zero())
        raise(errc::hypothesis_violated, "F(0,0,y) not squarefree");

    PreservationReport rep;
    // the hypotheses put F (and its image) in pre-processed shape already, so
    // factor both sides directly by root recombination; the boundary is
    // squarefree, hence so are both polynomials
    auto before = recombination_factorize(F, tvar, yvar, rng);
    Poly Fg = variable_reduce(F, gen, tvar, yvar);
    auto after = recombination_factorize(Fg, tvar, yvar, rng);
    rep.factors_before = static_cast<unsigned>(before.size());
    rep.factors_after = static_cast<unsigned>(after.size());

    // preserved when the images of the factors are exactly the factors of
    // the image
    rep.preserved = before.size() == after.size();
    if (rep.preserved) {
        for (const auto& f : before) {
            Poly img = canonical(variable_reduce(f, gen, tvar, yvar));
            bool matched = false;
            for (const auto& g : after)
                if (canonical(g) == img) matched = true;
            if (!matched) {
                rep.preserved = false;
                rep.detail = "factor image missing: " + f.str();
                break;
            }
        }
    } else {
        rep.detail = "factor counts differ";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// full pipeline

SquarefreePipeline squarefree_part_pipeline(const Circuit& C, unsigned degree_cap) {
    ExpandOptions o;
    o.degree_cap = degree_cap;
    Poly f = expand(C, o);
    if (f.is_zero()) raise(errc::zero_polynomial, "zero circuit");
    auto dec = squarefree_decomposition(f);
    SquarefreePipeline out;
    out.unit = dec.unit;
    for (size_t i = 0; i < dec.components.size(); ++i) {
        out.dense.push_back(dec.components[i]);
        out.components.emplace_back(sigma_pi_circuit(dec.components[i]),
                                    static_cast<unsigned>(i + 1));
    }
    return out;
}

namespace {

struct ComponentFactor {
    Poly value;    // factor of the squarefree component, canonical
    Poly boundary; // monic boundary used for reconstruction (empty if direct)
    PreprocessMap psi;
    bool reconstructed = false;
};

} // namespace

FactorizationResult factorize_full(const Circuit& C, const PipelineConfig& cfg) {
    FieldSpec s = C.spec();
    Rng rng(cfg.seed);
    FactorizationResult res;
    ExpandOptions eo;
    eo.degree_cap = cfg.degree_cap;
    Poly f = expand(C, eo);
    res.input_expansion = f;
    if (f.is_zero()) raise(errc::zero_polynomial, "zero circuit");
    bool finite = s.kind() == FieldKind::prime || s.kind() == FieldKind::extension;
    if (finite && s.characteristic() <= static_cast<std::uint64_t>(std::max(f.total_degree(), 0)))
        raise(errc::char_too_small_for_newton,
              "pipeline requires characteristic > total degree");
    if (!finite && cfg.planted_factors.empty() && !f.is_constant() && f.total_degree() > 1) {
        bool univ = true;
        std::string only;
        for (const auto& v : f.vars())
            if (f.degree_in(v) > 0) {
                if (!only.empty()) univ = false;
                only = v;
            }
        if (univ)
            raise(errc::infinite_field,
                  "univariate factorization over Q is out of scope; supply planted factors");
    }

    auto dec = squarefree_decomposition(f);
    const std::string& tv = cfg.tvar;
    const std::string& yv = cfg.yvar;

    for (size_t ci = 0; ci < dec.components.size(); ++ci) {
        const Poly& comp = dec.components[ci];
        if (comp.is_constant()) continue;
        unsigned mult = static_cast<unsigned>(ci + 1);
        std::vector<std::string> active;
        for (const auto& v : comp.vars())
            if (comp.degree_in(v) > 0) active.push_back(v);

        std::vector<Poly> values;     // irreducible factors of comp
        bool circuits_possible = cfg.emit_circuits;
        PreprocessMap psi;
        bool have_psi = false;

        if (comp.total_degree() == 1) {
            values.push_back(canonical(comp));
            circuits_possible = false; // передача: trivial factor, circuit below
        } else if (finite) {
            psi = find_preprocessing(comp, yv, cfg.trials, rng);
            have_psi = true;
            Poly G = apply_preprocessing(comp, psi, tv, yv);
            GeneratorSpec gen = cfg.generator;
            if (gen.name == "affine" && gen.images.empty())
                gen = GeneratorSpec::affine(s, xvars_of(G, tv, yv), gen.width ? gen.width : 2,
                                            gen.seed ? gen.seed : cfg.seed + 17 * (ci + 1));
            Poly Gred = variable_reduce(G, gen, tv, yv);
            std::vector<Poly> base = recombination_factorize(Gred, tv, yv, rng);
            for (const auto& h : base) {
                Poly boundary = substitute(h, {{tv, Poly(s)}});
                // reconstruct the factor of the *unreduced* G from its boundary
                unsigned r = static_cast<unsigned>(std::max(h.degree_in(yv), 1));
                Poly g = reconstruct_factor_value(G, boundary.normalized(), tv, yv, r);
                if (!divides(g, G)) {
                    res.certificate_ok = false;
                    res.certificate_detail =
                        "reconstructed candidate does not divide its component "
                        "(generator broke the factorization pattern)";
                    raise(errc::certificate_failed, res.certificate_detail);
                }
                values.push_back(canonical(undo_preprocessing(g, psi, tv, yv)));
            }
        } else {
            // rational mode: planted boundaries
            std::vector<Poly> planted;
            for (const auto& q : cfg.planted_factors)
                if (divides(q, comp)) planted.push_back(q);
            if (planted.empty())
                raise(errc::infinite_field,
                      "rational mode needs planted factors covering every component");
            psi = find_preprocessing(comp, yv, cfg.trials, rng);
            have_psi = true;
            Poly G = apply_preprocessing(comp, psi, tv, yv);
            for (const auto& q : planted) {
                // boundary of the planted factor under psi
                Poly Gq = apply_preprocessing(q, psi, tv, yv);
                Poly boundary = substitute(Gq, {{tv, Poly(s)}}).normalized();
                unsigned r = static_cast<unsigned>(std::max(q.total_degree(), 1));
                Poly g = reconstruct_factor_value(G, boundary, tv, yv, r);
                if (!divides(g, G))
                    raise(errc::certificate_failed, "planted boundary reconstruction failed");
                values.push_back(canonical(undo_preprocessing(g, psi, tv, yv)));
            }
            Poly check = Poly::constant(s, 1);
            for (const auto& vq : values) check = check * vq;
            if (!divides(check, comp) || check.total_degree() != comp.total_degree())
                raise(errc::certificate_failed, "planted factors do not cover the component");
        }

        for (const auto& val : values) {
            FactorEntry fe;
            fe.expansion = val;
            fe.multiplicity = mult;
            if (cfg.emit_circuits) {
                if (have_psi && circuits_possible && val.total_degree() >= 1) {
                    Circuit comp_circ = sigma_pi_circuit(comp);
                    Poly Gq = apply_preprocessing(val, psi, tv, yv);
                    Poly boundary = substitute(Gq, {{tv, Poly(s)}}).normalized();
                    unsigned r = static_cast<unsigned>(std::max(val.total_degree(), 1));
                    auto fc = factor_circuit(comp_circ, psi, boundary, tv, yv, r);
                    fe.circuit = undo_preprocessing_circuit(fc.circuit, psi, tv, yv);
                    fe.report = fc.report;
                    fe.report.output_size = fe.circuit.size();
                    fe.report.output_depth = fe.circuit.depth();
                    fe.report.depth_increment = static_cast<int>(fe.report.output_depth) -
                                               static_cast<int>(fe.report.input_depth);
                    fe.has_circuit = true;
                } else {
                    // linear components and degenerate cases ship as depth-2
                    fe.circuit = sigma_pi_circuit(val);
                    fe.report.fill(C, fe.circuit, "sigma_pi");
                    fe.has_circuit = true;
                }
            }
            res.factors.push_back(std::move(fe));
        }
    }

    // multiplicities double-checked by repeated exact division
    for (auto& fe : res.factors) {
        unsigned m = 0;
        Poly rest = f;
        while (divides(fe.expansion, rest)) {
            rest = exact_div(rest, fe.expansion);
            ++m;
        }
        if (m != fe.multiplicity) {
            res.certificate_ok = false;
            res.certificate_detail = "multiplicity mismatch for " + fe.expansion.str();
            raise(errc::certificate_failed, res.certificate_detail);
        }
    }

    // the defining certificate: unit * prod factor^mult == expand(C), exactly
    Poly prod = Poly::constant(s, 1);
    for (const auto& fe : res.factors) prod = prod * fe.expansion.pow(fe.multiplicity);
    Poly uq = f;
    bool ok = divides(prod, f);
    if (ok) {
        uq = exact_div(f, prod);
        ok = uq.is_constant();
    }
    if (!ok) {
        res.certificate_ok = false;
        res.certificate_detail = "reassembly failed";
        raise(errc::certificate_failed, res.certificate_detail);
    }
    res.unit = uq.constant_term();

    // random-point spot checks of the certificate identity
    unsigned samples = 0;
    {
        Rng prng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
        for (unsigned i = 0; i < cfg.pit_samples; ++i) {
            std::map<std::string, FieldElement> pt;
            for (const auto& v : f.vars())
                pt[v] = finite ? element_by_index(s, prng.below(*s.size()))
                               : FieldElement::from_int(s, prng.range(-20, 20));
            FieldElement lhs = eval(f, pt);
            FieldElement rhs = res.unit;
            for (const auto& fe : res.factors)
                rhs = rhs * eval(fe.expansion, pt).pow(static_cast<long>(fe.multiplicity));
            if (lhs != rhs) raise(errc::certificate_failed, "point check failed");
            ++samples;
        }
    }
    res.pit_samples = samples;
    res.certificate_ok = true;
    return res;
}

} // namespace fkit
