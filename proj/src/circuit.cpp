#include "fkit/circuit.hpp"

#include <algorithm>
#include <sstream>

#include "fkit/ufactor.hpp"

namespace fkit {

// ---------------------------------------------------------------------------
// construction

void Circuit::check_child(std::uint32_t c) const {
    if (c >= gates_.size()) raise(errc::cycle_detected, "gate references g" + std::to_string(c));
}

std::uint32_t Circuit::add_input(const std::string& name) {
    Gate g;
    g.kind = Gate::Kind::input;
    g.name = name;
    gates_.push_back(std::move(g));
    return static_cast<std::uint32_t>(gates_.size() - 1);
}

std::uint32_t Circuit::add_const(const FieldElement& v) {
    if (v.spec() != spec_) raise(errc::spec_mismatch, "constant from another field");
    Gate g;
    g.kind = Gate::Kind::constant;
    g.value = v;
    gates_.push_back(std::move(g));
    return static_cast<std::uint32_t>(gates_.size() - 1);
}

std::uint32_t Circuit::add_sum(std::vector<std::uint32_t> children,
                               std::vector<FieldElement> scalars) {
    if (children.empty() || children.size() != scalars.size())
        raise(errc::internal, "add gate needs children with matching scalars");
    for (auto c : children) check_child(c);
    for (const auto& s : scalars)
        if (s.spec() != spec_) raise(errc::spec_mismatch, "edge scalar from another field");
    Gate g;
    g.kind = Gate::Kind::add;
    g.children = std::move(children);
    g.scalars = std::move(scalars);
    gates_.push_back(std::move(g));
    return static_cast<std::uint32_t>(gates_.size() - 1);
}

std::uint32_t Circuit::add_sum(std::vector<std::uint32_t> children) {
    std::vector<FieldElement> ones(children.size(), FieldElement::one(spec_));
    return add_sum(std::move(children), std::move(ones));
}

std::uint32_t Circuit::add_prod(std::vector<std::uint32_t> children) {
    if (children.empty()) raise(errc::internal, "mul gate needs children");
    for (auto c : children) check_child(c);
    Gate g;
    g.kind = Gate::Kind::mul;
    g.children = std::move(children);
    gates_.push_back(std::move(g));
    return static_cast<std::uint32_t>(gates_.size() - 1);
}

void Circuit::set_output(std::uint32_t g) {
    check_child(g);
    output_ = g;
}

std::uint32_t Circuit::output() const {
    if (!output_) raise(errc::internal, "circuit without output");
    return *output_;
}

std::vector<std::string> Circuit::input_vars() const {
    std::vector<std::string> v;
    for (const auto& g : gates_)
        if (g.kind == Gate::Kind::input) v.push_back(g.name);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::size_t Circuit::size() const {
    std::size_t wires = 0;
    for (const auto& g : gates_) wires += g.children.size();
    return wires;
}

unsigned Circuit::depth() const {
    std::vector<unsigned> d(gates_.size(), 0);
    for (size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        if (g.kind == Gate::Kind::add || g.kind == Gate::Kind::mul) {
            unsigned m = 0;
            for (auto c : g.children) m = std::max(m, d[c]);
            d[i] = m + 1;
        }
    }
    return gates_.empty() ? 0 : d[output()];
}

mpz_class Circuit::degree_bound() const {
    std::vector<mpz_class> d(gates_.size(), 0);
    for (size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        switch (g.kind) {
        case Gate::Kind::input: d[i] = 1; break;
        case Gate::Kind::constant: d[i] = 0; break;
        case Gate::Kind::add:
            for (auto c : g.children) d[i] = std::max(d[i], d[c]);
            break;
        case Gate::Kind::mul:
            for (auto c : g.children) d[i] += d[c];
            break;
        }
    }
    return gates_.empty() ? mpz_class(0) : d[output()];
}

// ---------------------------------------------------------------------------
// report

void TransformReport::fill(const Circuit& in, const Circuit& out, const std::string& name) {
    construction = name;
    input_size = in.size();
    input_depth = in.depth();
    output_size = out.size();
    output_depth = out.depth();
    depth_increment = static_cast<int>(output_depth) - static_cast<int>(input_depth);
}

std::string TransformReport::render() const {
    std::ostringstream os;
    os << "construction=" << construction << "\n";
    os << "input_size=" << input_size << "\n";
    os << "input_depth=" << input_depth << "\n";
    os << "output_size=" << output_size << "\n";
    os << "output_depth=" << output_depth << "\n";
    os << "depth_increment=" << depth_increment << "\n";
    for (const auto& [k, v] : notes) os << k << "=" << v << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// evaluation / expansion

FieldElement eval_circuit(const Circuit& c, const std::map<std::string, FieldElement>& point) {
    std::vector<FieldElement> memo(c.gates().size());
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const Gate& g = c.gates()[i];
        switch (g.kind) {
        case Gate::Kind::input: {
            auto it = point.find(g.name);
            if (it == point.end()) raise(errc::missing_assignment, g.name);
            if (it->second.spec() != c.spec())
                raise(errc::spec_mismatch, "assignment for " + g.name);
            memo[i] = it->second;
            break;
        }
        case Gate::Kind::constant: memo[i] = g.value; break;
        case Gate::Kind::add: {
            FieldElement acc = FieldElement::zero(c.spec());
            for (size_t j = 0; j < g.children.size(); ++j)
                acc = acc + g.scalars[j] * memo[g.children[j]];
            memo[i] = acc;
            break;
        }
        case Gate::Kind::mul: {
            FieldElement acc = FieldElement::one(c.spec());
            for (auto ch : g.children) acc = acc * memo[ch];
            memo[i] = acc;
            break;
        }
        }
    }
    return memo[c.output()];
}

Poly expand_at(const Circuit& c, const std::map<std::string, Poly>& images,
               const ExpandOptions& opts) {
    if (opts.truncated && !opts.degree_cap)
        raise(errc::internal, "truncated expansion needs a degree cap");
    std::vector<Poly> memo(c.gates().size());
    auto clip = [&](Poly p) {
        if (opts.truncated) p = hom_upto(p, p.vars(), *opts.degree_cap);
        if (p.term_count() > opts.term_limit)
            raise(errc::degree_cap_exceeded,
                  "term limit " + std::to_string(opts.term_limit) + " exceeded");
        return p;
    };
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const Gate& g = c.gates()[i];
        switch (g.kind) {
        case Gate::Kind::input: {
            auto it = images.find(g.name);
            if (it != images.end()) {
                if (it->second.spec() != c.spec())
                    raise(errc::spec_mismatch, "image for " + g.name);
                memo[i] = it->second;
            } else {
                memo[i] = Poly::var(c.spec(), g.name);
            }
            break;
        }
        case Gate::Kind::constant: memo[i] = Poly::constant(c.spec(), g.value); break;
        case Gate::Kind::add: {
            Poly acc(c.spec());
            for (size_t j = 0; j < g.children.size(); ++j)
                acc = acc + memo[g.children[j]].scaled(g.scalars[j]);
            memo[i] = clip(std::move(acc));
            break;
        }
        case Gate::Kind::mul: {
            Poly acc = Poly::constant(c.spec(), 1);
            for (auto ch : g.children) acc = clip(acc * memo[ch]);
            memo[i] = std::move(acc);
            break;
        }
        }
    }
    Poly out = memo[c.output()];
    if (!opts.truncated && opts.degree_cap &&
        out.total_degree() > static_cast<int>(*opts.degree_cap))
        raise(errc::degree_cap_exceeded, "output degree " + std::to_string(out.total_degree()) +
                                             " over cap " + std::to_string(*opts.degree_cap));
    return out;
}

Poly expand(const Circuit& c, const ExpandOptions& opts) { return expand_at(c, {}, opts); }

// ---------------------------------------------------------------------------
// graft / map_constants

std::uint32_t graft(Circuit& dst, const Circuit& src,
                    const std::function<std::uint32_t(const std::string&)>& leaf_fn,
                    const std::function<FieldElement(const FieldElement&)>& const_fn) {
    std::vector<std::uint32_t> map(src.gates().size());
    for (size_t i = 0; i < src.gates().size(); ++i) {
        const Gate& g = src.gates()[i];
        switch (g.kind) {
        case Gate::Kind::input: map[i] = leaf_fn(g.name); break;
        case Gate::Kind::constant:
            map[i] = dst.add_const(const_fn ? const_fn(g.value) : g.value);
            break;
        case Gate::Kind::add: {
            std::vector<std::uint32_t> ch;
            std::vector<FieldElement> sc;
            ch.reserve(g.children.size());
            for (size_t j = 0; j < g.children.size(); ++j) {
                ch.push_back(map[g.children[j]]);
                sc.push_back(const_fn ? const_fn(g.scalars[j]) : g.scalars[j]);
            }
            map[i] = dst.add_sum(std::move(ch), std::move(sc));
            break;
        }
        case Gate::Kind::mul: {
            std::vector<std::uint32_t> ch;
            ch.reserve(g.children.size());
            for (auto c : g.children) ch.push_back(map[c]);
            map[i] = dst.add_prod(std::move(ch));
            break;
        }
        }
    }
    return map[src.output()];
}

Circuit map_constants(const Circuit& c, FieldSpec target,
                      const std::function<FieldElement(const FieldElement&)>& fn) {
    Circuit out(target);
    std::uint32_t o = graft(
        out, c, [&](const std::string& v) { return out.add_input(v); }, fn);
    out.set_output(o);
    return out;
}

// ---------------------------------------------------------------------------
// interpolation machinery

std::vector<FieldElement> interpolation_nodes(FieldSpec s, std::size_t count) {
    std::vector<FieldElement> nodes;
    nodes.reserve(count);
    auto sz = s.size();
    if (sz && *sz < count) raise(errc::field_too_small, s.descriptor());
    for (std::size_t i = 0; i < count; ++i) nodes.push_back(element_by_index(s, i));
    return nodes;
}

std::vector<std::vector<FieldElement>> inverse_vandermonde(const std::vector<FieldElement>& nodes) {
    // rows of V^-1 via Lagrange basis polynomials: row i, column j holds
    // Coeff_{t^i}(L_j). Build prod = prod_k (t - a_k) once, then divide out
    // (t - a_j) synthetically per column.
    std::size_t n = nodes.size();
    FieldSpec s = nodes[0].spec();
    std::vector<FieldElement> prod(n + 1, FieldElement::zero(s));
    prod[0] = FieldElement::one(s);
    std::size_t deg = 0;
    for (const auto& a : nodes) {
        for (std::size_t k = deg + 1; k-- > 0;) {
            FieldElement shifted = k > 0 ? prod[k - 1] : FieldElement::zero(s);
            prod[k] = shifted - a * prod[k];
        }
        prod[deg + 1] = FieldElement::one(s);
        ++deg;
    }
    std::vector<std::vector<FieldElement>> rows(n, std::vector<FieldElement>(n));
    std::vector<FieldElement> q(n);
    for (std::size_t j = 0; j < n; ++j) {
        FieldElement carry = FieldElement::zero(s);
        for (std::size_t k = n; k-- > 0;) {
            FieldElement qk = prod[k + 1] + carry;
            q[k] = qk;
            carry = qk * nodes[j];
        }
        FieldElement den = FieldElement::zero(s);
        FieldElement pw = FieldElement::one(s);
        for (std::size_t k = 0; k < n; ++k) {
            den = den + q[k] * pw;
            pw = pw * nodes[j];
        }
        FieldElement dinv = den.inv();
        for (std::size_t i = 0; i < n; ++i) rows[i][j] = q[i] * dinv;
    }
    return rows;
}

FieldSpec ensure_field_size(FieldSpec s, std::size_t count,
                            std::function<FieldElement(const FieldElement&)>& embed_fn) {
    auto sz = s.size();
    if (!sz || *sz >= count) {
        embed_fn = [](const FieldElement& x) { return x; };
        return s;
    }
    std::uint64_t p = s.prime();
    unsigned j = s.kind() == FieldKind::extension ? s.ext_degree() : 1;
    unsigned k = j;
    mpz_class card;
    while (true) {
        mpz_ui_pow_ui(card.get_mpz_t(), p, k);
        if (card >= static_cast<long>(count)) break;
        k += j;
    }
    Rng rng(0xC0FFEE);
    FieldSpec big = extension_field(p, k, &rng);
    if (s.kind() == FieldKind::prime) {
        embed_fn = [big](const FieldElement& x) { return embed(x, big); };
    } else {
        FieldHom hom = make_embedding(s, big, rng);
        embed_fn = [hom](const FieldElement& x) { return hom(x); };
    }
    return big;
}

namespace {

// copies of c with variable v replaced by interpolation-node constants
struct EvalCopies {
    Circuit out;
    std::vector<std::uint32_t> at_node;
    std::vector<FieldElement> nodes;
};

EvalCopies build_copies(const Circuit& c, const std::string& v, std::size_t count) {
    std::function<FieldElement(const FieldElement&)> embed_fn;
    FieldSpec target = ensure_field_size(c.spec(), count, embed_fn);
    EvalCopies ec;
    ec.out = Circuit(target);
    ec.nodes = interpolation_nodes(target, count);
    std::map<std::string, std::uint32_t> inputs;
    for (const auto& name : c.input_vars())
        if (name != v) inputs[name] = ec.out.add_input(name);
    for (std::size_t j = 0; j < count; ++j) {
        std::uint32_t node_gate = ec.out.add_const(ec.nodes[j]);
        ec.at_node.push_back(graft(
            ec.out, c,
            [&](const std::string& name) { return name == v ? node_gate : inputs.at(name); },
            embed_fn));
    }
    return ec;
}

} // namespace

CircuitTransform coeff_extract_circuit(const Circuit& c, const std::string& y, unsigned index,
                                       unsigned degree_bound) {
    if (index > degree_bound) raise(errc::degree_bound_violated, "index exceeds degree bound");
    std::size_t n = degree_bound + 1;
    EvalCopies ec = build_copies(c, y, n);
    auto vinv = inverse_vandermonde(ec.nodes);
    ec.out.set_output(ec.out.add_sum(ec.at_node, vinv[index]));
    CircuitTransform t;
    t.circuit = std::move(ec.out);
    t.report.fill(c, t.circuit, "coeff_extract");
    t.report.note("variable", y);
    t.report.note("index", std::to_string(index));
    t.report.note("nodes", std::to_string(n));
    t.report.note("field", t.circuit.spec().descriptor());
    return t;
}

CircuitTransform partial_derivative_circuit(const Circuit& c, const std::string& y, unsigned order,
                                            unsigned degree_bound) {
    std::size_t n = degree_bound + 1;
    EvalCopies ec = build_copies(c, y, n);
    FieldSpec s = ec.out.spec();
    auto vinv = inverse_vandermonde(ec.nodes);
    // d^r/dy^r = sum_j mu_j(y) C(.., a_j),
    // mu_j(y) = sum_{i>=r} i(i-1)...(i-r+1) V^-1[i][j] y^(i-r)
    std::uint32_t yin = ec.out.add_input(y);
    std::vector<std::uint32_t> ypow(n, 0);
    std::vector<std::uint32_t> children;
    std::vector<FieldElement> weights;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = order; i < n; ++i) {
            mpz_class fall = 1;
            for (unsigned u = 0; u < order; ++u) fall *= static_cast<unsigned long>(i - u);
            FieldElement w = vinv[i][j] * FieldElement::from_mpz(s, fall);
            if (w.is_zero()) continue;
            unsigned k = static_cast<unsigned>(i - order);
            if (k == 0) {
                children.push_back(ec.at_node[j]);
                weights.push_back(w);
            } else {
                if (ypow[k] == 0) {
                    std::vector<std::uint32_t> ys(k, yin);
                    ypow[k] = ec.out.add_prod(std::move(ys));
                }
                children.push_back(ec.out.add_prod({ypow[k], ec.at_node[j]}));
                weights.push_back(w);
            }
        }
    }
    if (children.empty()) {
        ec.out.set_output(ec.out.add_const(FieldElement::zero(s)));
    } else {
        ec.out.set_output(ec.out.add_sum(std::move(children), std::move(weights)));
    }
    CircuitTransform t;
    t.circuit = std::move(ec.out);
    t.report.fill(c, t.circuit, "partial_derivative");
    t.report.note("variable", y);
    t.report.note("order", std::to_string(order));
    t.report.note("nodes", std::to_string(n));
    return t;
}

CircuitTransform hom_component_circuit(const Circuit& c, const std::vector<std::string>& vars,
                                       unsigned degree, unsigned degree_bound) {
    if (degree > degree_bound) raise(errc::degree_bound_violated, "degree exceeds bound");
    std::size_t n = degree_bound + 1;
    std::function<FieldElement(const FieldElement&)> embed_fn;
    FieldSpec target = ensure_field_size(c.spec(), n, embed_fn);
    Circuit out(target);
    auto nodes = interpolation_nodes(target, n);
    auto vinv = inverse_vandermonde(nodes);
    std::map<std::string, std::uint32_t> inputs;
    for (const auto& name : c.input_vars()) inputs[name] = out.add_input(name);
    std::vector<std::uint32_t> copies;
    for (std::size_t j = 0; j < n; ++j) {
        std::map<std::string, std::uint32_t> scaled = inputs;
        for (const auto& v : vars) {
            auto it = inputs.find(v);
            if (it == inputs.end()) continue;
            scaled[v] = out.add_sum({it->second}, {nodes[j]});
        }
        copies.push_back(graft(
            out, c, [&](const std::string& name) { return scaled.at(name); }, embed_fn));
    }
    out.set_output(out.add_sum(copies, vinv[degree]));
    CircuitTransform t;
    t.circuit = std::move(out);
    t.report.fill(c, t.circuit, "hom_component");
    t.report.note("degree", std::to_string(degree));
    t.report.note("nodes", std::to_string(n));
    return t;
}

CircuitTransform border_coeff_extract(const Circuit& c, const std::string& t, unsigned index) {
    FieldSpec s = c.spec();
    if (s.kind() != FieldKind::eps_jet)
        raise(errc::spec_mismatch, "border extraction needs an eps-jet circuit");
    FieldSpec base = s.jet_base();
    std::size_t n = index + 1;
    auto bsz = base.size();
    if (bsz && *bsz < n + 1) raise(errc::field_too_small, base.descriptor());
    // distinct nonzero base nodes
    std::vector<FieldElement> base_nodes;
    for (std::size_t i = 1; i <= n; ++i) base_nodes.push_back(element_by_index(base, i));
    auto vinv = inverse_vandermonde(base_nodes);
    FieldElement eps = FieldElement::jet(s, 1, {FieldElement::one(base)});
    FieldElement eps_pow_minus_d = eps.pow(static_cast<long>(index)).inv();

    Circuit out(s);
    std::map<std::string, std::uint32_t> inputs;
    for (const auto& name : c.input_vars())
        if (name != t) inputs[name] = out.add_input(name);
    std::vector<std::uint32_t> copies;
    std::vector<FieldElement> weights;
    for (std::size_t j = 0; j < n; ++j) {
        std::uint32_t node = out.add_const(embed(base_nodes[j], s) * eps);
        copies.push_back(graft(out, c, [&](const std::string& name) {
            return name == t ? node : inputs.at(name);
        }));
        weights.push_back(embed(vinv[index][j], s) * eps_pow_minus_d);
    }
    out.set_output(out.add_sum(std::move(copies), std::move(weights)));
    CircuitTransform tr;
    tr.circuit = std::move(out);
    tr.report.fill(c, tr.circuit, "border_coeff_extract");
    tr.report.note("variable", t);
    tr.report.note("index", std::to_string(index));
    tr.report.note("evaluations", std::to_string(n));
    return tr;
}

Circuit sigma_pi_circuit(const Poly& f) {
    Circuit c(f.spec());
    if (f.is_zero()) {
        c.set_output(c.add_const(FieldElement::zero(f.spec())));
        return c;
    }
    std::map<std::string, std::uint32_t> inputs;
    for (const auto& v : f.vars())
        if (f.degree_in(v) > 0) inputs[v] = c.add_input(v);
    std::uint32_t one = 0;
    bool have_one = false;
    std::vector<std::uint32_t> terms;
    std::vector<FieldElement> weights;
    for (const auto& [m, coef] : f.terms()) {
        std::vector<std::uint32_t> factors;
        for (unsigned i = 0; i < m.n; ++i)
            for (unsigned rep = 0; rep < m.e[i]; ++rep) factors.push_back(inputs.at(f.vars()[i]));
        if (factors.empty()) {
            if (!have_one) {
                one = c.add_const(FieldElement::one(f.spec()));
                have_one = true;
            }
            terms.push_back(one);
        } else if (factors.size() == 1) {
            terms.push_back(factors[0]);
        } else {
            terms.push_back(c.add_prod(std::move(factors)));
        }
        weights.push_back(coef);
    }
    c.set_output(c.add_sum(std::move(terms), std::move(weights)));
    return c;
}

// ---------------------------------------------------------------------------
// text formats

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::uint32_t parse_gate_ref(const std::string& tok, size_t defined) {
    if (tok.size() < 2 || tok[0] != 'g') raise(errc::parse_error, "expected gate ref, got " + tok);
    std::uint32_t idx;
    try {
        idx = static_cast<std::uint32_t>(std::stoul(tok.substr(1)));
    } catch (...) {
        raise(errc::parse_error, "bad gate ref " + tok);
    }
    if (idx >= defined) raise(errc::cycle_detected, tok + " referenced before definition");
    return idx;
}

// split "coeff*gK", allowing parentheses around the coefficient
std::pair<std::string, std::string> split_edge(const std::string& tok) {
    if (tok.rfind('(', 0) == 0) {
        int depth = 0;
        for (size_t i = 0; i < tok.size(); ++i) {
            if (tok[i] == '(') ++depth;
            if (tok[i] == ')') {
                --depth;
                if (depth == 0) {
                    if (i + 2 >= tok.size() || tok[i + 1] != '*')
                        raise(errc::parse_error, "bad edge " + tok);
                    return {tok.substr(1, i - 1), tok.substr(i + 2)};
                }
            }
        }
        raise(errc::parse_error, "unbalanced parens in " + tok);
    }
    auto star = tok.rfind('*');
    if (star == std::string::npos) return {"1", tok};
    return {tok.substr(0, star), tok.substr(star + 1)};
}

Circuit parse_sexpr_circuit(FieldSpec s, const std::string& text);

} // namespace

Circuit parse_circuit(FieldSpec s, const std::string& text) {
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '(') return parse_sexpr_circuit(s, text);

    Circuit c(s);
    std::istringstream is(text);
    std::string line;
    size_t defined = 0;
    bool have_out = false;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        auto err = [&](const std::string& m) -> void {
            raise(errc::parse_error, "line " + std::to_string(lineno) + ": " + m);
        };
        if (toks[0] == "out") {
            if (toks.size() != 2) err("out takes one gate");
            c.set_output(parse_gate_ref(toks[1], defined));
            have_out = true;
            continue;
        }
        auto eq = toks[0].find('=');
        if (eq == std::string::npos || toks[0][0] != 'g') err("expected g<k>=...");
        std::uint32_t id = 0;
        try {
            id = static_cast<std::uint32_t>(std::stoul(toks[0].substr(1, eq - 1)));
        } catch (...) {
            err("bad gate id");
        }
        if (id != defined) err("gate ids must be consecutive from g0");
        std::string op = toks[0].substr(eq + 1);
        if (op == "var") {
            if (toks.size() != 2) err("var takes one name");
            c.add_input(toks[1]);
        } else if (op == "const") {
            std::string lit;
            for (size_t i = 1; i < toks.size(); ++i) {
                if (i > 1) lit += " ";
                lit += toks[i];
            }
            if (lit.empty()) err("const needs a literal");
            if (lit.front() == '(' && lit.back() == ')') lit = lit.substr(1, lit.size() - 2);
            c.add_const(eval(parse_poly(s, lit), {}));
        } else if (op == "add") {
            if (toks.size() < 2) err("add needs children");
            std::vector<std::uint32_t> ch;
            std::vector<FieldElement> sc;
            for (size_t i = 1; i < toks.size(); ++i) {
                auto [coeff, ref] = split_edge(toks[i]);
                ch.push_back(parse_gate_ref(ref, defined));
                sc.push_back(eval(parse_poly(s, coeff), {}));
            }
            c.add_sum(std::move(ch), std::move(sc));
        } else if (op == "mul") {
            if (toks.size() < 2) err("mul needs children");
            std::vector<std::uint32_t> ch;
            for (size_t i = 1; i < toks.size(); ++i) ch.push_back(parse_gate_ref(toks[i], defined));
            c.add_prod(std::move(ch));
        } else {
            err("unknown op " + op);
        }
        ++defined;
    }
    if (!have_out) raise(errc::parse_error, "missing out line");
    return c;
}

namespace {

struct SToken {
    enum class T { lparen, rparen, atom } t;
    std::string text;
};

std::vector<SToken> stokenize(const std::string& s) {
    std::vector<SToken> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            out.push_back({SToken::T::lparen, "("});
            ++i;
        } else if (c == ')') {
            out.push_back({SToken::T::rparen, ")"});
            ++i;
        } else {
            size_t j = i;
            while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
                   s[j] != ')')
                ++j;
            out.push_back({SToken::T::atom, s.substr(i, j - i)});
            i = j;
        }
    }
    return out;
}

Circuit parse_sexpr_circuit(FieldSpec s, const std::string& text) {
    auto toks = stokenize(text);
    size_t pos = 0;
    Circuit c(s);
    std::map<std::string, std::uint32_t> vars;
    std::function<std::uint32_t()> parse_expr = [&]() -> std::uint32_t {
        if (pos >= toks.size()) raise(errc::parse_error, "unexpected end of s-expression");
        const SToken& tk = toks[pos];
        if (tk.t == SToken::T::atom) {
            ++pos;
            char c0 = tk.text[0];
            if (std::isdigit(static_cast<unsigned char>(c0)) || c0 == '-' || c0 == '{')
                return c.add_const(eval(parse_poly(s, tk.text), {}));
            auto it = vars.find(tk.text);
            if (it != vars.end()) return it->second;
            std::uint32_t g = c.add_input(tk.text);
            vars[tk.text] = g;
            return g;
        }
        if (tk.t != SToken::T::lparen) raise(errc::parse_error, "unexpected )");
        ++pos;
        if (pos >= toks.size() || toks[pos].t != SToken::T::atom)
            raise(errc::parse_error, "operator expected");
        std::string op = toks[pos].text;
        ++pos;
        std::vector<std::uint32_t> args;
        while (pos < toks.size() && toks[pos].t != SToken::T::rparen) args.push_back(parse_expr());
        if (pos >= toks.size()) raise(errc::parse_error, "missing )");
        ++pos;
        if (args.empty()) raise(errc::parse_error, "operator " + op + " needs arguments");
        if (op == "+") return c.add_sum(args);
        if (op == "*") return c.add_prod(args);
        if (op == "-") {
            if (args.size() == 1) return c.add_sum({args[0]}, {-FieldElement::one(s)});
            std::vector<FieldElement> sc(args.size(), -FieldElement::one(s));
            sc[0] = FieldElement::one(s);
            return c.add_sum(args, sc);
        }
        raise(errc::parse_error, "unknown operator " + op);
    };
    std::uint32_t o = parse_expr();
    if (pos != toks.size()) raise(errc::parse_error, "trailing tokens after s-expression");
    c.set_output(o);
    return c;
}

std::string scalar_text(const FieldElement& v) {
    std::string s = v.str();
    if (s.find(' ') != std::string::npos) return "(" + s + ")";
    return s;
}

} // namespace

std::string serialize(const Circuit& c) {
    std::ostringstream os;
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const Gate& g = c.gates()[i];
        os << 'g' << i << '=';
        switch (g.kind) {
        case Gate::Kind::input: os << "var " << g.name; break;
        case Gate::Kind::constant: os << "const " << scalar_text(g.value); break;
        case Gate::Kind::add:
            os << "add";
            for (size_t j = 0; j < g.children.size(); ++j)
                os << ' ' << scalar_text(g.scalars[j]) << "*g" << g.children[j];
            break;
        case Gate::Kind::mul:
            os << "mul";
            for (auto ch : g.children) os << " g" << ch;
            break;
        }
        os << '\n';
    }
    os << "out g" << c.output() << '\n';
    return os.str();
}

} // namespace fkit
