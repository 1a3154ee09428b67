#include "fkit/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fkit {

// ---------------------------------------------------------------------------
// variable universes

namespace {

std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
    std::vector<std::string> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    return u;
}

Mono mono_add(const Mono& a, const Mono& b) {
    Mono r = a;
    for (unsigned i = 0; i < a.n; ++i) {
        unsigned s = static_cast<unsigned>(a.e[i]) + b.e[i];
        if (s > 0xffff) raise(errc::internal, "exponent overflow");
        r.e[i] = static_cast<std::uint16_t>(s);
    }
    return r;
}

Mono mono_sub(const Mono& a, const Mono& b) {
    Mono r = a;
    for (unsigned i = 0; i < a.n; ++i) r.e[i] = static_cast<std::uint16_t>(a.e[i] - b.e[i]);
    return r;
}

void check_spec(const Poly& a, const Poly& b) {
    if (a.spec() != b.spec()) raise(errc::spec_mismatch, "polynomials over different fields");
}

} // namespace

Poly Poly::with_vars(const std::vector<std::string>& universe) const {
    if (universe == vars_) return *this;
    if (universe.size() > Mono::max_vars)
        raise(errc::internal, "variable universe exceeds " + std::to_string(Mono::max_vars));
    std::vector<int> map(vars_.size(), -1);
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::lower_bound(universe.begin(), universe.end(), vars_[i]);
        if (it == universe.end() || *it != vars_[i])
            raise(errc::internal, "with_vars: universe must contain " + vars_[i]);
        map[i] = static_cast<int>(it - universe.begin());
    }
    Poly r(spec_);
    r.vars_ = universe;
    r.terms_.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
        Mono nm;
        nm.n = static_cast<std::uint8_t>(universe.size());
        for (unsigned i = 0; i < m.n; ++i) nm.e[map[i]] = m.e[i];
        r.terms_.emplace_back(nm, c);
    }
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
}

// ---------------------------------------------------------------------------
// builder

void PolyBuilder::add(const Mono& m, const FieldElement& c) {
    if (c.is_zero()) return;
    auto it = acc_.find(m);
    if (it == acc_.end()) {
        acc_.emplace(m, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) acc_.erase(it);
    }
}

Poly Poly::from_terms(FieldSpec s, const std::vector<std::string>& vars,
                      std::vector<Term> terms) {
    std::vector<std::string> sorted = vars;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() != vars.size()) raise(errc::internal, "duplicate variable names");
    std::vector<int> map(vars.size());
    for (size_t i = 0; i < vars.size(); ++i)
        map[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), vars[i]) -
                                  sorted.begin());
    PolyBuilder b(s, sorted);
    for (auto& [m, c] : terms) {
        Mono nm;
        nm.n = static_cast<std::uint8_t>(sorted.size());
        for (unsigned i = 0; i < m.n; ++i) nm.e[map[i]] = m.e[i];
        b.add(nm, c);
    }
    return b.take();
}

Poly PolyBuilder::take() {
    Poly r(spec_);
    r.vars_ = std::move(vars_);
    r.terms_.assign(acc_.begin(), acc_.end());
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Poly::Term& a, const Poly::Term& b) { return a.first < b.first; });
    acc_.clear();
    return r;
}

// ---------------------------------------------------------------------------
// construction and accessors

Poly Poly::constant(FieldSpec s, const FieldElement& c) {
    Poly r(s);
    if (!c.is_zero()) r.terms_.emplace_back(Mono{}, c);
    return r;
}

Poly Poly::var(FieldSpec s, const std::string& name) {
    Poly r(s);
    r.vars_ = {name};
    Mono m;
    m.n = 1;
    m.e[0] = 1;
    r.terms_.emplace_back(m, FieldElement::one(s));
    return r;
}

int Poly::var_index(const std::string& name) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), name);
    if (it == vars_.end() || *it != name) return -1;
    return static_cast<int>(it - vars_.begin());
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first.total() == 0);
}

int Poly::total_degree() const {
    if (terms_.empty()) return deg_minus_infinity;
    return static_cast<int>(terms_.back().first.total());
}

int Poly::degree_in(const std::string& v) const {
    int idx = var_index(v);
    if (idx < 0) return terms_.empty() ? deg_minus_infinity : 0;
    if (terms_.empty()) return deg_minus_infinity;
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.e[idx]));
    return d;
}

int Poly::degree_in_set(const std::vector<std::string>& vs) const {
    if (terms_.empty()) return deg_minus_infinity;
    std::vector<int> idx;
    for (const auto& v : vs) {
        int i = var_index(v);
        if (i >= 0) idx.push_back(i);
    }
    int d = 0;
    for (const auto& [m, c] : terms_) {
        int s = 0;
        for (int i : idx) s += m.e[i];
        d = std::max(d, s);
    }
    return d;
}

FieldElement Poly::constant_term() const {
    if (!terms_.empty() && terms_.front().first.total() == 0) return terms_.front().second;
    return FieldElement::zero(spec_);
}

FieldElement Poly::leading_coeff() const {
    if (terms_.empty()) return FieldElement::zero(spec_);
    return terms_.back().second;
}

FieldElement Poly::coeff_of_mono(const std::vector<std::string>& names,
                                 const std::vector<unsigned>& exps) const {
    Mono m;
    m.n = static_cast<std::uint8_t>(vars_.size());
    for (size_t i = 0; i < names.size(); ++i) {
        int idx = var_index(names[i]);
        if (idx < 0) {
            if (exps[i] != 0) return FieldElement::zero(spec_);
            continue;
        }
        m.e[idx] = static_cast<std::uint16_t>(exps[i]);
    }
    for (const auto& [tm, c] : terms_)
        if (tm == m) return c;
    return FieldElement::zero(spec_);
}

Poly Poly::coeff_of(const std::string& v, unsigned j) const {
    int idx = var_index(v);
    if (idx < 0) {
        if (j == 0) return *this;
        return Poly(spec_);
    }
    Poly r(spec_);
    r.vars_ = vars_;
    for (const auto& [m, c] : terms_) {
        if (m.e[idx] != j) continue;
        Mono nm = m;
        nm.e[idx] = 0;
        r.terms_.emplace_back(nm, c);
    }
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
}

// ---------------------------------------------------------------------------
// ring operations

Poly operator+(const Poly& a, const Poly& b) {
    check_spec(a, b);
    if (a.vars() == b.vars()) {
        PolyBuilder bl(a.spec(), a.vars());
        for (const auto& [m, c] : a.terms()) bl.add(m, c);
        for (const auto& [m, c] : b.terms()) bl.add(m, c);
        return bl.take();
    }
    auto u = merge_vars(a.vars(), b.vars());
    Poly A = a.with_vars(u), B = b.with_vars(u);
    PolyBuilder bl(a.spec(), u);
    for (const auto& [m, c] : A.terms()) bl.add(m, c);
    for (const auto& [m, c] : B.terms()) bl.add(m, c);
    return bl.take();
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    check_spec(a, b);
    if (a.is_zero() || b.is_zero()) return Poly(a.spec());
    if (a.vars() == b.vars()) {
        PolyBuilder bl(a.spec(), a.vars());
        for (const auto& [ma, ca] : a.terms())
            for (const auto& [mb, cb] : b.terms()) bl.add(mono_add(ma, mb), ca * cb);
        return bl.take();
    }
    auto u = merge_vars(a.vars(), b.vars());
    Poly A = a.with_vars(u), B = b.with_vars(u);
    PolyBuilder bl(a.spec(), u);
    for (const auto& [ma, ca] : A.terms())
        for (const auto& [mb, cb] : B.terms()) bl.add(mono_add(ma, mb), ca * cb);
    return bl.take();
}

Poly Poly::scaled(const FieldElement& c) const {
    if (c.is_zero()) return Poly(spec_);
    Poly r = *this;
    for (auto& [m, x] : r.terms_) x = x * c;
    return r;
}

Poly Poly::pow(unsigned e) const {
    Poly r = Poly::constant(spec_, FieldElement::one(spec_));
    Poly base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

bool Poly::operator==(const Poly& o) const {
    if (spec_ != o.spec_) return false;
    auto u = merge_vars(vars_, o.vars_);
    return with_vars(u).terms() == o.with_vars(u).terms();
}

Poly Poly::normalized() const {
    if (terms_.empty()) return *this;
    return scaled(leading_coeff().inv());
}

// ---------------------------------------------------------------------------
// division

Poly exact_div(const Poly& a, const Poly& b) {
    check_spec(a, b);
    if (b.is_zero()) raise(errc::division_by_zero, "exact_div by zero polynomial");
    if (a.is_zero()) return Poly(a.spec());
    auto u = merge_vars(a.vars(), b.vars());
    Poly A = a.with_vars(u), B = b.with_vars(u);
    std::map<Mono, FieldElement> rem(A.terms().begin(), A.terms().end());
    const Mono& lbm = B.terms().back().first;
    FieldElement lbc_inv = B.terms().back().second.inv();
    PolyBuilder q(a.spec(), u);
    while (!rem.empty()) {
        auto it = std::prev(rem.end());
        const Mono lm = it->first;
        const FieldElement lc = it->second;
        if (!lbm.divides(lm)) raise(errc::not_divisible, "exact_div");
        Mono qm = mono_sub(lm, lbm);
        FieldElement qc = lc * lbc_inv;
        q.add(qm, qc);
        for (const auto& [m, c] : B.terms()) {
            Mono t = mono_add(qm, m);
            FieldElement delta = qc * c;
            auto rit = rem.find(t);
            if (rit == rem.end()) {
                rem.emplace(t, -delta);
            } else {
                rit->second = rit->second - delta;
                if (rit->second.is_zero()) rem.erase(rit);
            }
        }
    }
    return q.take();
}

bool divides(const Poly& b, const Poly& a) {
    if (b.is_zero()) return a.is_zero();
    try {
        exact_div(a, b);
        return true;
    } catch (const Error& e) {
        if (e.code() == errc::not_divisible) return false;
        throw;
    }
}

PseudoDiv pseudo_div(const Poly& f, const Poly& g, const std::string& v) {
    check_spec(f, g);
    if (g.is_zero()) raise(errc::division_by_zero, "pseudo_div by zero");
    int dg = g.degree_in(v);
    if (dg <= 0) raise(errc::degree_zero_input, "pseudo_div: divisor constant in " + v);
    Poly lc = g.coeff_of(v, static_cast<unsigned>(dg));
    Poly q(f.spec());
    Poly r = f;
    unsigned scale = 0;
    Poly vv = Poly::var(f.spec(), v);
    while (!r.is_zero() && r.degree_in(v) >= dg) {
        int dr = r.degree_in(v);
        Poly lr = r.coeff_of(v, static_cast<unsigned>(dr));
        Poly shift = vv.pow(static_cast<unsigned>(dr - dg));
        q = q * lc + lr * shift;
        r = r * lc - lr * shift * g;
        ++scale;
        if (!r.is_zero() && r.degree_in(v) >= dr)
            raise(errc::internal, "pseudo_div failed to reduce degree");
    }
    return {std::move(q), std::move(r), scale};
}

// ---------------------------------------------------------------------------
// gcd

namespace {

std::vector<std::string> active_vars(const Poly& p) {
    std::vector<std::string> r;
    for (const auto& v : p.vars())
        if (p.degree_in(v) > 0) r.push_back(v);
    return r;
}

} // namespace

Poly content_in(const Poly& f, const std::string& v) {
    int d = f.degree_in(v);
    if (d <= 0) return f;
    Poly c(f.spec());
    for (int j = 0; j <= d; ++j) {
        Poly cj = f.coeff_of(v, static_cast<unsigned>(j));
        if (cj.is_zero()) continue;
        c = gcd(c, cj);
        if (c.is_constant() && !c.is_zero()) break;
    }
    return c;
}

Poly primitive_part_in(const Poly& f, const std::string& v) {
    if (f.is_zero()) return f;
    return exact_div(f, content_in(f, v));
}

Poly gcd(const Poly& a, const Poly& b) {
    check_spec(a, b);
    if (a.is_zero() && b.is_zero()) return Poly(a.spec());
    if (a.is_zero()) return b.normalized();
    if (b.is_zero()) return a.normalized();
    if (a.is_constant() || b.is_constant())
        return Poly::constant(a.spec(), FieldElement::one(a.spec()));
    auto va = active_vars(a);
    std::string v = va.empty() ? active_vars(b).front() : va.front();
    if (a.degree_in(v) == 0) return gcd(a, content_in(b, v));
    if (b.degree_in(v) == 0) return gcd(content_in(a, v), b);
    Poly ca = content_in(a, v), cb = content_in(b, v);
    Poly pa = exact_div(a, ca), pb = exact_div(b, cb);
    Poly cg = gcd(ca, cb);
    while (!pb.is_zero() && pb.degree_in(v) > 0) {
        Poly r = pseudo_div(pa, pb, v).rem;
        pa = std::move(pb);
        pb = r.is_zero() ? std::move(r) : primitive_part_in(r, v);
    }
    // a nonzero v-free tail means the primitive parts are coprime
    if (!pb.is_zero()) pa = Poly::constant(a.spec(), 1);
    return (cg * pa).normalized();
}

Poly gcd_univariate(const Poly& a, const Poly& b, const std::string& v) {
    if (a.is_zero() && b.is_zero()) raise(errc::both_zero, "gcd of two zero polynomials");
    for (const Poly* p : {&a, &b})
        for (const auto& w : active_vars(*p))
            if (w != v) raise(errc::internal, "gcd_univariate: input involves " + w);
    return gcd(a, b);
}

// ---------------------------------------------------------------------------
// derivatives

Poly derivative(const Poly& f, const std::string& v) {
    int idx = f.var_index(v);
    if (idx < 0) return Poly(f.spec());
    PolyBuilder b(f.spec(), f.vars());
    for (const auto& [m, c] : f.terms()) {
        if (m.e[idx] == 0) continue;
        Mono nm = m;
        nm.e[idx] -= 1;
        b.add(nm, c * FieldElement::from_int(f.spec(), m.e[idx]));
    }
    return b.take();
}

Poly hasse_derivative(const Poly& f, const std::string& v, unsigned i) {
    if (i == 0) return f;
    int idx = f.var_index(v);
    if (idx < 0) return Poly(f.spec());
    PolyBuilder b(f.spec(), f.vars());
    for (const auto& [m, c] : f.terms()) {
        if (m.e[idx] < i) continue;
        mpz_class bin;
        mpz_bin_uiui(bin.get_mpz_t(), m.e[idx], i);
        Mono nm = m;
        nm.e[idx] = static_cast<std::uint16_t>(m.e[idx] - i);
        b.add(nm, c * FieldElement::from_mpz(f.spec(), bin));
    }
    return b.take();
}

// ---------------------------------------------------------------------------
// squarefree decomposition

namespace {

// perfect-field p-th root; requires all exponents divisible by p
Poly pth_root(const Poly& f) {
    FieldSpec s = f.spec();
    std::uint64_t p = s.characteristic();
    PolyBuilder b(s, f.vars());
    for (const auto& [m, c] : f.terms()) {
        Mono nm = m;
        for (unsigned i = 0; i < m.n; ++i) {
            if (m.e[i] % p != 0) raise(errc::internal, "pth_root: exponent not divisible by p");
            nm.e[i] = static_cast<std::uint16_t>(m.e[i] / p);
        }
        FieldElement rc = c;
        if (s.kind() == FieldKind::extension && s.ext_degree() > 1) {
            // Frobenius inverse: c^(p^(k-1))
            mpz_class e;
            mpz_ui_pow_ui(e.get_mpz_t(), p, s.ext_degree() - 1);
            rc = c.pow(e);
        }
        b.add(nm, rc);
    }
    return b.take();
}

void merge_decomp(std::map<unsigned, Poly>& into, const std::map<unsigned, Poly>& from,
                  unsigned mult_scale) {
    for (const auto& [m, p] : from) {
        unsigned key = m * mult_scale;
        auto it = into.find(key);
        if (it == into.end())
            into.emplace(key, p);
        else
            it->second = it->second * p;
    }
}

std::map<unsigned, Poly> decomp_rec(const Poly& f) {
    std::map<unsigned, Poly> out;
    if (f.is_constant()) return out;
    FieldSpec s = f.spec();
    std::uint64_t p = s.characteristic();
    std::string v;
    for (const auto& w : active_vars(f)) {
        if (!derivative(f, w).is_zero()) {
            v = w;
            break;
        }
    }
    if (v.empty()) {
        // char p and every partial vanishes: f is a perfect p-th power
        if (p == 0) raise(errc::internal, "vanishing differential in characteristic 0");
        auto sub = decomp_rec(pth_root(f));
        merge_decomp(out, sub, static_cast<unsigned>(p));
        return out;
    }
    Poly fd = derivative(f, v);
    Poly g = gcd(f, fd);
    Poly w = exact_div(f, g);
    unsigned i = 1;
    while (!w.is_constant()) {
        Poly y = gcd(w, g);
        Poly z = exact_div(w, y);
        if (!z.is_constant()) {
            auto it = out.find(i);
            if (it == out.end())
                out.emplace(i, z.normalized());
            else
                it->second = it->second * z.normalized();
        }
        w = std::move(y);
        g = exact_div(g, w);
        ++i;
    }
    if (!g.is_constant()) merge_decomp(out, decomp_rec(g), 1);
    return out;
}

} // namespace

Poly SquarefreeDecomposition::squarefree_part() const {
    if (components.empty()) return Poly();
    Poly r = Poly::constant(components.front().spec(), 1);
    for (const auto& c : components) r = r * c;
    return r;
}

SquarefreeDecomposition squarefree_decomposition(const Poly& f) {
    if (f.is_zero()) raise(errc::zero_polynomial, "squarefree decomposition of 0");
    SquarefreeDecomposition res;
    auto comps = decomp_rec(f);
    unsigned maxm = 0;
    for (const auto& [m, q] : comps) maxm = std::max(maxm, m);
    res.components.assign(maxm, Poly::constant(f.spec(), 1));
    Poly prod = Poly::constant(f.spec(), 1);
    for (const auto& [m, q] : comps) {
        Poly qn = q.normalized();
        res.components[m - 1] = res.components[m - 1] * qn;
        prod = prod * qn.pow(m);
    }
    Poly u = exact_div(f, prod);
    if (!u.is_constant()) raise(errc::internal, "squarefree decomposition reassembly not constant");
    res.unit = u.constant_term();
    return res;
}

// ---------------------------------------------------------------------------
// resultant / discriminant (Bareiss on the Sylvester matrix)

namespace {

Poly bareiss_det(std::vector<std::vector<Poly>>& M, FieldSpec s) {
    size_t n = M.size();
    Poly prev = Poly::constant(s, 1);
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (M[k][k].is_zero()) {
            size_t swap = k + 1;
            while (swap < n && M[swap][k].is_zero()) ++swap;
            if (swap == n) return Poly(s);
            std::swap(M[k], M[swap]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                Poly num = M[i][j] * M[k][k] - M[i][k] * M[k][j];
                M[i][j] = num.is_zero() ? num : exact_div(num, prev);
            }
            M[i][k] = Poly(s);
        }
        prev = M[k][k];
    }
    Poly det = M[n - 1][n - 1];
    return sign < 0 ? -det : det;
}

} // namespace

Poly resultant(const Poly& P, const Poly& Q, const std::string& v) {
    check_spec(P, Q);
    FieldSpec s = P.spec();
    if (P.is_zero() || Q.is_zero()) return Poly(s);
    int a = P.degree_in(v), b = Q.degree_in(v);
    if (a == 0 && b == 0) raise(errc::degree_zero_input, "resultant of two constants in " + v);
    if (a == 0) return P.pow(static_cast<unsigned>(b));
    if (b == 0) return Q.pow(static_cast<unsigned>(a));
    size_t n = static_cast<size_t>(a + b);
    std::vector<Poly> pc(static_cast<size_t>(a) + 1), qc(static_cast<size_t>(b) + 1);
    for (int j = 0; j <= a; ++j) pc[j] = P.coeff_of(v, static_cast<unsigned>(j));
    for (int j = 0; j <= b; ++j) qc[j] = Q.coeff_of(v, static_cast<unsigned>(j));
    // rows in ascending coefficient order: deg(P) shifted copies of Q first,
    // then deg(Q) shifted copies of P (convention pinned by res_y(y-a, y-b) = a-b)
    std::vector<std::vector<Poly>> M(n, std::vector<Poly>(n, Poly(s)));
    for (int r = 0; r < a; ++r)
        for (int j = 0; j <= b; ++j) M[r][r + j] = qc[j];
    for (int r = 0; r < b; ++r)
        for (int j = 0; j <= a; ++j) M[a + r][r + j] = pc[j];
    return bareiss_det(M, s);
}

Poly discriminant(const Poly& P, const std::string& v) {
    if (P.is_zero()) raise(errc::zero_polynomial, "discriminant of 0");
    if (P.degree_in(v) < 1) raise(errc::degree_zero_input, "discriminant needs degree >= 1 in " + v);
    Poly d = derivative(P, v);
    if (d.is_zero()) return Poly(P.spec()); // res(P, 0) = 0: P has a repeated factor
    return resultant(P, d, v);
}

// ---------------------------------------------------------------------------
// gradings, truncation, diagonal, substitution

Poly hom_component(const Poly& f, const std::vector<std::string>& vs, unsigned i) {
    std::vector<int> idx;
    for (const auto& v : vs) {
        int j = f.var_index(v);
        if (j >= 0) idx.push_back(j);
    }
    PolyBuilder b(f.spec(), f.vars());
    for (const auto& [m, c] : f.terms()) {
        unsigned s = 0;
        for (int j : idx) s += m.e[j];
        if (s == i) b.add(m, c);
    }
    return b.take();
}

Poly hom_upto(const Poly& f, const std::vector<std::string>& vs, unsigned d) {
    std::vector<int> idx;
    for (const auto& v : vs) {
        int j = f.var_index(v);
        if (j >= 0) idx.push_back(j);
    }
    PolyBuilder b(f.spec(), f.vars());
    for (const auto& [m, c] : f.terms()) {
        unsigned s = 0;
        for (int j : idx) s += m.e[j];
        if (s <= d) b.add(m, c);
    }
    return b.take();
}

Poly truncate_in_var(const Poly& f, const std::string& v, unsigned d) {
    return hom_upto(f, {v}, d);
}

Poly diagonal(const Poly& F, const std::string& tvar, const std::string& yvar) {
    int ti = F.var_index(tvar);
    int yi = F.var_index(yvar);
    PolyBuilder b(F.spec(), F.vars());
    for (const auto& [m, c] : F.terms()) {
        unsigned te = ti >= 0 ? m.e[ti] : 0;
        unsigned ye = yi >= 0 ? m.e[yi] : 0;
        if (te != ye) continue;
        Mono nm = m;
        if (yi >= 0) nm.e[yi] = 0;
        b.add(nm, c);
    }
    return b.take();
}

Poly substitute(const Poly& f, const std::map<std::string, Poly>& images) {
    FieldSpec s = f.spec();
    for (const auto& [v, img] : images)
        if (img.spec() != s) raise(errc::spec_mismatch, "substitution image for " + v);
    std::vector<int> sub_idx(f.vars().size(), -1);
    std::vector<const Poly*> sub_img(f.vars().size(), nullptr);
    bool any = false;
    for (size_t i = 0; i < f.vars().size(); ++i) {
        auto it = images.find(f.vars()[i]);
        if (it != images.end()) {
            sub_img[i] = &it->second;
            any = true;
        }
    }
    if (!any) return f;
    // power caches per substituted variable
    std::vector<std::vector<Poly>> pows(f.vars().size());
    Poly acc(s);
    for (const auto& [m, c] : f.terms()) {
        Poly term = Poly::constant(s, c);
        for (unsigned i = 0; i < m.n; ++i) {
            if (m.e[i] == 0) continue;
            if (!sub_img[i]) {
                term = term * Poly::var(s, f.vars()[i]).pow(m.e[i]);
            } else {
                auto& cache = pows[i];
                if (cache.empty()) cache.push_back(Poly::constant(s, 1));
                while (cache.size() <= m.e[i]) cache.push_back(cache.back() * (*sub_img[i]));
                term = term * cache[m.e[i]];
            }
        }
        acc = acc + term;
    }
    return acc;
}

FieldElement eval(const Poly& f, const std::map<std::string, FieldElement>& point) {
    FieldSpec s = f.spec();
    std::vector<const FieldElement*> vals(f.vars().size(), nullptr);
    for (size_t i = 0; i < f.vars().size(); ++i) {
        if (f.degree_in(f.vars()[i]) == 0) continue;
        auto it = point.find(f.vars()[i]);
        if (it == point.end()) raise(errc::missing_assignment, f.vars()[i]);
        if (it->second.spec() != s) raise(errc::spec_mismatch, "evaluation point for " + f.vars()[i]);
        vals[i] = &it->second;
    }
    FieldElement acc = FieldElement::zero(s);
    for (const auto& [m, c] : f.terms()) {
        FieldElement t = c;
        for (unsigned i = 0; i < m.n; ++i) {
            if (m.e[i] == 0) continue;
            t = t * vals[i]->pow(static_cast<long>(m.e[i]));
        }
        acc = acc + t;
    }
    return acc;
}

std::vector<FieldElement> to_dense(const Poly& f, const std::string& v) {
    for (const auto& w : active_vars(f))
        if (w != v) raise(errc::internal, "to_dense: input involves " + w);
    int d = f.degree_in(v);
    std::vector<FieldElement> c(static_cast<size_t>(std::max(d, 0)) + 1,
                                FieldElement::zero(f.spec()));
    if (f.is_zero()) return {};
    int idx = f.var_index(v);
    for (const auto& [m, x] : f.terms()) c[idx >= 0 ? m.e[idx] : 0] = x;
    return c;
}

Poly from_dense(FieldSpec s, const std::string& v, const std::vector<FieldElement>& c) {
    Poly x = Poly::var(s, v);
    Poly r(s);
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i].is_zero()) continue;
        r = r + x.pow(static_cast<unsigned>(i)).scaled(c[i]);
    }
    return r;
}

// ---------------------------------------------------------------------------
// printing

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        if (!first) os << " + ";
        first = false;
        std::string cs = c.str();
        bool needs_paren = cs.find(' ') != std::string::npos;
        if (m.total() == 0) {
            os << (needs_paren ? "(" + cs + ")" : cs);
            continue;
        }
        if (needs_paren)
            os << '(' << cs << ")*";
        else if (!(c.is_one()))
            os << cs << '*';
        bool fv = true;
        for (unsigned i = 0; i < m.n; ++i) {
            if (m.e[i] == 0) continue;
            if (!fv) os << '*';
            fv = false;
            os << vars_[i];
            if (m.e[i] > 1) os << '^' << m.e[i];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Lexer {
    std::string s;
    size_t pos = 0;
    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    char get() {
        skip();
        return pos < s.size() ? s[pos++] : '\0';
    }
    std::string ident() {
        skip();
        size_t st = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(st, pos - st);
    }
    std::string digits() {
        skip();
        size_t st = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (st == pos) raise(errc::parse_error, "expected number at position " + std::to_string(pos));
        return s.substr(st, pos - st);
    }
};

class PolyParser {
public:
    PolyParser(FieldSpec s, const std::string& text) : spec_(s) { lex_.s = text; }

    Poly parse() {
        Poly p = expr();
        if (lex_.peek() != '\0')
            raise(errc::parse_error, "trailing input at position " + std::to_string(lex_.pos));
        return p;
    }

private:
    Poly expr() {
        Poly acc = term();
        while (true) {
            char c = lex_.peek();
            if (c == '+') {
                lex_.get();
                acc = acc + term();
            } else if (c == '-') {
                lex_.get();
                acc = acc - term();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly term() {
        bool neg = false;
        while (lex_.peek() == '-' || lex_.peek() == '+') {
            if (lex_.get() == '-') neg = !neg;
        }
        Poly acc = factor();
        while (lex_.peek() == '*') {
            lex_.get();
            acc = acc * factor();
        }
        return neg ? -acc : acc;
    }

    unsigned exponent() {
        if (lex_.peek() != '^') return 1;
        lex_.get();
        return static_cast<unsigned>(std::stoul(lex_.digits()));
    }

    Poly factor() {
        char c = lex_.peek();
        if (c == '(') {
            lex_.get();
            Poly p = expr();
            if (lex_.get() != ')') raise(errc::parse_error, "expected )");
            return p.pow(exponent());
        }
        if (c == '{') {
            size_t st = lex_.pos;
            while (lex_.pos < lex_.s.size() && lex_.s[lex_.pos] != '}') ++lex_.pos;
            if (lex_.pos == lex_.s.size()) raise(errc::parse_error, "unterminated {");
            ++lex_.pos;
            FieldElement e = parse_element(spec_, lex_.s.substr(st, lex_.pos - st));
            return Poly::constant(spec_, e).pow(exponent());
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = lex_.digits();
            if (lex_.peek() == '/') {
                lex_.get();
                std::string den = lex_.digits();
                FieldElement e = parse_element(spec_, num + "/" + den);
                return Poly::constant(spec_, e).pow(exponent());
            }
            FieldElement e = parse_element(spec_, num);
            return Poly::constant(spec_, e).pow(exponent());
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = lex_.ident();
            if (name.empty()) raise(errc::parse_error, "expected identifier");
            unsigned e = exponent();
            if (name == "eps" && spec_.kind() == FieldKind::eps_jet) {
                FieldElement epsv = FieldElement::jet(
                    spec_, 1, {FieldElement::one(spec_.jet_base())});
                return Poly::constant(spec_, epsv).pow(e);
            }
            return Poly::var(spec_, name).pow(e);
        }
        raise(errc::parse_error, std::string("unexpected character '") + c + "'");
    }

    FieldSpec spec_;
    Lexer lex_;
};

} // namespace

Poly parse_poly(FieldSpec s, const std::string& text) { return PolyParser(s, text).parse(); }

// ---------------------------------------------------------------------------
// Series

Series::Series(Poly body, unsigned order) : order_(order) {
    body_ = hom_upto(body, body.vars(), order);
}

Series operator+(const Series& a, const Series& b) {
    unsigned o = std::min(a.order(), b.order());
    return Series(a.body() + b.body(), o);
}
Series operator-(const Series& a, const Series& b) {
    unsigned o = std::min(a.order(), b.order());
    return Series(a.body() - b.body(), o);
}
Series operator*(const Series& a, const Series& b) {
    unsigned o = std::min(a.order(), b.order());
    return Series(a.body() * b.body(), o);
}

Series Series::pow(unsigned e) const {
    Series r(Poly::constant(spec(), 1), order_);
    Series base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Series Series::truncated(unsigned order) const {
    return Series(body_, std::min(order, order_));
}

Series Series::inv() const {
    FieldElement c = body_.constant_term();
    if (c.is_zero()) raise(errc::non_unit_constant_term, "series inverse");
    Series x(Poly::constant(spec(), c.inv()), order_);
    Series two(Poly::constant(spec(), 2), order_);
    unsigned iters = 1;
    while ((1u << iters) <= order_) ++iters;
    for (unsigned i = 0; i <= iters; ++i) x = x * (two - *this * x);
    return x;
}

} // namespace fkit
