#include "fkit/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace fkit {

struct FieldRep {
    FieldKind kind;
    std::uint64_t p = 0;                  // prime / extension
    unsigned k = 1;                       // extension degree
    std::vector<std::uint64_t> modulus;   // c0..ck, monic
    const FieldRep* base = nullptr;       // jet base
    unsigned order = 0;                   // jet truncation order
    std::string descr;                    // canonical descriptor
};

// ---------------------------------------------------------------------------
// interning

namespace {

std::mutex g_reg_mutex;
std::map<std::string, std::unique_ptr<FieldRep>>& registry() {
    static std::map<std::string, std::unique_ptr<FieldRep>> reg;
    return reg;
}

const FieldRep* intern(FieldRep rep) {
    std::lock_guard<std::mutex> lock(g_reg_mutex);
    auto& reg = registry();
    auto it = reg.find(rep.descr);
    if (it != reg.end()) return it->second.get();
    auto up = std::make_unique<FieldRep>(std::move(rep));
    const FieldRep* ptr = up.get();
    reg.emplace(ptr->descr, std::move(up));
    return ptr;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return (a * b) % p; // p < 2^31 so the product fits in 64 bits
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t p) {
    if (a % p == 0) raise(errc::division_by_zero, "inverse of 0 mod p");
    return powmod_u64(a % p, p - 2, p);
}

// dense univariate arithmetic mod p (used for modulus search/verification
// before any extension-field element exists)
using Vu = std::vector<std::uint64_t>;

void vtrim(Vu& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Vu vmulmod(const Vu& a, const Vu& b, std::uint64_t p) {
    if (a.empty() || b.empty()) return {};
    Vu r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    vtrim(r);
    return r;
}

Vu vrem(Vu a, const Vu& m, std::uint64_t p) {
    // m monic
    vtrim(a);
    while (a.size() >= m.size()) {
        std::uint64_t c = a.back();
        size_t shift = a.size() - m.size();
        if (c) {
            for (size_t i = 0; i < m.size(); ++i) {
                std::uint64_t sub = mulmod(c, m[i], p);
                a[i + shift] = (a[i + shift] + p - sub) % p;
            }
        }
        a.pop_back();
        vtrim(a);
    }
    return a;
}

Vu vpowmod(Vu base, mpz_class e, const Vu& m, std::uint64_t p) {
    Vu r{1};
    base = vrem(std::move(base), m, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = vrem(vmulmod(r, base, p), m, p);
        base = vrem(vmulmod(base, base, p), m, p);
        e >>= 1;
    }
    return r;
}

Vu vgcd(Vu a, Vu b, std::uint64_t p) {
    vtrim(a);
    vtrim(b);
    while (!b.empty()) {
        // make b monic for the remainder step
        std::uint64_t lc = b.back();
        if (lc != 1) {
            std::uint64_t il = invmod_u64(lc, p);
            for (auto& c : b) c = mulmod(c, il, p);
        }
        Vu r = vrem(std::move(a), b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        std::uint64_t il = invmod_u64(a.back(), p);
        for (auto& c : a) c = mulmod(c, il, p);
    }
    return a;
}

// Rabin irreducibility: f monic degree k over F_p is irreducible iff
// x^(p^k) = x mod f and gcd(x^(p^(k/q)) - x, f) = 1 for every prime q | k.
bool is_irreducible_mod_p(const Vu& f, std::uint64_t p) {
    size_t k = f.size() - 1;
    if (k == 0) return false;
    if (k == 1) return true;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(k));
    Vu x{0, 1};
    Vu xq = vpowmod(x, pk, f, p);
    Vu diff = xq;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = (diff[1] + p - 1) % p;
    vtrim(diff);
    if (!diff.empty()) return false;
    std::vector<unsigned> prime_divs;
    {
        size_t n = k;
        for (unsigned q = 2; static_cast<size_t>(q) * q <= n; ++q)
            if (n % q == 0) {
                prime_divs.push_back(q);
                while (n % q == 0) n /= q;
            }
        if (n > 1) prime_divs.push_back(static_cast<unsigned>(n));
    }
    for (unsigned q : prime_divs) {
        mpz_class e;
        mpz_ui_pow_ui(e.get_mpz_t(), p, static_cast<unsigned long>(k / q));
        Vu xe = vpowmod(x, e, f, p);
        Vu d = xe;
        if (d.size() < 2) d.resize(2, 0);
        d[1] = (d[1] + p - 1) % p;
        vtrim(d);
        Vu g = vgcd(d, f, p);
        if (g.size() != 1) return false;
    }
    return true;
}

std::string modulus_str(const Vu& m) {
    std::ostringstream os;
    for (size_t i = 0; i < m.size(); ++i) {
        if (i) os << ',';
        os << m[i];
    }
    return os.str();
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// spec construction

FieldSpec rationals() {
    FieldRep r;
    r.kind = FieldKind::rationals;
    r.descr = "Q";
    return FieldSpec(intern(std::move(r)));
}

FieldSpec prime_field(std::uint64_t p) {
    if (p >= (1ull << 31)) raise(errc::unsupported_descriptor, "prime too large (desk scale p < 2^31)");
    if (!is_prime_u64(p)) raise(errc::not_prime, "p = " + std::to_string(p));
    FieldRep r;
    r.kind = FieldKind::prime;
    r.p = p;
    r.k = 1;
    r.descr = "Fp:" + std::to_string(p);
    return FieldSpec(intern(std::move(r)));
}

FieldSpec extension_field(std::uint64_t p, const std::vector<std::uint64_t>& modulus) {
    if (!is_prime_u64(p)) raise(errc::not_prime, "p = " + std::to_string(p));
    Vu m = modulus;
    for (auto& c : m) c %= p;
    if (m.size() < 2 || m.back() != 1)
        raise(errc::unsupported_descriptor, "modulus must be monic of degree >= 1");
    if (!is_irreducible_mod_p(m, p))
        raise(errc::reducible_modulus, "modulus reducible over F_" + std::to_string(p));
    FieldRep r;
    r.kind = FieldKind::extension;
    r.p = p;
    r.k = static_cast<unsigned>(m.size() - 1);
    r.modulus = m;
    r.descr = "Fq:" + std::to_string(p) + "^" + std::to_string(r.k) + ":" + modulus_str(m);
    return FieldSpec(intern(std::move(r)));
}

FieldSpec extension_field(std::uint64_t p, unsigned k, Rng* rng) {
    if (!is_prime_u64(p)) raise(errc::not_prime, "p = " + std::to_string(p));
    if (k == 0) raise(errc::unsupported_descriptor, "extension degree must be >= 1");
    Rng local(12345);
    Rng* r = rng ? rng : &local;
    // random monic polynomials of degree k are irreducible with prob ~1/k
    for (int trial = 0; trial < 2000; ++trial) {
        Vu m(k + 1, 0);
        m[k] = 1;
        for (unsigned i = 0; i < k; ++i) m[i] = r->below(p);
        if (is_irreducible_mod_p(m, p)) return extension_field(p, m);
    }
    raise(errc::internal, "random irreducible modulus search failed");
}

FieldSpec jet_field(FieldSpec base, unsigned order) {
    if (!base.valid()) raise(errc::unsupported_descriptor, "jet base missing");
    if (order < 1) raise(errc::unsupported_descriptor, "jet truncation order must be >= 1");
    if (base.kind() == FieldKind::eps_jet) raise(errc::unsupported_descriptor, "nested jets unsupported");
    FieldRep r;
    r.kind = FieldKind::eps_jet;
    r.base = base.rep();
    r.order = order;
    r.descr = "eps:" + base.descriptor() + ":" + std::to_string(order);
    return FieldSpec(intern(std::move(r)));
}

FieldSpec make_field(const std::string& d, Rng* rng) {
    if (d == "Q") return rationals();
    if (d.rfind("Fp:", 0) == 0) {
        try {
            return prime_field(std::stoull(d.substr(3)));
        } catch (const Error&) {
            throw;
        } catch (...) {
            raise(errc::unsupported_descriptor, d);
        }
    }
    if (d.rfind("Fq:", 0) == 0) {
        std::string rest = d.substr(3);
        auto caret = rest.find('^');
        if (caret == std::string::npos) raise(errc::unsupported_descriptor, d);
        std::uint64_t p;
        unsigned k;
        try {
            p = std::stoull(rest.substr(0, caret));
        } catch (...) {
            raise(errc::unsupported_descriptor, d);
        }
        auto colon = rest.find(':', caret);
        try {
            k = static_cast<unsigned>(std::stoul(rest.substr(caret + 1, colon == std::string::npos
                                                                            ? std::string::npos
                                                                            : colon - caret - 1)));
        } catch (...) {
            raise(errc::unsupported_descriptor, d);
        }
        if (colon == std::string::npos) return extension_field(p, k, rng);
        Vu m;
        std::istringstream is(rest.substr(colon + 1));
        std::string tok;
        while (std::getline(is, tok, ','))
            try {
                m.push_back(std::stoull(tok));
            } catch (...) {
                raise(errc::unsupported_descriptor, d);
            }
        if (m.size() != k + 1) raise(errc::unsupported_descriptor, "modulus length != k+1 in " + d);
        return extension_field(p, m);
    }
    if (d.rfind("eps:", 0) == 0) {
        auto last = d.rfind(':');
        if (last == 3) raise(errc::unsupported_descriptor, d);
        unsigned ord;
        try {
            ord = static_cast<unsigned>(std::stoul(d.substr(last + 1)));
        } catch (...) {
            raise(errc::unsupported_descriptor, d);
        }
        return jet_field(make_field(d.substr(4, last - 4), rng), ord);
    }
    raise(errc::unsupported_descriptor, d);
}

// ---------------------------------------------------------------------------
// FieldSpec accessors

FieldKind FieldSpec::kind() const { return rep_->kind; }

std::uint64_t FieldSpec::characteristic() const {
    switch (rep_->kind) {
    case FieldKind::rationals: return 0;
    case FieldKind::prime:
    case FieldKind::extension: return rep_->p;
    case FieldKind::eps_jet: return FieldSpec(rep_->base).characteristic();
    }
    return 0;
}

std::uint64_t FieldSpec::prime() const { return rep_->p; }
unsigned FieldSpec::ext_degree() const { return rep_->k; }
const std::vector<std::uint64_t>& FieldSpec::modulus() const { return rep_->modulus; }
FieldSpec FieldSpec::jet_base() const { return FieldSpec(rep_->base); }
unsigned FieldSpec::jet_order() const { return rep_->order; }
std::string FieldSpec::descriptor() const { return rep_->descr; }

std::optional<std::uint64_t> FieldSpec::size() const {
    if (rep_->kind == FieldKind::prime) return rep_->p;
    if (rep_->kind == FieldKind::extension) {
        mpz_class s;
        mpz_ui_pow_ui(s.get_mpz_t(), rep_->p, rep_->k);
        if (!s.fits_ulong_p()) return std::nullopt;
        return static_cast<std::uint64_t>(s.get_ui());
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// elements

namespace {
void check_same(const FieldRep* a, const FieldRep* b) {
    if (a != b) raise(errc::spec_mismatch, "elements from different field specs");
}
const FieldRep* need(const FieldRep* r) {
    if (!r) raise(errc::internal, "element without spec");
    return r;
}
} // namespace

struct FieldOps {
    static FieldElement make_rat(const FieldRep* s, mpq_class q) {
        q.canonicalize();
        FieldElement e;
        e.spec_ = s;
        e.v_ = std::move(q);
        return e;
    }
    static FieldElement make_res(const FieldRep* s, std::uint64_t r) {
        FieldElement e;
        e.spec_ = s;
        e.v_ = r % s->p;
        return e;
    }
    static FieldElement make_ext(const FieldRep* s, FieldElement::ExtVec c) {
        c.resize(s->k, 0);
        for (auto& x : c) x %= s->p;
        FieldElement e;
        e.spec_ = s;
        e.v_ = std::move(c);
        return e;
    }
    static FieldElement make_jet(const FieldRep* s, std::int64_t val,
                                 std::vector<FieldElement> c) {
        // canonical: strip leading and trailing zeros, cap length at order
        size_t lead = 0;
        while (lead < c.size() && c[lead].is_zero()) ++lead;
        if (lead > 0) {
            c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead));
            val += static_cast<std::int64_t>(lead);
        }
        if (c.size() > s->order) c.resize(s->order);
        while (!c.empty() && c.back().is_zero()) c.pop_back();
        if (c.empty()) val = 0;
        FieldElement e;
        e.spec_ = s;
        auto jv = std::make_shared<JetVal>();
        jv->val = val;
        jv->c = std::move(c);
        e.v_ = FieldElement::JetPtr(std::move(jv));
        return e;
    }
};

FieldElement FieldElement::zero(FieldSpec s) {
    const FieldRep* r = need(s.rep());
    switch (r->kind) {
    case FieldKind::rationals: return FieldOps::make_rat(r, mpq_class(0));
    case FieldKind::prime: return FieldOps::make_res(r, 0);
    case FieldKind::extension: return FieldOps::make_ext(r, {});
    case FieldKind::eps_jet: return FieldOps::make_jet(r, 0, {});
    }
    raise(errc::internal, "bad kind");
}

FieldElement FieldElement::one(FieldSpec s) { return from_int(s, 1); }

FieldElement FieldElement::from_mpz(FieldSpec s, const mpz_class& v) {
    const FieldRep* r = need(s.rep());
    switch (r->kind) {
    case FieldKind::rationals: return FieldOps::make_rat(r, mpq_class(v));
    case FieldKind::prime: {
        mpz_class m = v % static_cast<unsigned long>(r->p);
        if (m < 0) m += static_cast<unsigned long>(r->p);
        return FieldOps::make_res(r, m.get_ui());
    }
    case FieldKind::extension: {
        mpz_class m = v % static_cast<unsigned long>(r->p);
        if (m < 0) m += static_cast<unsigned long>(r->p);
        ExtVec c{m.get_ui()};
        return FieldOps::make_ext(r, std::move(c));
    }
    case FieldKind::eps_jet: {
        FieldElement b = from_mpz(s.jet_base(), v);
        if (b.is_zero()) return zero(s);
        return FieldOps::make_jet(r, 0, {b});
    }
    }
    raise(errc::internal, "bad kind");
}

FieldElement FieldElement::from_int(FieldSpec s, long v) { return from_mpz(s, mpz_class(v)); }

FieldElement FieldElement::from_mpq(FieldSpec s, const mpq_class& v) {
    const FieldRep* r = need(s.rep());
    if (r->kind == FieldKind::rationals) return FieldOps::make_rat(r, v);
    if (r->kind == FieldKind::eps_jet && r->base->kind == FieldKind::rationals) {
        FieldElement b = FieldOps::make_rat(r->base, v);
        if (b.is_zero()) return zero(s);
        return FieldOps::make_jet(r, 0, {b});
    }
    // a/b in positive characteristic: map through modular inverse
    FieldElement num = from_mpz(s, mpz_class(v.get_num()));
    FieldElement den = from_mpz(s, mpz_class(v.get_den()));
    return num / den;
}

FieldElement FieldElement::from_residue(FieldSpec s, std::uint64_t r) {
    const FieldRep* rep = need(s.rep());
    if (rep->kind != FieldKind::prime) raise(errc::spec_mismatch, "from_residue needs a prime field");
    return FieldOps::make_res(rep, r);
}

FieldElement FieldElement::from_coeffs(FieldSpec s, const ExtVec& c) {
    const FieldRep* rep = need(s.rep());
    if (rep->kind != FieldKind::extension) raise(errc::spec_mismatch, "from_coeffs needs an extension field");
    if (c.size() > rep->k) {
        Vu reduced = vrem(c, rep->modulus, rep->p);
        return FieldOps::make_ext(rep, std::move(reduced));
    }
    return FieldOps::make_ext(rep, c);
}

FieldElement FieldElement::jet(FieldSpec s, std::int64_t valuation, std::vector<FieldElement> coeffs) {
    const FieldRep* rep = need(s.rep());
    if (rep->kind != FieldKind::eps_jet) raise(errc::spec_mismatch, "jet() needs a jet field");
    for (auto& c : coeffs) check_same(c.spec().rep(), rep->base);
    return FieldOps::make_jet(rep, valuation, std::move(coeffs));
}

bool FieldElement::is_zero() const {
    switch (need(spec_)->kind) {
    case FieldKind::rationals: return std::get<mpq_class>(v_) == 0;
    case FieldKind::prime: return std::get<std::uint64_t>(v_) == 0;
    case FieldKind::extension: {
        for (auto c : std::get<ExtVec>(v_))
            if (c) return false;
        return true;
    }
    case FieldKind::eps_jet: return std::get<JetPtr>(v_)->c.empty();
    }
    return false;
}

bool FieldElement::is_one() const { return *this == one(spec()); }

const mpq_class& FieldElement::rat() const { return std::get<mpq_class>(v_); }
std::uint64_t FieldElement::residue() const { return std::get<std::uint64_t>(v_); }
const FieldElement::ExtVec& FieldElement::coeffs() const { return std::get<ExtVec>(v_); }
std::int64_t FieldElement::jet_valuation() const { return std::get<JetPtr>(v_)->val; }
const std::vector<FieldElement>& FieldElement::jet_coeffs() const { return std::get<JetPtr>(v_)->c; }

bool FieldElement::operator==(const FieldElement& o) const {
    if (spec_ != o.spec_) return false;
    switch (need(spec_)->kind) {
    case FieldKind::rationals: return std::get<mpq_class>(v_) == std::get<mpq_class>(o.v_);
    case FieldKind::prime: return std::get<std::uint64_t>(v_) == std::get<std::uint64_t>(o.v_);
    case FieldKind::extension: return std::get<ExtVec>(v_) == std::get<ExtVec>(o.v_);
    case FieldKind::eps_jet: {
        const auto& a = *std::get<JetPtr>(v_);
        const auto& b = *std::get<JetPtr>(o.v_);
        if (a.c.empty() != b.c.empty()) return false;
        if (a.c.empty()) return true;
        return a.val == b.val && a.c == b.c;
    }
    }
    return false;
}

bool FieldElement::less(const FieldElement& o) const {
    check_same(spec_, o.spec_);
    switch (need(spec_)->kind) {
    case FieldKind::rationals: return std::get<mpq_class>(v_) < std::get<mpq_class>(o.v_);
    case FieldKind::prime: return std::get<std::uint64_t>(v_) < std::get<std::uint64_t>(o.v_);
    case FieldKind::extension: {
        const auto& a = std::get<ExtVec>(v_);
        const auto& b = std::get<ExtVec>(o.v_);
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    }
    case FieldKind::eps_jet: {
        const auto& a = *std::get<JetPtr>(v_);
        const auto& b = *std::get<JetPtr>(o.v_);
        if (a.c.empty() || b.c.empty()) return a.c.size() < b.c.size();
        if (a.val != b.val) return a.val < b.val;
        for (size_t i = 0; i < std::min(a.c.size(), b.c.size()); ++i) {
            if (a.c[i] == b.c[i]) continue;
            return a.c[i].less(b.c[i]);
        }
        return a.c.size() < b.c.size();
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// arithmetic

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check_same(a.spec().rep(), b.spec().rep());
    const FieldRep* s = a.spec().rep();
    switch (s->kind) {
    case FieldKind::rationals: return FieldOps::make_rat(s, a.rat() + b.rat());
    case FieldKind::prime: return FieldOps::make_res(s, (a.residue() + b.residue()) % s->p);
    case FieldKind::extension: {
        FieldElement::ExtVec c = a.coeffs();
        const auto& d = b.coeffs();
        for (size_t i = 0; i < d.size(); ++i) c[i] = (c[i] + d[i]) % s->p;
        return FieldOps::make_ext(s, std::move(c));
    }
    case FieldKind::eps_jet: {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::int64_t va = a.jet_valuation(), vb = b.jet_valuation();
        const auto& ca = a.jet_coeffs();
        const auto& cb = b.jet_coeffs();
        std::int64_t v = std::min(va, vb);
        std::int64_t end = std::max(va + static_cast<std::int64_t>(ca.size()),
                                    vb + static_cast<std::int64_t>(cb.size()));
        // exact over the full span; make_jet re-anchors the window at the
        // post-cancellation leading coefficient and caps at the order
        FieldSpec base(s->base);
        std::vector<FieldElement> c(static_cast<size_t>(end - v), FieldElement::zero(base));
        for (size_t i = 0; i < ca.size(); ++i)
            c[static_cast<size_t>(va - v) + i] = c[static_cast<size_t>(va - v) + i] + ca[i];
        for (size_t i = 0; i < cb.size(); ++i)
            c[static_cast<size_t>(vb - v) + i] = c[static_cast<size_t>(vb - v) + i] + cb[i];
        return FieldOps::make_jet(s, v, std::move(c));
    }
    }
    raise(errc::internal, "bad kind");
}

FieldElement FieldElement::operator-() const {
    const FieldRep* s = spec_;
    switch (need(s)->kind) {
    case FieldKind::rationals: return FieldOps::make_rat(s, -rat());
    case FieldKind::prime: return FieldOps::make_res(s, (s->p - residue()) % s->p);
    case FieldKind::extension: {
        ExtVec c = coeffs();
        for (auto& x : c) x = (s->p - x) % s->p;
        return FieldOps::make_ext(s, std::move(c));
    }
    case FieldKind::eps_jet: {
        std::vector<FieldElement> c = jet_coeffs();
        for (auto& x : c) x = -x;
        return FieldOps::make_jet(s, jet_valuation(), std::move(c));
    }
    }
    raise(errc::internal, "bad kind");
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a + (-b); }

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check_same(a.spec().rep(), b.spec().rep());
    const FieldRep* s = a.spec().rep();
    switch (s->kind) {
    case FieldKind::rationals: return FieldOps::make_rat(s, a.rat() * b.rat());
    case FieldKind::prime: return FieldOps::make_res(s, mulmod(a.residue(), b.residue(), s->p));
    case FieldKind::extension: {
        Vu prod = vmulmod(a.coeffs(), b.coeffs(), s->p);
        Vu red = vrem(std::move(prod), s->modulus, s->p);
        return FieldOps::make_ext(s, std::move(red));
    }
    case FieldKind::eps_jet: {
        if (a.is_zero() || b.is_zero()) return FieldElement::zero(a.spec());
        const auto& ca = a.jet_coeffs();
        const auto& cb = b.jet_coeffs();
        FieldSpec base(s->base);
        // stored lengths are capped at the order, so the full convolution is
        // cheap; make_jet truncates back to the window
        std::vector<FieldElement> c(ca.size() + cb.size() - 1, FieldElement::zero(base));
        for (size_t i = 0; i < ca.size(); ++i) {
            if (ca[i].is_zero()) continue;
            for (size_t j = 0; j < cb.size(); ++j) c[i + j] = c[i + j] + ca[i] * cb[j];
        }
        return FieldOps::make_jet(s, a.jet_valuation() + b.jet_valuation(), std::move(c));
    }
    }
    raise(errc::internal, "bad kind");
}

FieldElement FieldElement::inv() const {
    const FieldRep* s = need(spec_);
    if (is_zero()) raise(errc::division_by_zero, "inverse of zero");
    switch (s->kind) {
    case FieldKind::rationals: return FieldOps::make_rat(s, 1 / rat());
    case FieldKind::prime: return FieldOps::make_res(s, invmod_u64(residue(), s->p));
    case FieldKind::extension: {
        // extended Euclid over F_p[z] against the modulus
        Vu a = s->modulus;
        Vu b = coeffs();
        vtrim(b);
        Vu s0{}, s1{1}; // coefficients tracking b-side combinations
        std::uint64_t p = s->p;
        Vu r0 = a, r1 = b;
        while (!r1.empty()) {
            // divide r0 by r1
            Vu q;
            Vu rem = r0;
            vtrim(rem);
            std::uint64_t lc = r1.back();
            std::uint64_t il = invmod_u64(lc, p);
            if (rem.size() >= r1.size()) q.resize(rem.size() - r1.size() + 1, 0);
            while (rem.size() >= r1.size() && !rem.empty()) {
                std::uint64_t c = mulmod(rem.back(), il, p);
                size_t shift = rem.size() - r1.size();
                q[shift] = c;
                for (size_t i = 0; i < r1.size(); ++i)
                    rem[i + shift] = (rem[i + shift] + p - mulmod(c, r1[i], p)) % p;
                vtrim(rem);
            }
            // s_next = s0 - q*s1
            Vu qs = vmulmod(q, s1, p);
            Vu snext = s0;
            if (snext.size() < qs.size()) snext.resize(qs.size(), 0);
            for (size_t i = 0; i < qs.size(); ++i) snext[i] = (snext[i] + p - qs[i]) % p;
            vtrim(snext);
            r0 = std::move(r1);
            r1 = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(snext);
        }
        // r0 = gcd (a unit since modulus is irreducible and b != 0)
        if (r0.size() != 1) raise(errc::internal, "gcd with irreducible modulus not a unit");
        std::uint64_t scale = invmod_u64(r0[0], p);
        for (auto& c : s0) c = mulmod(c, scale, p);
        Vu red = vrem(std::move(s0), s->modulus, p);
        return FieldOps::make_ext(s, std::move(red));
    }
    case FieldKind::eps_jet: {
        // (eps^v u)^-1 = eps^-v u^-1, u a unit series over the base field
        const auto& c = jet_coeffs();
        FieldSpec base(s->base);
        std::vector<FieldElement> r(s->order, FieldElement::zero(base));
        FieldElement lead_inv = c[0].inv();
        r[0] = lead_inv;
        for (size_t n = 1; n < s->order; ++n) {
            FieldElement acc = FieldElement::zero(base);
            for (size_t i = 1; i <= n && i < c.size(); ++i) acc = acc + c[i] * r[n - i];
            r[n] = -(lead_inv * acc);
        }
        return FieldOps::make_jet(s, -jet_valuation(), std::move(r));
    }
    }
    raise(errc::internal, "bad kind");
}

FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inv(); }

FieldElement FieldElement::pow(const mpz_class& e) const {
    if (e < 0) return inv().pow(mpz_class(-e));
    FieldElement base = *this;
    FieldElement r = one(spec());
    mpz_class n = e;
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r = r * base;
        base = base * base;
        n >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// enumeration / embedding / parsing / printing

FieldElement element_by_index(FieldSpec s, std::uint64_t i) {
    switch (s.kind()) {
    case FieldKind::rationals: return FieldElement::from_mpz(s, mpz_class(static_cast<unsigned long>(i)));
    case FieldKind::prime:
        if (i >= s.prime()) raise(errc::field_too_small, "F_" + std::to_string(s.prime()));
        return FieldElement::from_residue(s, i);
    case FieldKind::extension: {
        std::uint64_t p = s.prime();
        FieldElement::ExtVec c(s.ext_degree(), 0);
        std::uint64_t v = i;
        for (unsigned j = 0; j < s.ext_degree(); ++j) {
            c[j] = v % p;
            v /= p;
        }
        if (v != 0) raise(errc::field_too_small, s.descriptor());
        return FieldElement::from_coeffs(s, c);
    }
    case FieldKind::eps_jet: return embed(element_by_index(s.jet_base(), i), s);
    }
    raise(errc::internal, "bad kind");
}

FieldElement embed(const FieldElement& x, FieldSpec target) {
    if (x.spec() == target) return x;
    if (target.kind() == FieldKind::eps_jet && x.spec() == target.jet_base()) {
        if (x.is_zero()) return FieldElement::zero(target);
        return FieldElement::jet(target, 0, {x});
    }
    if (target.kind() == FieldKind::extension && x.spec().kind() == FieldKind::prime &&
        x.spec().prime() == target.prime()) {
        return FieldElement::from_coeffs(target, {x.residue()});
    }
    raise(errc::spec_mismatch, "no canonical embedding from " + x.spec().descriptor() + " to " +
                                   target.descriptor());
}

FieldElement jet_order0(const FieldElement& x) {
    if (x.spec().kind() != FieldKind::eps_jet) raise(errc::spec_mismatch, "jet_order0 needs a jet");
    FieldSpec base = x.spec().jet_base();
    if (x.is_zero()) return FieldElement::zero(base);
    std::int64_t v = x.jet_valuation();
    if (v < 0) raise(errc::non_unit_constant_term, "jet has negative valuation " + std::to_string(v));
    if (v > 0) return FieldElement::zero(base);
    return x.jet_coeffs()[0];
}

FieldElement parse_element(FieldSpec s, const std::string& text) {
    std::string t = text;
    // strip spaces
    t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return c == ' '; }), t.end());
    if (t.empty()) raise(errc::parse_error, "empty field literal");
    if (t.front() == '{') {
        if (s.kind() != FieldKind::extension || t.back() != '}')
            raise(errc::parse_error, "extension literal " + text);
        FieldElement::ExtVec c;
        std::istringstream is(t.substr(1, t.size() - 2));
        std::string tok;
        while (std::getline(is, tok, ',')) c.push_back(std::stoull(tok));
        return FieldElement::from_coeffs(s, c);
    }
    auto slash = t.find('/');
    try {
        if (slash != std::string::npos) {
            mpq_class q(t);
            q.canonicalize();
            return FieldElement::from_mpq(s, q);
        }
        mpz_class z(t);
        return FieldElement::from_mpz(s, z);
    } catch (const std::invalid_argument&) {
        raise(errc::parse_error, "field literal " + text);
    }
}

std::string FieldElement::str() const {
    const FieldRep* s = need(spec_);
    switch (s->kind) {
    case FieldKind::rationals: return rat().get_str();
    case FieldKind::prime: return std::to_string(residue());
    case FieldKind::extension: {
        const auto& c = coeffs();
        bool scalar = true;
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i]) scalar = false;
        if (scalar) return std::to_string(c.empty() ? 0 : c[0]);
        std::ostringstream os;
        os << '{';
        for (size_t i = 0; i < c.size(); ++i) {
            if (i) os << ',';
            os << c[i];
        }
        os << '}';
        return os.str();
    }
    case FieldKind::eps_jet: {
        if (is_zero()) return "0";
        const auto& c = jet_coeffs();
        std::int64_t v = jet_valuation();
        std::ostringstream os;
        bool first = true;
        for (size_t i = 0; i < c.size(); ++i) {
            if (c[i].is_zero()) continue;
            if (!first) os << " + ";
            first = false;
            std::int64_t e = v + static_cast<std::int64_t>(i);
            std::string cs = c[i].str();
            if (e == 0) {
                os << cs;
            } else {
                if (!c[i].is_one()) os << cs << '*';
                os << "eps";
                if (e != 1) os << '^' << e;
            }
        }
        return os.str();
    }
    }
    raise(errc::internal, "bad kind");
}

} // namespace fkit
