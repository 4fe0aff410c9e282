#pragma once

#include "wf/series.hpp"

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wf {

// Monomial in the formal algebra: Chern roots x_i (degree 2), the symbol W
// (degree 0), u^{1/2} (degree -1, central), the volume symbol v (degree 0) and a
// set of odd generators written in increasing index order.
struct Monomial {
    std::vector<int> x;
    int w = 0;
    int uh = 0;
    int v = 0;
    std::uint32_t odd = 0;

    auto operator<=>(const Monomial&) const = default;
    bool operator==(const Monomial&) const = default;

    int root_degree() const {
        int d = 0;
        for (int e : x) d += 2 * e;
        return d;
    }
    int parity() const { return std::popcount(odd) & 1; }
};

struct OddGenerator {
    std::string name;
    int degree = 1;
    // d(generator) as a combination of even, closed monomials (roots, W)
    std::vector<std::pair<Monomial, Rat>> differential;

    bool operator==(const OddGenerator& o) const {
        return name == o.name && degree == o.degree && differential == o.differential;
    }
};

struct AlgebraSignature {
    int roots = 0;
    int dim = 0;  // forms of degree > dim vanish
    std::vector<OddGenerator> odd;
    bool include_W = false;
    int w_bound = 4;  // powers of W above this are dropped
    long N = 0;       // q-truncation of coefficients
    bool u_grading = false;

    bool operator==(const AlgebraSignature&) const = default;

    int odd_index(const std::string& name) const {
        for (size_t i = 0; i < odd.size(); ++i)
            if (odd[i].name == name) return (int)i;
        return -1;
    }
    int form_degree(const Monomial& m) const {
        int d = m.root_degree();
        for (size_t j = 0; j < odd.size(); ++j)
            if (m.odd >> j & 1) d += odd[j].degree;
        return d;
    }
    int total_degree(const Monomial& m) const { return form_degree(m) - m.uh; }

    void validate() const {
        if (roots < 0 || dim < 0 || N < 0) throw DomainError("AlgebraSignature: negative size");
        if (odd.size() > 32) throw DomainError("AlgebraSignature: at most 32 odd generators");
        for (size_t i = 0; i < odd.size(); ++i)
            for (size_t j = i + 1; j < odd.size(); ++j)
                if (odd[i].name == odd[j].name) throw DomainError("duplicate generator name " + odd[i].name);
        for (auto& g : odd)
            for (auto& [m, c] : g.differential) {
                if (m.odd) throw DomainError("differential of " + g.name + " must not involve odd generators");
                if ((int)m.x.size() != roots) throw DomainError("differential of " + g.name + ": wrong root count");
                if (m.root_degree() != g.degree + 1) throw DomainError("differential of " + g.name + " has wrong degree");
            }
    }
};

using SigPtr = std::shared_ptr<const AlgebraSignature>;

inline SigPtr make_signature(AlgebraSignature s) {
    s.validate();
    return std::make_shared<const AlgebraSignature>(std::move(s));
}

// Builders for the usual generators.
inline Monomial root_monomial(int r, int i, int e = 1) {
    Monomial m;
    m.x.assign(r, 0);
    m.x[i] = e;
    return m;
}

// H with dH = sum_i x_i^2
inline OddGenerator generator_H(int r) {
    OddGenerator g{"H", 3, {}};
    for (int i = 0; i < r; ++i) g.differential.emplace_back(root_monomial(r, i, 2), Rat(1));
    return g;
}

// degree-0 odd (Grassmann) parameter with no differential
inline OddGenerator generator_grassmann(const std::string& name) { return {name, 0, {}}; }

class AlgebraElement {
public:
    using Terms = std::map<Monomial, QSeries>;

    AlgebraElement() = default;
    explicit AlgebraElement(SigPtr sig) : sig_(std::move(sig)) {}

    static AlgebraElement zero(SigPtr sig) { return AlgebraElement(std::move(sig)); }
    static AlgebraElement scalar(SigPtr sig, const QSeries& s) {
        AlgebraElement a(sig);
        a.add_term(a.unit_monomial(), s);
        return a;
    }
    static AlgebraElement scalar(SigPtr sig, const IotaRat& c) {
        long N = sig->N;
        return scalar(sig, QSeries::constant(c, N));
    }
    static AlgebraElement one(SigPtr sig) { return scalar(sig, IotaRat(1)); }
    static AlgebraElement monomial(SigPtr sig, const Monomial& m, const IotaRat& c = IotaRat(1)) {
        AlgebraElement a(sig);
        a.add_term(m, QSeries::constant(c, a.sig_->N));
        return a;
    }
    static AlgebraElement root(SigPtr sig, int i, int e = 1) {
        int r = sig->roots;
        if (i < 0 || i >= r) throw DomainError("root index out of range");
        return monomial(sig, root_monomial(r, i, e));
    }
    static AlgebraElement odd_gen(SigPtr sig, const std::string& name) {
        int j = sig->odd_index(name);
        if (j < 0) throw DomainError("unknown odd generator " + name);
        Monomial m;
        m.x.assign(sig->roots, 0);
        m.odd = 1u << j;
        return monomial(sig, m);
    }
    static AlgebraElement W(SigPtr sig, int power = 1) {
        if (!sig->include_W) throw DomainError("signature has no W symbol");
        Monomial m;
        m.x.assign(sig->roots, 0);
        m.w = power;
        return monomial(sig, m);
    }
    static AlgebraElement uhalf(SigPtr sig, int power) {
        Monomial m;
        m.x.assign(sig->roots, 0);
        m.uh = power;
        return monomial(sig, m);
    }
    static AlgebraElement vol(SigPtr sig, int power = 1) {
        Monomial m;
        m.x.assign(sig->roots, 0);
        m.v = power;
        return monomial(sig, m);
    }

    const SigPtr& signature() const { return sig_; }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Monomial unit_monomial() const {
        Monomial m;
        m.x.assign(sig_->roots, 0);
        return m;
    }

    QSeries coeff(const Monomial& m) const {
        auto it = t_.find(m);
        return it == t_.end() ? QSeries(sig_->N) : it->second;
    }

    // adds c*m after applying the truncation rules
    void add_term(const Monomial& m, const QSeries& c) {
        if (c.is_zero()) return;
        if (sig_->form_degree(m) > sig_->dim) return;
        if (m.w > sig_->w_bound) return;
        if (m.w && !sig_->include_W) throw DomainError("W power in a signature without W");
        QSeries cc = c.trunc() > sig_->N ? c.truncated(sig_->N) : c;
        auto it = t_.find(m);
        if (it == t_.end()) {
            if (!cc.is_zero()) t_.emplace(m, std::move(cc));
            return;
        }
        it->second += cc;
        if (it->second.is_zero()) t_.erase(it);
    }

    bool is_even() const {
        for (auto& [m, c] : t_)
            if (m.parity()) return false;
        return true;
    }
    bool is_odd() const {
        for (auto& [m, c] : t_)
            if (!m.parity()) return false;
        return true;
    }

    AlgebraElement& operator+=(const AlgebraElement& b) {
        check(b);
        for (auto& [m, c] : b.t_) add_term(m, c);
        return *this;
    }
    AlgebraElement& operator-=(const AlgebraElement& b) {
        check(b);
        for (auto& [m, c] : b.t_) add_term(m, -c);
        return *this;
    }
    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator-(const AlgebraElement& a) {
        AlgebraElement r = a;
        for (auto& [m, c] : r.t_) c = -c;
        return r;
    }

    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
        a.check(b);
        AlgebraElement r(a.sig_);
        for (auto& [ma, ca] : a.t_)
            for (auto& [mb, cb] : b.t_) {
                int sign;
                Monomial m;
                if (!multiply_monomials(ma, mb, m, sign)) continue;
                if (a.sig_->form_degree(m) > a.sig_->dim || m.w > a.sig_->w_bound) continue;
                QSeries c = ca * cb;
                r.add_term(m, sign > 0 ? c : -c);
            }
        return r;
    }
    friend AlgebraElement operator*(const AlgebraElement& a, const QSeries& s) {
        AlgebraElement r(a.sig_);
        for (auto& [m, c] : a.t_) r.add_term(m, c * s);
        return r;
    }
    friend AlgebraElement operator*(const QSeries& s, const AlgebraElement& a) { return a * s; }
    friend AlgebraElement operator*(const AlgebraElement& a, const IotaRat& s) {
        AlgebraElement r(a.sig_);
        if (s.zero()) return r;
        for (auto& [m, c] : a.t_) r.add_term(m, scale(c, s));
        return r;
    }
    friend AlgebraElement operator*(const IotaRat& s, const AlgebraElement& a) { return a * s; }
    friend AlgebraElement operator*(const AlgebraElement& a, const Rat& s) { return a * IotaRat(s); }
    friend AlgebraElement operator*(const Rat& s, const AlgebraElement& a) { return a * IotaRat(s); }

    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
        if (!(a.sig_ == b.sig_ || *a.sig_ == *b.sig_)) return false;
        return a.t_ == b.t_;
    }
    friend bool operator!=(const AlgebraElement& a, const AlgebraElement& b) { return !(a == b); }

    // negates odd-parity monomials (the grading automorphism)
    AlgebraElement parity_flip() const {
        AlgebraElement r = *this;
        for (auto& [m, c] : r.t_)
            if (m.parity()) c = -c;
        return r;
    }

    // part of a given form degree
    AlgebraElement degree_part(int deg) const {
        AlgebraElement r(sig_);
        for (auto& [m, c] : t_)
            if (sig_->form_degree(m) == deg) r.t_.emplace(m, c);
        return r;
    }

    // Koszul product of monomials; false when an odd generator repeats
    static bool multiply_monomials(const Monomial& a, const Monomial& b, Monomial& out, int& sign) {
        if (a.odd & b.odd) return false;
        out.x.resize(a.x.size());
        for (size_t i = 0; i < a.x.size(); ++i) out.x[i] = a.x[i] + b.x[i];
        out.w = a.w + b.w;
        out.uh = a.uh + b.uh;
        out.v = a.v + b.v;
        out.odd = a.odd | b.odd;
        int swaps = 0;
        if (a.odd && b.odd) {
            std::uint32_t bb = b.odd;
            while (bb) {
                int j = std::countr_zero(bb);
                bb &= bb - 1;
                std::uint32_t above = (j >= 31) ? 0u : (a.odd >> (j + 1));
                swaps += std::popcount(above);
            }
        }
        sign = (swaps & 1) ? -1 : 1;
        return true;
    }

    void check(const AlgebraElement& b) const {
        if (!sig_ || !b.sig_) throw DomainError("uninitialized algebra element");
        if (sig_ != b.sig_ && !(*sig_ == *b.sig_)) throw DomainError("algebra signature mismatch");
    }

private:
    SigPtr sig_;
    Terms t_;
};

// Exterior derivative: odd derivation, d(x_i) = d(W) = d(u) = d(v) = 0 and
// d(o_j) as declared in the signature.
inline AlgebraElement apply_d(const AlgebraElement& a) {
    const auto& sig = a.signature();
    AlgebraElement r(sig);
    for (auto& [m, c] : a.terms()) {
        std::uint32_t mask = m.odd;
        while (mask) {
            int j = std::countr_zero(mask);
            mask &= mask - 1;
            const auto& dj = sig->odd[j].differential;
            if (dj.empty()) continue;
            int before = std::popcount(m.odd & ((1u << j) - 1));
            Monomial rest = m;
            rest.odd &= ~(1u << j);
            for (auto& [dm, dc] : dj) {
                Monomial out;
                int s;
                AlgebraElement::multiply_monomials(rest, dm, out, s);
                QSeries cc = scale(c, IotaRat(dc));
                r.add_term(out, (before & 1) ? -cc : cc);
            }
        }
    }
    return r;
}

// d/d(taubar): W^m -> m * iota * W^{m+1}; q-series coefficients are holomorphic.
inline AlgebraElement apply_dbar(const AlgebraElement& a) {
    const auto& sig = a.signature();
    AlgebraElement r(sig);
    for (auto& [m, c] : a.terms()) {
        if (m.w == 0) continue;
        Monomial out = m;
        out.w += 1;
        r.add_term(out, scale(c, IotaRat::monomial(Rat(m.w), 1)));
    }
    return r;
}

// derivation in the volume symbol v only
inline AlgebraElement apply_dv(const AlgebraElement& a) {
    AlgebraElement r(a.signature());
    for (auto& [m, c] : a.terms()) {
        if (m.v == 0) continue;
        Monomial out = m;
        out.v -= 1;
        r.add_term(out, scale(c, IotaRat(Rat(m.v))));
    }
    return r;
}

inline bool has_positive_degree(const AlgebraElement& a) {
    for (auto& [m, c] : a.terms())
        if (a.signature()->form_degree(m) <= 0) return false;
    return true;
}

// sum_k a^k / k!, terminating by degree truncation
inline AlgebraElement exp_nilpotent(const AlgebraElement& a) {
    if (!a.is_even()) throw DomainError("exp_nilpotent: input must be even");
    if (!has_positive_degree(a)) throw DomainError("exp_nilpotent: input has a degree-0 part");
    const auto& sig = a.signature();
    AlgebraElement r = AlgebraElement::one(sig), term = AlgebraElement::one(sig);
    for (int k = 1; k <= sig->dim && !term.is_zero(); ++k) {
        term = term * a * rat(1, k);
        r += term;
    }
    return r;
}

// inverse of c0 + n with c0 an invertible q-series scalar and n nilpotent
inline AlgebraElement inverse(const AlgebraElement& a) {
    const auto& sig = a.signature();
    Monomial u = a.unit_monomial();
    QSeries c0 = a.coeff(u);
    if (c0.is_zero()) throw DomainError("AlgebraElement inverse: constant part vanishes");
    AlgebraElement n = a;
    n -= AlgebraElement::scalar(sig, c0);
    if (!has_positive_degree(n)) throw DomainError("AlgebraElement inverse: degree-0 part is not a scalar");
    QSeries c0inv = c0.inverse();
    if (c0inv.trunc() < sig->N) throw PrecisionError("AlgebraElement inverse: constant part loses q-precision");
    AlgebraElement x = n * c0inv;  // a = c0 (1 + x)
    AlgebraElement r = AlgebraElement::one(sig), term = AlgebraElement::one(sig);
    for (int k = 1; k <= sig->dim && !term.is_zero(); ++k) {
        term = -(term * x);
        r += term;
    }
    return r * c0inv;
}

// s_k = sum_i x_i^{2k}
inline AlgebraElement power_sum(const SigPtr& sig, int k) {
    AlgebraElement s(sig);
    for (int i = 0; i < sig->roots; ++i) s += AlgebraElement::root(sig, i, 2 * k);
    return s;
}

inline AlgebraElement p1(const SigPtr& sig) { return power_sum(sig, 1); }

// prod_i x_i
inline AlgebraElement pfaffian(const SigPtr& sig) {
    AlgebraElement p = AlgebraElement::one(sig);
    for (int i = 0; i < sig->roots; ++i) p = p * AlgebraElement::root(sig, i);
    return p;
}

// prod_i f(x_i) for a power series f(x) = sum_j f[j] x^j with q-series coefficients
inline AlgebraElement root_product(const SigPtr& sig, const std::vector<QSeries>& f) {
    AlgebraElement r = AlgebraElement::one(sig);
    for (int i = 0; i < sig->roots; ++i) {
        AlgebraElement fi(sig);
        for (size_t j = 0; j < f.size() && 2 * (int)j <= sig->dim; ++j)
            fi.add_term(root_monomial(sig->roots, i, (int)j), f[j]);
        r = r * fi;
    }
    return r;
}

using Partition = std::vector<int>;  // parts in descending order

inline std::string partition_key(const Partition& p) {
    std::string s = "[";
    for (size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
    return s + "]";
}

inline void partitions_rec(int n, int maxpart, Partition& cur, std::vector<Partition>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int k = std::min(n, maxpart); k >= 1; --k) {
        cur.push_back(k);
        partitions_rec(n - k, k, cur, out);
        cur.pop_back();
    }
}

inline std::vector<Partition> partitions(int n) {
    std::vector<Partition> out;
    Partition cur;
    partitions_rec(n, n, cur, out);
    return out;
}

namespace detail {
using YPoly = std::map<std::vector<int>, Int>;

inline YPoly ypoly_mul(const YPoly& a, const YPoly& b) {
    YPoly r;
    for (auto& [ea, ca] : a)
        for (auto& [eb, cb] : b) {
            std::vector<int> e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r[e] += ca * cb;
        }
    for (auto it = r.begin(); it != r.end();) it = (it->second == 0) ? r.erase(it) : std::next(it);
    return r;
}

// elementary symmetric polynomial e_j in r variables
inline YPoly elementary(int r, int j) {
    YPoly p;
    for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
        if (std::popcount(mask) != j) continue;
        std::vector<int> e(r);
        for (int i = 0; i < r; ++i) e[i] = mask >> i & 1;
        p[e] = 1;
    }
    return p;
}
}  // namespace detail

// Top-degree part of a written in the basis of Pontryagin monomials
// p_lambda = prod e_{lambda_i}(x_1^2, ..., x_r^2), keyed by partition.
inline std::map<Partition, QSeries> pontryagin_coordinates(const AlgebraElement& a, int dim) {
    const auto& sig = a.signature();
    int r = sig->roots;
    std::map<std::vector<int>, QSeries> poly;
    for (auto& [m, c] : a.terms()) {
        if (sig->form_degree(m) != dim) continue;
        if (m.odd || m.w || m.uh || m.v)
            throw DomainError("pontryagin pairing: top-degree part involves odd generators or symbols");
        std::vector<int> y(r);
        for (int i = 0; i < r; ++i) {
            if (m.x[i] % 2) throw DomainError("pontryagin pairing: top-degree part is not a polynomial in x_i^2");
            y[i] = m.x[i] / 2;
        }
        poly.emplace(y, c);
    }
    std::map<Partition, QSeries> out;
    while (!poly.empty()) {
        auto [alpha, c] = *poly.rbegin();
        for (int i = 0; i + 1 < r; ++i)
            if (alpha[i] < alpha[i + 1]) throw DomainError("pontryagin pairing: top-degree part is not symmetric");
        Partition lam;
        detail::YPoly prod{{std::vector<int>(r, 0), Int(1)}};
        for (int j = r; j >= 1; --j) {
            int mult = alpha[j - 1] - (j < r ? alpha[j] : 0);
            for (int t = 0; t < mult; ++t) {
                lam.push_back(j);
                prod = detail::ypoly_mul(prod, detail::elementary(r, j));
            }
        }
        for (auto& [e, k] : prod) {
            QSeries term = scale(c, IotaRat(Rat(k)));
            auto it = poly.find(e);
            if (it == poly.end()) poly.emplace(e, -term);
            else {
                it->second -= term;
                if (it->second.is_zero()) poly.erase(it);
            }
        }
        out.emplace(lam, c);
    }
    return out;
}

// Contract the top-degree part of a with prescribed Pontryagin numbers
// (keys like "[2]" or "[1,1]").
inline QSeries pair_with_pontryagin(const AlgebraElement& a, const std::map<std::string, Int>& numbers, int dim) {
    const auto& sig = a.signature();
    QSeries total(sig->N);
    bool has_top = false;
    for (auto& [m, c] : a.terms())
        if (sig->form_degree(m) == dim) has_top = true;
    if (!has_top) return total;
    if (dim % 4 != 0) throw DomainError("pontryagin pairing: dimension not divisible by 4 but top part nonzero");
    for (auto& [lam, c] : pontryagin_coordinates(a, dim)) {
        auto it = numbers.find(partition_key(lam));
        if (it == numbers.end()) throw InputError("missing Pontryagin number for partition " + partition_key(lam));
        total += scale(c, IotaRat(Rat(it->second)));
    }
    return total;
}

inline std::string to_text(const Monomial& m, const AlgebraSignature& sig) {
    std::string s;
    auto app = [&](const std::string& t) { s += (s.empty() ? "" : "*") + t; };
    for (size_t i = 0; i < m.x.size(); ++i)
        if (m.x[i]) app("x" + std::to_string(i + 1) + (m.x[i] > 1 ? "^" + std::to_string(m.x[i]) : ""));
    if (m.w) app("W" + (m.w > 1 ? "^" + std::to_string(m.w) : std::string()));
    if (m.uh) app("u^(" + std::to_string(m.uh) + "/2)");
    if (m.v) app("v" + (m.v > 1 ? "^" + std::to_string(m.v) : std::string()));
    for (size_t j = 0; j < sig.odd.size(); ++j)
        if (m.odd >> j & 1) app(sig.odd[j].name);
    return s.empty() ? "1" : s;
}

inline std::string to_text(const AlgebraElement& a) {
    if (a.is_zero()) return "0";
    std::string s;
    for (auto& [m, c] : a.terms()) {
        if (!s.empty()) s += " + ";
        s += "(" + to_text(c) + ")";
        std::string mt = to_text(m, *a.signature());
        if (mt != "1") s += "*" + mt;
    }
    return s;
}

// first monomial where a and b differ, rendered for reports
inline std::optional<std::string> first_difference(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement d = a - b;
    if (d.is_zero()) return std::nullopt;
    auto& [m, c] = *d.terms().begin();
    return to_text(m, *a.signature()) + ": difference " + to_text(c);
}

}  // namespace wf
