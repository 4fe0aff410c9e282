#pragma once

#include "wf/cdga.hpp"
#include "wf/clifford.hpp"
#include "wf/linalg.hpp"
#include "wf/supermatrix.hpp"

#include <gmp.h>

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace wf {

using FormMatrix = SuperMatrix<AlgebraElement>;

// sum_mu e^{-mu} c_mu with form-valued c_mu
using ExpSum = std::map<Rat, AlgebraElement>;

// constant rational value of a q-series, if it is one
inline std::optional<Rat> rational_constant(const QSeries& s) {
    if (s.is_zero()) return Rat(0);
    if (s.valuation() != 0 || !is_rational(s)) return std::nullopt;
    for (size_t i = 1; i < s.window().size(); ++i)
        if (!s.window()[i].zero()) return std::nullopt;
    return s.window()[0].rational();
}

inline std::optional<Rat> rational_constant(const AlgebraElement& a) {
    if (a.is_zero()) return Rat(0);
    if (a.terms().size() != 1 || a.terms().begin()->first != a.unit_monomial()) return std::nullopt;
    return rational_constant(a.terms().begin()->second);
}

inline bool is_nilpotent_monomial(const Monomial& m, const AlgebraSignature& sig) {
    return sig.form_degree(m) > 0 || m.odd != 0;
}

// length bound for products of nilpotent elements
inline int nilpotency_bound(const AlgebraSignature& sig) {
    int k = sig.dim;
    for (auto& g : sig.odd)
        if (g.degree == 0) ++k;
    return k + 1;
}

// exp(a) for nilpotent a (forms of positive degree and Grassmann parameters)
inline AlgebraElement exp_series(const AlgebraElement& a) {
    const auto& sig = a.signature();
    for (auto& [m, c] : a.terms())
        if (!is_nilpotent_monomial(m, *sig)) throw DomainError("exp_series: argument is not nilpotent");
    AlgebraElement r = AlgebraElement::one(sig), term = AlgebraElement::one(sig);
    for (int k = 1; !term.is_zero(); ++k) {
        if (k > nilpotency_bound(*sig)) throw DomainError("exp_series: series did not terminate");
        term = term * a * rat(1, k);
        r += term;
    }
    return r;
}

// divided difference of x -> e^{-x} on a sorted multiset of nodes
inline std::map<Rat, Rat> exp_divided_difference(const std::vector<Rat>& pts,
                                                 std::map<std::vector<Rat>, std::map<Rat, Rat>>& cache) {
    auto it = cache.find(pts);
    if (it != cache.end()) return it->second;
    std::map<Rat, Rat> r;
    if (pts.front() == pts.back()) {
        size_t k = pts.size() - 1;
        r[pts.front()] = ((k % 2) ? Rat(-1) : Rat(1)) / factorial((long)k);
    } else {
        std::vector<Rat> hi(pts.begin() + 1, pts.end()), lo(pts.begin(), pts.end() - 1);
        Rat inv = inverse(pts.back() - pts.front());
        for (auto& [mu, c] : exp_divided_difference(hi, cache)) r[mu] += c * inv;
        for (auto& [mu, c] : exp_divided_difference(lo, cache)) r[mu] -= c * inv;
        for (auto i = r.begin(); i != r.end();)
            i = wf::is_zero(i->second) ? r.erase(i) : std::next(i);
    }
    cache.emplace(pts, r);
    return r;
}

inline FormMatrix form_matrix(const std::vector<int>& parity, const SigPtr& sig) {
    return FormMatrix(parity, AlgebraElement::zero(sig));
}

inline FormMatrix embed_rational(const std::vector<int>& parity, const SigPtr& sig, const Mat<Rat>& m) {
    return FormMatrix::from_rational(parity, AlgebraElement::zero(sig), m);
}

// Splits F = S + N with S a rational matrix and N nilpotent.
inline std::pair<Mat<Rat>, FormMatrix> split_constant(const FormMatrix& F) {
    const auto& sig = F.zero().signature();
    Mat<Rat> S(F.size(), F.size());
    FormMatrix N(F.parity(), F.zero());
    for (auto& [ij, v] : F.entries()) {
        AlgebraElement rest = v;
        QSeries c = v.coeff(v.unit_monomial());
        if (!c.is_zero()) {
            auto r = rational_constant(c);
            if (!r) throw DomainError("degree-0 part of the curvature must be a rational constant");
            S(ij.first, ij.second) = *r;
            rest -= AlgebraElement::scalar(sig, c);
        }
        for (auto& [m, cc] : rest.terms())
            if (!is_nilpotent_monomial(m, *sig))
                throw DomainError("curvature has a non-nilpotent part outside the rational constants");
        N.set(ij.first, ij.second, rest);
    }
    return {S, N};
}

// e^{-(S+N)} = sum_k sum_{mu_0..mu_k} f[mu_0..mu_k] P_{mu_0} N P_{mu_1} ... N P_{mu_k}
// with f the divided differences of e^{-x}; returned as mu -> coefficient of e^{-mu}.
inline std::map<Rat, FormMatrix> exp_neg(const FormMatrix& F) {
    const auto& sig = F.zero().signature();
    auto [S, N] = split_constant(F);
    std::map<Rat, FormMatrix> proj;
    for (auto& [mu, P] : rational_spectral_decomposition(S)) proj.emplace(mu, embed_rational(F.parity(), sig, P));
    std::map<std::vector<Rat>, std::map<Rat, Rat>> cache;
    std::map<Rat, FormMatrix> out;
    auto accumulate = [&](const std::vector<Rat>& ms, const FormMatrix& M) {
        for (auto& [mu, c] : exp_divided_difference(ms, cache)) {
            auto it = out.find(mu);
            FormMatrix term = M * c;
            if (it == out.end()) out.emplace(mu, term);
            else it->second += term;
        }
    };
    using State = std::pair<std::vector<Rat>, Rat>;
    std::map<State, FormMatrix> states;
    for (auto& [mu, P] : proj) {
        states.emplace(State{{mu}, mu}, P);
        accumulate({mu}, P);
    }
    int bound = nilpotency_bound(*sig);
    for (int k = 1; !states.empty() && !N.is_zero(); ++k) {
        std::map<State, FormMatrix> next;
        for (auto& [st, M] : states) {
            FormMatrix T = M * N;
            if (T.is_zero()) continue;
            for (auto& [nu, P] : proj) {
                FormMatrix TP = T * P;
                if (TP.is_zero()) continue;
                std::vector<Rat> ms = st.first;
                ms.insert(std::upper_bound(ms.begin(), ms.end(), nu), nu);
                State key{ms, nu};
                auto it = next.find(key);
                if (it == next.end()) next.emplace(key, TP);
                else it->second += TP;
            }
        }
        if (k > bound && !next.empty()) throw DomainError("exp_neg: nilpotent part did not terminate");
        std::map<std::vector<Rat>, FormMatrix> by_ms;
        for (auto& [st, M] : next) {
            auto it = by_ms.find(st.first);
            if (it == by_ms.end()) by_ms.emplace(st.first, M);
            else it->second += M;
        }
        for (auto& [ms, M] : by_ms) accumulate(ms, M);
        states = std::move(next);
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

// Lifts an operator B on a graded space V to S (x) V for a Clifford module S:
// entry B_vw becomes eps^{|v|+|w|} (x) B_vw, which supercommutes with c (x) 1.
inline FormMatrix lift_to_module(const CliffordModule& S, const FormMatrix& B) {
    std::vector<int> par = tensor_parity(S.parity, B.parity());
    FormMatrix r(par, B.zero());
    int nv = B.size();
    for (auto& [ij, v] : B.entries()) {
        int e = (B.parity(ij.first) + B.parity(ij.second)) & 1;
        for (int s = 0; s < S.dim(); ++s) {
            bool neg = e && S.parity[s];
            r.set(s * nv + ij.first, s * nv + ij.second, neg ? -v : v);
        }
    }
    return r;
}

// Superconnection d + sum_j A_j on a Clifford module over a base algebra.
// comp[j] is the form-degree-j part; comp[1] is the connection form.
struct SuperConnection {
    SigPtr base;
    CliffordModule module;
    std::map<int, FormMatrix> comp;
    std::optional<FormMatrix> support;  // constant projector the bundle is cut down to

    AlgebraElement zero() const { return AlgebraElement::zero(base); }

    FormMatrix component(int j) const {
        auto it = comp.find(j);
        return it == comp.end() ? form_matrix(module.parity, base) : it->second;
    }

    void set(int j, const FormMatrix& m) {
        if (m.is_zero()) comp.erase(j);
        else comp[j] = m;
    }

    void validate() const {
        for (auto& [j, m] : comp) {
            if (m.parity() != module.parity) throw DomainError("superconnection component has the wrong shape");
            if (j < 0 || j > base->dim) throw DomainError("superconnection component degree out of range");
            for (auto& [ij, v] : m.entries())
                for (auto& [mono, c] : v.terms())
                    if (base->form_degree(mono) != j)
                        throw DomainError("component " + std::to_string(j) + " is not homogeneous of that form degree");
            if (!m.is_zero() && m.total_parity() != 1)
                throw DomainError("component " + std::to_string(j) + " is not odd");
            if (!is_clifford_linear(module, m))
                throw DomainError("component " + std::to_string(j) + " is not Clifford-linear");
        }
        if (support) {
            const FormMatrix& P = *support;
            if (P.parity() != module.parity) throw DomainError("support projector has the wrong shape");
            for (auto& [ij, v] : P.entries())
                if (!rational_constant(v)) throw DomainError("support projector must be constant");
            if (P * P != P) throw DomainError("support is not a projector");
            if (!is_clifford_linear(module, P) || P.total_parity() != 0)
                throw DomainError("support projector must be even and Clifford-linear");
            for (auto& [j, m] : comp)
                if (P * m * P != m) throw DomainError("component " + std::to_string(j) + " leaves the support");
        }
    }
};

// total odd part sum_j u^{j/2} A_j (u = 1 unless rescaled)
inline FormMatrix total_form(const SuperConnection& A, bool u) {
    FormMatrix X = form_matrix(A.module.parity, A.base);
    for (auto& [j, m] : A.comp) X += u ? AlgebraElement::uhalf(A.base, j) * m : m;
    return X;
}

// (c d + X)^2 = c dX + X^2 with c = u^{1/2} when rescaled
inline FormMatrix curvature(const SuperConnection& A, bool u = false) {
    FormMatrix X = total_form(A, u);
    FormMatrix dX = X.map([](const AlgebraElement& a) { return apply_d(a); });
    if (u) dX = AlgebraElement::uhalf(A.base, 1) * dX;
    return dX + X * X;
}

inline std::optional<Rat> rational_sqrt(const Rat& t) {
    if (sgn(t) < 0) return std::nullopt;
    mpz_class n = t.get_num(), d = t.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    return Rat(rn, rd);
}

// A_t = sum_j t^{(1-j)/2} A_j; t must be the square of a positive rational
inline SuperConnection rescale(const SuperConnection& A, const Rat& t) {
    auto s = rational_sqrt(t);
    if (sgn(t) == 0) throw DomainError("rescale: t is not invertible");
    if (!s) throw DomainError("rescale: t must be the square of a positive rational, got " + to_string(t));
    SuperConnection r = A;
    for (auto& [j, m] : r.comp) {
        int e = 1 - j;
        Rat f = e >= 0 ? pow(*s, (unsigned)e) : inverse(pow(*s, (unsigned)-e));
        m = m * f;
    }
    return r;
}

// sTr_Cl = i^{i_pow} sqrt(2)^{sqrt2_pow} * sum_mu e^{-mu} terms[mu],
// normalized so that i_pow and sqrt2_pow lie in {0, 1}.
struct ChernForm {
    ExpSum terms;
    int i_pow = 0;
    int sqrt2_pow = 0;

    void normalize() {
        int k = sqrt2_pow >= 0 ? sqrt2_pow / 2 : -((-sqrt2_pow + 1) / 2);
        sqrt2_pow -= 2 * k;
        Rat f = k >= 0 ? pow(Rat(2), (unsigned)k) : inverse(pow(Rat(2), (unsigned)-k));
        i_pow = ((i_pow % 4) + 4) % 4;
        if (i_pow >= 2) {
            f = -f;
            i_pow -= 2;
        }
        for (auto it = terms.begin(); it != terms.end();) {
            it->second = it->second * f;
            it = it->second.is_zero() ? terms.erase(it) : std::next(it);
        }
    }

    bool is_zero() const { return terms.empty(); }

    AlgebraElement at(const Rat& mu, const SigPtr& sig) const {
        auto it = terms.find(mu);
        return it == terms.end() ? AlgebraElement::zero(sig) : it->second;
    }

    friend ChernForm operator+(const ChernForm& a, const ChernForm& b) { return combine(a, b, Rat(1)); }
    friend ChernForm operator-(const ChernForm& a, const ChernForm& b) { return combine(a, b, Rat(-1)); }
    friend bool operator==(const ChernForm& a, const ChernForm& b) { return (a - b).is_zero(); }
    friend bool operator!=(const ChernForm& a, const ChernForm& b) { return !(a == b); }

private:
    static ChernForm combine(ChernForm a, ChernForm b, const Rat& s) {
        a.normalize();
        b.normalize();
        if (b.is_zero()) return a;
        if (a.is_zero()) {
            for (auto& [mu, c] : b.terms) c = c * s;
            return b;
        }
        if (a.i_pow != b.i_pow || a.sqrt2_pow != b.sqrt2_pow)
            throw DomainError("Chern forms with different i or sqrt(2) factors cannot be added");
        for (auto& [mu, c] : b.terms) {
            auto it = a.terms.find(mu);
            AlgebraElement v = c * s;
            if (it == a.terms.end()) a.terms.emplace(mu, v);
            else it->second += v;
        }
        a.normalize();
        return a;
    }
};

inline ChernForm apply_d(const ChernForm& c) {
    ChernForm r{{}, c.i_pow, c.sqrt2_pow};
    for (auto& [mu, a] : c.terms) r.terms.emplace(mu, apply_d(a));
    r.normalize();
    return r;
}

inline std::string to_text(const ChernForm& c) {
    if (c.is_zero()) return "0";
    std::string prefix = c.i_pow ? "i" : "";
    if (c.sqrt2_pow) prefix += "sqrt2";
    std::string s;
    for (auto& [mu, a] : c.terms) {
        if (!s.empty()) s += " + ";
        s += (mu == 0 ? "" : "e^{-" + to_string(mu) + "}") + "(" + to_text(a) + ")";
    }
    return prefix.empty() ? s : prefix + " * [" + s + "]";
}

// sum_a (-1)^{|a|} (G T)_aa for a rational G, touching only entries on the diagonal
inline AlgebraElement supertrace_product(const RatOperator& G, const FormMatrix& T) {
    AlgebraElement t = T.zero();
    for (auto& [ab, g] : G.entries()) {
        auto [a, b] = ab;
        auto it = T.entries().find({b, a});
        if (it == T.entries().end()) continue;
        bool flip = (G.parity(a) + G.parity(b)) & 1;
        AlgebraElement v = (flip ? parity_flip(it->second) : it->second) * g;
        t = T.parity(a) ? t - v : t + v;
    }
    return t;
}

inline RatOperator support_gamma(const SuperConnection& A, int& phase) {
    auto [G, ph] = gamma_operator(A.module);
    phase = ph;
    if (A.support) {
        RatOperator P(A.module.parity, Rat(0));
        for (auto& [ij, v] : A.support->entries()) P.set(ij.first, ij.second, *rational_constant(v));
        G = G * P;
    }
    return G;
}

inline bool is_diagonal(const FormMatrix& F) {
    for (auto& [ij, v] : F.entries())
        if (ij.first != ij.second) return false;
    return true;
}

// Ch(A) = sTr_Cl(u^{-n/2} e^{-A^2}) (u-rescaled) or sTr_Cl(e^{-A^2}); the sign
// convention for n in the u-power defaults to the module's signed Clifford rank.
inline ChernForm chern_form(const SuperConnection& A, bool u = false, std::optional<int> n = std::nullopt) {
    A.validate();
    FormMatrix F = curvature(A, u);
    int phase = 0;
    RatOperator G = support_gamma(A, phase);
    ChernForm ch{{}, phase, -(int)A.module.gens.size()};
    if (is_diagonal(F)) {
        // group equal diagonal entries before exponentiating
        std::map<std::string, std::pair<AlgebraElement, Rat>> groups;
        for (int a = 0; a < F.size(); ++a) {
            Rat g = G.at(a, a);
            if (wf::is_zero(g)) continue;
            AlgebraElement f = F.at(a, a);
            auto& slot = groups.try_emplace(to_text(f), f, Rat(0)).first->second;
            slot.second += F.parity(a) ? -g : g;
        }
        for (auto& [key, fw] : groups) {
            if (wf::is_zero(fw.second)) continue;
            const AlgebraElement& f = fw.first;
            QSeries c0 = f.coeff(f.unit_monomial());
            auto mu = rational_constant(c0);
            if (!mu) throw DomainError("degree-0 part of the curvature must be a rational constant");
            AlgebraElement nil = f - AlgebraElement::scalar(A.base, c0);
            AlgebraElement e = exp_series(-nil) * fw.second;
            auto it = ch.terms.find(*mu);
            if (it == ch.terms.end()) ch.terms.emplace(*mu, e);
            else it->second += e;
        }
    } else {
        for (auto& [mu, E] : exp_neg(F)) ch.terms.emplace(mu, supertrace_product(G, E));
    }
    if (u) {
        AlgebraElement un = AlgebraElement::uhalf(A.base, -n.value_or(A.module.n));
        for (auto& [mu, c] : ch.terms) c = un * c;
    }
    ch.normalize();
    return ch;
}

// A(s) = sum_p s^p coeffs[p]; coeffs[0] carries d, the others are form-valued
// odd operators. The degree-0 part must not depend on s.
struct ConnectionPath {
    std::vector<SuperConnection> coeffs;

    void validate() const {
        if (coeffs.empty()) throw DomainError("empty connection path");
        for (size_t p = 0; p < coeffs.size(); ++p) {
            coeffs[p].validate();
            if (!(*coeffs[p].base == *coeffs[0].base) || coeffs[p].module.parity != coeffs[0].module.parity)
                throw DomainError("connection path mixes bundles");
            if (p > 0 && !coeffs[p].component(0).is_zero())
                throw DomainError("connection path: the degree-0 part must be constant along the path");
        }
    }

    SuperConnection at(const Rat& s) const {
        SuperConnection r = coeffs[0];
        Rat sp(1);
        for (size_t p = 1; p < coeffs.size(); ++p) {
            sp *= s;
            for (auto& [j, m] : coeffs[p].comp) r.set(j, r.component(j) + m * sp);
        }
        return r;
    }

    // dA/ds, as the total odd form (u-weighted when rescaled)
    FormMatrix velocity(const Rat& s, bool u) const {
        FormMatrix v = form_matrix(coeffs[0].module.parity, coeffs[0].base);
        Rat sp(1);
        for (size_t p = 1; p < coeffs.size(); ++p) {
            v += total_form(coeffs[p], u) * (Rat((long)p) * sp);
            sp *= s;
        }
        return v;
    }

    int degree() const { return (int)coeffs.size() - 1; }
};

// straight line from a to b
inline ConnectionPath linear_path(const SuperConnection& a, const SuperConnection& b) {
    SuperConnection diff = a;
    diff.comp.clear();
    for (int j = 0; j <= a.base->dim; ++j) diff.set(j, b.component(j) - a.component(j));
    return {{a, diff}};
}

// int_0^1 L_i(x) dx for Lagrange polynomials on the nodes i/D
inline std::vector<Rat> lagrange_weights(int D) {
    if (D == 0) return {Rat(1)};
    std::vector<Rat> w(D + 1);
    for (int i = 0; i <= D; ++i) {
        std::vector<Rat> poly{Rat(1)};
        Rat denom(1);
        for (int j = 0; j <= D; ++j) {
            if (j == i) continue;
            Rat xj = rat(j, D);
            std::vector<Rat> next(poly.size() + 1);
            for (size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += poly[k];
                next[k] -= poly[k] * xj;
            }
            poly = next;
            denom *= rat(i, D) - xj;
        }
        Rat integral(0);
        for (size_t k = 0; k < poly.size(); ++k) integral += poly[k] / Rat((long)k + 1);
        w[i] = integral / denom;
    }
    return w;
}

// CS = -c int_{s0}^{s1} sTr_Cl(u^{-n/2} (dA/ds) e^{-A(s)^2}) ds with c = u^{1/2}
// (rescaled) or 1, so that d CS = Ch(A(s1)) - Ch(A(s0)). The integrand is a
// polynomial in s, integrated exactly by interpolation.
inline ChernForm chern_simons(const ConnectionPath& path, const Rat& s0, const Rat& s1, bool u = false,
                              std::optional<int> n = std::nullopt) {
    path.validate();
    const SuperConnection& A0 = path.coeffs[0];
    int P = path.degree();
    int D = P == 0 ? 0 : 2 * P * nilpotency_bound(*A0.base) + P - 1;
    std::vector<Rat> w = lagrange_weights(D);
    int phase = 0;
    RatOperator G = support_gamma(A0, phase);
    ChernForm cs{{}, phase, -(int)A0.module.gens.size()};
    if (P == 0) return cs;
    for (int i = 0; i <= D; ++i) {
        Rat s = s0 + (s1 - s0) * rat(i, D == 0 ? 1 : D);
        SuperConnection As = path.at(s);
        FormMatrix V = path.velocity(s, u);
        Rat weight = -w[i] * (s1 - s0);
        for (auto& [mu, E] : exp_neg(curvature(As, u))) {
            AlgebraElement t = supertrace_product(G, V * E) * weight;
            auto it = cs.terms.find(mu);
            if (it == cs.terms.end()) cs.terms.emplace(mu, t);
            else it->second += t;
        }
    }
    AlgebraElement factor = AlgebraElement::one(A0.base);
    if (u) factor = AlgebraElement::uhalf(A0.base, 1 - n.value_or(A0.module.n));
    for (auto& [mu, c] : cs.terms) c = factor * c;
    cs.normalize();
    return cs;
}

struct TransgressionReport {
    ChernForm cs, d_cs, delta_ch;
    bool ok = false;
};

inline TransgressionReport transgression_check(const ConnectionPath& path, bool u = false) {
    TransgressionReport r;
    r.cs = chern_simons(path, Rat(0), Rat(1), u);
    r.d_cs = apply_d(r.cs);
    r.delta_ch = chern_form(path.at(Rat(1)), u) - chern_form(path.at(Rat(0)), u);
    r.ok = r.d_cs == r.delta_ch;
    return r;
}

inline Mat<Rat> constant_matrix(const FormMatrix& m) {
    Mat<Rat> r(m.size(), m.size());
    for (auto& [ij, v] : m.entries()) {
        auto c = rational_constant(v);
        if (!c) throw DomainError("expected a matrix of rational constants");
        r(ij.first, ij.second) = *c;
    }
    return r;
}

struct CutoffResult {
    Mat<Rat> low_projector;  // spectral projector of A_0^2 below the cutoff
    SuperConnection low;     // P nabla P on the range of P
    ChernForm eta;
    ChernForm d_eta;
    ChernForm target;  // Ch(A) - Ch_P(P nabla P)
    bool high_part_vanishes = false;  // McKean-Singer on the range of 1 - P
    bool low_part_constant = false;   // McKean-Singer on the range of P
    bool ok() const { return high_part_vanishes && low_part_constant && d_eta == target; }
};

// Transgression from A to the low-energy connection P nabla P on the range of
// the spectral projector P of A_0^2 below lambda, through the path
//   A <- A_diag,  (d + A_0 Q) -> (Q nabla Q + A_0 Q),  (d + A_0 P) -> (P nabla P + A_0 P),
//   P nabla P -> d,
// so that d(eta) = Ch(A) - Ch_P(P nabla P).
inline CutoffResult spectral_cutoff(const SuperConnection& A, const Rat& lambda) {
    if (sgn(lambda) <= 0) throw DomainError("spectral_cutoff: the cutoff must be positive");
    if (A.support) throw DomainError("spectral_cutoff: connection already has a support projector");
    A.validate();
    const auto& par = A.module.parity;
    Mat<Rat> A0 = constant_matrix(A.component(0));
    size_t n = A0.rows();
    Mat<Rat> Pm(n, n);
    for (auto& [mu, Pmu] : rational_spectral_decomposition(A0 * A0)) {
        if (mu == lambda) throw DomainError("spectral_cutoff: cutoff " + to_string(lambda) + " is an eigenvalue");
        if (mu < lambda) Pm = Pm + Pmu;
    }
    Mat<Rat> Qm = Mat<Rat>::identity(n) - Pm;
    FormMatrix P = embed_rational(par, A.base, Pm), Q = embed_rational(par, A.base, Qm);
    FormMatrix omega = A.component(1), a0 = A.component(0);
    FormMatrix PwP = P * omega * P, QwQ = Q * omega * Q;

    SuperConnection diag = A;
    diag.comp.clear();
    diag.set(0, a0);
    diag.set(1, PwP + QwQ);

    auto restricted = [&](const FormMatrix& proj, const FormMatrix& c0, const FormMatrix& c1) {
        SuperConnection r = A;
        r.comp.clear();
        r.support = proj;
        r.set(0, c0);
        r.set(1, c1);
        return r;
    };
    SuperConnection high_flat = restricted(Q, a0 * Q, form_matrix(par, A.base));
    SuperConnection high = restricted(Q, a0 * Q, QwQ);
    SuperConnection low_flat = restricted(P, a0 * P, form_matrix(par, A.base));
    SuperConnection low = restricted(P, a0 * P, PwP);
    SuperConnection low_conn = restricted(P, form_matrix(par, A.base), PwP);
    SuperConnection trivial = restricted(P, form_matrix(par, A.base), form_matrix(par, A.base));

    CutoffResult r;
    r.low_projector = Pm;
    r.low = low_conn;
    r.eta = chern_simons(linear_path(diag, A), Rat(0), Rat(1)) +
            chern_simons(linear_path(high_flat, high), Rat(0), Rat(1)) +
            chern_simons(linear_path(low_flat, low), Rat(0), Rat(1)) +
            chern_simons(linear_path(low_conn, trivial), Rat(0), Rat(1));
    r.d_eta = apply_d(r.eta);
    r.target = chern_form(A) - chern_form(low_conn);
    r.high_part_vanishes = chern_form(high_flat).is_zero();
    r.low_part_constant = chern_form(low_flat) == chern_form(trivial);
    return r;
}

// ---------------------------------------------------------------------------
// Random test data

// all monomials of the given form degree and parity in the base algebra
inline std::vector<Monomial> monomials_of_degree(const AlgebraSignature& sig, int degree, int parity) {
    std::vector<Monomial> out;
    std::uint32_t nodd = (std::uint32_t)sig.odd.size();
    for (std::uint32_t mask = 0; mask < (1u << nodd); ++mask) {
        if ((std::popcount(mask) & 1) != parity) continue;
        int od = 0;
        for (std::uint32_t j = 0; j < nodd; ++j)
            if (mask >> j & 1) od += sig.odd[j].degree;
        int rest = degree - od;
        if (rest < 0 || rest % 2) continue;
        // distribute rest/2 among the roots
        std::vector<int> x(sig.roots, 0);
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == sig.roots) {
                if (left == 0) {
                    Monomial m;
                    m.x = x;
                    m.odd = mask;
                    out.push_back(m);
                }
                return;
            }
            for (int e = 0; e <= left; ++e) {
                x[i] = e;
                rec(i + 1, left - e);
            }
            x[i] = 0;
        };
        rec(0, rest / 2);
    }
    return out;
}

// random odd operator of form degree j on the graded space with the given parity
inline FormMatrix random_form_operator(std::mt19937_64& rng, const SigPtr& sig, const std::vector<int>& parity, int j,
                                       int density = 2) {
    std::uniform_int_distribution<int> coef(-2, 2);
    FormMatrix B = form_matrix(parity, sig);
    int n = (int)parity.size();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            int fp = (1 + parity[a] + parity[b]) & 1;
            auto basis = monomials_of_degree(*sig, j, fp);
            if (basis.empty()) continue;
            AlgebraElement v = AlgebraElement::zero(sig);
            std::uniform_int_distribution<size_t> pick(0, basis.size() - 1);
            for (int t = 0; t < density; ++t)
                v.add_term(basis[pick(rng)], QSeries::constant(IotaRat(coef(rng)), sig->N));
            B.set(a, b, v);
        }
    return B;
}

// base algebra with two roots, degree-1 generators l1, l2 (d l_i = x_i) and H
inline SigPtr transgression_signature(int dim) {
    AlgebraSignature s;
    s.roots = 2;
    s.dim = dim;
    for (int i = 0; i < 2; ++i) {
        OddGenerator g{"l" + std::to_string(i + 1), 1, {{root_monomial(2, i), Rat(1)}}};
        s.odd.push_back(g);
    }
    s.odd.push_back(generator_H(2));
    return make_signature(s);
}

struct RandomFamily {
    ConnectionPath path;
    bool u = false;
};

// nilpotent family (no degree-0 part) of polynomial degree 1 or 2 in s
inline RandomFamily random_nilpotent_family(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(-3, 3), pd(1, 2), dd(0, 1), degd(1, 2), ud(0, 1);
    int dim = dd(rng) ? 6 : 4;
    SigPtr sig = transgression_signature(dim);
    CliffordModule S = spinor_module(nd(rng));
    std::vector<int> vpar = block_parity(pd(rng), pd(rng));
    CliffordModule M = tensor_with_space(S, vpar);
    M.validate();
    int P = degd(rng);
    RandomFamily fam;
    fam.u = ud(rng);
    for (int p = 0; p <= P; ++p) {
        SuperConnection c{sig, M, {}, std::nullopt};
        for (int j = 1; j <= 3; ++j) c.set(j, lift_to_module(S, random_form_operator(rng, sig, vpar, j, 1)));
        fam.path.coeffs.push_back(c);
    }
    return fam;
}

// Superconnection with a rational degree-0 part of rational spectrum plus
// random higher components, for spectral cutoff checks.
inline SuperConnection random_gapped_connection(std::mt19937_64& rng, int dim = 4) {
    SigPtr sig = transgression_signature(dim);
    DiracInstance inst = random_dirac_instance(rng, 3, 2);
    CliffordModule M = inst.module;
    int nS = 1 << ((std::abs(M.n) + 1) / 2);
    std::vector<int> vpar(M.parity.begin(), M.parity.begin() + M.dim() / nS);
    CliffordModule S = spinor_module(M.n);
    Mat<Rat> D(M.dim(), M.dim());
    for (int i = 0; i < M.dim(); ++i)
        for (int j = 0; j < M.dim(); ++j) D(i, j) = inst.D(i, j).re;
    SuperConnection A{sig, M, {}, std::nullopt};
    A.set(0, embed_rational(M.parity, sig, D));
    for (int j = 1; j <= 2; ++j) A.set(j, lift_to_module(S, random_form_operator(rng, sig, vpar, j, 1)));
    A.validate();
    return A;
}

// ---------------------------------------------------------------------------
// Hermitian compatibility

inline AlgebraElement conj(const AlgebraElement& a) {
    AlgebraElement r = AlgebraElement::zero(a.signature());
    for (auto& [m, c] : a.terms()) {
        std::vector<IotaRat> w;
        for (auto& x : c.window()) {
            IotaRat y;
            for (auto& [p, v] : x.terms()) y += IotaRat::monomial((p % 2) ? -v : v, p);
            w.push_back(y);
        }
        r.add_term(m, QSeries(c.valuation(), w, c.trunc()));
    }
    return r;
}

struct AdjunctionReport {
    bool ok = true;
    std::string failure;
};

// Metric compatibility of A with a constant even metric G:
//   the connection form satisfies omega^T G + G omega = 0, and
//   every other component satisfies G^{-1} conj(A_k)^T G = (-1)^{k(k-1)/2} A_k,
// the ordinary-adjoint form of the self-adjointness conditions.
inline AdjunctionReport pairing_adjunction_check(const SuperConnection& A, const Mat<Rat>& G) {
    A.validate();
    int n = A.module.dim();
    if ((int)G.rows() != n || (int)G.cols() != n) throw DomainError("pairing matrix has the wrong shape");
    if (G != G.transpose()) throw DomainError("pairing matrix must be symmetric");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (!wf::is_zero(G(a, b)) && A.module.parity[a] != A.module.parity[b])
                throw DomainError("pairing matrix must be even");
    Mat<Rat> Ginv = inverse(G);
    auto product = [&](const Mat<Rat>& L, const FormMatrix& X, const Mat<Rat>& R, bool transpose, bool conjugate) {
        FormMatrix out = form_matrix(A.module.parity, A.base);
        for (auto& [ij, v] : X.entries()) {
            int r = transpose ? ij.second : ij.first, c = transpose ? ij.first : ij.second;
            AlgebraElement x = conjugate ? conj(v) : v;
            for (int a = 0; a < n; ++a) {
                if (wf::is_zero(L(a, r))) continue;
                for (int b = 0; b < n; ++b)
                    if (!wf::is_zero(R(c, b))) out.add(a, b, x * (L(a, r) * R(c, b)));
            }
        }
        return out;
    };
    Mat<Rat> I = Mat<Rat>::identity(n);
    AdjunctionReport rep;
    for (auto& [k, X] : A.comp) {
        FormMatrix diff = form_matrix(A.module.parity, A.base);
        if (k == 1) {
            diff = product(I, X, G, true, false) + product(G, X, I, false, false);
        } else {
            Rat sign = ((k * (k - 1) / 2) % 2) ? Rat(-1) : Rat(1);
            diff = product(Ginv, X, G, true, true) - X * sign;
        }
        if (!diff.is_zero()) {
            auto& [ij, v] = *diff.entries().begin();
            rep.ok = false;
            rep.failure = "degree " + std::to_string(k) + " component fails at (" + std::to_string(ij.first) + "," +
                          std::to_string(ij.second) + "): " + to_text(v);
            return rep;
        }
    }
    return rep;
}

}  // namespace wf
