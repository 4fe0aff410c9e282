#pragma once

#include "wf/cdga.hpp"
#include "wf/modforms.hpp"
#include "wf/qseries.hpp"

#include <map>
#include <string>
#include <vector>

namespace wf {

// Power series in one Chern root x with q-series coefficients: c[j] is the
// coefficient of x^j, j <= M.
using XSeries = std::vector<QSeries>;

inline XSeries xseries_zero(long M, long N) { return XSeries(M + 1, QSeries(N)); }

inline XSeries xseries_one(long M, long N) {
    XSeries r = xseries_zero(M, N);
    r[0] = QSeries::one(N);
    return r;
}

inline XSeries xadd(const XSeries& a, const XSeries& b) {
    XSeries r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline XSeries xmul(const XSeries& a, const XSeries& b) {
    long M = (long)a.size() - 1;
    long N = a[0].trunc();
    XSeries r = xseries_zero(M, N);
    for (long i = 0; i <= M; ++i) {
        if (a[i].is_zero()) continue;
        for (long j = 0; i + j <= M; ++j)
            if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline XSeries xscale(const XSeries& a, const QSeries& s) {
    XSeries r = a;
    for (auto& c : r) c = c * s;
    return r;
}

inline XSeries xinverse(const XSeries& a) {
    long M = (long)a.size() - 1;
    QSeries inv0 = a[0].inverse();
    XSeries b(M + 1, QSeries(a[0].trunc()));
    b[0] = inv0;
    for (long n = 1; n <= M; ++n) {
        QSeries s(a[0].trunc());
        for (long k = 1; k <= n; ++k)
            if (!a[k].is_zero()) s += a[k] * b[n - k];
        b[n] = -(inv0 * s);
    }
    return b;
}

inline XSeries xexp(const XSeries& a) {
    if (!a[0].is_zero()) throw DomainError("xexp: constant term must vanish");
    long M = (long)a.size() - 1;
    long N = a[0].trunc();
    XSeries r = xseries_one(M, N), term = xseries_one(M, N);
    for (long j = 1; j <= M; ++j) {
        term = xscale(xmul(term, a), QSeries::constant(IotaRat(rat(1, j)), N));
        r = xadd(r, term);
    }
    return r;
}

// exp(+-x) as an XSeries with rational coefficients
inline XSeries xseries_exp_rational(long M, long N, const Rat& factor) {
    XSeries r = xseries_zero(M, N);
    for (long j = 0; j <= M; ++j) r[j] = QSeries::constant(IotaRat(pow(factor, j) / factorial(j)), N);
    return r;
}

enum class WittenVariant { plain, modular, star };

inline const char* to_string(WittenVariant v) {
    switch (v) {
        case WittenVariant::plain: return "plain";
        case WittenVariant::modular: return "modular";
        default: return "star";
    }
}

// exp(sum_{k >= kmin} D_{2k}(q) x^{2k}/(2k)) for a single root
inline XSeries witten_root_factor(long M, long N, long kmin) {
    XSeries e = xseries_zero(M, N);
    for (long k2 = 2 * kmin; k2 <= M; k2 += 2)
        e[k2] = to_qseries(scale(eisenstein_geometric(k2, N), rat(1, k2)));
    return xexp(e);
}

inline void require_roots(const SigPtr& sig) {
    if (sig->roots < 1) throw DomainError("signature needs at least one Chern root");
}

// plain:   exp(sum_{k>=1} D_{2k} s_k/(2k))
// modular: exp(sum_{k>=2} D_{2k} s_k/(2k))
// star:    plain with D_2 replaced by D_2 - W
inline AlgebraElement witten_class(const SigPtr& sig, WittenVariant variant) {
    require_roots(sig);
    long M = sig->dim / 2, N = sig->N;
    if (variant == WittenVariant::star && !sig->include_W)
        throw DomainError("star Witten class needs the W symbol in the signature");
    long kmin = variant == WittenVariant::modular ? 2 : 1;
    AlgebraElement w = root_product(sig, witten_root_factor(M, N, kmin));
    if (variant == WittenVariant::star) {
        AlgebraElement shift = AlgebraElement::W(sig) * p1(sig) * rat(-1, 2);
        if (!shift.is_zero()) w = w * exp_nilpotent(shift);
    }
    return w;
}

// prod_i (x_i/2)/sinh(x_i/2)
inline AlgebraElement a_hat_class(const SigPtr& sig) {
    long M = sig->dim / 2, N = sig->N;
    XSeries s = xseries_zero(M, N);
    for (long j = 0; j <= M; j += 2) s[j] = QSeries::constant(IotaRat(pow(rat(1, 2), j) / factorial(j + 1)), N);
    return root_product(sig, xinverse(s));
}

// (1 - q^k e^x)(1 - q^k e^{-x}) for one root
inline XSeries lambda_root_factor(long k, long M, long N) {
    XSeries c = xadd(xseries_exp_rational(M, N, Rat(1)), xseries_exp_rational(M, N, Rat(-1)));
    XSeries r = xseries_zero(M, N);
    QSeries qk = QSeries::monomial(IotaRat(1), k, N);
    for (long j = 0; j <= M; ++j) r[j] = -(c[j] * qk);
    r[0] += QSeries::one(N) + qk * qk;
    return r;
}

enum class CharacterKind { sym, lambda };

// sym:    prod_i (1-q^k e^{x_i})^{-1} (1-q^k e^{-x_i})^{-1}
// lambda: prod_i (1-q^k e^{x_i}) (1-q^k e^{-x_i})   (graded character)
inline AlgebraElement sym_lambda_character(CharacterKind kind, long k, const SigPtr& sig) {
    if (k < 0) throw DomainError("character level must be >= 0");
    if (kind == CharacterKind::sym && k == 0) throw DomainError("symmetric character needs level k >= 1");
    long M = sig->dim / 2, N = sig->N;
    XSeries f = lambda_root_factor(k, M, N);
    return root_product(sig, kind == CharacterKind::sym ? xinverse(f) : f);
}

inline QSeries phi_q(long N) { return to_qseries(phi_product(N)); }

struct IdentityCheck {
    AlgebraElement lhs, rhs;
    bool equal = false;
};

inline SigPtr euler_signature(long rank, int dim, long N, bool with_H = false, bool with_W = false) {
    if (rank % 2) throw DomainError("Euler/Pfaffian identities need even rank, got " + std::to_string(rank));
    if (rank < 0) throw DomainError("negative rank");
    AlgebraSignature s;
    s.roots = (int)rank / 2;
    s.dim = dim;
    s.N = N;
    if (with_H) s.odd.push_back(generator_H(s.roots));
    s.include_W = with_W;
    s.w_bound = dim / 2 + 2;
    return make_signature(s);
}

// lhs = phi^{-n} prod_i (e^{x_i/2}-e^{-x_i/2}) prod_{k>=1} (1-q^k e^{x_i})(1-q^k e^{-x_i})
// rhs = Pf * Wit^{-1}
inline IdentityCheck euler_character_check(long rank, int dim, long N) {
    SigPtr sig = euler_signature(rank, dim, N);
    long M = dim / 2;
    XSeries f = xseries_exp_rational(M, N, rat(1, 2));
    XSeries g = xseries_exp_rational(M, N, rat(-1, 2));
    for (long j = 0; j <= M; ++j) f[j] -= g[j];
    for (long k = 1; k <= N; ++k) f = xmul(f, lambda_root_factor(k, M, N));
    AlgebraElement lhs = root_product(sig, f) * phi_q(N).pow(-rank);
    AlgebraElement rhs = sig->roots == 0 ? AlgebraElement::one(sig)
                                         : pfaffian(sig) * inverse(witten_class(sig, WittenVariant::plain));
    return {lhs, rhs, lhs == rhs};
}

// phi^{n} * A-hat * prod_{k>=1} Ch(Sym_{q^k}), n = 2 * roots
inline AlgebraElement dirac_ramond_character(const SigPtr& sig) {
    AlgebraElement r = a_hat_class(sig);
    for (long k = 1; k <= sig->N; ++k) r = r * sym_lambda_character(CharacterKind::sym, k, sig);
    return r * phi_q(sig->N).pow(2 * sig->roots);
}

struct EtaHResult {
    AlgebraElement eta;
    AlgebraElement d_eta;
    AlgebraElement target;  // modular Witten class minus Wit (or Wit*)
    bool check = false;
};

// eta_H = H * Wit * sum_{m>=1} c^m p1^{m-1}/m!  with c = -D_2/2 (plain) or
// c = -(D_2 - W)/2 and Wit* (star); then d(eta_H) = modular Wit - Wit.
inline EtaHResult eta_h_transgression(const SigPtr& sig, WittenVariant variant) {
    if (sig->odd_index("H") < 0) throw DomainError("eta_H needs the generator H");
    if (variant == WittenVariant::modular) throw DomainError("eta_H variant must be plain or star");
    long N = sig->N;
    AlgebraElement c = AlgebraElement::scalar(sig, to_qseries(scale(eisenstein_geometric(2, N), rat(-1, 2))));
    if (variant == WittenVariant::star) c += AlgebraElement::W(sig) * rat(1, 2);
    AlgebraElement P = p1(sig);
    AlgebraElement sum(sig), cm = AlgebraElement::one(sig), pm = AlgebraElement::one(sig);
    for (int m = 1; 4 * (m - 1) <= sig->dim; ++m) {
        cm = cm * c;
        sum += cm * pm * inverse(factorial(m));
        pm = pm * P;
    }
    AlgebraElement wit = witten_class(sig, variant);
    AlgebraElement eta = AlgebraElement::odd_gen(sig, "H") * wit * sum;
    AlgebraElement target = witten_class(sig, WittenVariant::modular) - wit;
    AlgebraElement deta = apply_d(eta);
    return {eta, deta, target, deta == target};
}

struct AnomalyResult {
    AlgebraElement Z, Z_tbar;
    bool dZ_closed = false;
    bool tbar_ok = false;
    bool v_ok = false;
    bool ok() const { return dZ_closed && tbar_ok && v_ok; }
};

// Z = Pf * (Wit*)^{-1};  Z_tbar = (iota/2) W^2 H Pf Wit^{-1} e^{W p1/2}
inline AnomalyResult euler_anomaly_data(const SigPtr& sig) {
    AlgebraElement Z = AlgebraElement::one(sig), Zt(sig);
    if (sig->roots > 0) {
        AlgebraElement pf = pfaffian(sig);
        Z = pf * inverse(witten_class(sig, WittenVariant::star));
        AlgebraElement y = pf * inverse(witten_class(sig, WittenVariant::plain)) *
                           exp_nilpotent(AlgebraElement::W(sig) * p1(sig) * rat(1, 2));
        Zt = AlgebraElement::W(sig, 2) * AlgebraElement::odd_gen(sig, "H") * y * IotaRat::monomial(rat(1, 2), 1);
    }
    AnomalyResult r{Z, Zt};
    r.dZ_closed = apply_d(Z).is_zero();
    r.tbar_ok = apply_dbar(Z) == apply_d(Zt);
    r.v_ok = apply_dv(Z).is_zero();
    return r;
}

inline AnomalyResult euler_anomaly_check(long rank, int dim, long N) {
    return euler_anomaly_data(euler_signature(rank, dim, N, true, true));
}

struct Manifest {
    int dimension = 0;
    std::map<std::string, Int> pontryagin_numbers;
};

struct GenusResult {
    QSeries genus;
    std::string note;
};

inline bool involves_p1(const std::string& key) {
    // keys look like "[2,1,1]"; a part equal to 1 means a p1 factor
    std::string inner = key.substr(1, key.size() - 2);
    size_t pos = 0;
    while (pos <= inner.size()) {
        size_t comma = inner.find(',', pos);
        std::string part = inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (part == "1") return true;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return false;
}

// Witten genus from Pontryagin numbers. "String" means all numbers with a p1
// factor vanish.
inline GenusResult witten_genus(const Manifest& man, long N) {
    int dim = man.dimension;
    if (dim < 0) throw InputError("negative dimension");
    if (dim % 4 != 0) return {QSeries(N), "dimension not divisible by 4: genus vanishes"};
    for (auto& [k, v] : man.pontryagin_numbers)
        if (v != 0 && involves_p1(k))
            throw InputError("manifest is not string: Pontryagin number " + k + " involves p1 and is nonzero");
    AlgebraSignature s;
    s.roots = std::max(1, dim / 4);
    s.dim = dim;
    s.N = N;
    SigPtr sig = make_signature(s);
    if (dim == 0) {
        auto it = man.pontryagin_numbers.find("[]");
        Int pts = it == man.pontryagin_numbers.end() ? Int(0) : it->second;
        return {QSeries::constant(IotaRat(Rat(pts)), N), "dimension 0: signed point count"};
    }
    AlgebraElement w = witten_class(sig, WittenVariant::plain);
    auto numbers = man.pontryagin_numbers;
    for (auto& lam : partitions(dim / 4))
        if (!numbers.count(partition_key(lam))) {
            if (involves_p1(partition_key(lam))) numbers[partition_key(lam)] = 0;
            else throw InputError("missing Pontryagin number " + partition_key(lam));
        }
    return {pair_with_pontryagin(w, numbers, dim), ""};
}

}  // namespace wf
