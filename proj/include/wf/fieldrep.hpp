#pragma once

#include "wf/charclasses.hpp"
#include "wf/superconn.hpp"

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace wf {

// ---------------------------------------------------------------------------
// Super-semigroup of supertranslations and its representation

// Grassmann ring on degree-0 odd parameters named prefix1 .. prefixK
inline SigPtr grassmann_signature(int count, const std::string& prefix = "t") {
    AlgebraSignature s;
    for (int i = 1; i <= count; ++i) s.odd.push_back(generator_grassmann(prefix + std::to_string(i)));
    return make_signature(s);
}

// (tau, taubar, eta) with tau = tau0 + tau_nil, taubar = tbar0 + tbar_nil
struct SuperPoint {
    Rat tau0, tbar0;
    AlgebraElement tau_nil, tbar_nil, eta;

    void validate() const {
        for (auto* a : {&tau_nil, &tbar_nil})
            if (!a->is_even() || !a->coeff(a->unit_monomial()).is_zero())
                throw DomainError("super point: nilpotent parts must be even with no constant term");
        if (!eta.is_odd()) throw DomainError("super point: eta must be odd");
    }
};

inline SuperPoint unit_point(const SigPtr& sig) {
    auto z = AlgebraElement::zero(sig);
    return {Rat(0), Rat(0), z, z, z};
}

// (tau, taubar, eta)(tau', taubar', eta') =(tau + tau', taubar + taubar' + eta eta', eta + eta')
inline SuperPoint super_point_multiply(const SuperPoint& a, const SuperPoint& b) {
    a.eta.check(b.eta);
    return {a.tau0 + b.tau0, a.tbar0 + b.tbar0, a.tau_nil + b.tau_nil, a.tbar_nil + b.tbar_nil + a.eta * b.eta,
            a.eta + b.eta};
}

// one level of the representation: an odd, self-adjoint, Clifford-linear A_k
struct RepBlock {
    int k = 0;
    CliffordModule module;
    Mat<Rat> A;
};

struct SemigroupRep {
    SigPtr grassmann;
    Rat ell = 1;
    std::vector<RepBlock> blocks;

    void validate() const {
        if (sgn(ell) <= 0) throw DomainError("semigroup representation: ell must be positive");
        for (auto& b : blocks) {
            b.module.validate();
            if (b.module.n != blocks.front().module.n) throw DomainError("blocks use different Clifford algebras");
            if (b.A != b.A.transpose()) throw DomainError("A_k must be self-adjoint");
            auto As = RatOperator::from_rational(b.module.parity, Rat(0), b.A);
            if (!As.is_zero() && As.total_parity() != 1) throw DomainError("A_k must be odd");
            if (!is_clifford_linear(b.module, As)) throw DomainError("A_k must be Clifford-linear");
        }
    }
};

// key (a, b) stands for e^{iota a} e^{-b}
using ExpKey = std::pair<Rat, Rat>;
using BlockValue = std::map<ExpKey, FormMatrix>;
using RepValue = std::vector<BlockValue>;

inline void prune(BlockValue& v) {
    for (auto it = v.begin(); it != v.end();)
        it = it->second.is_zero() ? v.erase(it) : std::next(it);
}

// rho(tau, taubar, eta) = (+)_k e^{iota k tau/ell} e^{-t A_k^2} (1 + eta A_k),  t = taubar - tau
inline RepValue evaluate(const SemigroupRep& rep, const SuperPoint& x) {
    x.validate();
    const SigPtr& sig = rep.grassmann;
    Rat t0 = x.tbar0 - x.tau0;
    AlgebraElement tnil = x.tbar_nil - x.tau_nil;
    RepValue out;
    for (auto& b : rep.blocks) {
        const auto& par = b.module.parity;
        Rat kl = Rat(b.k) / rep.ell;
        AlgebraElement phase = exp_series(x.tau_nil * IotaRat::monomial(kl, 1));
        FormMatrix A = embed_rational(par, sig, b.A);
        FormMatrix shift = FormMatrix::identity(par, AlgebraElement::zero(sig)) + x.eta * A;
        BlockValue v;
        for (auto& [mu, P] : rational_spectral_decomposition(b.A * b.A)) {
            AlgebraElement c = phase * exp_series(-(tnil * mu));
            FormMatrix m = c * (embed_rational(par, sig, P) * shift);
            ExpKey key{kl * x.tau0, t0 * mu};
            auto it = v.find(key);
            if (it == v.end()) v.emplace(key, m);
            else it->second += m;
        }
        prune(v);
        out.push_back(v);
    }
    return out;
}

inline RepValue multiply(const RepValue& a, const RepValue& b) {
    if (a.size() != b.size()) throw DomainError("representation values have different block counts");
    RepValue out(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        for (auto& [ka, ma] : a[i])
            for (auto& [kb, mb] : b[i]) {
                ExpKey k{ka.first + kb.first, ka.second + kb.second};
                FormMatrix m = ma * mb;
                auto it = out[i].find(k);
                if (it == out[i].end()) out[i].emplace(k, m);
                else it->second += m;
            }
        prune(out[i]);
    }
    return out;
}

inline SemigroupRep random_semigroup_rep(std::mt19937_64& rng, const SigPtr& grassmann) {
    std::uniform_int_distribution<int> nd(-3, 3), kd(1, 3), ld(1, 3);
    SemigroupRep rep;
    rep.grassmann = grassmann;
    rep.ell = Rat(ld(rng));
    int n = nd(rng), levels = kd(rng);
    for (int k = 0; k < levels; ++k) {
        DiracInstance inst = random_dirac_instance_of_rank(rng, n, 2);
        Mat<Rat> A(inst.D.rows(), inst.D.cols());
        for (size_t i = 0; i < A.rows(); ++i)
            for (size_t j = 0; j < A.cols(); ++j) A(i, j) = inst.D(i, j).re;
        rep.blocks.push_back({k, inst.module, A});
    }
    rep.validate();
    return rep;
}

// random super point; odd parts use the generators listed in odd_gens
inline SuperPoint random_super_point(std::mt19937_64& rng, const SigPtr& sig, const std::vector<int>& odd_gens) {
    std::uniform_int_distribution<int> cd(-3, 3), dd(1, 4);
    auto gen = [&](int i) { return AlgebraElement::odd_gen(sig, sig->odd[i].name); };
    SuperPoint x;
    x.tau0 = rat(cd(rng), dd(rng));
    x.tbar0 = rat(cd(rng), dd(rng));
    x.tau_nil = AlgebraElement::zero(sig);
    x.tbar_nil = AlgebraElement::zero(sig);
    x.eta = AlgebraElement::zero(sig);
    int m = (int)sig->odd.size();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            x.tau_nil += gen(i) * gen(j) * Rat(cd(rng));
            x.tbar_nil += gen(i) * gen(j) * Rat(cd(rng));
        }
    for (int i : odd_gens) x.eta += gen(i) * Rat(cd(rng));
    if (x.eta.is_zero()) x.eta = gen(odd_gens.front());
    return x;
}

// rho(g) rho(g') == rho(g g')
inline bool semigroup_law_check(const SemigroupRep& rep, const SuperPoint& g, const SuperPoint& h) {
    return multiply(evaluate(rep, g), evaluate(rep, h)) == evaluate(rep, super_point_multiply(g, h));
}

struct SemigroupTrial {
    bool law_holds = false;
    bool eta_product_nonzero = false;
};

inline SemigroupTrial semigroup_law_trial(std::mt19937_64& rng) {
    SigPtr sig = grassmann_signature(4, "t");
    SemigroupRep rep = random_semigroup_rep(rng, sig);
    std::uniform_int_distribution<int> split(0, 1);
    bool disjoint = split(rng);
    SuperPoint x = random_super_point(rng, sig, disjoint ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2, 3});
    SuperPoint y = random_super_point(rng, sig, disjoint ? std::vector<int>{2, 3} : std::vector<int>{0, 1, 2, 3});
    SemigroupTrial t;
    t.eta_product_nonzero = !(x.eta * y.eta).is_zero();
    t.law_holds = semigroup_law_check(rep, x, y);
    return t;
}

struct SemigroupReport {
    int trials = 0;
    int passed = 0;
    int eta_cases = 0;
    bool ok() const { return passed == trials; }
};

inline SemigroupReport semigroup_law_random(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed);
    SemigroupReport r;
    for (int i = 0; i < trials; ++i) {
        SemigroupTrial t = semigroup_law_trial(rng);
        ++r.trials;
        r.passed += t.law_holds;
        r.eta_cases += t.eta_product_nonzero;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Infinitesimal generators, as polynomials in s^{1/2} with s = ell/(2 pi)

using HalfPoly = std::map<int, RatOperator>;

inline HalfPoly poly_mul(const HalfPoly& a, const HalfPoly& b) {
    HalfPoly r;
    for (auto& [p, x] : a)
        for (auto& [q, y] : b) {
            RatOperator m = x * y;
            auto it = r.find(p + q);
            if (it == r.end()) r.emplace(p + q, m);
            else it->second += m;
        }
    for (auto it = r.begin(); it != r.end();)
        it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return r;
}

inline HalfPoly poly_sub(const HalfPoly& a, const HalfPoly& b) {
    HalfPoly r = a;
    for (auto& [p, x] : b) {
        auto it = r.find(p);
        if (it == r.end()) r.emplace(p, -x);
        else it->second -= x;
    }
    for (auto it = r.begin(); it != r.end();)
        it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return r;
}

struct LOperators {
    HalfPoly L0, Lbar0, Gbar0, K;
    bool gbar_squares_to_lbar = false;
    bool l_commute = false;
    bool difference_is_energy = false;
    bool ok() const { return gbar_squares_to_lbar && l_commute && difference_is_energy; }
};

// L0 = K + s A^2, Lbar0 = s A^2, Gbar0 = s^{1/2} A on the direct sum of the
// blocks, K the level operator.
inline LOperators l_operators(const SemigroupRep& rep) {
    rep.validate();
    std::vector<int> par;
    for (auto& b : rep.blocks) par.insert(par.end(), b.module.parity.begin(), b.module.parity.end());
    RatOperator K(par, Rat(0)), A(par, Rat(0));
    int off = 0;
    for (auto& b : rep.blocks) {
        for (int i = 0; i < b.module.dim(); ++i) {
            K.set(off + i, off + i, Rat(b.k));
            for (int j = 0; j < b.module.dim(); ++j) A.set(off + i, off + j, b.A(i, j));
        }
        off += b.module.dim();
    }
    LOperators L;
    L.K = {{0, K}};
    L.Gbar0 = {{1, A}};
    L.Lbar0 = {{2, A * A}};
    L.L0 = {{0, K}, {2, A * A}};
    L.gbar_squares_to_lbar = poly_sub(poly_mul(L.Gbar0, L.Gbar0), L.Lbar0).empty();
    L.l_commute = poly_sub(poly_mul(L.L0, L.Lbar0), poly_mul(L.Lbar0, L.L0)).empty();
    L.difference_is_energy = poly_sub(poly_sub(L.L0, L.Lbar0), L.K).empty();
    return L;
}

// ---------------------------------------------------------------------------
// Partition functions of representations over a base algebra

struct FieldRep {
    SigPtr base;
    int n = 0;  // Clifford algebra Cl_n of the fermions
    std::vector<std::pair<int, SuperConnection>> blocks;  // level k -> A_k
};

// i^{i_pow} sqrt(2)^{sqrt2_pow} (ell/2)^{ell_half_pow/2} * Z
struct PartitionTrace {
    AlgebraElement Z;
    int i_pow = 0;
    int sqrt2_pow = 0;
    int ell_half_pow = 0;
};

struct FermionNormalization {
    QSeries value;
    int ell_half_pow = 0;
};

// trace normalization of n free fermions: phi(q)^n, with (ell/2)^{n/2}
inline FermionNormalization fermion_trace_normalization(int n, long N) {
    if (n < 0) throw DomainError("fermion count must be non-negative");
    return {phi_q(N).pow(n), n};
}

// Z = phi^{-|n|} sum_k q^k Ch(A_k); the Chern forms must be free of e^{-mu}, mu != 0
inline PartitionTrace partition_trace(const FieldRep& rep) {
    long N = rep.base->N;
    int absn = rep.n < 0 ? -rep.n : rep.n;
    FermionNormalization norm = fermion_trace_normalization(absn, N);
    ChernForm total;
    bool first = true;
    for (auto& [k, A] : rep.blocks) {
        if (A.module.n != rep.n) throw DomainError("partition_trace: block uses a different Clifford algebra");
        if (k > N) continue;  // beyond the q-truncation
        ChernForm ch = chern_form(A);
        for (auto& [mu, c] : ch.terms)
            if (mu != 0) throw DomainError("partition_trace: Chern form has an e^{-" + to_string(mu) + "} term");
        for (auto& [mu, c] : ch.terms) c = c * QSeries::monomial(IotaRat(1), k, N);
        if (first) {
            total = ch;
            first = false;
        } else {
            total = total + ch;
        }
    }
    PartitionTrace t;
    t.Z = total.at(Rat(0), rep.base) * norm.value.inverse();
    t.i_pow = total.i_pow;
    t.sqrt2_pow = total.sqrt2_pow;
    // the fermion normalization contributes (ell/2)^{-n/2}, the ell-metric
    // Clifford trace (ell/2)^{n/2}
    t.ell_half_pow = -norm.ell_half_pow + absn;
    return t;
}

// ---------------------------------------------------------------------------
// Euler representation of a rank-2r oriented bundle

// base algebra: roots x_i, l_i (degree 1, d l_i = x_i), H (d H = p_1), W
inline SigPtr euler_rep_signature(int rank, int dim, long N) {
    if (rank <= 0 || rank % 2) throw DomainError("Euler representation needs positive even rank");
    AlgebraSignature s;
    s.roots = rank / 2;
    s.dim = dim;
    s.N = N;
    s.odd.push_back(generator_H(s.roots));
    for (int i = 0; i < s.roots; ++i)
        s.odd.push_back({"l" + std::to_string(i + 1), 1, {{root_monomial(s.roots, i), Rat(1)}}});
    s.include_W = true;
    s.w_bound = dim / 2 + 2;
    return make_signature(s);
}

struct FermionState {
    int parity = 0;
    int energy = 0;
    std::vector<int> weight;  // 2 * weight in each root
};

// Fock states of the modes psi_{m, +-i}, m = 1..N, with energy at most N
inline std::vector<FermionState> fock_states(int roots, int N) {
    std::vector<FermionState> out;
    FermionState cur{0, 0, std::vector<int>(roots, 0)};
    int modes = 2 * roots;
    std::function<void(int, int)> rec = [&](int m, int j) {
        if (m > N) {
            out.push_back(cur);
            return;
        }
        int nm = j + 1 == modes ? m + 1 : m, nj = j + 1 == modes ? 0 : j + 1;
        rec(nm, nj);
        if (cur.energy + m <= N) {
            int root = j / 2, w = (j % 2) ? -2 : 2;
            cur.energy += m;
            cur.parity ^= 1;
            cur.weight[root] += w;
            rec(nm, nj);
            cur.energy -= m;
            cur.parity ^= 1;
            cur.weight[root] -= w;
        }
    };
    rec(1, 0);
    return out;
}

struct SpinorWeights {
    CliffordModule module;
    std::vector<std::vector<int>> weight;  // 2 * weight per basis vector and root
};

// graded tensor product of one Cl_2 block per root on (P+, P+ f, P-, P- f)
inline SpinorWeights euler_spinor_module(int roots) {
    std::vector<int> par{0, 1, 0, 1};
    Mat<Rat> J(4, 4), X(4, 4);
    J(0, 1) = -1; J(1, 0) = 1; J(2, 3) = -1; J(3, 2) = 1;
    X(0, 1) = 1; X(1, 0) = 1; X(2, 3) = -1; X(3, 2) = -1;
    CliffordModule block{2, par, {{0, from_dense(par, J)}, {1, from_dense(par, X)}}};
    block.validate();
    SpinorWeights s{CliffordModule{0, {0}, {}}, {std::vector<int>(roots, 0)}};
    const int bw[4] = {1, 1, -1, -1};
    for (int i = 0; i < roots; ++i) {
        s.module = graded_tensor(s.module, block);
        std::vector<std::vector<int>> w;
        for (auto& prev : s.weight)
            for (int b = 0; b < 4; ++b) {
                auto v = prev;
                v[i] = bw[b];
                w.push_back(v);
            }
        s.weight = w;
    }
    return s;
}

// Blocks A_K = d + omega_K - (W/2) H on S (x) Lambda_K, with omega_K acting on
// a state of weight mu by -sum_i mu_i l_i.
inline FieldRep build_euler_rep(int rank, int dim, long N) {
    SigPtr sig = euler_rep_signature(rank, dim, N);
    int r = rank / 2;
    SpinorWeights S = euler_spinor_module(r);
    std::map<int, std::vector<FermionState>> levels;
    for (auto& st : fock_states(r, (int)N)) levels[st.energy].push_back(st);
    FieldRep rep{sig, rank, {}};
    AlgebraElement Hterm = AlgebraElement::W(sig) * AlgebraElement::odd_gen(sig, "H") * rat(-1, 2);
    std::vector<AlgebraElement> l;
    for (int i = 0; i < r; ++i) l.push_back(AlgebraElement::odd_gen(sig, "l" + std::to_string(i + 1)));
    for (auto& [K, states] : levels) {
        std::stable_sort(states.begin(), states.end(), [](auto& a, auto& b) { return a.parity < b.parity; });
        std::vector<int> lpar;
        for (auto& st : states) lpar.push_back(st.parity);
        CliffordModule M = tensor_with_space(S.module, lpar);
        FormMatrix omega = form_matrix(M.parity, sig), h = form_matrix(M.parity, sig);
        std::map<std::vector<int>, AlgebraElement> cache;
        int nl = (int)states.size();
        for (int s = 0; s < S.module.dim(); ++s)
            for (int a = 0; a < nl; ++a) {
                std::vector<int> mu(r);
                for (int i = 0; i < r; ++i) mu[i] = S.weight[s][i] + states[a].weight[i];
                auto it = cache.find(mu);
                if (it == cache.end()) {
                    AlgebraElement w = AlgebraElement::zero(sig);
                    for (int i = 0; i < r; ++i) w -= l[i] * rat(mu[i], 2);
                    it = cache.emplace(mu, w).first;
                }
                omega.set(s * nl + a, s * nl + a, it->second);
                h.set(s * nl + a, s * nl + a, Hterm);
            }
        SuperConnection A{sig, M, {}, std::nullopt};
        A.set(1, omega);
        A.set(3, h);
        rep.blocks.emplace_back(K, A);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Field-theory data checks

struct EftData {
    AlgebraElement Z, Z_v, Z_tbar;
    int n = 0;
};

struct EftReport {
    bool closed = false, tbar_ok = false, v_ok = false;
    std::string closed_cert, tbar_cert, v_cert;
    bool ok() const { return closed && tbar_ok && v_ok; }
};

// dZ = 0,  d/dtaubar Z = d Z_tbar,  d/dv Z = d Z_v
inline EftReport eft_verify(const EftData& e) {
    e.Z.check(e.Z_v);
    e.Z.check(e.Z_tbar);
    if (e.n < 0) throw DomainError("eft_verify: negative fermion count");
    EftReport r;
    auto zero = AlgebraElement::zero(e.Z.signature());
    auto d1 = first_difference(apply_d(e.Z), zero);
    auto d2 = first_difference(apply_dbar(e.Z), apply_d(e.Z_tbar));
    auto d3 = first_difference(apply_dv(e.Z), apply_d(e.Z_v));
    r.closed = !d1;
    r.tbar_ok = !d2;
    r.v_ok = !d3;
    r.closed_cert = d1.value_or("");
    r.tbar_cert = d2.value_or("");
    r.v_cert = d3.value_or("");
    return r;
}

struct EulerPipelineResult {
    PartitionTrace raw;
    AlgebraElement Z;         // raw trace after the Pfaffian trivialization phase
    AlgebraElement expected;  // Pf * (Wit*)^{-1}
    bool matches = false;
    EftReport eft;
};

// Partition trace of the Euler representation, compared with Pf (Wit*)^{-1}
// and checked as field-theory data with Z_tbar = (iota/2) W^2 H Pf Wit^{-1} e^{W p1/2}.
inline EulerPipelineResult euler_pipeline(int rank, int dim, long N) {
    FieldRep rep = build_euler_rep(rank, dim, N);
    int r = rank / 2;
    EulerPipelineResult out;
    out.raw = partition_trace(rep);
    int e = out.raw.i_pow + r;  // the trivialization contributes i^r
    if (e % 2) throw DomainError("Euler pipeline: partition trace has a non-real phase");
    out.Z = (e % 4 == 2) ? -out.raw.Z : out.raw.Z;
    if (out.raw.sqrt2_pow != 0) throw DomainError("Euler pipeline: irrational normalization");
    AnomalyResult an = euler_anomaly_data(rep.base);
    out.expected = an.Z;
    out.matches = out.Z == out.expected;
    out.eft = eft_verify({out.Z, AlgebraElement::zero(rep.base), an.Z_tbar, rank});
    return out;
}

}  // namespace wf
