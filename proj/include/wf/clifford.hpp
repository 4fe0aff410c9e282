#pragma once

#include "wf/linalg.hpp"
#include "wf/supermatrix.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace wf {

// Complex Clifford algebra of signed rank n: n > 0 has generators f_j with
// f_j^2 = -1, n < 0 has generators e_j with e_j^2 = +1.
struct CliffordAlgebra {
    int n = 0;

    int rank() const { return n < 0 ? -n : n; }
    int generator_square() const { return n > 0 ? -1 : 1; }
    bool operator==(const CliffordAlgebra&) const = default;
};

// sum_A c_A g_A over sorted generator subsets A, times sqrt(2)^half2 with
// half2 in {0, 1}.
class CliffordElement {
public:
    using Mask = std::uint32_t;

    CliffordElement() = default;
    explicit CliffordElement(CliffordAlgebra alg) : alg_(alg) {
        if (alg.rank() > 30) throw DomainError("Clifford rank above 30 is not supported");
    }

    static CliffordElement scalar(CliffordAlgebra alg, const GRat& c) {
        CliffordElement a(alg);
        a.add(0, c);
        return a;
    }
    static CliffordElement generator(CliffordAlgebra alg, int j) {
        if (j < 1 || j > alg.rank()) throw DomainError("Clifford generator index out of range");
        CliffordElement a(alg);
        a.add(Mask(1) << (j - 1), GRat(1));
        return a;
    }
    static CliffordElement monomial(CliffordAlgebra alg, Mask m, const GRat& c = GRat(1)) {
        CliffordElement a(alg);
        a.add(m, c);
        return a;
    }

    const CliffordAlgebra& algebra() const { return alg_; }
    const std::map<Mask, GRat>& terms() const { return t_; }
    int half2() const { return half2_; }
    bool is_zero() const { return t_.empty(); }

    GRat coeff(Mask m) const {
        auto it = t_.find(m);
        return it == t_.end() ? GRat() : it->second;
    }

    // 0 even, 1 odd, -1 mixed
    int parity() const {
        int p = -2;
        for (auto& [m, c] : t_) {
            int q = std::popcount(m) & 1;
            if (p == -2) p = q;
            else if (p != q) return -1;
        }
        return p == -2 ? 0 : p;
    }

    void add(Mask m, const GRat& c) {
        if (wf::is_zero(c)) return;
        auto it = t_.find(m);
        if (it == t_.end()) t_.emplace(m, c);
        else {
            it->second += c;
            if (wf::is_zero(it->second)) t_.erase(it);
        }
    }

    friend CliffordElement operator+(const CliffordElement& a, const CliffordElement& b) {
        return combine(a, b, GRat(1));
    }
    friend CliffordElement operator-(const CliffordElement& a, const CliffordElement& b) {
        return combine(a, b, GRat(-1));
    }
    friend CliffordElement operator*(const CliffordElement& a, const GRat& s) {
        CliffordElement r(a.alg_);
        r.half2_ = a.half2_;
        for (auto& [m, c] : a.t_) r.add(m, c * s);
        return r;
    }
    friend CliffordElement operator*(const GRat& s, const CliffordElement& a) { return a * s; }

    friend CliffordElement operator*(const CliffordElement& a, const CliffordElement& b) {
        if (!(a.alg_ == b.alg_)) throw DomainError("Clifford product: algebra mismatch");
        CliffordElement r(a.alg_);
        int h = a.half2_ + b.half2_;
        Rat extra(1);
        if (h == 2) {
            h = 0;
            extra = 2;
        }
        r.half2_ = h;
        for (auto& [ma, ca] : a.t_)
            for (auto& [mb, cb] : b.t_) {
                int s = monomial_sign(ma, mb, a.alg_.generator_square());
                GRat c = ca * cb * extra;
                r.add(ma ^ mb, s > 0 ? c : -c);
            }
        return r;
    }

    friend bool operator==(const CliffordElement& a, const CliffordElement& b) {
        if (!(a.alg_ == b.alg_)) return false;
        if (a.is_zero() && b.is_zero()) return true;
        return a.half2_ == b.half2_ && a.t_ == b.t_;
    }
    friend bool operator!=(const CliffordElement& a, const CliffordElement& b) { return !(a == b); }

    // g_A g_B = sign * g_{A xor B}
    static int monomial_sign(Mask a, Mask b, int square) {
        int swaps = 0;
        Mask bb = b;
        while (bb) {
            int j = std::countr_zero(bb);
            bb &= bb - 1;
            swaps += std::popcount(a >> (j + 1));
        }
        int s = (swaps & 1) ? -1 : 1;
        if (square < 0 && (std::popcount(a & b) & 1)) s = -s;
        return s;
    }

    CliffordElement with_half2(int h) const {
        CliffordElement r = *this;
        r.half2_ = h;
        return r;
    }

private:
    static CliffordElement combine(const CliffordElement& a, const CliffordElement& b, const GRat& sign) {
        if (!(a.alg_ == b.alg_)) throw DomainError("Clifford sum: algebra mismatch");
        if (a.is_zero()) return b * sign;
        if (b.is_zero()) return a;
        if (a.half2_ != b.half2_) throw DomainError("Clifford sum: mixes rational and sqrt(2) parts");
        CliffordElement r = a;
        for (auto& [m, c] : b.t_) r.add(m, c * sign);
        return r;
    }

    CliffordAlgebra alg_;
    std::map<Mask, GRat> t_;
    int half2_ = 0;
};

inline CliffordElement clifford_multiply(const CliffordElement& a, const CliffordElement& b) { return a * b; }

// Gamma_n = 2^{-|n|/2} g_1 ... g_|n|
inline CliffordElement gamma_element(CliffordAlgebra alg) {
    int r = alg.rank();
    CliffordElement::Mask all = r == 0 ? 0 : ((CliffordElement::Mask(1) << r) - 1);
    Rat c = inverse(pow(Rat(2), (unsigned)((r + 1) / 2)));
    // 2^{-r/2} = 2^{-(r+1)/2} * sqrt(2) for odd r
    return CliffordElement::monomial(alg, all, GRat(c)).with_half2(r % 2);
}

enum class Involution { star, superstar, alpha };

// star: antilinear anti-automorphism with f_j -> -f_j, e_j -> e_j.
// superstar: antilinear, f_j -> -i f_j, e_j -> i e_j, graded-opposite order.
// alpha: algebra map Cl_n -> Cl_{-n}, generator v -> -i v (n > 0) or i v (n < 0).
inline CliffordElement involution(const CliffordElement& a, Involution which) {
    const auto& alg = a.algebra();
    CliffordAlgebra target = which == Involution::alpha ? CliffordAlgebra{-alg.n} : alg;
    CliffordElement r(target);
    for (auto& [m, c] : a.terms()) {
        int k = std::popcount(m);
        GRat factor(1);
        GRat coeff = c;
        switch (which) {
            case Involution::star: {
                // reversal gives (-1)^{k(k-1)/2}; each f_j contributes -1
                int s = ((k * (k - 1) / 2) & 1) ? -1 : 1;
                if (alg.n > 0 && (k & 1)) s = -s;
                factor = GRat(s);
                coeff = conj(c);
                break;
            }
            case Involution::superstar:
                // graded reversal sign squares away, leaving (-i)^k or i^k
                factor = GRat::i_pow(alg.n > 0 ? -k : k);
                coeff = conj(c);
                break;
            case Involution::alpha:
                factor = GRat::i_pow(alg.n > 0 ? -k : k);
                break;
        }
        r.add(m, coeff * factor);
    }
    if (a.half2()) r = r.with_half2(1);
    return r;
}

using RatOperator = SuperMatrix<Rat>;

// i^phase * m with m a sparse rational matrix
struct CliffordGenerator {
    int phase = 0;
    RatOperator m;
};

inline RatOperator sparse_kron(const RatOperator& a, const RatOperator& b, const std::vector<int>& parity) {
    RatOperator r(parity, Rat(0));
    int nb = b.size();
    for (auto& [ij, x] : a.entries())
        for (auto& [kl, y] : b.entries()) r.set(ij.first * nb + kl.first, ij.second * nb + kl.second, x * y);
    return r;
}

inline std::vector<int> tensor_parity(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> p;
    p.reserve(a.size() * b.size());
    for (int x : a)
        for (int y : b) p.push_back((x + y) & 1);
    return p;
}

inline RatOperator grading_operator(const std::vector<int>& parity) {
    RatOperator e(parity, Rat(0));
    for (int i = 0; i < (int)parity.size(); ++i) e.set(i, i, Rat(parity[i] ? -1 : 1));
    return e;
}

inline RatOperator from_dense(const std::vector<int>& parity, const Mat<Rat>& a) {
    return RatOperator::from_rational(parity, Rat(0), a);
}

// Z/2-graded module over Cl_n given by generator matrices i^{phase} * M_j.
struct CliffordModule {
    int n = 0;
    std::vector<int> parity;
    std::vector<CliffordGenerator> gens;

    int dim() const { return (int)parity.size(); }

    void validate() const {
        CliffordAlgebra alg{n};
        if ((int)gens.size() != alg.rank()) throw DomainError("Clifford module: wrong number of generators");
        for (auto& g : gens) {
            if (g.m.parity() != parity) throw DomainError("Clifford module: generator shape mismatch");
            for (auto& [ij, v] : g.m.entries())
                if (parity[ij.first] == parity[ij.second]) throw DomainError("Clifford module: generators must be odd");
        }
        RatOperator I = RatOperator::identity(parity, Rat(0));
        for (size_t j = 0; j < gens.size(); ++j)
            for (size_t k = j; k < gens.size(); ++k) {
                RatOperator ac = gens[j].m * gens[k].m + gens[k].m * gens[j].m;
                if (j == k) {
                    // (i^p M)^2 = (-1)^p M^2 must equal the generator square
                    int s = alg.generator_square() * ((gens[j].phase & 1) ? -1 : 1);
                    if (ac != I * Rat(2 * s)) throw DomainError("Clifford module: wrong generator square");
                } else if (!ac.is_zero()) {
                    throw DomainError("Clifford module: generators do not anticommute");
                }
            }
    }

    RatOperator grading() const { return grading_operator(parity); }
};

// Cl_n acting on itself by left multiplication; basis = generator subsets.
inline CliffordModule regular_module(int n) {
    CliffordAlgebra alg{n};
    int r = alg.rank();
    size_t d = size_t(1) << r;
    CliffordModule M{n, std::vector<int>(d), {}};
    for (size_t a = 0; a < d; ++a) M.parity[a] = std::popcount((unsigned)a) & 1;
    for (int j = 0; j < r; ++j) {
        RatOperator g(M.parity, Rat(0));
        CliffordElement::Mask gj = CliffordElement::Mask(1) << j;
        for (size_t a = 0; a < d; ++a) {
            int s = CliffordElement::monomial_sign(gj, (CliffordElement::Mask)a, alg.generator_square());
            g.set((int)(a ^ gj), (int)a, Rat(s));
        }
        M.gens.push_back({0, g});
    }
    M.validate();
    return M;
}

// graded tensor product: generators g (x) 1 and eps (x) g'
inline CliffordModule graded_tensor(const CliffordModule& a, const CliffordModule& b) {
    if ((a.n > 0 && b.n < 0) || (a.n < 0 && b.n > 0)) throw DomainError("graded_tensor: mixed generator signs");
    CliffordModule M;
    M.n = a.n + b.n;
    M.parity = tensor_parity(a.parity, b.parity);
    RatOperator Ib = RatOperator::identity(b.parity, Rat(0));
    RatOperator ea = a.grading();
    for (auto& g : a.gens) M.gens.push_back({g.phase, sparse_kron(g.m, Ib, M.parity)});
    for (auto& g : b.gens) M.gens.push_back({g.phase, sparse_kron(ea, g.m, M.parity)});
    M.validate();
    return M;
}

// module M (x) V for a graded vector space V without Clifford action
inline CliffordModule tensor_with_space(const CliffordModule& a, const std::vector<int>& space_parity) {
    CliffordModule M;
    M.n = a.n;
    M.parity = tensor_parity(a.parity, space_parity);
    RatOperator Iv = RatOperator::identity(space_parity, Rat(0));
    for (auto& g : a.gens) M.gens.push_back({g.phase, sparse_kron(g.m, Iv, M.parity)});
    return M;
}

inline std::vector<int> block_parity(int p, int q) {
    std::vector<int> v(p, 0);
    v.insert(v.end(), q, 1);
    return v;
}

inline CliffordModule tensor_with_space(const CliffordModule& a, int p, int q) {
    CliffordModule M = tensor_with_space(a, block_parity(p, q));
    M.validate();
    return M;
}

// Minimal graded module: one rank-2 block per pair of generators (plus the
// regular Cl_{+-1} module for odd rank); dimension 2^{ceil(|n|/2)}.
inline CliffordModule spinor_module(int n) {
    CliffordModule M{0, {0}, {}};
    int r = n < 0 ? -n : n;
    int sgn = n < 0 ? -1 : 1;
    std::vector<int> par{0, 1};
    for (int p = 0; p + 2 <= r; p += 2) {
        Mat<Rat> J(2, 2), X(2, 2);
        if (sgn > 0) {
            J(0, 1) = -1; J(1, 0) = 1;  // squares to -1
            X(0, 1) = 1; X(1, 0) = 1;   // i * X squares to -1
        } else {
            J(0, 1) = 1; J(1, 0) = 1;   // squares to +1
            X(0, 1) = -1; X(1, 0) = 1;  // i * X squares to +1
        }
        CliffordModule B{2 * sgn, par, {{0, from_dense(par, J)}, {1, from_dense(par, X)}}};
        B.validate();
        M = graded_tensor(M, B);
    }
    if (r % 2) M = graded_tensor(M, regular_module(sgn));
    M.validate();
    return M;
}

// Clifford supertrace sTr(Gamma_n T) = i^{i_pow} * sqrt(2)^{sqrt2_pow} * value
template <class R>
struct CliffordTrace {
    R value;
    int i_pow = 0;
    int sqrt2_pow = 0;
};

template <class R>
SuperMatrix<R> embed_operator(const RatOperator& m, const R& zero) {
    SuperMatrix<R> r(m.parity(), zero);
    for (auto& [ij, v] : m.entries()) r.set(ij.first, ij.second, embed_rat(zero, v));
    return r;
}

template <class R>
SuperMatrix<R> module_generator(const CliffordModule& M, int j, const R& zero) {
    return embed_operator(M.gens[j].m, zero);
}

// T is Cl_n-linear when T c_j = (-1)^{|T|} c_j T for every generator.
template <class R>
bool is_clifford_linear(const CliffordModule& M, const SuperMatrix<R>& T) {
    if (T.parity() != M.parity) return false;
    if (T.total_parity() < 0) return false;
    for (int j = 0; j < (int)M.gens.size(); ++j)
        if (!supercommutator(T, module_generator(M, j, T.zero())).is_zero()) return false;
    return true;
}

// rational part of c_1 ... c_r and its total i-phase
inline std::pair<RatOperator, int> gamma_operator(const CliffordModule& M) {
    RatOperator prod = RatOperator::identity(M.parity, Rat(0));
    int phase = 0;
    for (auto& g : M.gens) {
        prod = prod * g.m;
        phase += g.phase;
    }
    return {prod, ((phase % 4) + 4) % 4};
}

// caller guarantees Clifford-linearity of T
template <class R>
CliffordTrace<R> clifford_supertrace_unchecked(const CliffordModule& M, const SuperMatrix<R>& T) {
    auto [prod, phase] = gamma_operator(M);
    return {(embed_operator(prod, T.zero()) * T).supertrace(), phase, -(int)M.gens.size()};
}

template <class R>
CliffordTrace<R> clifford_supertrace(const CliffordModule& M, const SuperMatrix<R>& T) {
    if (!is_clifford_linear(M, T)) throw DomainError("clifford_supertrace: operator is not Clifford-linear");
    return clifford_supertrace_unchecked(M, T);
}

// Collapse i and sqrt(2) powers into a Gaussian rational (sqrt2_pow must be even).
inline GRat collapse(const CliffordTrace<GRat>& t) {
    if (wf::is_zero(t.value)) return GRat();
    if (t.sqrt2_pow % 2) throw DomainError("Clifford supertrace has an irrational sqrt(2) factor");
    Rat s = t.sqrt2_pow >= 0 ? pow(Rat(2), (unsigned)(t.sqrt2_pow / 2)) : inverse(pow(Rat(2), (unsigned)(-t.sqrt2_pow / 2)));
    return t.value * GRat::i_pow(t.i_pow) * s;
}

inline SuperMatrix<GRat> to_super(const CliffordModule& M, const Mat<GRat>& a) {
    SuperMatrix<GRat> m(M.parity, GRat());
    for (int i = 0; i < M.dim(); ++i)
        for (int j = 0; j < M.dim(); ++j)
            if (!wf::is_zero(a(i, j))) m.set(i, j, a(i, j));
    return m;
}

inline Mat<GRat> to_dense(const SuperMatrix<GRat>& m) {
    Mat<GRat> a(m.size(), m.size());
    for (auto& [ij, v] : m.entries()) a(ij.first, ij.second) = v;
    return a;
}

// Clifford superdimension of ker D, via the orthogonal kernel projector
inline CliffordTrace<GRat> clifford_superdim(const CliffordModule& M, const Mat<GRat>& D) {
    SuperMatrix<GRat> Ds = to_super(M, D);
    if (Ds.total_parity() != 1 && !Ds.is_zero()) throw DomainError("clifford_superdim: D must be odd");
    if (!is_clifford_linear(M, Ds)) throw DomainError("clifford_superdim: D is not Clifford-linear");
    Mat<GRat> P = orthogonal_projector(kernel_basis(D));
    return clifford_supertrace(M, to_super(M, P));
}

struct McKeanSingerReport {
    std::map<Rat, GRat> heat_trace;  // mu -> coefficient of e^{-t mu}
    GRat superdim;
    bool constant = false;
    bool equals_superdim = false;
    bool ok() const { return constant && equals_superdim; }
};

// sTr_Cl(e^{-t D^2}) = sum_mu e^{-t mu} sTr_Cl(P_mu) symbolically in t
inline McKeanSingerReport mckean_singer_check(const CliffordModule& M, const Mat<GRat>& D) {
    if (D != D.adjoint()) throw DomainError("mckean_singer_check: D must be self-adjoint");
    McKeanSingerReport rep;
    rep.superdim = collapse(clifford_superdim(M, D));
    for (auto& [mu, P] : rational_spectral_decomposition(D * D)) {
        GRat c = collapse(clifford_supertrace(M, to_super(M, P)));
        if (!wf::is_zero(c)) rep.heat_trace[mu] = c;
    }
    rep.constant = true;
    for (auto& [mu, c] : rep.heat_trace)
        if (mu != 0) rep.constant = false;
    GRat c0 = rep.heat_trace.count(Rat(0)) ? rep.heat_trace.at(Rat(0)) : GRat();
    rep.equals_superdim = c0 == rep.superdim;
    return rep;
}

// Rational orthogonal matrix (I - K)(I + K)^{-1} from a random skew K.
inline Mat<Rat> random_orthogonal(size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(-2, 2);
    Mat<Rat> K(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            Rat v = rat(dist(rng), 2);
            K(i, j) = v;
            K(j, i) = -v;
        }
    Mat<Rat> I = Mat<Rat>::identity(n);
    return (I - K) * inverse(I + K);
}

struct DiracInstance {
    CliffordModule module;
    Mat<GRat> D;
};

// Module S_n (x) V with V = (p|q) and D = eps (x) [[0, B^T], [B, 0]],
// B = U Sigma O with rational orthogonal U, O and small integer singular values.
inline DiracInstance random_dirac_instance_of_rank(std::mt19937_64& rng, int n, int max_space = 3) {
    std::uniform_int_distribution<int> pd(1, max_space), sd(0, 3);
    int p = pd(rng), q = pd(rng);
    CliffordModule S = spinor_module(n);
    Mat<Rat> U = random_orthogonal(q, rng), O = random_orthogonal(p, rng);
    Mat<Rat> Sig(q, p);
    for (int i = 0; i < std::min(p, q); ++i) Sig(i, i) = sd(rng);
    Mat<Rat> B = U * Sig * O;
    Mat<Rat> DV(p + q, p + q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < p; ++j) {
            DV(p + i, j) = B(i, j);
            DV(j, p + i) = B(i, j);
        }
    CliffordModule M = tensor_with_space(S, p, q);
    RatOperator D = sparse_kron(S.grading(), from_dense(block_parity(p, q), DV), M.parity);
    Mat<GRat> Dd(M.dim(), M.dim());
    for (auto& [ij, v] : D.entries()) Dd(ij.first, ij.second) = GRat(v);
    return {M, Dd};
}

inline DiracInstance random_dirac_instance(std::mt19937_64& rng, int max_rank = 4, int max_space = 3) {
    std::uniform_int_distribution<int> nd(-max_rank, max_rank);
    return random_dirac_instance_of_rank(rng, nd(rng), max_space);
}

}  // namespace wf
