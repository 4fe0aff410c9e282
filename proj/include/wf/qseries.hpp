#pragma once

#include "wf/series.hpp"

#include <string>
#include <vector>

namespace wf {

// B_m for even m >= 2 (B_2 = 1/6), from sum_{k=0}^{m} C(m+1,k) B_k = 0.
inline Rat bernoulli(long m) {
    if (m < 2 || m % 2 != 0) throw DomainError("bernoulli: need even m >= 2, got " + std::to_string(m));
    std::vector<Rat> B(m + 1);
    B[0] = 1;
    for (long n = 1; n <= m; ++n) {
        Rat s = 0;
        for (long k = 0; k < n; ++k) s += binomial(n + 1, k) * B[k];
        B[n] = -s / (n + 1);
    }
    return B[m];
}

// sum of d^k over divisors d of n
inline Int divisor_sigma(long k, long n) {
    Int s = 0;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        Int t;
        mpz_ui_pow_ui(t.get_mpz_t(), d, k);
        s += t;
        long e = n / d;
        if (e != d) {
            mpz_ui_pow_ui(t.get_mpz_t(), e, k);
            s += t;
        }
    }
    return s;
}

inline void check_weight(long k2) {
    if (k2 < 2 || k2 % 2 != 0) throw DomainError("Eisenstein weight must be even and >= 2, got " + std::to_string(k2));
}

// normalized E_{2k} = 1 - (4k / B_{2k}) sum sigma_{2k-1}(n) q^n
inline RSeries eisenstein_q(long k2, long N) {
    check_weight(k2);
    if (N < 0) throw DomainError("negative truncation");
    Rat f = -Rat(2 * k2) / bernoulli(k2);
    std::vector<Rat> c(N + 1);
    c[0] = 1;
    for (long n = 1; n <= N; ++n) c[n] = f * Rat(divisor_sigma(k2 - 1, n));
    return RSeries(0, std::move(c), N);
}

// D_{2k} = -(B_{2k}/(2k)!) E_{2k}: the lattice-sum series divided by (2 pi i)^{2k}
inline RSeries eisenstein_geometric(long k2, long N) {
    Rat f = -bernoulli(k2) / factorial(k2);
    return scale(eisenstein_q(k2, N), f);
}

// prod_{m>0} (1 - q^m) through q^N
inline RSeries phi_product(long N) {
    if (N < 0) throw DomainError("negative truncation");
    std::vector<Rat> c(N + 1);
    c[0] = 1;
    for (long m = 1; m <= N; ++m)
        for (long n = N; n >= m; --n) c[n] -= c[n - m];
    return RSeries(0, std::move(c), N);
}

// q^a * body with body of valuation 0
struct FracPowerSeries {
    Rat prefactor_exponent;
    RSeries body;

    FracPowerSeries pow(long e) const { return {prefactor_exponent * e, body.pow(e)}; }

    // as an honest Laurent series when the exponent is an integer
    RSeries as_series() const {
        if (!is_integer(prefactor_exponent)) throw DomainError("fractional q-power has no Laurent expansion");
        return body.shifted(prefactor_exponent.get_num().get_si());
    }
};

inline FracPowerSeries dedekind_eta(long N) { return {rat(1, 24), phi_product(N)}; }

inline std::string to_text(const FracPowerSeries& f) {
    std::string pre;
    if (f.prefactor_exponent == 1) pre = "q";
    else if (f.prefactor_exponent != 0) pre = "q^{" + to_string(f.prefactor_exponent) + "}";
    std::string body = to_text(f.body);
    if (pre.empty()) return body;
    return pre + "(" + body + ")";
}

// Truncated series in q and an even auxiliary variable z; c[n][m] is the
// coefficient of q^n z^m for 0 <= n <= Nq, 0 <= m <= Mz.
template <class C = Rat>
class BiSeries {
public:
    BiSeries(long Nq, long Mz) : Nq_(Nq), Mz_(Mz), c_(Nq + 1, std::vector<C>(Mz + 1)) {
        if (Nq < 0 || Mz < 0) throw DomainError("BiSeries: negative truncation");
    }

    static BiSeries one(long Nq, long Mz) {
        BiSeries r(Nq, Mz);
        r.c_[0][0] = C(1);
        return r;
    }
    // series in z only (coefficients for z^0..)
    static BiSeries from_z(const std::vector<C>& zc, long Nq, long Mz) {
        BiSeries r(Nq, Mz);
        for (long m = 0; m <= Mz && m < (long)zc.size(); ++m) r.c_[0][m] = zc[m];
        return r;
    }
    // f(q) * z^m
    static BiSeries from_q(const Series<C>& f, long m, long Nq, long Mz) {
        BiSeries r(Nq, Mz);
        if (m > Mz) return r;
        if (f.valuation() < 0) throw DomainError("BiSeries holds only power series in q");
        if (f.trunc() < Nq) throw PrecisionError("q-series truncation below BiSeries window");
        for (long n = 0; n <= Nq; ++n) r.c_[n][m] = f[n];
        return r;
    }

    long q_order() const { return Nq_; }
    long z_order() const { return Mz_; }
    const C& at(long n, long m) const { return c_.at(n).at(m); }
    C& at(long n, long m) { return c_.at(n).at(m); }

    Series<C> z_slice(long m) const {
        std::vector<C> col(Nq_ + 1);
        for (long n = 0; n <= Nq_; ++n) col[n] = c_[n][m];
        return Series<C>(0, col, Nq_);
    }
    std::vector<C> q_slice(long n) const { return c_.at(n); }

    friend BiSeries operator+(const BiSeries& a, const BiSeries& b) {
        check(a, b);
        BiSeries r = a;
        for (long n = 0; n <= a.Nq_; ++n)
            for (long m = 0; m <= a.Mz_; ++m) r.c_[n][m] += b.c_[n][m];
        return r;
    }
    friend BiSeries operator-(const BiSeries& a, const BiSeries& b) {
        check(a, b);
        BiSeries r = a;
        for (long n = 0; n <= a.Nq_; ++n)
            for (long m = 0; m <= a.Mz_; ++m) r.c_[n][m] -= b.c_[n][m];
        return r;
    }
    friend BiSeries operator*(const BiSeries& a, const BiSeries& b) {
        check(a, b);
        BiSeries r(a.Nq_, a.Mz_);
        for (long n1 = 0; n1 <= a.Nq_; ++n1)
            for (long m1 = 0; m1 <= a.Mz_; ++m1) {
                const C& x = a.c_[n1][m1];
                if (wf::is_zero(x)) continue;
                for (long n2 = 0; n1 + n2 <= a.Nq_; ++n2)
                    for (long m2 = 0; m1 + m2 <= a.Mz_; ++m2) {
                        const C& y = b.c_[n2][m2];
                        if (!wf::is_zero(y)) r.c_[n1 + n2][m1 + m2] += x * y;
                    }
            }
        return r;
    }
    friend BiSeries operator*(const BiSeries& a, const C& s) {
        BiSeries r = a;
        for (auto& row : r.c_)
            for (auto& x : row) x = x * s;
        return r;
    }

    // exp of a series with vanishing z^0 part
    BiSeries exp() const {
        for (long n = 0; n <= Nq_; ++n)
            if (!wf::is_zero(c_[n][0])) throw DomainError("BiSeries exp: z^0 part must vanish");
        BiSeries r = one(Nq_, Mz_), term = one(Nq_, Mz_);
        for (long j = 1; j <= Mz_; ++j) {
            term = term * (*this) * C(rat(1, j));
            r = r + term;
        }
        return r;
    }

    friend bool operator==(const BiSeries& a, const BiSeries& b) {
        return a.Nq_ == b.Nq_ && a.Mz_ == b.Mz_ && a.c_ == b.c_;
    }

private:
    static void check(const BiSeries& a, const BiSeries& b) {
        if (a.Nq_ != b.Nq_ || a.Mz_ != b.Mz_) throw DomainError("BiSeries truncation mismatch");
    }
    long Nq_, Mz_;
    std::vector<std::vector<C>> c_;
};

enum class SigmaMode { product, exponential };

// exp(+-z) truncated at z^Mz
inline std::vector<Rat> exp_z(long Mz, int sign) {
    std::vector<Rat> c(Mz + 1);
    for (long m = 0; m <= Mz; ++m) c[m] = Rat(sign < 0 && m % 2 ? -1 : 1) / factorial(m);
    return c;
}

// The Weierstrass-type function
//   product:     (e^{z/2} - e^{-z/2})/z * prod_k (1-q^k e^z)(1-q^k e^{-z})/(1-q^k)^2
//   exponential: exp(-sum_{k>=1} D_{2k}(q) z^{2k}/(2k))
inline BiSeries<Rat> weierstrass_sigma(SigmaMode mode, long Nq, long Mz) {
    using B = BiSeries<Rat>;
    if (mode == SigmaMode::product) {
        std::vector<Rat> pre(Mz + 1);
        for (long j = 0; j <= Mz; j += 2) pre[j] = pow(rat(1, 2), j) / factorial(j + 1);
        B r = B::from_z(pre, Nq, Mz);
        B ez = B::from_z(exp_z(Mz, 1), Nq, Mz), emz = B::from_z(exp_z(Mz, -1), Nq, Mz);
        B cosh2 = ez + emz;
        for (long k = 1; k <= Nq; ++k) {
            B f = B::one(Nq, Mz);
            for (long m = 0; m <= Mz; ++m) {
                f.at(k, m) -= cosh2.at(0, m);
                if (2 * k <= Nq && m == 0) f.at(2 * k, 0) += 1;
            }
            // 1/(1-q^k)^2 = sum (j+1) q^{jk}
            B g(Nq, Mz);
            for (long j = 0; j * k <= Nq; ++j) g.at(j * k, 0) = j + 1;
            r = r * f * g;
        }
        return r;
    }
    B E(Nq, Mz);
    for (long k2 = 2; k2 <= Mz; k2 += 2) {
        RSeries D = scale(eisenstein_geometric(k2, Nq), -rat(1, k2));
        E = E + B::from_q(D, k2, Nq, Mz);
    }
    return E.exp();
}

}  // namespace wf
