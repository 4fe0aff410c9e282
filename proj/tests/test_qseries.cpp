#include "wf/qseries.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wf;

namespace {

// brute-force divisor sum
long sigma_oracle(int k, int n) {
    long s = 0;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) {
            long p = 1;
            for (int j = 0; j < k; ++j) p *= d;
            s += p;
        }
    return s;
}

// q prod (1 - q^n)^24 by repeated multiplication of integer polynomials
std::vector<Int> delta_oracle(int N) {
    std::vector<Int> c(N + 1, 0);
    c[0] = 1;
    for (int n = 1; n <= N; ++n)
        for (int rep = 0; rep < 24; ++rep)
            for (int m = N; m >= n; --m) c[m] -= c[m - n];
    std::vector<Int> d(N + 1, 0);
    for (int m = 1; m <= N; ++m) d[m] = c[m - 1];
    return d;
}

RSeries random_series(std::mt19937_64& rng, long trunc, long val = 0) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    std::vector<Rat> c;
    for (long n = val; n <= trunc; ++n) c.push_back(rat(num(rng), den(rng)));
    if (c[0] == 0) c[0] = 1;
    return RSeries(val, c, trunc);
}

}  // namespace

TEST(Bernoulli, KnownValues) {
    std::vector<Rat> expect = {rat(1, 6), rat(-1, 30), rat(1, 42), rat(-1, 30), rat(5, 66), rat(-691, 2730), rat(7, 6)};
    for (size_t j = 0; j < expect.size(); ++j) EXPECT_EQ(bernoulli(2 * j + 2), expect[j]) << 2 * j + 2;
    EXPECT_THROW(bernoulli(3), DomainError);
}

TEST(DivisorSigma, MatchesBruteForce) {
    for (int k = 0; k <= 5; ++k)
        for (int n = 1; n <= 60; ++n) EXPECT_EQ(divisor_sigma(k, n), Int(sigma_oracle(k, n)));
}

TEST(Eisenstein, CoefficientsMatchDivisorOracle) {
    for (long k : {4, 6, 8}) {
        RSeries e = eisenstein_q(k, 30);
        Rat c = -Rat(2 * k) / bernoulli(k);
        EXPECT_EQ(e[0], 1);
        for (int n = 1; n <= 30; ++n) EXPECT_EQ(e[n], c * Rat(sigma_oracle(k - 1, n))) << k << " " << n;
    }
    RSeries e2 = eisenstein_q(2, 10);
    EXPECT_EQ(e2[1], -24);
    EXPECT_EQ(e2[2], -72);
}

TEST(Eisenstein, RingRelations) {
    long N = 40;
    RSeries e4 = eisenstein_q(4, N), e6 = eisenstein_q(6, N);
    EXPECT_EQ(e4 * e4, eisenstein_q(8, N));
    EXPECT_EQ(e4 * e6, eisenstein_q(10, N));
    EXPECT_EQ(e4 * eisenstein_q(10, N), e6 * eisenstein_q(8, N));
}

TEST(Eisenstein, RamanujanDerivativeOfE2) {
    // q d/dq E2 = (E2^2 - E4)/12
    long N = 30;
    RSeries e2 = eisenstein_q(2, N);
    EXPECT_EQ(e2.qddq(), scale(e2 * e2 - eisenstein_q(4, N), rat(1, 12)));
}

TEST(Eisenstein, GeometricNormalization) {
    RSeries d = eisenstein_geometric(4, 10);
    EXPECT_EQ(d, scale(eisenstein_q(4, 10), -bernoulli(4) / factorial(4)));
}

TEST(Eisenstein, RejectsOddWeight) {
    EXPECT_THROW(eisenstein_q(3, 5), DomainError);
    EXPECT_THROW(eisenstein_q(0, 5), DomainError);
}

TEST(Eta, PentagonalNumbers) {
    RSeries p = phi_product(40);
    std::vector<Rat> expect(41, 0);
    for (long k = -6; k <= 6; ++k) {
        long e = k * (3 * k - 1) / 2;
        if (e <= 40) expect[e] += (k % 2 == 0) ? 1 : -1;
    }
    for (long n = 0; n <= 40; ++n) EXPECT_EQ(p[n], expect[n]) << n;
    EXPECT_EQ(to_text(dedekind_eta(1)), "q^{1/24}(1 - q)");
}

TEST(Eta, TwentyFourthPowerIsDelta) {
    int N = 50;
    RSeries d = phi_product(N).pow(24).shifted(1).truncated(N);
    std::vector<Int> oracle = delta_oracle(N);
    for (int n = 0; n <= N; ++n) EXPECT_EQ(d[n], Rat(oracle[n])) << n;
    EXPECT_EQ(d[1], 1);
    EXPECT_EQ(d[2], -24);
    EXPECT_EQ(d[3], 252);
    EXPECT_EQ(d[4], -1472);
}

TEST(SeriesArithmetic, InverseAndPowerProperties) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        long N = 12;
        RSeries a = random_series(rng, N), b = random_series(rng, N);
        EXPECT_EQ(a * a.inverse(), RSeries::one(N));
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) * a, a * a + b * a);
        EXPECT_EQ(a.pow(3), a * a * a);
        EXPECT_EQ(a.pow(-2) * a.pow(2), RSeries::one(N));
    }
}

TEST(SeriesArithmetic, TruncationIsMinimum) {
    RSeries a = RSeries::one(5), b = RSeries::one(8);
    EXPECT_EQ((a + b).trunc(), 5);
    EXPECT_EQ((a * b).trunc(), 5);
    RSeries q = RSeries::monomial(1, 1, 5);
    EXPECT_EQ(q.inverse().valuation(), -1);
    EXPECT_EQ(q.inverse().trunc(), 3);
}

TEST(SeriesArithmetic, InverseOfZeroIsPrecisionError) {
    EXPECT_THROW(RSeries(6).inverse(), PrecisionError);
}

TEST(Weierstrass, WorkedValueAtQ0) {
    auto s = weierstrass_sigma(SigmaMode::product, 2, 4);
    EXPECT_EQ(s.at(0, 0), 1);
    EXPECT_EQ(s.at(0, 1), 0);
    EXPECT_EQ(s.at(0, 2), rat(1, 24));
    EXPECT_EQ(s.at(0, 4), rat(1, 1920));
}

TEST(Weierstrass, ProductEqualsExponential) {
    for (long n : {0, 3, 8})
        for (long m : {0, 4, 9})
            EXPECT_EQ(weierstrass_sigma(SigmaMode::product, n, m), weierstrass_sigma(SigmaMode::exponential, n, m)) << n << " " << m;
}

TEST(Weierstrass, OddInZ) {
    auto s = weierstrass_sigma(SigmaMode::product, 6, 9);
    for (long n = 0; n <= 6; ++n)
        for (long m = 1; m <= 9; m += 2) EXPECT_EQ(s.at(n, m), 0);
}
