#include "wf/cdga.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wf;

namespace {

// roots x1, x2; H (deg 3, dH = x1^2 + x2^2); l1, l2 (deg 1, dl_i = x_i); theta (deg 0)
SigPtr test_signature(int dim = 8, long N = 3) {
    AlgebraSignature s;
    s.roots = 2;
    s.dim = dim;
    s.N = N;
    s.include_W = true;
    s.w_bound = 3;
    s.odd.push_back(generator_H(2));
    for (int i = 0; i < 2; ++i) s.odd.push_back({"l" + std::to_string(i + 1), 1, {{root_monomial(2, i), Rat(1)}}});
    s.odd.push_back(generator_grassmann("theta"));
    return make_signature(s);
}

AlgebraElement random_element(std::mt19937_64& rng, const SigPtr& sig, int parity = -1, bool positive_degree = false) {
    std::uniform_int_distribution<int> e(0, 2), mask(0, 15), coef(-4, 4), wd(0, 1);
    AlgebraElement a(sig);
    for (int t = 0; t < 6; ++t) {
        Monomial m;
        m.x = {e(rng), e(rng)};
        m.odd = mask(rng);
        m.w = wd(rng);
        if (parity >= 0 && m.parity() != parity) m.odd ^= 8;  // toggle theta
        if (positive_degree && sig->form_degree(m) == 0) m.x[0] = 1;
        std::vector<IotaRat> c = {IotaRat(Rat(coef(rng))), IotaRat(Rat(coef(rng)))};
        a.add_term(m, QSeries(0, c, sig->N));
    }
    return a;
}

int parity_of(const AlgebraElement& a) { return a.is_odd() ? 1 : 0; }

}  // namespace

TEST(Cdga, DifferentialSquaresToZero) {
    std::mt19937_64 rng(101);
    SigPtr sig = test_signature();
    for (int t = 0; t < 40; ++t) EXPECT_TRUE(apply_d(apply_d(random_element(rng, sig))).is_zero());
}

TEST(Cdga, DifferentialIsGradedDerivation) {
    std::mt19937_64 rng(102);
    SigPtr sig = test_signature();
    for (int t = 0; t < 40; ++t) {
        int pa = t % 2;
        AlgebraElement a = random_element(rng, sig, pa), b = random_element(rng, sig);
        AlgebraElement rhs = apply_d(a) * b + (pa ? -(a * apply_d(b)) : a * apply_d(b));
        EXPECT_EQ(apply_d(a * b), rhs);
    }
}

TEST(Cdga, GradedCommutativity) {
    std::mt19937_64 rng(103);
    SigPtr sig = test_signature();
    for (int t = 0; t < 40; ++t) {
        AlgebraElement a = random_element(rng, sig, t % 2), b = random_element(rng, sig, (t / 2) % 2);
        AlgebraElement ba = b * a;
        EXPECT_EQ(a * b, (parity_of(a) && parity_of(b)) ? -ba : ba);
    }
}

TEST(Cdga, OddGeneratorsSquareToZero) {
    SigPtr sig = test_signature();
    for (auto name : {"H", "l1", "l2", "theta"}) {
        AlgebraElement g = AlgebraElement::odd_gen(sig, name);
        EXPECT_TRUE((g * g).is_zero());
    }
}

TEST(Cdga, Associativity) {
    std::mt19937_64 rng(104);
    SigPtr sig = test_signature();
    for (int t = 0; t < 20; ++t) {
        AlgebraElement a = random_element(rng, sig), b = random_element(rng, sig), c = random_element(rng, sig);
        EXPECT_EQ((a * b) * c, a * (b * c));
    }
}

TEST(Cdga, DegreeTruncation) {
    SigPtr sig = test_signature(6);
    EXPECT_FALSE(AlgebraElement::root(sig, 0, 3).is_zero());
    EXPECT_TRUE(AlgebraElement::root(sig, 0, 4).is_zero());
    AlgebraElement H = AlgebraElement::odd_gen(sig, "H");
    EXPECT_TRUE((H * AlgebraElement::root(sig, 0, 2)).is_zero());
    EXPECT_FALSE((H * AlgebraElement::root(sig, 0, 1)).is_zero());
}

TEST(Cdga, ExponentialIsMultiplicative) {
    std::mt19937_64 rng(105);
    SigPtr sig = test_signature();
    for (int t = 0; t < 20; ++t) {
        AlgebraElement a = random_element(rng, sig, 0, true), b = random_element(rng, sig, 0, true);
        EXPECT_EQ(exp_nilpotent(a + b), exp_nilpotent(a) * exp_nilpotent(b));
        EXPECT_EQ(exp_nilpotent(a) * exp_nilpotent(-a), AlgebraElement::one(sig));
    }
}

TEST(Cdga, InverseProperty) {
    std::mt19937_64 rng(106);
    SigPtr sig = test_signature();
    for (int t = 0; t < 20; ++t) {
        AlgebraElement n = random_element(rng, sig, 0, true);
        QSeries c0(0, {IotaRat(Rat(t + 1)), IotaRat(Rat(2))}, sig->N);
        AlgebraElement a = AlgebraElement::scalar(sig, c0) + n;
        EXPECT_EQ(a * inverse(a), AlgebraElement::one(sig));
    }
    EXPECT_THROW(inverse(AlgebraElement::root(sig, 0)), DomainError);
}

TEST(Cdga, DbarOnW) {
    SigPtr sig = test_signature();
    AlgebraElement w2 = AlgebraElement::W(sig, 2);
    EXPECT_EQ(apply_dbar(w2), AlgebraElement::W(sig, 3) * IotaRat::monomial(Rat(2), 1));
    EXPECT_TRUE(apply_dbar(AlgebraElement::root(sig, 1)).is_zero());
    EXPECT_TRUE(apply_dbar(AlgebraElement::W(sig, 3)).is_zero());  // W^4 is above the bound
}

TEST(Cdga, DbarCommutesWithD) {
    std::mt19937_64 rng(107);
    SigPtr sig = test_signature();
    for (int t = 0; t < 20; ++t) {
        AlgebraElement a = random_element(rng, sig);
        EXPECT_EQ(apply_d(apply_dbar(a)), apply_dbar(apply_d(a)));
    }
}

TEST(Cdga, HDifferentialIsP1) {
    SigPtr sig = test_signature();
    EXPECT_EQ(apply_d(AlgebraElement::odd_gen(sig, "H")), p1(sig));
    EXPECT_EQ(apply_d(AlgebraElement::odd_gen(sig, "l1") * AlgebraElement::odd_gen(sig, "l2")),
              AlgebraElement::root(sig, 0) * AlgebraElement::odd_gen(sig, "l2") -
                  AlgebraElement::root(sig, 1) * AlgebraElement::odd_gen(sig, "l1"));
}

TEST(Pontryagin, CoordinatesOfElementaryProducts) {
    AlgebraSignature s;
    s.roots = 2;
    s.dim = 8;
    s.N = 2;
    SigPtr sig = make_signature(s);
    AlgebraElement P1 = p1(sig), P2 = pfaffian(sig) * pfaffian(sig);
    auto c = pontryagin_coordinates(P1 * P1 + P2 * Rat(3), 8);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.at(Partition{1, 1}), QSeries::one(2));
    EXPECT_EQ(c.at(Partition{2}), QSeries::constant(IotaRat(Rat(3)), 2));
    // power sum s_2 = p1^2 - 2 p2
    auto c2 = pontryagin_coordinates(power_sum(sig, 2), 8);
    EXPECT_EQ(c2.at(Partition{1, 1}), QSeries::one(2));
    EXPECT_EQ(c2.at(Partition{2}), QSeries::constant(IotaRat(Rat(-2)), 2));
}

TEST(Pontryagin, PairingAndErrors) {
    AlgebraSignature s;
    s.roots = 2;
    s.dim = 8;
    s.N = 2;
    SigPtr sig = make_signature(s);
    std::map<std::string, Int> numbers = {{"[2]", Int(5)}, {"[1,1]", Int(7)}};
    EXPECT_EQ(pair_with_pontryagin(power_sum(sig, 2), numbers, 8), QSeries::constant(IotaRat(Rat(7 - 10)), 2));
    EXPECT_THROW(pair_with_pontryagin(p1(sig) * p1(sig), {{"[2]", Int(1)}}, 8), InputError);
    EXPECT_THROW(pontryagin_coordinates(AlgebraElement::root(sig, 0, 4), 8), DomainError);
}

TEST(Cdga, SignatureMismatchThrows) {
    SigPtr a = test_signature(), b = test_signature(6);
    EXPECT_THROW(AlgebraElement::one(a) + AlgebraElement::one(b), DomainError);
}
