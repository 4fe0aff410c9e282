#include "wf/modforms.hpp"

#include <gtest/gtest.h>

using namespace wf;

namespace {

RSeries e2_over(long d, long N) { return scale(eisenstein_q(2, N), rat(1, d)); }

bool integral(const RSeries& s) {
    for (auto& c : s.window())
        if (!is_integer(c)) return false;
    return true;
}

}  // namespace

TEST(MFBasis, DimensionsAndEchelonShape) {
    for (long w = 0; w <= 40; w += 2) {
        MFBasis B = mf_basis(w, 20);
        EXPECT_EQ((long)B.size(), mf_dimension(w)) << w;
        auto p = B.pivots();
        for (size_t i = 0; i < p.size(); ++i) {
            EXPECT_EQ(p[i], (long)i) << w;
            EXPECT_EQ(B.forms[i].series[p[i]], 1);
            for (size_t j = 0; j < p.size(); ++j) {
                if (i != j) {
                    EXPECT_EQ(B.forms[j].series[p[i]], 0);
                }
            }
        }
    }
}

TEST(MFBasis, ProductsReduceToZero) {
    long N = 30;
    for (long a : {4, 6, 8, 12})
        for (long b : {4, 6, 10}) {
            MFBasis A = mf_basis(a, N), Bb = mf_basis(b, N), C = mf_basis(a + b, N);
            for (auto& f : A.forms)
                for (auto& g : Bb.forms) EXPECT_TRUE(reduce_against_basis(f.series * g.series, C).remainder.is_zero());
        }
}

TEST(MFBasis, E2IsNotModular) {
    EXPECT_EQ(mf_basis(2, 10).size(), 0u);
    EXPECT_FALSE(reduce_against_basis(eisenstein_q(2, 10), mf_basis(2, 10)).remainder.is_zero());
}

TEST(Delta, MatchesEtaProduct) {
    long N = 50;
    ModularForm d = delta(N);
    EXPECT_EQ(d.weight, 12);
    EXPECT_EQ(d.series, phi_product(N).pow(24).shifted(1).truncated(N));
    std::vector<long> tau = {0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480};
    for (size_t n = 0; n < tau.size(); ++n) EXPECT_EQ(d.series[n], tau[n]);
}

TEST(WeaklyHolomorphic, KleinJInvariant) {
    long N = 8;
    MFBasis B = weakly_holo_basis(0, 1, N);
    ASSERT_EQ(B.size(), 2u);
    RSeries j = (eisenstein_q(4, N + 4).pow(3) * delta(N + 4).series.inverse()).truncated(N);
    EXPECT_EQ(B.forms[0].series, j - RSeries::constant(744, N));
    EXPECT_EQ(B.forms[0].series[1], 196884);
    EXPECT_EQ(B.forms[0].series[2], 21493760);
    EXPECT_EQ(B.forms[1].series, RSeries::one(N));
}

TEST(WeaklyHolomorphic, IntegralEchelonBases) {
    for (long w : {-4, 0, 2, 4, 6})
        for (long P : {0, 1, 2}) {
            if (w + 12 * P < 0) continue;
            MFBasis B = weakly_holo_basis(w, P, 40);
            for (auto& f : B.forms) {
                EXPECT_TRUE(integral(f.series)) << w << " " << P;
                EXPECT_GE(f.series.valuation(), -P);
            }
        }
}

TEST(WeaklyHolomorphic, WeightTwoHasNoConstantTerm) {
    MFBasis B = weakly_holo_basis(2, 2, 50);
    EXPECT_EQ(B.size(), 2u);
    for (auto& f : B.forms) EXPECT_EQ(f.series[0], 0);
}

TEST(WeaklyHolomorphic, RejectsOddWeight) {
    EXPECT_THROW(weakly_holo_basis(3, 1, 5), DomainError);
}

// Weight-2 forms have zero constant term, so d*E2/c lies in L*Z((q)) + MF_2
// only if d/c is in L*Z; the scan must attain that bound.
TEST(ClassOrder, E2MultiplesAgainstConstantTermBound) {
    long N = 50, P = 2;
    struct Row {
        long denom, lattice, expect;
    };
    for (Row r : {Row{12, 2, 24}, Row{24, 2, 48}, Row{24, 1, 24}, Row{48, 2, 96}}) {
        long bound = 1;
        while (!is_integer(Rat(bound) / Rat(r.denom * r.lattice))) ++bound;
        EXPECT_EQ(bound, r.expect);
        OrderResult o = class_order({e2_over(r.denom, N), 2, r.lattice, P, N}, 200);
        ASSERT_TRUE(o.order.has_value()) << r.denom;
        EXPECT_EQ(*o.order, r.expect) << r.denom << " " << r.lattice;
        EXPECT_EQ(o.pole_bound, P);
        EXPECT_EQ(o.trunc, N);
    }
}

TEST(ClassOrder, NoneUpToMaxD) {
    OrderResult o = class_order({e2_over(12, 20), 2, 2, 1, 20}, 23);
    EXPECT_FALSE(o.order.has_value());
    EXPECT_EQ(o.max_d, 23);
}

TEST(ClassOrder, ModularRepresentativeHasOrderOne) {
    OrderResult o = class_order({scale(eisenstein_q(4, 30), rat(1, 7)), 4, 1, 0, 30}, 10);
    ASSERT_TRUE(o.order.has_value());
    EXPECT_EQ(*o.order, 1);
}

TEST(ClassOrder, PrecisionAndDomainErrors) {
    EXPECT_THROW(class_order({e2_over(12, 10), 2, 2, 2, 50}, 24), PrecisionError);
    EXPECT_THROW(class_order({e2_over(12, 10), 2, 0, 2, 10}, 24), DomainError);
}

TEST(Komf, AllResidueRows) {
    EXPECT_EQ(komf_descriptor(0), "MF^Z_0");
    EXPECT_EQ(komf_descriptor(1), "Z/2((q))");
    EXPECT_EQ(komf_descriptor(2), "Z/2((q))");
    EXPECT_EQ(komf_descriptor(3), "C((q))/(2Z((q))+MF_2)");
    EXPECT_EQ(komf_descriptor(4), "MF^Z_2");
    EXPECT_EQ(komf_descriptor(5), "0");
    EXPECT_EQ(komf_descriptor(6), "0");
    EXPECT_EQ(komf_descriptor(7), "C((q))/(Z((q))+MF_4)");
    EXPECT_EQ(komf_descriptor(8), "MF^Z_4");
    EXPECT_EQ(komf_descriptor(12), "MF^Z_6");
    EXPECT_EQ(komf_descriptor(-1), "C((q))/(Z((q))+MF_0)");
    EXPECT_EQ(komf_descriptor(-5), "C((q))/(2Z((q))+MF_-2)");
}
