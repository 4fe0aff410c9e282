#include "wf/fieldrep.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wf;

namespace {

SuperPoint point(const SigPtr& sig, Rat tau0, Rat tbar0, const AlgebraElement& eta) {
    auto z = AlgebraElement::zero(sig);
    return {tau0, tbar0, z, z, eta};
}

SigPtr base_signature(long N) {
    AlgebraSignature s;
    s.roots = 1;
    s.dim = 4;
    s.N = N;
    return make_signature(s);
}

SuperConnection flat(const SigPtr& sig, int n, int p, int q) {
    return {sig, tensor_with_space(spinor_module(n), p, q), {}, std::nullopt};
}

}  // namespace

TEST(SuperPoints, UnitAndOddProduct) {
    SigPtr sig = grassmann_signature(2);
    AlgebraElement t1 = AlgebraElement::odd_gen(sig, "t1"), t2 = AlgebraElement::odd_gen(sig, "t2");
    SuperPoint x = point(sig, Rat(1), Rat(2), t1);
    SuperPoint e = unit_point(sig);
    SuperPoint xe = super_point_multiply(x, e);
    EXPECT_EQ(xe.tau0, x.tau0);
    EXPECT_EQ(xe.tbar0, x.tbar0);
    EXPECT_EQ(xe.eta, x.eta);
    SuperPoint p = super_point_multiply(point(sig, 0, 0, t1), point(sig, 0, 0, t2));
    EXPECT_EQ(p.tbar_nil, t1 * t2);
    EXPECT_EQ(p.eta, t1 + t2);
    EXPECT_TRUE(p.tau_nil.is_zero());
}

TEST(SuperPoints, Associative) {
    std::mt19937_64 rng(401);
    SigPtr sig = grassmann_signature(4);
    for (int t = 0; t < 20; ++t) {
        SuperPoint a = random_super_point(rng, sig, {0, 1, 2, 3}), b = random_super_point(rng, sig, {0, 1, 2, 3}),
                   c = random_super_point(rng, sig, {0, 1, 2, 3});
        SuperPoint l = super_point_multiply(super_point_multiply(a, b), c);
        SuperPoint r = super_point_multiply(a, super_point_multiply(b, c));
        EXPECT_EQ(l.tau0, r.tau0);
        EXPECT_EQ(l.tbar0, r.tbar0);
        EXPECT_EQ(l.tau_nil, r.tau_nil);
        EXPECT_EQ(l.tbar_nil, r.tbar_nil);
        EXPECT_EQ(l.eta, r.eta);
    }
}

TEST(SuperPoints, RingMismatchAndBadPointsRejected) {
    SigPtr a = grassmann_signature(2), b = grassmann_signature(3);
    EXPECT_THROW(super_point_multiply(unit_point(a), unit_point(b)), DomainError);
    SuperPoint x = unit_point(a);
    x.eta = AlgebraElement::one(a);
    EXPECT_THROW(x.validate(), DomainError);
}

TEST(Semigroup, RandomLawHolds) {
    SemigroupReport r = semigroup_law_random(7, 50);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.trials, 50);
    EXPECT_GT(r.eta_cases, 0);
}

TEST(Semigroup, UnitMapsToIdentity) {
    std::mt19937_64 rng(402);
    SigPtr sig = grassmann_signature(4);
    SemigroupRep rep = random_semigroup_rep(rng, sig);
    RepValue v = evaluate(rep, unit_point(sig));
    ASSERT_EQ(v.size(), rep.blocks.size());
    for (size_t i = 0; i < v.size(); ++i) {
        ASSERT_EQ(v[i].size(), 1u);
        EXPECT_EQ(v[i].begin()->first, ExpKey(Rat(0), Rat(0)));
        const auto& par = rep.blocks[i].module.parity;
        EXPECT_EQ(v[i].begin()->second, FormMatrix::identity(par, AlgebraElement::zero(sig)));
    }
}

TEST(Semigroup, OddDirectionIsA) {
    std::mt19937_64 rng(403);
    SigPtr sig = grassmann_signature(2);
    SemigroupRep rep = random_semigroup_rep(rng, sig);
    AlgebraElement t1 = AlgebraElement::odd_gen(sig, "t1");
    RepValue v = evaluate(rep, point(sig, 0, 0, t1));
    for (size_t i = 0; i < v.size(); ++i) {
        const auto& b = rep.blocks[i];
        FormMatrix expect = FormMatrix::identity(b.module.parity, AlgebraElement::zero(sig)) +
                            t1 * embed_rational(b.module.parity, sig, b.A);
        FormMatrix total = FormMatrix::identity(b.module.parity, AlgebraElement::zero(sig)) * Rat(0);
        for (auto& [k, m] : v[i]) {
            EXPECT_EQ(k, ExpKey(Rat(0), Rat(0)));
            total += m;
        }
        EXPECT_EQ(total, expect);
    }
}

TEST(Semigroup, LawFailsForInconsistentMultiplication) {
    std::mt19937_64 rng(404);
    SigPtr sig = grassmann_signature(4);
    SemigroupRep rep = random_semigroup_rep(rng, sig);
    bool nonzero = false;
    for (auto& b : rep.blocks) nonzero |= b.A != Mat<Rat>(b.A.rows(), b.A.cols());
    if (!nonzero) GTEST_SKIP();
    AlgebraElement t1 = AlgebraElement::odd_gen(sig, "t1"), t2 = AlgebraElement::odd_gen(sig, "t2");
    SuperPoint g = point(sig, 0, 0, t1), h = point(sig, 0, 0, t2);
    // dropping the eta eta' term of the product
    SuperPoint wrong = point(sig, 0, 0, t1 + t2);
    EXPECT_TRUE(semigroup_law_check(rep, g, h));
    EXPECT_NE(multiply(evaluate(rep, g), evaluate(rep, h)), evaluate(rep, wrong));
}

TEST(LOperators, RelationsHold) {
    std::mt19937_64 rng(405);
    SigPtr sig = grassmann_signature(1);
    for (int t = 0; t < 10; ++t) EXPECT_TRUE(l_operators(random_semigroup_rep(rng, sig)).ok()) << t;
    SemigroupRep zero;
    zero.grassmann = sig;
    zero.blocks.push_back({2, regular_module(1), Mat<Rat>(2, 2)});
    LOperators L = l_operators(zero);
    EXPECT_TRUE(L.ok());
    EXPECT_EQ(L.Lbar0.size(), 1u);
}

TEST(LOperators, RejectsEvenA) {
    SemigroupRep rep;
    rep.grassmann = grassmann_signature(1);
    rep.blocks.push_back({0, tensor_with_space(spinor_module(0), 2, 0), Mat<Rat>::identity(2)});
    EXPECT_THROW(l_operators(rep), DomainError);
}

TEST(FermionNormalization, PhiPowers) {
    FermionNormalization one = fermion_trace_normalization(1, 2);
    EXPECT_EQ(one.value, QSeries(0, {IotaRat(1), IotaRat(-1), IotaRat(-1)}, 2));
    EXPECT_EQ(one.ell_half_pow, 1);
    EXPECT_EQ(fermion_trace_normalization(0, 5).value, QSeries::one(5));
    EXPECT_EQ(fermion_trace_normalization(2, 6).value, phi_q(6).pow(2));
    EXPECT_THROW(fermion_trace_normalization(-1, 2), DomainError);
}

TEST(PartitionTrace, FlatLevelsGiveGradedSuperdimension) {
    long N = 4;
    SigPtr sig = base_signature(N);
    FieldRep rep{sig, 0, {{0, flat(sig, 0, 2, 1)}, {1, flat(sig, 0, 1, 0)}, {3, flat(sig, 0, 0, 2)}}};
    PartitionTrace t = partition_trace(rep);
    QSeries expect(0, {IotaRat(1), IotaRat(1), IotaRat(0), IotaRat(-2)}, N);
    EXPECT_EQ(t.Z, AlgebraElement::scalar(sig, expect));
    EXPECT_EQ(t.i_pow, 0);
    EXPECT_EQ(t.ell_half_pow, 0);
}

TEST(PartitionTrace, RejectsMixedCliffordAlgebrasAndGaps) {
    SigPtr sig = base_signature(3);
    FieldRep mixed{sig, 0, {{0, flat(sig, 0, 1, 0)}, {1, flat(sig, 2, 1, 0)}}};
    EXPECT_THROW(partition_trace(mixed), DomainError);
    SuperConnection A = flat(sig, 0, 1, 1);
    Mat<Rat> B(2, 2);
    B(0, 1) = 1;
    B(1, 0) = 1;
    A.set(0, lift_to_module(spinor_module(0), embed_rational(block_parity(1, 1), sig, B)));
    FormMatrix C = form_matrix(block_parity(1, 1), sig);
    C.set(0, 0, AlgebraElement::root(sig, 0));
    A.set(2, lift_to_module(spinor_module(0), C));
    FieldRep gapped{sig, 0, {{0, A}}};
    EXPECT_THROW(partition_trace(gapped), DomainError);
}

TEST(Eft, ConstantAndCorruptedData) {
    SigPtr sig = euler_rep_signature(2, 4, 4);
    AlgebraElement one = AlgebraElement::one(sig), zero = AlgebraElement::zero(sig);
    EXPECT_TRUE(eft_verify({one, zero, zero, 2}).ok());
    AlgebraElement W = AlgebraElement::W(sig, 1);
    EftReport r = eft_verify({W, zero, zero, 2});
    EXPECT_TRUE(r.closed);
    EXPECT_FALSE(r.tbar_ok);
    EXPECT_FALSE(r.tbar_cert.empty());
    EftReport h = eft_verify({AlgebraElement::odd_gen(sig, "H"), zero, zero, 2});
    EXPECT_FALSE(h.closed);
    EXPECT_FALSE(h.closed_cert.empty());
}

TEST(EulerPipeline, SmallRanks) {
    for (auto [rank, dim, N] : std::vector<std::tuple<int, int, long>>{{2, 4, 4}, {2, 6, 5}, {4, 8, 3}}) {
        EulerPipelineResult r = euler_pipeline(rank, dim, N);
        EXPECT_TRUE(r.matches) << rank << " " << dim;
        EXPECT_TRUE(r.eft.ok()) << rank << " " << dim;
    }
    EXPECT_THROW(euler_pipeline(3, 4, 2), DomainError);
}
