#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "thetaobs/cohom.hpp"
#include "thetaobs/paramod.hpp"

using namespace thetaobs;
using namespace thetaobs::paramod;

TEST_CASE("PMat arithmetic")
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        uint32_t n = 2 + rng() % 5;
        PMat a(n, n);
        for (auto &v : a.e)
            v = static_cast<uint32_t>(rng()) | 1; // keep it odd-diagonalish
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j)
                if (i != j)
                    a.set(i, j, a.at(i, j) & ~1u);
        auto inv = a.inverse();
        CHECK(a.mul(inv).is_identity_mod(30));
        CHECK(inv.mul(a).is_identity_mod(30));
    }
}

TEST_CASE("embeddings and involutions")
{
    ParamodContext ctx(3, 2);
    std::mt19937_64 rng(7);
    const uint32_t bits = 4; // mod 16

    // X = I gives the identity matrix
    PMat id5 = PMat::identity(5);
    CHECK(ctx.embed_alpha(id5).is_identity_mod(30));

    // random L' samples satisfy all membership congruences
    for (int t = 0; t < 50; ++t) {
        PMat x = ctx.random_Lprime(rng);
        PMat m = ctx.embed_alpha(x);
        CHECK(ctx.is_member(m, 28));
        CHECK(ctx.member_conditions(m, 28));
        CHECK(ctx.in_kernel(m, 28));
    }
    // beta is an isomorphism of abelian groups
    for (int t = 0; t < 50; ++t) {
        PMat y1 = ctx.random_Uprime(rng), y2 = ctx.random_Uprime(rng);
        PMat lhs = ctx.embed_beta(y1).mul(ctx.embed_beta(y2));
        PMat rhs = ctx.embed_beta(y1.add(y2));
        CHECK(lhs.equal_mod(rhs, 30));
        CHECK(ctx.in_kernel(ctx.embed_beta(y1), 28));
        CHECK(ctx.in_kernel(ctx.embed_beta_opp(y1), 28));
    }
    // star(I) = I, star is an involution, h maps U to U^opp
    CHECK(ctx.star(PMat::identity(10)).is_identity_mod(28));
    for (int t = 0; t < 100; ++t) {
        PMat w = ctx.letter_matrix(ctx.random_letter(rng));
        w = w.mul(ctx.letter_matrix(ctx.random_letter(rng)));
        CHECK(ctx.is_member(ctx.star(w), 26));
        CHECK(ctx.star(ctx.star(w)).equal_mod(w, 26));
        CHECK(ctx.is_member(ctx.h_conj(w), 26));
    }
    (void)bits;
}

TEST_CASE("red_D: identity, homomorphism, surjectivity via sp blocks")
{
    // D = (1,2): image generates Sp_2(F_2) of order 6
    {
        ParamodContext ctx(1, 1);
        CHECK(ctx.red(PMat::identity(4)) == spgroup::SpMat::identity(2, 2));
        // embedded Sp_2k root elements map onto generators of Sp_2(F_2)
        std::vector<spgroup::SpMat> images;
        PMat up = PMat::identity(2);
        up.set(0, 1, 1);
        PMat lo = PMat::identity(2);
        lo.set(1, 0, 1);
        images.push_back(ctx.red(ctx.embed_sp_k(up)));
        images.push_back(ctx.red(ctx.embed_sp_k(lo)));
        auto table = cohom::GroupTable::closure(images);
        CHECK(table.size() == 6);
    }
    // D = (1,1,1,2,2): image subgroup order 720 = |Sp_4(F_2)|
    {
        ParamodContext ctx(3, 2);
        spgroup::SpContext sp(2, 2);
        std::vector<spgroup::SpMat> images;
        for (const auto &a : sp.transvection_generators()) {
            // lift the F2 root element to an integer symplectic matrix
            PMat lift(4, 4);
            for (uint32_t i = 0; i < 4; ++i)
                for (uint32_t j = 0; j < 4; ++j)
                    lift.set(i, j, a.at(i, j));
            images.push_back(ctx.red(ctx.embed_sp_k(lift)));
        }
        auto table = cohom::GroupTable::closure(images);
        CHECK(table.size() == 720);
        // homomorphism on random letter products
        std::mt19937_64 rng(3);
        for (int t = 0; t < 100; ++t) {
            PMat a = ctx.letter_matrix(ctx.random_letter(rng));
            PMat b = ctx.letter_matrix(ctx.random_letter(rng));
            CHECK(ctx.red(a.mul(b)) == ctx.red(a).mul(ctx.red(b)));
        }
    }
}

TEST_CASE("commutator identities hold at mod 8 and mod 16")
{
    ParamodContext ctx(3, 2);
    for (uint32_t bits : {3u, 4u}) {
        auto reports = verify_commutator_identities(ctx, bits, 100, 17);
        for (const auto &r : reports) {
            INFO(r.name, " bits=", bits, " ", r.detail);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("spanning claims at the spec configurations")
{
    // (n,k) = (3,2), moduli 8 and 16
    for (uint32_t bits : {3u, 4u}) {
        ParamodContext ctx(3, 2);
        auto reports = verify_spanning_claims(ctx, bits);
        for (const auto &r : reports) {
            INFO(r.name, " bits=", bits, " ", r.detail);
            CHECK(r.pass);
        }
    }
    // spec example: n=2, k=1 mod 8
    {
        ParamodContext ctx(2, 1);
        auto reports = verify_spanning_claims(ctx, 3);
        for (const auto &r : reports) {
            INFO(r.name, " ", r.detail);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("reduce_to_identity round trips")
{
    ParamodContext ctx(3, 2);
    const uint32_t bits = 4;
    // identity -> empty word
    auto w0 = ctx.reduce_to_identity(PMat::identity(10), bits);
    CHECK(ctx.letters_value(w0).is_identity_mod(bits));

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        PMat gamma = PMat::identity(10);
        for (int t = 0; t < 20; ++t)
            gamma = gamma.mul(ctx.letter_matrix(ctx.random_letter(rng)));
        auto word = ctx.reduce_to_identity(gamma, bits);
        PMat v = ctx.letters_value(word);
        CHECK(v.equal_mod(gamma, bits));
    }
}

TEST_CASE("structured generators express as commutator products")
{
    ParamodContext ctx(3, 2);
    auto reports = express_generators_as_commutators(ctx, 4, 2, 5);
    for (const auto &r : reports) {
        INFO(r.name, " ", r.detail);
        CHECK(r.pass);
    }
}

TEST_CASE("odd prime congruence kernels")
{
    {
        auto r = odd_p_kernel(1, 3, 50, 1);
        CHECK(r.expected_exponent == 3);
        CHECK(r.lie_kernel_dim == 3);
        CHECK(r.order_matches);
        CHECK(r.abelian);
        CHECK(r.elementary);
        CHECK(r.enumerated_order == 27); // 3^3, the full enumeration oracle
    }
    {
        auto r = odd_p_kernel(2, 3, 30, 2);
        CHECK(r.expected_exponent == 10);
        CHECK(r.lie_kernel_dim == 10);
        CHECK(r.abelian);
        CHECK(r.elementary);
    }
    {
        auto r = odd_p_kernel(2, 5, 30, 3);
        CHECK(r.expected_exponent == 10);
        CHECK(r.lie_kernel_dim == 10);
        CHECK(r.abelian);
        CHECK(r.elementary);
    }
}
