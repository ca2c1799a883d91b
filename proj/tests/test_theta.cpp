#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "thetaobs/theta.hpp"

using namespace thetaobs;
using namespace thetaobs::theta;
using symmod::TypeD;
using symmod::Vec;

namespace {

ThetaGroup::Elt elt(const ThetaGroup &H, uint32_t t, const Vec &m)
{
    return {t, static_cast<uint32_t>(H.index_of(m))};
}

ThetaGroup::Elt comm(const ThetaGroup &H, ThetaGroup::Elt a, ThetaGroup::Elt b)
{
    return H.mul(H.mul(a, b), H.mul(H.inv(a), H.inv(b)));
}

} // namespace

TEST_CASE("H_D basics: identity, inverses, order")
{
    for (const char *t : {"2", "3", "2,2", "2,4", "3,3"}) {
        TypeD D = TypeD::parse(t);
        auto H = ThetaGroup::standard(D);
        CHECK(H.order() == uint64_t(D.scalar_modulus()) * D.card() * D.card());
        // identity and inverses, exhaustively
        for (uint32_t tt = 0; tt < H.n(); ++tt)
            for (size_t m = 0; m < H.msize(); ++m) {
                ThetaGroup::Elt x{tt, uint32_t(m)};
                CHECK(H.mul(H.identity(), x) == x);
                CHECK(H.mul(x, H.identity()) == x);
                CHECK(H.mul(x, H.inv(x)) == H.identity());
                CHECK(H.mul(H.inv(x), x) == H.identity());
            }
    }
}

TEST_CASE("associativity via the cocycle identity, exhaustive for small D")
{
    for (const char *t : {"2", "3", "2,2"}) {
        auto H = ThetaGroup::standard(TypeD::parse(t));
        for (size_t a = 0; a < H.msize(); ++a)
            for (size_t b = 0; b < H.msize(); ++b)
                for (size_t c = 0; c < H.msize(); ++c)
                    CHECK(H.cocycle_identity(a, b, c));
    }
}

TEST_CASE("D=(2) commutator of e1-lift and f1-lift is the central -1")
{
    auto H = ThetaGroup::standard(TypeD::parse("2"));
    auto a = elt(H, 0, {1, 0});
    auto b = elt(H, 0, {0, 1});
    auto c = comm(H, a, b);
    CHECK(c.m == 0);
    CHECK(c.t == 2); // zeta_4^2 = -1
}

TEST_CASE("D=(3): every element cubes to the identity")
{
    auto H = ThetaGroup::standard(TypeD::parse("3"));
    for (uint32_t t = 0; t < H.n(); ++t)
        for (size_t m = 0; m < H.msize(); ++m) {
            ThetaGroup::Elt x{t, uint32_t(m)};
            CHECK(H.mul(x, H.mul(x, x)) == H.identity());
        }
}

TEST_CASE("commutator pairing equals the module pairing, exhaustively")
{
    for (const char *t : {"2", "3", "2,2", "2,4"}) {
        auto H = ThetaGroup::standard(TypeD::parse(t));
        for (size_t a = 0; a < H.msize(); ++a)
            for (size_t b = 0; b < H.msize(); ++b)
                CHECK(H.commutator(a, b) == H.module_pairing(a, b));
        // and at the group-element level for a sample
        std::mt19937_64 gen(7);
        for (int trial = 0; trial < 200; ++trial) {
            ThetaGroup::Elt x{uint32_t(gen() % H.n()),
                              uint32_t(gen() % H.msize())};
            ThetaGroup::Elt y{uint32_t(gen() % H.n()),
                              uint32_t(gen() % H.msize())};
            auto c = comm(H, x, y);
            CHECK(c.m == 0);
            CHECK(c.t == H.module_pairing(x.m, y.m));
        }
    }
}

TEST_CASE("inner automorphisms")
{
    auto H = ThetaGroup::standard(TypeD::parse("2"));
    // alpha_0 is the identity automorphism
    auto a0 = inner_aut(H, {0, 0});
    CHECK(aut_equal(H, a0, aut_identity(H)));
    // alpha_{e1} fixes lifts of e1 and adds the sign on lifts of f1
    auto ae = inner_aut(H, {1, 0});
    CHECK(is_automorphism(H, ae));
    auto on_e1 = aut_apply(H, ae, elt(H, 0, {1, 0}));
    CHECK(on_e1 == elt(H, 0, {1, 0}));
    auto on_f1 = aut_apply(H, ae, elt(H, 0, {0, 1}));
    CHECK(on_f1 == elt(H, 2, {0, 1}));
    // m -> alpha_m is injective and a homomorphism to composition
    for (const char *t : {"2", "3", "2,2"}) {
        auto G = ThetaGroup::standard(TypeD::parse(t));
        std::set<std::vector<uint32_t>> betas;
        for (size_t m = 0; m < G.msize(); ++m)
            betas.insert(inner_aut(G, G.elem(m)).beta);
        CHECK(betas.size() == G.msize());
        std::mt19937_64 gen(3);
        for (int trial = 0; trial < 32; ++trial) {
            Vec m = G.elem(gen() % G.msize());
            Vec mp = G.elem(gen() % G.msize());
            auto lhs = inner_aut(G, G.module().add(m, mp));
            auto rhs = aut_compose(G, inner_aut(G, m), inner_aut(G, mp));
            CHECK(aut_equal(G, lhs, rhs));
        }
    }
}

TEST_CASE("lift_sp: identity lifts with zero beta; swap lifts for D=(2)")
{
    auto H = ThetaGroup::standard(TypeD::parse("2"));
    auto id = aut_identity(H);
    CHECK(is_automorphism(H, id));

    // swap e1 <-> f1 (a symplectic map over F_2)
    std::vector<Vec> swap_cols = {{0, 1}, {1, 0}};
    auto lifted = lift_sp(H, swap_cols);
    REQUIRE(lifted.has_value());
    CHECK(is_automorphism(H, *lifted));
}

TEST_CASE("lift fibers are inner-automorphism cosets of size #M")
{
    auto H = ThetaGroup::standard(TypeD::parse("2,2"));
    spgroup::SpContext ctx(2, 2);
    std::mt19937_64 gen(11);
    auto gens = ctx.transvection_generators();
    for (int trial = 0; trial < 4; ++trial) {
        // random word in the generators
        spgroup::SpMat A = spgroup::SpMat::identity(4, 2);
        for (int k = 0; k < 12; ++k)
            A = A.mul(gens[gen() % gens.size()]);
        auto lifts = all_lifts(H, spmat_cols(A));
        CHECK(lifts.size() == H.msize());
        for (const auto &f : lifts)
            CHECK(is_automorphism(H, f));
    }
}

TEST_CASE("aut composition, inverse, and the map to Sp")
{
    auto H = ThetaGroup::standard(TypeD::parse("2,2"));
    spgroup::SpContext ctx(2, 2);
    auto gens = ctx.transvection_generators();
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 6; ++trial) {
        spgroup::SpMat A = gens[gen() % gens.size()],
                       B = gens[gen() % gens.size()];
        auto fa = lift_sp(H, spmat_cols(A));
        auto fb = lift_sp(H, spmat_cols(B));
        REQUIRE(fa);
        REQUIRE(fb);
        auto fab = aut_compose(H, *fa, *fb);
        CHECK(is_automorphism(H, fab));
        // symplectic part of the composition is the product A*B
        auto prod_cols = spmat_cols(A.mul(B));
        for (size_t i = 0; i < 4; ++i)
            CHECK(H.index_of(fab.a_cols[i]) == H.index_of(prod_cols[i]));
        // inverse composes to the identity
        auto finv = aut_inverse(H, *fa);
        CHECK(is_automorphism(H, finv));
        CHECK(aut_equal(H, aut_compose(H, *fa, finv), aut_identity(H)));
    }
}

TEST_CASE("inversions")
{
    // beta = 0 over -Id is an inversion for every D
    for (const char *t : {"2", "3", "2,2", "2,4"}) {
        auto H = ThetaGroup::standard(TypeD::parse(t));
        ThetaAut iota;
        iota.a_cols = neg_id_cols(H);
        iota.beta.assign(H.msize(), 0);
        CHECK(is_inversion(H, iota));
    }
    // type (2,...,2): -Id = Id, inversions = lifts of the identity = #M
    {
        auto H = ThetaGroup::standard(TypeD::parse("2,2"));
        auto inv = find_inversions(H);
        CHECK(inv.size() == 16);
    }
    // composing two inversions lands over the identity of Sp
    {
        auto H = ThetaGroup::standard(TypeD::parse("3"));
        auto invs = find_inversions(H);
        REQUIRE(invs.size() >= 2);
        auto c = aut_compose(H, invs[0], invs[1]);
        auto idc = aut_identity(H);
        for (size_t i = 0; i < c.a_cols.size(); ++i)
            CHECK(H.index_of(c.a_cols[i]) == H.index_of(idc.a_cols[i]));
    }
}

TEST_CASE("odd square-root pairing and the symmetric model")
{
    // D=(3): b(e1,f1) = 2 (2*2 = 4 = 1 = e mod 3)
    auto M3 = symmod::standard_module(TypeD::parse("3"));
    auto H3 = ThetaGroup::odd_model(M3);
    CHECK(H3.phi(H3.index_of({1, 0}), H3.index_of({0, 1})) == 2);
    // D=(5): b = 3*e entrywise (3 = (5+1)/2)
    auto M5 = symmod::standard_module(TypeD::parse("5"));
    auto H5 = ThetaGroup::odd_model(M5);
    for (size_t a = 0; a < H5.msize(); ++a)
        for (size_t b = 0; b < H5.msize(); ++b) {
            CHECK(H5.phi(a, b) ==
                  uint64_t(M5.pair(H5.elem(a), H5.elem(b))) * 3 % 5);
            // 2b = e and b alternating
            CHECK((2 * H5.phi(a, b)) % 5 == M5.pair(H5.elem(a), H5.elem(b)));
            CHECK((H5.phi(a, b) + H5.phi(b, a)) % 5 == 0);
        }
    // commutator pairing of the odd model equals e
    for (size_t a = 0; a < H3.msize(); ++a)
        for (size_t b = 0; b < H3.msize(); ++b)
            CHECK(H3.commutator(a, b) == H3.module_pairing(a, b));
    // even order is rejected
    CHECK_THROWS_AS(
        ThetaGroup::odd_model(symmod::standard_module(TypeD::parse("2"))),
        input_error);
}

TEST_CASE("odd canonical section is a homomorphism on all of SL2(F3)")
{
    auto M = symmod::standard_module(TypeD::parse("3"));
    auto H = ThetaGroup::odd_model(M);
    auto all = spgroup::enumerate_sp(1, 3);
    REQUIRE(all.size() == 24);
    // s(A) is an automorphism fixed by iota-conjugation
    ThetaAut iota;
    iota.a_cols = neg_id_cols(H);
    iota.beta.assign(H.msize(), 0);
    for (const auto &A : all) {
        auto s = odd_canonical_section(H, spmat_cols(A));
        CHECK(is_automorphism(H, s));
        auto conj = aut_compose(H, iota, aut_compose(H, s, iota));
        CHECK(aut_equal(H, conj, s));
    }
    // homomorphism on all pairs
    for (const auto &A : all)
        for (const auto &B : all) {
            auto sa = odd_canonical_section(H, spmat_cols(A));
            auto sb = odd_canonical_section(H, spmat_cols(B));
            auto sab = odd_canonical_section(H, spmat_cols(A.mul(B)));
            CHECK(aut_equal(H, aut_compose(H, sa, sb), sab));
        }
}

TEST_CASE("Baer sum: commutator pairing is the orthogonal sum")
{
    auto H2 = ThetaGroup::standard(TypeD::parse("2"));
    auto H3 = ThetaGroup::standard(TypeD::parse("3"));
    auto S = baer_sum(H2, H3);
    CHECK(S.n() == 12);
    CHECK(S.msize() == 36);
    for (size_t a = 0; a < S.msize(); ++a)
        for (size_t b = 0; b < S.msize(); ++b)
            CHECK(S.commutator(a, b) == S.module_pairing(a, b));
}

TEST_CASE("restrict(baer_sum) is framed isomorphic to the summand")
{
    auto H2 = ThetaGroup::standard(TypeD::parse("2"));
    auto H3 = ThetaGroup::standard(TypeD::parse("3"));
    // twist H2 by a coboundary so that the recovered witness is nonzero
    std::mt19937_64 gen(5);
    std::vector<uint32_t> beta0(H2.msize());
    beta0[0] = 0;
    for (size_t i = 1; i < H2.msize(); ++i)
        beta0[i] = gen() % H2.n();
    std::vector<uint16_t> twisted(H2.msize() * H2.msize());
    for (size_t a = 0; a < H2.msize(); ++a)
        for (size_t b = 0; b < H2.msize(); ++b)
            twisted[a * H2.msize() + b] = static_cast<uint16_t>(
                (H2.phi(a, b) + beta0[H2.add(a, b)] + 4 * H2.n() - beta0[a] -
                 beta0[b]) %
                H2.n());
    auto T2 = ThetaGroup::from_table(H2.module(), H2.n(), twisted);

    auto S = baer_sum(T2, H3);
    auto R = restrict_theta(S, {0, 1}); // the M_(2) block generators
    auto R4 = center_reduce(R, 4);
    auto wit = framed_isomorphism(R4, H2);
    REQUIRE(wit.has_value());
    // the witness transports T2's cocycle onto H2's; spot-verified inside
    // framed_isomorphism, assert the shape here
    CHECK(wit->size() == H2.msize());
    CHECK((*wit)[0] == 0);

    // restricting to the full module is the identity operation
    auto Rfull = restrict_theta(H2, {0, 1});
    for (size_t a = 0; a < H2.msize(); ++a)
        for (size_t b = 0; b < H2.msize(); ++b)
            CHECK(Rfull.phi(a, b) == H2.phi(a, b));
}

TEST_CASE("baer_sum(H_(2), H_(2)) framed isomorphic to H_(2,2)")
{
    auto H2 = ThetaGroup::standard(TypeD::parse("2"));
    auto S = baer_sum(H2, H2);
    // reorder generators (x1, chi1, x2, chi2) -> (x1, x2, chi1, chi2)
    auto P = permute_generators(S, {0, 2, 1, 3});
    auto H22 = ThetaGroup::standard(TypeD::parse("2,2"));
    REQUIRE(P.module().gram == H22.module().gram);
    auto wit = framed_isomorphism(P, H22);
    CHECK(wit.has_value());
}

TEST_CASE("Schrodinger representation")
{
    // D=(2): Pauli matrices
    {
        TypeD D = TypeD::parse("2");
        auto H = ThetaGroup::standard(D);
        SchrodingerRep rep(D);
        CHECK(rep.dim() == 2);
        auto X = rep.image(H, elt(H, 0, {1, 0}));
        CHECK(X.row_of_col == std::vector<uint32_t>{1, 0});
        CHECK(X.exp_of_col == std::vector<uint32_t>{0, 0});
        auto Z = rep.image(H, elt(H, 0, {0, 1}));
        CHECK(Z.row_of_col == std::vector<uint32_t>{0, 1});
        CHECK(Z.exp_of_col == std::vector<uint32_t>{0, 2}); // diag(1, -1)
        auto I = rep.image(H, H.identity());
        CHECK(I == monomial_identity(2, 4));
        // center acts by the scalar zeta
        auto C = rep.image(H, {1, 0});
        CHECK(C.row_of_col == std::vector<uint32_t>{0, 1});
        CHECK(C.exp_of_col == std::vector<uint32_t>{1, 1});
    }
    // multiplicativity and faithfulness, exhaustive for small types
    for (const char *t : {"2", "3", "2,2"}) {
        TypeD D = TypeD::parse(t);
        auto H = ThetaGroup::standard(D);
        SchrodingerRep rep(D);
        CHECK(rep.dim() == D.card());
        std::vector<ThetaGroup::Elt> elems;
        for (uint32_t tt = 0; tt < H.n(); ++tt)
            for (size_t m = 0; m < H.msize(); ++m)
                elems.push_back({tt, uint32_t(m)});
        size_t kernel = 0;
        for (auto x : elems) {
            if (rep.image(H, x) == monomial_identity(rep.dim(), H.n()))
                ++kernel;
            for (auto y : elems)
                CHECK(monomial_mul(rep.image(H, x), rep.image(H, y)) ==
                      rep.image(H, H.mul(x, y)));
        }
        CHECK(kernel == 1); // faithful
    }
}

TEST_CASE("quadratic refinements: counts and the translation action")
{
    {
        auto H = ThetaGroup::standard(TypeD::parse("2"));
        auto qs = quadratic_refinements(H);
        CHECK(qs.size() == 4);
    }
    {
        auto H = ThetaGroup::standard(TypeD::parse("2,2"));
        auto qs = quadratic_refinements(H);
        CHECK(qs.size() == 16);
        // translating a refinement by e(m, .) gives another refinement
        std::set<std::vector<uint8_t>> qset(qs.begin(), qs.end());
        for (size_t m = 0; m < H.msize(); ++m) {
            std::vector<uint8_t> q = qs[0];
            for (size_t x = 0; x < H.msize(); ++x)
                q[x] = static_cast<uint8_t>(
                    q[x] ^ (H.module_pairing(m, x) ? 1 : 0));
            CHECK(qset.count(q) == 1);
        }
        // and the refinements form a single orbit of that action
        std::set<std::vector<uint8_t>> orbit;
        for (size_t m = 0; m < H.msize(); ++m) {
            std::vector<uint8_t> q = qs[0];
            for (size_t x = 0; x < H.msize(); ++x)
                q[x] = static_cast<uint8_t>(
                    q[x] ^ (H.module_pairing(m, x) ? 1 : 0));
            orbit.insert(q);
        }
        CHECK(orbit == qset);
    }
}
