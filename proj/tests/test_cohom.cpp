#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "thetaobs/cohom.hpp"

using namespace thetaobs;
using namespace thetaobs::cohom;
using symmod::TypeD;
using theta::ThetaGroup;

namespace {

GroupTable full_sp(uint32_t g, uint32_t d)
{
    spgroup::SpContext ctx(g, d);
    return GroupTable::closure(ctx.transvection_generators());
}

} // namespace

TEST_CASE("GroupTable closure sizes and arithmetic")
{
    auto g6 = full_sp(1, 2);
    CHECK(g6.size() == 6);
    auto sl2f3 = full_sp(1, 3);
    CHECK(sl2f3.size() == 24);
    auto sp4 = full_sp(2, 2);
    CHECK(sp4.size() == 720);
    for (size_t a = 0; a < g6.size(); ++a) {
        CHECK(g6.mul(a, g6.inv(a)) == g6.identity());
        for (size_t b = 0; b < g6.size(); ++b) {
            auto prod = g6.elem(a).mul(g6.elem(b));
            CHECK(g6.elem(g6.mul(a, b)) == prod);
        }
    }
}

TEST_CASE("trivial subgroup gives the zero cocycle")
{
    auto H = ThetaGroup::standard(TypeD::parse("2"));
    GroupTable triv =
        GroupTable::closure({spgroup::SpMat::identity(2, 2)});
    CHECK(triv.size() == 1);
    auto c = extension_cocycle(H, triv);
    CHECK(c.table == std::vector<uint32_t>{0});
    auto cb = is_coboundary(c);
    CHECK(cb.solvable);
    CHECK(cb.witness == std::vector<uint32_t>{0});
}

TEST_CASE("odd D: cocycle valid, coboundary, section witness matches")
{
    auto M = symmod::standard_module(TypeD::parse("3"));
    auto H = ThetaGroup::odd_model(M);
    auto G = full_sp(1, 3);
    auto c = extension_cocycle(H, G);
    CHECK(validate_cocycle(c)); // exhaustive at 24^3 triples
    auto cb = is_coboundary(c);
    CHECK(cb.solvable);
    // the canonical-section witness reproduces the cocycle exactly
    auto f = odd_section_witness(H, G, c);
    for (size_t g = 0; g < G.size(); ++g)
        for (size_t h = 0; h < G.size(); ++h) {
            uint32_t delta = H.add(
                c.act(g, f[h]), H.add(f[g], H.neg(f[G.mul(g, h)])));
            CHECK(delta == c.at(g, h));
        }
}

TEST_CASE("lifting decision is yes for every subgroup of SL2(F3), D=(3)")
{
    auto M = symmod::standard_module(TypeD::parse("3"));
    auto H = ThetaGroup::odd_model(M);
    auto G = full_sp(1, 3);
    // all subgroups arise as closures of pairs (every subgroup here is
    // at most 2-generated)
    std::set<std::vector<size_t>> seen;
    size_t tested = 0;
    for (size_t a = 0; a < G.size(); ++a)
        for (size_t b = 0; b < G.size(); ++b) {
            auto sub =
                GroupTable::closure({G.elem(a), G.elem(b)});
            std::vector<size_t> key;
            for (size_t i = 0; i < sub.size(); ++i)
                key.push_back(G.index_of(sub.elem(i)));
            std::sort(key.begin(), key.end());
            if (!seen.insert(key).second)
                continue;
            auto dec = lifting_decision(H, sub);
            CHECK(dec.lifts);
            ++tested;
        }
    CHECK(tested >= 7); // 1, C2, C3, C4, C6, Q8, SL2(F3)
}

TEST_CASE("D=(2): full S3 verdict recorded and Sylow-consistent")
{
    auto H = ThetaGroup::standard(TypeD::parse("2"));
    auto G = full_sp(1, 2);
    auto c = extension_cocycle(H, G);
    CHECK(validate_cocycle(c));
    auto cb = is_coboundary(c);
    // recorded, not asserted: but solvability must agree with the Sylow
    // restriction (transfer injectivity on 2-torsion classes)
    auto sylow = nonzero_via_sylow(1);
    CHECK(sylow.sylow_order == 2);
    CHECK(cb.solvable == !sylow.nonzero);
}

TEST_CASE("D=(2,2): cocycle validity, verdict stability, restriction")
{
    auto H = ThetaGroup::standard(TypeD::parse("2,2"));
    auto G = full_sp(2, 2);
    auto c = extension_cocycle(H, G);
    CHECK(validate_cocycle(c, 1 << 18, 200000, 99));

    auto cb1 = is_coboundary(c);
    // stability under re-choice of lifts
    auto c2 = extension_cocycle(H, G, 0xfeed);
    auto cb2 = is_coboundary(c2);
    CHECK(cb1.solvable == cb2.solvable);
    // the difference of the two representatives is a coboundary
    auto diff = difference(c, c2);
    auto cbd = is_coboundary(diff);
    CHECK(cbd.solvable);

    // restriction to the Sylow-16 subgroup commutes with the class
    spgroup::SpContext ctx(2, 2);
    auto sylow = GroupTable::closure(ctx.borel_generators());
    CHECK(sylow.size() == 16);
    auto restricted = restrict_cocycle(c, sylow);
    auto direct = extension_cocycle(H, sylow);
    auto d2 = difference(restricted, direct);
    CHECK(is_coboundary(d2).solvable);
    // and solvability on the full group implies it on the Sylow
    auto cbs = is_coboundary(restricted);
    if (cb1.solvable)
        CHECK(cbs.solvable);
    // verdicts agree by Sylow injectivity
    CHECK(cb1.solvable == cbs.solvable);
}

TEST_CASE("restriction of a coboundary is the coboundary of the restriction")
{
    auto H = ThetaGroup::standard(TypeD::parse("2"));
    auto G = full_sp(1, 2);
    auto c = extension_cocycle(H, G);
    auto cb = is_coboundary(c);
    if (cb.solvable) {
        // restrict to the order-2 subgroup generated by some involution
        size_t invol = 0;
        for (size_t i = 0; i < G.size(); ++i)
            if (i != G.identity() && G.mul(i, i) == G.identity()) {
                invol = i;
                break;
            }
        auto sub = GroupTable::closure({G.elem(invol)});
        auto cr = restrict_cocycle(c, sub);
        auto cbr = is_coboundary(cr);
        CHECK(cbr.solvable);
    }
}

TEST_CASE("nonzero_via_sylow verdicts for g = 1, 2")
{
    auto v1 = nonzero_via_sylow(1);
    CHECK(v1.sylow_order == 2);
    auto v2 = nonzero_via_sylow(2);
    CHECK(v2.sylow_order == 16);
    // recorded: no paper assertion for these two; the g=3 case is the
    // acceptance-criterion check (Prop: c_D != 0 for g >= 3)
    MESSAGE("c_(2) Sylow verdict: ", (v1.nonzero ? std::string("nonzero") : std::string("coboundary")));
    MESSAGE("c_(2,2) Sylow verdict: ", (v2.nonzero ? std::string("nonzero") : std::string("coboundary")));
}

TEST_CASE("negligibility report for g = 2")
{
    auto rep = negligibility_report(2);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].zero_orbit);
    CHECK(rep.rows[0].phi_vanishes);
    CHECK(rep.rows[1].stab_order == 48);
    CHECK(rep.rows[1].stab_ab_order == 4);
    CHECK(!rep.rows[1].phi_vanishes);
    CHECK(!rep.cd_nonzero_cited);
}

TEST_CASE("inner automorphism equals conjugation by a lift")
{
    auto H = ThetaGroup::standard(TypeD::parse("2,2"));
    for (size_t m = 0; m < H.msize(); ++m) {
        auto am = theta::inner_aut(H, H.elem(m));
        for (uint32_t t = 0; t < H.n(); ++t) {
            ThetaGroup::Elt lift{t, uint32_t(m)};
            for (size_t x = 0; x < H.msize(); ++x)
                for (uint32_t s = 0; s < H.n(); ++s) {
                    ThetaGroup::Elt y{s, uint32_t(x)};
                    auto conj = H.mul(H.mul(lift, y), H.inv(lift));
                    CHECK(conj == theta::aut_apply(H, am, y));
                }
        }
    }
}
