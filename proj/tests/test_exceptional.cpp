#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thetaobs/exceptional.hpp"

using namespace thetaobs;
using namespace thetaobs::exceptional;

TEST_CASE("six-point model: identity, transposition, certification")
{
    SixPointModel model;
    auto M = model.module();
    // pairing is alternating and nondegenerate of type (2,2)
    CHECK(symmod::classify(M).type == symmod::TypeD::parse("2,2"));

    std::array<uint8_t, 6> id{0, 1, 2, 3, 4, 5};
    CHECK(s6_to_sp4(id) == spgroup::SpMat::identity(4, 2));

    std::array<uint8_t, 6> t12{1, 0, 2, 3, 4, 5};
    auto m = s6_to_sp4(t12);
    CHECK(!(m == spgroup::SpMat::identity(4, 2)));
    CHECK(m.mul(m) == spgroup::SpMat::identity(4, 2)); // involution

    auto cert = certify_s6(42, 2000);
    CHECK(cert.all_images_symplectic);
    CHECK(cert.homomorphism);
    CHECK(cert.injective);
    CHECK(cert.image_order == 720);
}

TEST_CASE("E7 lattice data")
{
    auto e7 = build_e7();
    CHECK(e7.roots.size() == 126);
    CHECK(int_det(e7.cartan) == 2);
    auto s = ring::smith_form(e7.cartan);
    for (size_t i = 0; i < 6; ++i)
        CHECK(s.S.at(i, i) == 1);
    CHECK(s.S.at(6, 6) == 2);
    // all reflections have determinant -1 and order 2
    for (const auto &r : e7.simple_reflections) {
        CHECK(int_det(r) == -1);
        CHECK(r.mul(r) == ring::IntMat::identity(7));
    }
}

TEST_CASE("W(E7) -> Sp_6(F_2): orders, kernel, fibers")
{
    auto cert = certify_weyl_e7(7, 500);
    CHECK(cert.weyl_order == 2903040);
    CHECK(cert.image_order == 1451520);
    CHECK(cert.minus_id_in_w);
    CHECK(cert.kernel_is_pm_id);
    CHECK(cert.fibers_are_pm_pairs);
    CHECK(cert.det_splits);
    CHECK(cert.n_type == symmod::TypeD::parse("2,2,2"));
    CHECK(cert.rho_simple.size() == 7);
}

TEST_CASE("golden text is stable across calls")
{
    auto a = e7_golden_text();
    auto b = e7_golden_text();
    CHECK(a == b);
    CHECK(a.substr(0, 13) == "e7-roots 126\n");
}
