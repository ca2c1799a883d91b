#pragma once

// The two exceptional isomorphisms of the build: S_6 ~ Sp_4(F_2) through
// the six-point model N = ker(Sigma)/im(Delta) in F_2^6, and the double
// cover W(E_7) ->> Sp_6(F_2) through reduction of the root lattice mod 2.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thetaobs/ringlinalg.hpp"
#include "thetaobs/spgroup.hpp"
#include "thetaobs/symmod.hpp"

namespace thetaobs::exceptional {

// ---------------------------------------------------------------------
// Six-point model.  Basis of N: u_i = b_i + b_6 for i = 1..4; the fifth
// coset u_5 = b_5 + b_6 equals u_1+u_2+u_3+u_4 in N.

struct SixPointModel {
    // Gram of e_N on u_1..u_4: zero diagonal, ones off the diagonal.
    symmod::SymplecticModule module() const;
    // the induced 4x4 matrix over F_2 of a permutation of {1..6} (0-based)
    spgroup::SpMat image(const std::array<uint8_t, 6> &sigma) const;
};

spgroup::SpMat s6_to_sp4(const std::array<uint8_t, 6> &sigma);

struct S6Certification {
    bool all_images_symplectic = false;
    bool homomorphism = false; // generator pairs + sampled pairs
    bool injective = false;    // exhaustive over all 720 permutations
    uint64_t image_order = 0;  // expected 720
};

S6Certification certify_s6(uint64_t seed = 2024, size_t samples = 10000);

// ---------------------------------------------------------------------
// E7 lattice.

struct E7Data {
    ring::IntMat cartan;                        // 7x7, symmetric
    std::vector<std::array<int64_t, 7>> roots;  // 126, lattice coordinates
    std::vector<ring::IntMat> simple_reflections; // 7
};

E7Data build_e7();

struct WeylCertification {
    uint64_t weyl_order = 0;     // expected 2903040
    uint64_t image_order = 0;    // expected 1451520
    bool minus_id_in_w = false;  // -I sifts into the chain
    bool kernel_is_pm_id = false;
    bool fibers_are_pm_pairs = false; // roots -> N two-to-one
    bool det_splits = false;          // W = W^1 x {+-1}
    symmod::TypeD n_type;             // classification of (N, e_N)
    std::vector<spgroup::SpMat> rho_simple; // 6x6 images of s_1..s_7
};

WeylCertification certify_weyl_e7(uint64_t seed = 2024,
                                  size_t samples = 10000);

// Golden text: the 126 roots and the images of the simple reflections.
std::string e7_golden_text();

// Fraction-free integer determinant (small matrices).
int64_t int_det(const ring::IntMat &a);

} // namespace thetaobs::exceptional
