#pragma once

// Finite theta groups H_D = G_D[n]: mu_n central extensions of a finite
// symplectic module (M, e) whose commutator pairing equals e.  A group is
// presented by its structure cocycle phi: M x M -> Z/n; elements are
// pairs (t, m) with product (t, m)(t', m') = (t + t' + phi(m, m'), m+m').
//
// Automorphisms restricting to the identity on the center are pairs
// (A, beta): (t, m) -> (t + beta(m), A m), where A preserves e and beta
// satisfies  beta(m+m') - beta(m) - beta(m') = phi(Am, Am') - phi(m, m').

#include <cstdint>
#include <optional>
#include <vector>

#include "thetaobs/spgroup.hpp"
#include "thetaobs/symmod.hpp"

namespace thetaobs::theta {

using symmod::SymplecticModule;
using symmod::TypeD;
using symmod::Vec;

class ThetaGroup {
  public:
    // H_D with the standard cocycle phi((x,chi),(x',chi')) =
    // sum_i (n/d_i) chi'_i x_i.
    static ThetaGroup standard(const TypeD &D);

    // The symmetric model for odd #M: phi = b with 2b = e.
    static ThetaGroup odd_model(const SymplecticModule &M);

    // Arbitrary cocycle table (row-major #M x #M exponents mod n).
    static ThetaGroup from_table(const SymplecticModule &M, uint32_t n,
                                 std::vector<uint16_t> table);

    const SymplecticModule &module() const { return M_; }
    uint32_t n() const { return n_; }
    size_t msize() const { return elems_.size(); }
    uint64_t order() const { return uint64_t(n_) * msize(); }

    size_t index_of(const Vec &v) const;
    const Vec &elem(size_t i) const { return elems_[i]; }
    size_t add(size_t a, size_t b) const;
    size_t neg(size_t a) const;

    uint32_t phi(size_t a, size_t b) const;
    // commutator pairing e(a, b) = phi(a,b) - phi(b,a)
    uint32_t commutator(size_t a, size_t b) const;
    // the module pairing rescaled to exponents mod n
    uint32_t module_pairing(size_t a, size_t b) const;

    struct Elt {
        uint32_t t;
        uint32_t m;
        bool operator==(const Elt &) const = default;
    };
    Elt mul(Elt a, Elt b) const;
    Elt inv(Elt a) const;
    Elt identity() const { return {0, 0}; }

    // cocycle identity on a triple of module indices
    bool cocycle_identity(size_t a, size_t b, size_t c) const;

  private:
    enum class Kind { Standard, Odd, Table };
    Kind kind_ = Kind::Table;
    SymplecticModule M_;
    uint32_t n_ = 2;
    TypeD type_{}; // standard only
    std::vector<Vec> elems_;
    std::vector<uint64_t> weights_; // mixed-radix index weights
    std::vector<uint16_t> table_;   // Table kind
    uint32_t pair_scale_ = 1;       // n / M.scalar_mod

    void init_elements();
};

// ---------------------------------------------------------------------
// Automorphisms

struct ThetaAut {
    // column i = image of the i-th module generator
    std::vector<Vec> a_cols;
    // beta indexed by module element index, exponents mod n
    std::vector<uint32_t> beta;
};

// Image of a module element index under the symplectic part.
size_t apply_sp(const ThetaGroup &H, const ThetaAut &aut, size_t m);
ThetaAut aut_identity(const ThetaGroup &H);
ThetaAut aut_compose(const ThetaGroup &H, const ThetaAut &f,
                     const ThetaAut &g); // f after g
ThetaAut aut_inverse(const ThetaGroup &H, const ThetaAut &f);
bool aut_equal(const ThetaGroup &H, const ThetaAut &f, const ThetaAut &g);

// Homomorphism condition; exhaustive when #M <= exhaustive_cap, sampled
// (seeded) beyond.
bool is_automorphism(const ThetaGroup &H, const ThetaAut &aut,
                     size_t exhaustive_cap = 4096, uint64_t seed = 1);

// Apply to a group element.
ThetaGroup::Elt aut_apply(const ThetaGroup &H, const ThetaAut &aut,
                          ThetaGroup::Elt x);

// alpha_m: A = I, beta(x) = e(m, x) (exponents mod n).
ThetaAut inner_aut(const ThetaGroup &H, const Vec &m);

// Lift of a pairing-preserving map given by generator images; beta found
// by the Z/n linear solve.  nullopt when the system is unsolvable (never
// for genuine Sp elements; soundness alarm at the caller).
std::optional<ThetaAut> lift_sp(const ThetaGroup &H,
                                const std::vector<Vec> &a_cols);

// All beta solutions over the given symplectic part (small modules).
std::vector<ThetaAut> all_lifts(const ThetaGroup &H,
                                const std::vector<Vec> &a_cols,
                                uint64_t cap = 1 << 16);

bool is_inversion(const ThetaGroup &H, const ThetaAut &aut);
std::vector<ThetaAut> find_inversions(const ThetaGroup &H,
                                      uint64_t cap = 1 << 16);

// Generator-image columns of -Id and of an SpMat over F_d.
std::vector<Vec> neg_id_cols(const ThetaGroup &H);
std::vector<Vec> spmat_cols(const spgroup::SpMat &a);

// The canonical section A -> (A, 0) of the odd model; checked to be a
// homomorphism by the callers.
ThetaAut odd_canonical_section(const ThetaGroup &Hodd,
                               const std::vector<Vec> &a_cols);

// Framed isomorphism H1 -> H2 (identity on M and the center): a beta
// table with phi2 - phi1 = d(beta).  nullopt iff certified unsolvable.
std::optional<std::vector<uint32_t>>
framed_isomorphism(const ThetaGroup &H1, const ThetaGroup &H2);

// ---------------------------------------------------------------------
// Sums and restrictions (cocycle level)

ThetaGroup baer_sum(const ThetaGroup &H1, const ThetaGroup &H2);
// keep: indices of generators of H.module() to restrict to
ThetaGroup restrict_theta(const ThetaGroup &H,
                          const std::vector<size_t> &keep);
// Reindex generators: generator i of the result is generator perm[i] of H.
ThetaGroup permute_generators(const ThetaGroup &H,
                              const std::vector<size_t> &perm);
// Shrink the center mu_n to mu_new_n; every cocycle value must be
// divisible by n/new_n (true for restrictions of Baer sums).
ThetaGroup center_reduce(const ThetaGroup &H, uint32_t new_n);

// ---------------------------------------------------------------------
// Schrodinger representation of the standard H_D

struct MonomialMat {
    uint32_t n = 2;                   // exponent modulus
    std::vector<uint32_t> row_of_col; // dim entries
    std::vector<uint32_t> exp_of_col; // dim entries
    bool operator==(const MonomialMat &) const = default;
};

MonomialMat monomial_identity(size_t dim, uint32_t n);
MonomialMat monomial_mul(const MonomialMat &a, const MonomialMat &b);

class SchrodingerRep {
  public:
    explicit SchrodingerRep(const TypeD &D);
    size_t dim() const { return dim_; }
    uint32_t n() const { return n_; }
    MonomialMat image(const ThetaGroup &H, ThetaGroup::Elt x) const;

  private:
    TypeD D_;
    uint32_t n_;
    size_t dim_;
    std::vector<uint64_t> kweights_;
    size_t kindex(const std::vector<uint32_t> &y) const;
};

// ---------------------------------------------------------------------
// Quadratic refinements (type (2,...,2) only): tables q: M -> Z/2 with
// q(x+y) + q(x) + q(y) = e(x,y)/(n/2), found by brute force.
std::vector<std::vector<uint8_t>>
quadratic_refinements(const ThetaGroup &H);

} // namespace thetaobs::theta
