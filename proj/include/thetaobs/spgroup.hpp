#pragma once

// Symplectic groups Sp_2g(F_d) for homogeneous types (d,...,d), d prime:
// matrix generators, the permutation action on nonzero vectors, and
// deterministic stabilizer-chain (base and strong generating set)
// machinery for orders, membership, stabilizers and derived subgroups.

#include <cstdint>
#include <string>
#include <vector>

#include "thetaobs/error.hpp"

namespace thetaobs::spgroup {

// Permutation of {0..n-1} as an image table; (a*b)(x) = a(b(x)).
using Perm = std::vector<uint32_t>;

Perm perm_identity(size_t n);
Perm perm_mul(const Perm &a, const Perm &b);
Perm perm_inv(const Perm &a);
bool perm_is_identity(const Perm &a);

// ---------------------------------------------------------------------
// Deterministic Schreier-Sims stabilizer chain.

class StabChain {
  public:
    // forced_base points are used (in order) before any greedy choice;
    // the seed only permutes Schreier-generator processing order.
    StabChain(std::vector<Perm> generators, size_t npoints,
              uint64_t seed = 0, std::vector<uint32_t> forced_base = {});

    uint64_t order() const;
    bool contains(const Perm &p) const;
    size_t npoints() const { return npoints_; }
    const std::vector<Perm> &generators() const { return gens_; }
    std::vector<uint32_t> base() const;

    // Orbit of a point under the full group, sorted.
    std::vector<uint32_t> orbit_of(uint32_t point) const;

    // Stabilizer of a point, as its own chain.
    StabChain point_stabilizer(uint32_t point) const;

    uint64_t seed() const { return seed_; }

    struct LevelShape {
        uint32_t base;
        size_t ngens;
        size_t orbit;
    };
    std::vector<LevelShape> shape() const;

  private:
    struct Level {
        uint32_t base = 0;
        std::vector<Perm> gens;
        std::vector<int32_t> where;   // point -> index in orbit, or -1
        std::vector<uint32_t> orbit;  // discovery order
        std::vector<Perm> transversal; // u[i] maps base -> orbit[i]
        std::vector<Perm> transversal_inv;
    };

    size_t npoints_;
    uint64_t seed_;
    std::vector<Perm> gens_;
    std::vector<uint32_t> forced_base_;
    std::vector<Level> levels_;

    void add_strong(const Perm &h, size_t from_level);
    void process_level(size_t level);
    void recompute_orbit(size_t level);
    // returns level reached and residue
    std::pair<size_t, Perm> sift(const Perm &g) const;
    uint32_t choose_base_point(const Perm &g) const;
};

// Normal closure of the commutators of the generators: the derived
// subgroup.  Certified: contains all generator commutators and is
// closed under conjugation by the parent's generators.
StabChain derived_subgroup(const StabChain &G);

uint64_t abelianization_order(const StabChain &G);

// ---------------------------------------------------------------------
// Matrices over F_d acting on (F_d)^n.

struct SpMat {
    uint32_t n = 0; // side
    uint32_t p = 2; // prime modulus
    std::vector<uint8_t> e;

    SpMat() = default;
    SpMat(uint32_t n_, uint32_t p_) : n(n_), p(p_), e(size_t(n_) * n_, 0) {}
    static SpMat identity(uint32_t n, uint32_t p);

    uint8_t at(uint32_t r, uint32_t c) const { return e[size_t(r) * n + c]; }
    void set(uint32_t r, uint32_t c, uint32_t v)
    {
        e[size_t(r) * n + c] = static_cast<uint8_t>(v % p);
    }

    SpMat mul(const SpMat &o) const;
    SpMat inverse() const; // Gaussian over F_p; throws if singular
    SpMat transpose() const;
    bool operator==(const SpMat &o) const = default;
    auto operator<=>(const SpMat &o) const = default;

    std::vector<uint8_t> apply(const std::vector<uint8_t> &v) const;
    std::string to_text() const; // ringlinalg matrix text format
};

// ---------------------------------------------------------------------
// The Sp(M_D) context for homogeneous D = (d,...,d), d prime.

class SpContext {
  public:
    SpContext(uint32_t g, uint32_t d, uint64_t seed = 0);

    uint32_t g() const { return g_; }
    uint32_t d() const { return d_; }
    uint64_t seed() const { return seed_; }

    const SpMat &gram() const { return J_; }
    bool is_symplectic(const SpMat &a) const;

    // Root-subgroup generators x_alpha(1), x_{-alpha}(1) for the simple
    // roots; generation of the full group is certified against the
    // classical order formula by the callers' stabilizer chains.
    std::vector<SpMat> transvection_generators() const;

    // d^(g^2) * prod_{i=1..g} (d^(2i) - 1)
    uint64_t order_formula() const;

    // Permutation action on the d^(2g)-1 nonzero coordinate vectors.
    size_t npoints() const;
    uint32_t encode(const std::vector<uint8_t> &v) const; // nonzero vec
    std::vector<uint8_t> decode(uint32_t point) const;
    Perm to_perm(const SpMat &a) const;

    StabChain chain() const; // chain of the full group
    StabChain chain_of(const std::vector<SpMat> &gens) const;

    // Stabilizer of the standard complete isotropic flag <e1> c <e1,e2>
    // c ...; for d = 2 this is a Sylow 2-subgroup of order 2^(g^2).
    std::vector<SpMat> borel_generators() const;

    // Root elements (parameter c): i, j are 1-based axis indices.
    SpMat root_short(uint32_t i, uint32_t j, uint32_t c) const; // e_i-e_j
    SpMat root_mixed(uint32_t i, uint32_t j, uint32_t c) const; // e_i+e_j
    SpMat root_long(uint32_t i, uint32_t c) const;              // 2 e_i
    SpMat root_mixed_neg(uint32_t i, uint32_t j, uint32_t c) const;
    SpMat root_long_neg(uint32_t i, uint32_t c) const;

    std::string serialize_group(const std::vector<SpMat> &gens) const;

  private:
    uint32_t g_, d_;
    uint64_t seed_;
    SpMat J_;
};

struct LeviDecomposition {
    uint64_t stab_order = 0;     // |G_m|
    uint64_t levi_order = 0;     // |L|, expected |Sp_{2g-2}(F_2)|
    uint64_t unipotent_order = 0; // |U| = 2^(2g-1)
    uint64_t uu_order = 0;        // |[U,U]| = 2
    SpMat uu_generator;           // I + E
    bool levi_intersect_trivial = false;
    bool levi_normalizes_u = false;
    bool product_covers = false; // |L|*|U| == |G_m|
};

// d = 2 only; m is the first standard basis vector e_1.
LeviDecomposition levi_unipotent(const SpContext &ctx);

// Brute-force enumeration of all of Sp_2g(F_d); only for tiny cases.
std::vector<SpMat> enumerate_sp(uint32_t g, uint32_t d);

} // namespace thetaobs::spgroup
