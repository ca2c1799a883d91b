#pragma once

// Degree-2 group cohomology with coefficients in the symplectic module:
// the extension cocycle c_D of 1 -> M_D -> Aut(G_D) -> Sp(M_D) -> 1
// restricted to finite subgroups, coboundary decisions with witnesses or
// inconsistency certificates, Sylow restriction, and the negligibility
// criterion via stabilizer abelianizations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thetaobs/spgroup.hpp"
#include "thetaobs/theta.hpp"

namespace thetaobs::cohom {

using spgroup::SpMat;
using theta::ThetaGroup;

// Explicit element table of a finite matrix group, closed by BFS from
// the generators (deterministic element order).
class GroupTable {
  public:
    static GroupTable closure(const std::vector<SpMat> &gens,
                              uint64_t cap = 1 << 20);

    size_t size() const { return elems_.size(); }
    const SpMat &elem(size_t i) const { return elems_[i]; }
    size_t identity() const { return id_; }
    size_t mul(size_t a, size_t b) const;
    size_t inv(size_t a) const;
    size_t index_of(const SpMat &m) const; // throws if absent
    bool contains(const SpMat &m) const;
    const std::vector<size_t> &generator_indices() const { return gen_idx_; }

  private:
    std::vector<SpMat> elems_;
    std::map<std::vector<uint8_t>, size_t> index_;
    std::vector<size_t> gen_idx_;
    std::vector<uint32_t> inv_;
    mutable std::vector<uint16_t> mul_table_; // filled when size <= 1024
    size_t id_ = 0;
};

// Normalized 2-cocycle c: G x G -> M, stored as module element indices.
struct Cocycle2 {
    const GroupTable *G = nullptr;
    const ThetaGroup *H = nullptr; // provides M, indexing, pairing
    std::vector<uint32_t> sp_index; // per group element: M-index image map
    std::vector<uint32_t> table;    // |G|^2 entries, module indices

    uint32_t at(size_t g, size_t h) const { return table[g * G->size() + h]; }
    // action of group element g on module index m
    uint32_t act(size_t g, uint32_t m) const;
    std::vector<std::vector<uint32_t>> act_perm; // per element: index perm
};

// The extension cocycle from theta-lift defects: alpha_g alpha_h =
// inner(c(g,h)) alpha_{gh}, with alpha_1 = id.  A nonzero twist_seed
// composes each lift with a seeded inner automorphism: a different
// representative of the same class, for stability tests.
Cocycle2 extension_cocycle(const ThetaGroup &H, const GroupTable &G,
                           uint64_t twist_seed = 0);

// Cocycle identity check: exhaustive when |G|^3 <= exhaustive_cap,
// otherwise `samples` seeded random triples.
bool validate_cocycle(const Cocycle2 &c, uint64_t exhaustive_cap = 1 << 18,
                      size_t samples = 1000000, uint64_t seed = 1);

struct CoboundaryResult {
    bool solvable = false;
    // witness f: G -> M (module indices), f(1) = 0, with
    // c(g,h) = g.f(h) - f(gh) + f(g), verified on all pairs
    std::vector<uint32_t> witness;
    std::string certificate; // human-readable on unsolvable
};

// Requires a homogeneous module (all generator moduli equal).
CoboundaryResult is_coboundary(const Cocycle2 &c);

// Restriction to a subgroup (built by closure of its own generators;
// every element must lie in c's group).
Cocycle2 restrict_cocycle(const Cocycle2 &c, const GroupTable &sub);

// Pointwise difference cocycle c1 - c2 (same group and module).
Cocycle2 difference(const Cocycle2 &a, const Cocycle2 &b);

struct SylowVerdict {
    uint32_t g = 0;
    uint64_t sylow_order = 0;
    bool nonzero = false; // restriction to the Sylow-2 is not a coboundary
    std::string detail;
};

// D = (2,...,2) of length g <= 3: restrict c_D to the Sylow 2-subgroup
// (the Borel) and decide.  Restriction to a Sylow 2-subgroup is
// injective on H^2 with 2-torsion coefficients (transfer argument), so
// this verdict decides c_D itself.
SylowVerdict nonzero_via_sylow(uint32_t g);

struct OrbitRow {
    bool zero_orbit = false;
    uint64_t stab_order = 0;
    uint64_t stab_ab_order = 0;
    bool phi_vanishes = false;
};

struct NegligibilityReport {
    uint32_t g = 0;
    std::vector<OrbitRow> rows;
    bool all_phi_vanish = false;
    bool cd_nonzero = false;
    bool cd_nonzero_cited = false; // true when not recomputed (g = 4)
    std::string verdict;
};

// g <= 4.
NegligibilityReport negligibility_report(uint32_t g);

struct LiftingDecision {
    bool lifts = false;
    std::string certificate;
    // section as theta automorphisms per group element, verified to be a
    // homomorphism pairwise when lifts = true
    std::vector<theta::ThetaAut> section;
};

LiftingDecision lifting_decision(const ThetaGroup &H, const GroupTable &G,
                                 bool verify_all_pairs = true);

// For the odd symmetric model: recover the coboundary witness of an
// extension cocycle from the canonical section offsets, no solver.
std::vector<uint32_t> odd_section_witness(const ThetaGroup &Hodd,
                                          const GroupTable &G,
                                          const Cocycle2 &c);

} // namespace thetaobs::cohom
