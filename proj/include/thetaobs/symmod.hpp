#pragma once

// Finite symplectic modules: types D, the standard module (M_D, e_D),
// classification of a raw alternating pairing into its type with an
// explicit symplectic basis, direct sums, prime-part decomposition.
//
// Pairings are stored additively: a value v means the root of unity
// zeta_N^v, where N is the module's scalar modulus.  No root of unity is
// ever evaluated.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thetaobs/ringlinalg.hpp"

namespace thetaobs::symmod {

// Element of a module presented as ⊕ Z/m_i: one residue per generator.
using Vec = std::vector<uint32_t>;

struct TypeD {
    std::vector<uint32_t> divisors; // d_1 | d_2 | ... | d_g, all >= 2

    size_t g() const { return divisors.size(); }
    uint64_t card() const; // #D = d_1 ... d_g
    // n = d_g for odd d_g, 2 d_g for even d_g.
    uint32_t scalar_modulus() const;
    void validate() const;

    std::string to_string() const; // "2,2,2"
    static TypeD parse(const std::string &text);
    bool operator==(const TypeD &o) const = default;
    auto operator<=>(const TypeD &o) const = default;
};

// A finite abelian group ⊕ Z/m_i with an alternating pairing given by a
// Gram table of exponents mod scalar_mod.  Standard modules carry their
// type; raw presentations do not.
struct SymplecticModule {
    std::vector<uint32_t> moduli; // per generator, each >= 1
    uint32_t scalar_mod = 2;      // N
    ring::ResMatrix gram;         // moduli.size() square, entries mod N
    std::optional<TypeD> type;    // set for standard modules

    size_t rank() const { return moduli.size(); }
    uint64_t order() const;

    // Bilinear extension of the Gram table.
    uint32_t pair(const Vec &a, const Vec &b) const;
    Vec add(const Vec &a, const Vec &b) const;
    Vec neg(const Vec &a) const;
    Vec scale(const Vec &a, uint64_t c) const;
    Vec zero() const { return Vec(moduli.size(), 0); }
    uint64_t elem_order(const Vec &a) const;

    // All elements, in lexicographic order.  capacity_error above the cap.
    std::vector<Vec> elements(uint64_t cap = uint64_t(1) << 16) const;

    // Structural checks: entries reduced, Gram alternating/antisymmetric,
    // pairing well defined (m_i * G_ij = 0 mod N).
    void validate() const;

    std::string to_text() const;
    static SymplecticModule from_text(const std::string &text);
};

// (M_D, e_D): generators x_1..x_g (the K_D part) then chi_1..chi_g (the
// dual part); e_D(x_i, chi_j) = delta_ij * n/d_i as an exponent mod n.
SymplecticModule standard_module(const TypeD &D);

struct Classification {
    TypeD type;
    std::vector<Vec> e, f; // symplectic basis in input coordinates
};

// Constructive Lagrangian decomposition.  Throws input_error with a
// radical element named if the pairing is degenerate.
Classification classify(const SymplecticModule &M);

// Orthogonal direct sum; scalar modulus becomes lcm of the two.
SymplecticModule direct_sum(const SymplecticModule &a,
                            const SymplecticModule &b);

// p-primary pieces with restricted pairing, keyed by prime.
std::map<uint32_t, SymplecticModule> prime_parts(const SymplecticModule &M);

} // namespace thetaobs::symmod
