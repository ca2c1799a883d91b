#pragma once

// Finite-precision (Z/2^k) verification of the paramodular-group lemmas:
// membership congruences for Sp^D_g(Z_2) with D = (1,..,1,2,..,2), the
// two involutions, the L/U/U^opp parametrizations, the displayed
// commutator identities and spanning claims, constructive reduction of
// kernel elements to L/U/U^opp words, expression of the structured
// generators as products of commutators, and the odd-prime congruence
// kernel.
//
// Matrices are held modulo 2^32 (natural uint32 wraparound) with an
// explicit validity precision `prec`: entries are trusted modulo 2^prec
// only.  Multiplication preserves precision; conjugating by D (the star
// involution, the alpha embedding) costs one bit.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "thetaobs/ringlinalg.hpp"
#include "thetaobs/spgroup.hpp"

namespace thetaobs::paramod {

struct PMat {
    uint32_t rows = 0, cols = 0;
    uint32_t prec = 32; // entries valid mod 2^prec
    std::vector<uint32_t> e;

    PMat() = default;
    PMat(uint32_t r, uint32_t c, uint32_t prec_ = 32)
        : rows(r), cols(c), prec(prec_), e(size_t(r) * c, 0)
    {
    }
    static PMat identity(uint32_t n, uint32_t prec = 32);

    uint32_t at(uint32_t r, uint32_t c) const { return e[size_t(r) * cols + c]; }
    void set(uint32_t r, uint32_t c, uint32_t v) { e[size_t(r) * cols + c] = v; }

    PMat mul(const PMat &o) const;
    PMat add(const PMat &o) const;
    PMat sub(const PMat &o) const;
    PMat transpose() const;
    PMat neg() const;
    // Gaussian inverse; requires odd-unimodular mod 2 (throws otherwise).
    PMat inverse() const;
    bool equal_mod(const PMat &o, uint32_t bits) const;
    bool is_identity_mod(uint32_t bits) const;
};

// Word letters: members of L, U, U^opp stored by their parameter.
struct Letter {
    enum class Kind { L, U, Uopp };
    Kind kind;
    PMat param; // g x g: an L' matrix or a U' matrix
};

// A product of commutators of Gamma members.
struct CommutatorWord {
    std::vector<std::pair<PMat, PMat>> pairs;
    size_t size() const { return pairs.size(); }
};

struct CheckReport {
    std::string name;
    bool pass = false;
    size_t trials = 0;
    std::string detail;
};

class ParamodContext {
  public:
    ParamodContext(uint32_t n, uint32_t k);

    uint32_t n() const { return n_; }
    uint32_t k() const { return k_; }
    uint32_t g() const { return n_ + k_; }

    const PMat &J() const { return J_; }
    PMat h() const; // ((0, I),(-I, 0))

    // gamma^t J gamma = J and the 12-subblock evenness, mod 2^bits
    bool is_member(const PMat &gamma, uint32_t bits) const;
    // the equivalent displayed conditions: X^t D Z, Y^t D W symmetric,
    // X^t D W - Z^t D Y = D, plus evenness
    bool member_conditions(const PMat &gamma, uint32_t bits) const;
    // in Gamma = ker(red_D)
    bool in_kernel(const PMat &gamma, uint32_t bits) const;

    bool is_Lprime(const PMat &x, uint32_t bits) const;
    bool is_Uprime(const PMat &y, uint32_t bits) const;

    PMat embed_alpha(const PMat &x) const; // X -> diag(X, D^-1 X^-t D)
    PMat embed_beta(const PMat &y) const;  // Y -> ((I, Y),(0, I))
    PMat embed_beta_opp(const PMat &y) const;
    PMat letter_matrix(const Letter &l) const;

    PMat star(const PMat &gamma) const;   // prec - 1
    PMat h_conj(const PMat &gamma) const; // exact

    spgroup::SpMat red(const PMat &gamma) const; // to Sp_2k(F_2)

    // block embeddings of the two symplectic factors
    PMat embed_sp_n(const PMat &a) const; // a: 2n x 2n, standard Sp_2n
    PMat embed_sp_k(const PMat &a) const; // a: 2k x 2k, standard Sp_2k

    // admissible random samples (never rejection over all matrices)
    PMat random_Lprime(std::mt19937_64 &rng) const;
    PMat random_Uprime(std::mt19937_64 &rng) const;
    Letter random_letter(std::mt19937_64 &rng) const;

    // ------ constructive machinery ------

    // gamma in Gamma (mod 2^bits): word of L/U/U^opp letters whose
    // product equals gamma mod 2^bits.
    std::vector<Letter> reduce_to_identity(const PMat &gamma,
                                           uint32_t bits) const;

    // products of commutators of Gamma members realizing the structured
    // generators; each result is verified by multiplication mod 2^bits
    // before being returned (soundness_error otherwise).
    CommutatorWord cw_alpha_upper(const PMat &t12, uint32_t bits) const;
    CommutatorWord cw_alpha_lower(const PMat &s21, uint32_t bits) const;
    CommutatorWord cw_sp2n(const PMat &a, uint32_t bits) const;
    CommutatorWord cw_sp2k_48(const PMat &a, uint32_t bits) const;
    CommutatorWord cw_alpha(const PMat &x, uint32_t bits) const;
    CommutatorWord cw_beta(const PMat &y, uint32_t bits) const;
    CommutatorWord cw_beta_opp(const PMat &y, uint32_t bits) const;
    CommutatorWord cw_letter(const Letter &l, uint32_t bits) const;

    PMat word_value(const CommutatorWord &w) const;
    PMat letters_value(const std::vector<Letter> &w) const;

  private:
    uint32_t n_, k_;
    PMat J_;
    PMat dmat_;

    PMat d_conj(const PMat &m) const;     // D^-1 M D, prec - 1
    PMat d_conj_inv(const PMat &m) const; // D M D^-1, prec - 1

    // symplectic factorization into root letters (standard Sp_2m)
    struct RootLetter {
        int type; // 0 short(i,j), 1 mixed(i,j), 2 long(i), 3 mixed-,4 long-
        uint32_t i, j;
        uint32_t c;
    };
    static PMat root_matrix(uint32_t m, const RootLetter &r);
    static std::vector<RootLetter> sp_factor(const PMat &a, uint32_t m,
                                             uint32_t bits);
    CommutatorWord cw_root_sp2n(const RootLetter &r, uint32_t bits) const;
};

std::vector<CheckReport> verify_commutator_identities(const ParamodContext &,
                                                      uint32_t bits,
                                                      size_t trials,
                                                      uint64_t seed);
std::vector<CheckReport> verify_spanning_claims(const ParamodContext &,
                                                uint32_t bits);
std::vector<CheckReport>
express_generators_as_commutators(const ParamodContext &, uint32_t bits,
                                  size_t samples, uint64_t seed);

struct OddPKernelResult {
    uint32_t g = 0, p = 0;
    uint32_t expected_exponent = 0; // 2g^2 + g
    uint32_t lie_kernel_dim = 0;    // dim of {B : B^t J + J B = 0} over F_p
    bool order_matches = false;
    bool abelian = false;    // sampled products commute mod p^2
    bool elementary = false; // sampled p-th powers are trivial mod p^2
    uint64_t enumerated_order = 0; // only for g = 1 (oracle)
};

OddPKernelResult odd_p_kernel(uint32_t g, uint32_t p, size_t samples = 200,
                              uint64_t seed = 1);

} // namespace thetaobs::paramod
