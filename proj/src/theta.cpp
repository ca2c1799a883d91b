#include "thetaobs/theta.hpp"

#include <algorithm>
#include <random>

#include "thetaobs/ringlinalg.hpp"

namespace thetaobs::theta {

namespace {

constexpr uint64_t kModuleCap = uint64_t(1) << 12; // dense beta tables

uint64_t gcd_u(uint64_t a, uint64_t b)
{
    while (b) {
        uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

// ---------------------------------------------------------------------
// ThetaGroup

void ThetaGroup::init_elements()
{
    if (M_.order() > kModuleCap)
        throw capacity_error("ThetaGroup: module exceeds the dense-table cap");
    elems_ = M_.elements(kModuleCap);
    weights_.resize(M_.rank());
    uint64_t w = 1;
    for (size_t i = 0; i < M_.rank(); ++i) {
        weights_[i] = w;
        w *= M_.moduli[i];
    }
    if (M_.scalar_mod == 0 || n_ % M_.scalar_mod != 0)
        throw soundness_error("ThetaGroup: scalar modulus does not divide n");
    pair_scale_ = n_ / M_.scalar_mod;
}

size_t ThetaGroup::index_of(const Vec &v) const
{
    uint64_t idx = 0;
    for (size_t i = 0; i < v.size(); ++i)
        idx += uint64_t(v[i] % M_.moduli[i]) * weights_[i];
    return static_cast<size_t>(idx);
}

size_t ThetaGroup::add(size_t a, size_t b) const
{
    return index_of(M_.add(elems_[a], elems_[b]));
}

size_t ThetaGroup::neg(size_t a) const { return index_of(M_.neg(elems_[a])); }

ThetaGroup ThetaGroup::standard(const TypeD &D)
{
    ThetaGroup H;
    H.kind_ = Kind::Standard;
    H.type_ = D;
    H.M_ = symmod::standard_module(D);
    H.n_ = D.scalar_modulus();
    H.init_elements();
    return H;
}

ThetaGroup ThetaGroup::odd_model(const SymplecticModule &M)
{
    if (M.order() % 2 == 0)
        throw input_error("odd_model: module order must be odd");
    ThetaGroup H;
    H.kind_ = Kind::Odd;
    H.M_ = M;
    H.n_ = M.scalar_mod;
    if (H.n_ % 2 == 0)
        throw input_error("odd_model: scalar modulus must be odd");
    H.init_elements();
    return H;
}

ThetaGroup ThetaGroup::from_table(const SymplecticModule &M, uint32_t n,
                                  std::vector<uint16_t> table)
{
    ThetaGroup H;
    H.kind_ = Kind::Table;
    H.M_ = M;
    H.n_ = n;
    H.init_elements();
    if (table.size() != H.msize() * H.msize())
        throw input_error("from_table: wrong table size");
    H.table_ = std::move(table);
    // normalization phi(0, .) = phi(., 0) = 0
    for (size_t i = 0; i < H.msize(); ++i)
        if (H.table_[i] != 0 || H.table_[i * H.msize()] != 0)
            throw input_error("from_table: cocycle not normalized");
    return H;
}

uint32_t ThetaGroup::phi(size_t a, size_t b) const
{
    switch (kind_) {
    case Kind::Standard: {
        const Vec &u = elems_[a], &v = elems_[b];
        const size_t g = type_.g();
        uint64_t acc = 0;
        for (size_t i = 0; i < g; ++i)
            acc += uint64_t(n_ / type_.divisors[i]) * v[g + i] % n_ * u[i] %
                   n_;
        return static_cast<uint32_t>(acc % n_);
    }
    case Kind::Odd: {
        // b = ((n+1)/2) e, the unique alternating square root mod odd n
        uint64_t e = M_.pair(elems_[a], elems_[b]);
        return static_cast<uint32_t>(e * ((n_ + 1) / 2) % n_);
    }
    case Kind::Table:
        return table_[a * msize() + b];
    }
    return 0;
}

uint32_t ThetaGroup::commutator(size_t a, size_t b) const
{
    return (phi(a, b) + n_ - phi(b, a)) % n_;
}

uint32_t ThetaGroup::module_pairing(size_t a, size_t b) const
{
    return static_cast<uint32_t>(uint64_t(M_.pair(elems_[a], elems_[b])) *
                                 pair_scale_ % n_);
}

ThetaGroup::Elt ThetaGroup::mul(Elt a, Elt b) const
{
    uint32_t t = (a.t + b.t + phi(a.m, b.m)) % n_;
    return {t, static_cast<uint32_t>(add(a.m, b.m))};
}

ThetaGroup::Elt ThetaGroup::inv(Elt a) const
{
    uint32_t mneg = static_cast<uint32_t>(neg(a.m));
    uint32_t t = (2 * n_ - a.t - phi(a.m, mneg)) % n_;
    return {t, mneg};
}

bool ThetaGroup::cocycle_identity(size_t a, size_t b, size_t c) const
{
    // phi(b,c) - phi(a+b, c) + phi(a, b+c) - phi(a,b) = 0 (trivial action)
    uint64_t lhs = phi(b, c) + phi(a, add(b, c));
    uint64_t rhs = phi(add(a, b), c) + phi(a, b);
    return lhs % n_ == rhs % n_;
}

// ---------------------------------------------------------------------
// automorphisms

size_t apply_sp(const ThetaGroup &H, const ThetaAut &aut, size_t m)
{
    const Vec &v = H.elem(m);
    Vec img = H.module().zero();
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i])
            img = H.module().add(img, H.module().scale(aut.a_cols[i], v[i]));
    return H.index_of(img);
}

ThetaAut aut_identity(const ThetaGroup &H)
{
    ThetaAut f;
    const auto &M = H.module();
    f.a_cols.resize(M.rank());
    for (size_t i = 0; i < M.rank(); ++i) {
        f.a_cols[i] = M.zero();
        f.a_cols[i][i] = 1 % M.moduli[i];
    }
    f.beta.assign(H.msize(), 0);
    return f;
}

ThetaAut aut_compose(const ThetaGroup &H, const ThetaAut &f, const ThetaAut &g)
{
    ThetaAut r;
    const auto &M = H.module();
    r.a_cols.resize(M.rank());
    for (size_t i = 0; i < M.rank(); ++i) {
        Vec img = M.zero();
        const Vec &gi = g.a_cols[i];
        for (size_t j = 0; j < M.rank(); ++j)
            if (gi[j])
                img = M.add(img, M.scale(f.a_cols[j], gi[j]));
        r.a_cols[i] = img;
    }
    r.beta.resize(H.msize());
    for (size_t m = 0; m < H.msize(); ++m)
        r.beta[m] = (g.beta[m] + f.beta[apply_sp(H, g, m)]) % H.n();
    return r;
}

ThetaAut aut_inverse(const ThetaGroup &H, const ThetaAut &f)
{
    // invert the index permutation, read generator images back off
    const auto &M = H.module();
    std::vector<uint32_t> perm(H.msize());
    for (size_t m = 0; m < H.msize(); ++m)
        perm[m] = static_cast<uint32_t>(apply_sp(H, f, m));
    std::vector<uint32_t> inv(H.msize());
    for (size_t m = 0; m < H.msize(); ++m)
        inv[perm[m]] = static_cast<uint32_t>(m);
    ThetaAut r;
    r.a_cols.resize(M.rank());
    for (size_t i = 0; i < M.rank(); ++i) {
        Vec gen = M.zero();
        gen[i] = 1 % M.moduli[i];
        r.a_cols[i] = H.elem(inv[H.index_of(gen)]);
    }
    // r.beta(m) = -f.beta(A^{-1} m) makes f o r the identity
    r.beta.resize(H.msize());
    for (size_t m = 0; m < H.msize(); ++m)
        r.beta[m] = (H.n() - f.beta[inv[m]]) % H.n();
    return r;
}

bool aut_equal(const ThetaGroup &H, const ThetaAut &f, const ThetaAut &g)
{
    if (f.beta != g.beta)
        return false;
    for (size_t i = 0; i < f.a_cols.size(); ++i)
        if (H.index_of(f.a_cols[i]) != H.index_of(g.a_cols[i]))
            return false;
    return true;
}

bool is_automorphism(const ThetaGroup &H, const ThetaAut &aut,
                     size_t exhaustive_cap, uint64_t seed)
{
    const size_t n = H.msize();
    if (aut.beta.size() != n || aut.beta[0] != 0)
        return false;
    // the symplectic part must preserve the module pairing
    const auto &M = H.module();
    for (size_t i = 0; i < M.rank(); ++i)
        for (size_t j = 0; j < M.rank(); ++j) {
            if (M.pair(aut.a_cols[i], aut.a_cols[j]) != M.gram.at(i, j))
                return false;
        }
    // bijectivity of the index map
    {
        std::vector<char> hit(n, 0);
        for (size_t m = 0; m < n; ++m) {
            size_t im = apply_sp(H, aut, m);
            if (hit[im])
                return false;
            hit[im] = 1;
        }
    }
    auto cond = [&](size_t a, size_t b) {
        uint64_t lhs = aut.beta[H.add(a, b)] + H.phi(a, b);
        uint64_t rhs = uint64_t(aut.beta[a]) + aut.beta[b] +
                       H.phi(apply_sp(H, aut, a), apply_sp(H, aut, b));
        return lhs % H.n() == rhs % H.n();
    };
    if (n <= exhaustive_cap) {
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                if (!cond(a, b))
                    return false;
    } else {
        std::mt19937_64 gen(seed);
        for (int trial = 0; trial < 10000; ++trial)
            if (!cond(gen() % n, gen() % n))
                return false;
    }
    return true;
}

ThetaGroup::Elt aut_apply(const ThetaGroup &H, const ThetaAut &aut,
                          ThetaGroup::Elt x)
{
    return {(x.t + aut.beta[x.m]) % H.n(),
            static_cast<uint32_t>(apply_sp(H, aut, x.m))};
}

ThetaAut inner_aut(const ThetaGroup &H, const Vec &m)
{
    ThetaAut f = aut_identity(H);
    for (size_t x = 0; x < H.msize(); ++x)
        f.beta[x] = static_cast<uint32_t>(
            uint64_t(H.module().pair(m, H.elem(x))) *
            (H.n() / H.module().scalar_mod) % H.n());
    return f;
}

std::vector<Vec> neg_id_cols(const ThetaGroup &H)
{
    const auto &M = H.module();
    std::vector<Vec> cols(M.rank());
    for (size_t i = 0; i < M.rank(); ++i) {
        cols[i] = M.zero();
        cols[i][i] = static_cast<uint32_t>((M.moduli[i] - 1) % M.moduli[i]);
    }
    return cols;
}

std::vector<Vec> spmat_cols(const spgroup::SpMat &a)
{
    std::vector<Vec> cols(a.n);
    for (uint32_t j = 0; j < a.n; ++j) {
        cols[j].assign(a.n, 0);
        for (uint32_t i = 0; i < a.n; ++i)
            cols[j][i] = a.at(i, j);
    }
    return cols;
}

namespace {

// Solve beta(m + g_j) - beta(m) - beta(g_j) = psi(m, g_j) over Z/n for
// all m and generators g_j, where psi(a, b) = phi(Aa, Ab) - phi(a, b).
// When the symplectic part preserves the commutator pairing the defect
// is a symmetric 2-cocycle, so generator equations pin the whole table;
// the caller re-verifies every pair anyway.
std::optional<std::vector<uint32_t>>
solve_beta(const ThetaGroup &H,
           const std::vector<size_t> &sp_perm, // index image of A
           const std::vector<uint32_t> &psi_m_gen) // per (m, j)
{
    const size_t n = H.msize();
    const size_t rank = H.module().rank();
    const uint32_t mod = H.n();
    // unknowns: beta(m) for m != 0 (beta(0) = 0)
    const size_t eqs = (n - 1) * rank;
    ring::ResMatrix A(eqs, n - 1, mod);
    std::vector<uint32_t> rhs(eqs, 0);
    size_t row = 0;
    for (size_t m = 1; m < n; ++m) {
        for (size_t j = 0; j < rank; ++j, ++row) {
            Vec gen = H.module().zero();
            gen[j] = 1 % H.module().moduli[j];
            size_t gj = H.index_of(gen);
            size_t sum = H.add(m, gj);
            // beta(sum) - beta(m) - beta(gj) = psi
            auto addc = [&](size_t idx, uint32_t coeff) {
                if (idx == 0)
                    return;
                A.set(row, idx - 1, (A.at(row, idx - 1) + coeff) % mod);
            };
            addc(sum, 1);
            addc(m, mod - 1);
            addc(gj, mod - 1);
            rhs[row] = psi_m_gen[m * rank + j] % mod;
        }
    }
    auto sol = ring::solve_mod(A, rhs);
    if (!sol.solvable)
        return std::nullopt;
    std::vector<uint32_t> beta(n, 0);
    for (size_t m = 1; m < n; ++m)
        beta[m] = sol.x[m - 1];
    (void)sp_perm;
    return beta;
}

} // namespace

std::optional<ThetaAut> lift_sp(const ThetaGroup &H,
                                const std::vector<Vec> &a_cols)
{
    const size_t n = H.msize();
    const size_t rank = H.module().rank();
    ThetaAut probe;
    probe.a_cols = a_cols;
    probe.beta.assign(n, 0);
    std::vector<size_t> perm(n);
    for (size_t m = 0; m < n; ++m)
        perm[m] = apply_sp(H, probe, m);
    std::vector<uint32_t> psi(n * rank);
    for (size_t m = 0; m < n; ++m)
        for (size_t j = 0; j < rank; ++j) {
            Vec gen = H.module().zero();
            gen[j] = 1 % H.module().moduli[j];
            size_t gj = H.index_of(gen);
            psi[m * rank + j] = static_cast<uint32_t>(
                (H.phi(perm[m], perm[gj]) + H.n() - H.phi(m, gj)) % H.n());
        }
    auto beta = solve_beta(H, perm, psi);
    if (!beta)
        return std::nullopt;
    ThetaAut f;
    f.a_cols = a_cols;
    f.beta = std::move(*beta);
    if (!is_automorphism(H, f))
        return std::nullopt;
    return f;
}

std::vector<ThetaAut> all_lifts(const ThetaGroup &H,
                                const std::vector<Vec> &a_cols, uint64_t cap)
{
    auto first = lift_sp(H, a_cols);
    if (!first)
        return {};
    // all solutions = particular + Hom(M, Z/n) = particular + inner betas
    std::vector<ThetaAut> out;
    if (H.msize() > cap)
        throw capacity_error("all_lifts: module too large to enumerate");
    for (size_t m = 0; m < H.msize(); ++m) {
        ThetaAut f = *first;
        ThetaAut inner = inner_aut(H, H.elem(m));
        for (size_t x = 0; x < H.msize(); ++x)
            f.beta[x] = (f.beta[x] + inner.beta[x]) % H.n();
        if (is_automorphism(H, f))
            out.push_back(std::move(f));
    }
    return out;
}

bool is_inversion(const ThetaGroup &H, const ThetaAut &aut)
{
    auto neg = neg_id_cols(H);
    for (size_t i = 0; i < neg.size(); ++i)
        if (H.index_of(aut.a_cols[i]) != H.index_of(neg[i]))
            return false;
    return is_automorphism(H, aut);
}

std::vector<ThetaAut> find_inversions(const ThetaGroup &H, uint64_t cap)
{
    auto lifts = all_lifts(H, neg_id_cols(H), cap);
    std::vector<ThetaAut> out;
    for (auto &f : lifts)
        if (is_inversion(H, f))
            out.push_back(std::move(f));
    return out;
}

ThetaAut odd_canonical_section(const ThetaGroup &Hodd,
                               const std::vector<Vec> &a_cols)
{
    // In the symmetric model the cocycle b is Sp-invariant (2b = e and 2
    // is a unit), so (A, 0) is already an automorphism.
    ThetaAut f;
    f.a_cols = a_cols;
    f.beta.assign(Hodd.msize(), 0);
    return f;
}

std::optional<std::vector<uint32_t>>
framed_isomorphism(const ThetaGroup &H1, const ThetaGroup &H2)
{
    if (H1.msize() != H2.msize() || H1.n() != H2.n())
        throw input_error("framed_isomorphism: incompatible groups");
    const size_t n = H1.msize();
    // the commutator pairings must agree, else no framed map exists
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b)
            if (H1.commutator(a, b) != H2.commutator(a, b))
                return std::nullopt;
    const size_t rank = H1.module().rank();
    std::vector<uint32_t> psi(n * rank);
    for (size_t m = 0; m < n; ++m)
        for (size_t j = 0; j < rank; ++j) {
            Vec gen = H1.module().zero();
            gen[j] = 1 % H1.module().moduli[j];
            size_t gj = H1.index_of(gen);
            psi[m * rank + j] = static_cast<uint32_t>(
                (H2.phi(m, gj) + H1.n() - H1.phi(m, gj)) % H1.n());
        }
    std::vector<size_t> idperm(n);
    for (size_t i = 0; i < n; ++i)
        idperm[i] = i;
    auto beta = solve_beta(H1, idperm, psi);
    if (!beta)
        return std::nullopt;
    // verify on all pairs: phi2(a,b) - phi1(a,b) = beta(a+b)-beta(a)-beta(b)
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            uint64_t lhs = (uint64_t(H2.phi(a, b)) + H1.n() - H1.phi(a, b)) %
                           H1.n();
            uint64_t rhs = (uint64_t((*beta)[H1.add(a, b)]) + 2 * H1.n() -
                            (*beta)[a] - (*beta)[b]) %
                           H1.n();
            if (lhs != rhs)
                throw soundness_error(
                    "framed_isomorphism: verification failed");
        }
    return beta;
}

// ---------------------------------------------------------------------
// Baer sum and restriction

ThetaGroup baer_sum(const ThetaGroup &H1, const ThetaGroup &H2)
{
    SymplecticModule M = symmod::direct_sum(H1.module(), H2.module());
    uint64_t nl = uint64_t(H1.n()) / gcd_u(H1.n(), H2.n()) * H2.n();
    uint32_t n = static_cast<uint32_t>(nl);
    ThetaGroup probe = ThetaGroup::from_table(
        M, n, std::vector<uint16_t>(M.order() * M.order(), 0));
    // fill the table: phi((m1,m2),(m1',m2')) scaled into Z/n
    const size_t r1 = H1.module().rank();
    std::vector<uint16_t> table(M.order() * M.order());
    const uint32_t s1 = n / H1.n(), s2 = n / H2.n();
    for (size_t a = 0; a < probe.msize(); ++a) {
        const Vec &va = probe.elem(a);
        Vec a1(va.begin(), va.begin() + long(r1));
        Vec a2(va.begin() + long(r1), va.end());
        size_t i1 = H1.index_of(a1), i2 = H2.index_of(a2);
        for (size_t b = 0; b < probe.msize(); ++b) {
            const Vec &vb = probe.elem(b);
            Vec b1(vb.begin(), vb.begin() + long(r1));
            Vec b2(vb.begin() + long(r1), vb.end());
            uint64_t v = (uint64_t(H1.phi(i1, H1.index_of(b1))) * s1 +
                          uint64_t(H2.phi(i2, H2.index_of(b2))) * s2) %
                         n;
            table[a * probe.msize() + b] = static_cast<uint16_t>(v);
        }
    }
    return ThetaGroup::from_table(M, n, std::move(table));
}

ThetaGroup restrict_theta(const ThetaGroup &H, const std::vector<size_t> &keep)
{
    const auto &M = H.module();
    SymplecticModule S;
    S.scalar_mod = M.scalar_mod;
    for (size_t k : keep)
        S.moduli.push_back(M.moduli[k]);
    S.gram = ring::ResMatrix(keep.size(), keep.size(), M.scalar_mod);
    for (size_t i = 0; i < keep.size(); ++i)
        for (size_t j = 0; j < keep.size(); ++j)
            S.gram.set(i, j, M.gram.at(keep[i], keep[j]));
    S.validate();
    ThetaGroup probe = ThetaGroup::from_table(
        S, H.n(), std::vector<uint16_t>(S.order() * S.order(), 0));
    std::vector<uint16_t> table(S.order() * S.order());
    for (size_t a = 0; a < probe.msize(); ++a) {
        Vec ea = M.zero();
        for (size_t i = 0; i < keep.size(); ++i)
            ea[keep[i]] = probe.elem(a)[i];
        for (size_t b = 0; b < probe.msize(); ++b) {
            Vec eb = M.zero();
            for (size_t i = 0; i < keep.size(); ++i)
                eb[keep[i]] = probe.elem(b)[i];
            table[a * probe.msize() + b] = static_cast<uint16_t>(
                H.phi(H.index_of(ea), H.index_of(eb)));
        }
    }
    return ThetaGroup::from_table(S, H.n(), std::move(table));
}

ThetaGroup permute_generators(const ThetaGroup &H,
                              const std::vector<size_t> &perm)
{
    const auto &M = H.module();
    if (perm.size() != M.rank())
        throw input_error("permute_generators: bad permutation size");
    SymplecticModule P;
    P.scalar_mod = M.scalar_mod;
    P.moduli.resize(M.rank());
    P.gram = ring::ResMatrix(M.rank(), M.rank(), M.scalar_mod);
    for (size_t i = 0; i < M.rank(); ++i) {
        P.moduli[i] = M.moduli[perm[i]];
        for (size_t j = 0; j < M.rank(); ++j)
            P.gram.set(i, j, M.gram.at(perm[i], perm[j]));
    }
    P.validate();
    ThetaGroup probe = ThetaGroup::from_table(
        P, H.n(), std::vector<uint16_t>(P.order() * P.order(), 0));
    std::vector<uint16_t> table(P.order() * P.order());
    auto to_old = [&](size_t idx) {
        const Vec &v = probe.elem(idx);
        Vec w = M.zero();
        for (size_t i = 0; i < M.rank(); ++i)
            w[perm[i]] = v[i];
        return H.index_of(w);
    };
    for (size_t a = 0; a < probe.msize(); ++a)
        for (size_t b = 0; b < probe.msize(); ++b)
            table[a * probe.msize() + b] =
                static_cast<uint16_t>(H.phi(to_old(a), to_old(b)));
    return ThetaGroup::from_table(P, H.n(), std::move(table));
}

ThetaGroup center_reduce(const ThetaGroup &H, uint32_t new_n)
{
    if (new_n == 0 || H.n() % new_n != 0)
        throw input_error("center_reduce: new_n must divide n");
    const uint32_t q = H.n() / new_n;
    std::vector<uint16_t> table(H.msize() * H.msize());
    for (size_t a = 0; a < H.msize(); ++a)
        for (size_t b = 0; b < H.msize(); ++b) {
            uint32_t v = H.phi(a, b);
            if (v % q != 0)
                throw input_error(
                    "center_reduce: cocycle value outside the subcenter");
            table[a * H.msize() + b] = static_cast<uint16_t>(v / q);
        }
    SymplecticModule M = H.module();
    // rescale the module pairing exponents into Z/new_n's scale if needed
    if (M.scalar_mod > new_n) {
        if (M.scalar_mod % new_n != 0)
            throw input_error("center_reduce: incompatible scalar modulus");
        uint32_t qs = M.scalar_mod / new_n;
        ring::ResMatrix gram(M.rank(), M.rank(), new_n);
        for (size_t i = 0; i < M.rank(); ++i)
            for (size_t j = 0; j < M.rank(); ++j) {
                uint32_t v = M.gram.at(i, j);
                if (v % qs != 0)
                    throw input_error(
                        "center_reduce: pairing value outside subcenter");
                gram.set(i, j, v / qs);
            }
        M.gram = gram;
        M.scalar_mod = new_n;
        M.validate();
    }
    return ThetaGroup::from_table(M, new_n, std::move(table));
}

// ---------------------------------------------------------------------
// Schrodinger representation

MonomialMat monomial_identity(size_t dim, uint32_t n)
{
    MonomialMat m;
    m.n = n;
    m.row_of_col.resize(dim);
    m.exp_of_col.assign(dim, 0);
    for (size_t i = 0; i < dim; ++i)
        m.row_of_col[i] = static_cast<uint32_t>(i);
    return m;
}

MonomialMat monomial_mul(const MonomialMat &a, const MonomialMat &b)
{
    if (a.n != b.n || a.row_of_col.size() != b.row_of_col.size())
        throw input_error("monomial_mul: shape mismatch");
    MonomialMat r;
    r.n = a.n;
    size_t dim = a.row_of_col.size();
    r.row_of_col.resize(dim);
    r.exp_of_col.resize(dim);
    for (size_t c = 0; c < dim; ++c) {
        uint32_t mid = b.row_of_col[c];
        r.row_of_col[c] = a.row_of_col[mid];
        r.exp_of_col[c] = (b.exp_of_col[c] + a.exp_of_col[mid]) % a.n;
    }
    return r;
}

SchrodingerRep::SchrodingerRep(const TypeD &D)
    : D_(D), n_(D.scalar_modulus()), dim_(D.card())
{
    kweights_.resize(D.g());
    uint64_t w = 1;
    for (size_t i = 0; i < D.g(); ++i) {
        kweights_[i] = w;
        w *= D.divisors[i];
    }
}

size_t SchrodingerRep::kindex(const std::vector<uint32_t> &y) const
{
    uint64_t idx = 0;
    for (size_t i = 0; i < D_.g(); ++i)
        idx += uint64_t(y[i] % D_.divisors[i]) * kweights_[i];
    return static_cast<size_t>(idx);
}

MonomialMat SchrodingerRep::image(const ThetaGroup &H,
                                  ThetaGroup::Elt xel) const
{
    // ((t, x, chi) f)(y) = zeta^t chi(y) f(y+x): on delta functions,
    // column y maps to row (y - x) with exponent t + <chi, y - x>.
    const Vec &m = H.elem(xel.m);
    const size_t g = D_.g();
    MonomialMat r;
    r.n = n_;
    r.row_of_col.resize(dim_);
    r.exp_of_col.resize(dim_);
    std::vector<uint32_t> y(g, 0);
    for (size_t col = 0; col < dim_; ++col) {
        std::vector<uint32_t> ymx(g);
        uint64_t chi = 0;
        for (size_t i = 0; i < g; ++i) {
            uint32_t d = D_.divisors[i];
            ymx[i] = (y[i] + d - m[i] % d) % d;
            chi += uint64_t(n_ / d) * (m[g + i] % d) % n_ * ymx[i] % n_;
        }
        r.row_of_col[col] = static_cast<uint32_t>(kindex(ymx));
        r.exp_of_col[col] = static_cast<uint32_t>((xel.t + chi) % n_);
        // lexicographic increment of y
        for (size_t i = 0; i < g; ++i) {
            if (++y[i] < D_.divisors[i])
                break;
            y[i] = 0;
        }
    }
    return r;
}

// ---------------------------------------------------------------------
// quadratic refinements

std::vector<std::vector<uint8_t>> quadratic_refinements(const ThetaGroup &H)
{
    const auto &M = H.module();
    for (uint32_t m : M.moduli)
        if (m != 2)
            throw input_error("quadratic_refinements: type must be (2,..,2)");
    const size_t n = H.msize();
    if (n > 16)
        throw capacity_error("quadratic_refinements: brute force cap is 16");
    const uint32_t half = H.n() / 2;
    std::vector<std::vector<uint8_t>> out;
    for (uint64_t bits = 0; bits < (uint64_t(1) << (n - 1)); ++bits) {
        std::vector<uint8_t> q(n, 0);
        for (size_t i = 1; i < n; ++i)
            q[i] = (bits >> (i - 1)) & 1;
        bool ok = true;
        for (size_t a = 0; a < n && ok; ++a)
            for (size_t b = 0; b < n && ok; ++b) {
                uint32_t e = H.module_pairing(a, b); // 0 or n/2
                uint8_t target = e == 0 ? 0 : (e == half ? 1 : 2);
                if (target == 2)
                    ok = false;
                else
                    ok = ((q[H.add(a, b)] ^ q[a] ^ q[b]) == target);
            }
        if (ok)
            out.push_back(std::move(q));
    }
    return out;
}

} // namespace thetaobs::theta
