#include "thetaobs/spgroup.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace thetaobs::spgroup {

// ---------------------------------------------------------------------
// permutations

Perm perm_identity(size_t n)
{
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

Perm perm_mul(const Perm &a, const Perm &b)
{
    Perm r(b.size());
    for (size_t i = 0; i < b.size(); ++i)
        r[i] = a[b[i]];
    return r;
}

Perm perm_inv(const Perm &a)
{
    Perm r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        r[a[i]] = static_cast<uint32_t>(i);
    return r;
}

bool perm_is_identity(const Perm &a)
{
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != i)
            return false;
    return true;
}

// ---------------------------------------------------------------------
// StabChain

StabChain::StabChain(std::vector<Perm> generators, size_t npoints,
                     uint64_t seed, std::vector<uint32_t> forced_base)
    : npoints_(npoints), seed_(seed), gens_(std::move(generators)),
      forced_base_(std::move(forced_base))
{
    for (const auto &g : gens_)
        if (g.size() != npoints_)
            throw input_error("StabChain: generator degree mismatch");
    for (uint32_t b : forced_base_)
        if (b >= npoints_)
            throw input_error("StabChain: forced base point out of range");
    for (const auto &g : gens_)
        if (!perm_is_identity(g))
            add_strong(g, 0);
}

uint32_t StabChain::choose_base_point(const Perm &g) const
{
    // Greedy: a point on the longest cycle of g (ties: smallest point).
    std::vector<char> seen(npoints_, 0);
    uint32_t best = npoints_ ? 0 : 0;
    size_t best_len = 0;
    for (uint32_t s = 0; s < npoints_; ++s) {
        if (seen[s] || g[s] == s)
            continue;
        size_t len = 0;
        uint32_t x = s;
        do {
            seen[x] = 1;
            x = g[x];
            ++len;
        } while (x != s);
        if (len > best_len) {
            best_len = len;
            best = s;
        }
    }
    if (best_len == 0)
        throw soundness_error("StabChain: base point for identity requested");
    return best;
}

void StabChain::recompute_orbit(size_t l)
{
    Level &L = levels_[l];
    L.where.assign(npoints_, -1);
    L.orbit.clear();
    L.transversal.clear();
    L.transversal_inv.clear();
    L.orbit.push_back(L.base);
    L.where[L.base] = 0;
    L.transversal.push_back(perm_identity(npoints_));
    L.transversal_inv.push_back(perm_identity(npoints_));
    for (size_t i = 0; i < L.orbit.size(); ++i) {
        for (const auto &s : L.gens) {
            uint32_t img = s[L.orbit[i]];
            if (L.where[img] < 0) {
                L.where[img] = static_cast<int32_t>(L.orbit.size());
                L.orbit.push_back(img);
                Perm u = perm_mul(s, L.transversal[i]);
                L.transversal_inv.push_back(perm_inv(u));
                L.transversal.push_back(std::move(u));
            }
        }
    }
}

std::pair<size_t, Perm> StabChain::sift(const Perm &g) const
{
    Perm h = g;
    for (size_t l = 0; l < levels_.size(); ++l) {
        if (perm_is_identity(h))
            return {l, h};
        const Level &L = levels_[l];
        uint32_t img = h[L.base];
        if (L.where[img] < 0)
            return {l, h};
        h = perm_mul(L.transversal_inv[size_t(L.where[img])], h);
    }
    return {levels_.size(), h};
}

void StabChain::add_strong(const Perm &h, size_t from_level)
{
    // h fixes the bases of all levels before from_level.  A strong
    // generator belongs to the generating set of every level whose base
    // prefix it fixes: find the first level whose base it moves,
    // creating levels as needed, then install it at from_level..j and
    // re-establish the Sims condition from the deepest affected level up.
    size_t j = from_level;
    while (true) {
        if (j < levels_.size()) {
            if (h[levels_[j].base] != levels_[j].base)
                break;
            ++j;
            continue;
        }
        Level L;
        L.base = (levels_.size() < forced_base_.size())
                     ? forced_base_[levels_.size()]
                     : choose_base_point(h);
        levels_.push_back(std::move(L));
        // loop: a forced base point may be fixed by h
    }
    for (size_t l = from_level; l <= j; ++l)
        levels_[l].gens.push_back(h);
    for (size_t l = j + 1; l-- > from_level;)
        process_level(l);
}

void StabChain::process_level(size_t l)
{
    // levels_ may reallocate in the recursion below; index access only.
    recompute_orbit(l);
    for (size_t i = 0; i < levels_[l].orbit.size(); ++i) {
        for (size_t si = 0; si < levels_[l].gens.size(); ++si) {
            Perm schreier;
            {
                const Level &L = levels_[l];
                const Perm &s = L.gens[si];
                uint32_t img = s[L.orbit[i]];
                schreier =
                    perm_mul(L.transversal_inv[size_t(L.where[img])],
                             perm_mul(s, L.transversal[i]));
            }
            if (perm_is_identity(schreier))
                continue;
            // Sift through deeper levels.
            Perm h = std::move(schreier);
            size_t lev = l + 1;
            for (; lev < levels_.size() && !perm_is_identity(h); ++lev) {
                const Level &D = levels_[lev];
                uint32_t im2 = h[D.base];
                if (D.where[im2] < 0)
                    break;
                h = perm_mul(D.transversal_inv[size_t(D.where[im2])], h);
            }
            if (!perm_is_identity(h))
                add_strong(h, l + 1);
        }
    }
}

uint64_t StabChain::order() const
{
    uint64_t o = 1;
    for (const auto &L : levels_) {
        uint64_t prev = o;
        o *= L.orbit.size();
        if (o / L.orbit.size() != prev)
            throw capacity_error("StabChain: order exceeds 64 bits");
    }
    return o;
}

bool StabChain::contains(const Perm &p) const
{
    if (p.size() != npoints_)
        return false;
    auto [lvl, residue] = sift(p);
    (void)lvl;
    return perm_is_identity(residue);
}

std::vector<StabChain::LevelShape> StabChain::shape() const
{
    std::vector<LevelShape> s;
    for (const auto &L : levels_)
        s.push_back({L.base, L.gens.size(), L.orbit.size()});
    return s;
}

std::vector<uint32_t> StabChain::base() const
{
    std::vector<uint32_t> b;
    b.reserve(levels_.size());
    for (const auto &L : levels_)
        b.push_back(L.base);
    return b;
}

std::vector<uint32_t> StabChain::orbit_of(uint32_t point) const
{
    std::vector<char> seen(npoints_, 0);
    std::vector<uint32_t> frontier{point}, orbit{point};
    seen[point] = 1;
    while (!frontier.empty()) {
        uint32_t x = frontier.back();
        frontier.pop_back();
        for (const auto &gp : gens_) {
            uint32_t y = gp[x];
            if (!seen[y]) {
                seen[y] = 1;
                orbit.push_back(y);
                frontier.push_back(y);
            }
        }
    }
    std::sort(orbit.begin(), orbit.end());
    return orbit;
}

StabChain StabChain::point_stabilizer(uint32_t point) const
{
    // Rebuild with the point forced first; strong generators of the
    // deeper levels generate the stabilizer.
    StabChain forced(gens_, npoints_, seed_, {point});
    if (forced.levels_.empty())
        return StabChain({}, npoints_, seed_);
    std::vector<Perm> stab_gens = forced.levels_.size() > 1
                                      ? forced.levels_[1].gens
                                      : std::vector<Perm>{};
    StabChain st(stab_gens, npoints_, seed_);
    if (st.order() * forced.levels_[0].orbit.size() != forced.order())
        throw soundness_error("point_stabilizer: orbit-stabilizer mismatch");
    return st;
}

StabChain derived_subgroup(const StabChain &G)
{
    const auto &gens = G.generators();
    std::vector<Perm> kgens;
    StabChain K({}, G.npoints(), G.seed());
    auto add = [&](const Perm &p) {
        if (!perm_is_identity(p) && !K.contains(p)) {
            kgens.push_back(p);
            K = StabChain(kgens, G.npoints(), G.seed());
            return true;
        }
        return false;
    };
    for (const auto &a : gens)
        for (const auto &b : gens)
            add(perm_mul(a, perm_mul(b, perm_mul(perm_inv(a), perm_inv(b)))));
    // Normal closure under conjugation by the parent generators.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Perm> snapshot = kgens;
        for (const auto &k : snapshot)
            for (const auto &gp : gens) {
                Perm c = perm_mul(gp, perm_mul(k, perm_inv(gp)));
                changed = add(c) || changed;
            }
    }
    // Certification: generator commutators inside, conjugation-stable.
    for (const auto &a : gens)
        for (const auto &b : gens) {
            Perm c =
                perm_mul(a, perm_mul(b, perm_mul(perm_inv(a), perm_inv(b))));
            if (!K.contains(c))
                throw soundness_error("derived_subgroup: commutator escaped");
        }
    for (const auto &k : kgens)
        for (const auto &gp : gens)
            if (!K.contains(perm_mul(gp, perm_mul(k, perm_inv(gp)))))
                throw soundness_error("derived_subgroup: not normal");
    return K;
}

uint64_t abelianization_order(const StabChain &G)
{
    return G.order() / derived_subgroup(G).order();
}

// ---------------------------------------------------------------------
// SpMat

SpMat SpMat::identity(uint32_t n, uint32_t p)
{
    SpMat a(n, p);
    for (uint32_t i = 0; i < n; ++i)
        a.set(i, i, 1);
    return a;
}

SpMat SpMat::mul(const SpMat &o) const
{
    if (n != o.n || p != o.p)
        throw input_error("SpMat::mul: shape/modulus mismatch");
    SpMat r(n, p);
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t k = 0; k < n; ++k) {
            uint32_t a = at(i, k);
            if (!a)
                continue;
            for (uint32_t j = 0; j < n; ++j)
                r.e[size_t(i) * n + j] = static_cast<uint8_t>(
                    (r.e[size_t(i) * n + j] + a * o.at(k, j)) % p);
        }
    return r;
}

SpMat SpMat::transpose() const
{
    SpMat r(n, p);
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
            r.set(j, i, at(i, j));
    return r;
}

SpMat SpMat::inverse() const
{
    SpMat a = *this, inv = identity(n, p);
    for (uint32_t col = 0; col < n; ++col) {
        uint32_t piv = col;
        while (piv < n && a.at(piv, col) == 0)
            ++piv;
        if (piv == n)
            throw input_error("SpMat::inverse: singular matrix");
        if (piv != col)
            for (uint32_t j = 0; j < n; ++j) {
                std::swap(a.e[size_t(piv) * n + j], a.e[size_t(col) * n + j]);
                std::swap(inv.e[size_t(piv) * n + j],
                          inv.e[size_t(col) * n + j]);
            }
        // scale row to make pivot 1
        uint32_t v = a.at(col, col), vinv = 1;
        for (uint32_t t = 1; t < p; ++t)
            if (t * v % p == 1)
                vinv = t;
        for (uint32_t j = 0; j < n; ++j) {
            a.set(col, j, a.at(col, j) * vinv);
            inv.set(col, j, inv.at(col, j) * vinv);
        }
        for (uint32_t r2 = 0; r2 < n; ++r2) {
            if (r2 == col)
                continue;
            uint32_t f = a.at(r2, col);
            if (!f)
                continue;
            for (uint32_t j = 0; j < n; ++j) {
                a.set(r2, j, a.at(r2, j) + (p - f) * a.at(col, j));
                inv.set(r2, j, inv.at(r2, j) + (p - f) * inv.at(col, j));
            }
        }
    }
    return inv;
}

std::vector<uint8_t> SpMat::apply(const std::vector<uint8_t> &v) const
{
    std::vector<uint8_t> r(n, 0);
    for (uint32_t i = 0; i < n; ++i) {
        uint32_t acc = 0;
        for (uint32_t j = 0; j < n; ++j)
            acc += at(i, j) * v[j];
        r[i] = static_cast<uint8_t>(acc % p);
    }
    return r;
}

std::string SpMat::to_text() const
{
    std::ostringstream out;
    out << n << ' ' << n << ' ' << p << '\n';
    for (uint32_t i = 0; i < n; ++i) {
        for (uint32_t j = 0; j < n; ++j) {
            if (j)
                out << ' ';
            out << uint32_t(at(i, j));
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------
// SpContext

SpContext::SpContext(uint32_t g, uint32_t d, uint64_t seed)
    : g_(g), d_(d), seed_(seed), J_(2 * g, d)
{
    if (g < 1)
        throw input_error("SpContext: g must be >= 1");
    bool prime = d >= 2;
    for (uint32_t q = 2; q * q <= d; ++q)
        if (d % q == 0)
            prime = false;
    if (!prime)
        throw input_error("unsupported type: homogeneous modulus must be "
                          "prime for group machinery");
    for (uint32_t i = 0; i < g; ++i) {
        J_.set(i, g + i, 1);
        J_.set(g + i, i, d - 1);
    }
    // Cap the permutation domain.
    if (npoints() > (size_t(1) << 20))
        throw capacity_error("SpContext: action domain too large");
}

bool SpContext::is_symplectic(const SpMat &a) const
{
    if (a.n != 2 * g_ || a.p != d_)
        return false;
    return a.transpose().mul(J_).mul(a) == J_;
}

uint64_t SpContext::order_formula() const
{
    // d^(g^2) * prod (d^(2i) - 1)
    uint64_t o = 1;
    for (uint32_t i = 0; i < g_ * g_; ++i)
        o *= d_;
    for (uint32_t i = 1; i <= g_; ++i) {
        uint64_t q = 1;
        for (uint32_t k = 0; k < 2 * i; ++k)
            q *= d_;
        o *= (q - 1);
    }
    return o;
}

size_t SpContext::npoints() const
{
    size_t t = 1;
    for (uint32_t i = 0; i < 2 * g_; ++i)
        t *= d_;
    return t - 1;
}

uint32_t SpContext::encode(const std::vector<uint8_t> &v) const
{
    uint64_t x = 0;
    for (size_t i = v.size(); i-- > 0;)
        x = x * d_ + v[i];
    if (x == 0)
        throw input_error("SpContext::encode: zero vector has no point");
    return static_cast<uint32_t>(x - 1);
}

std::vector<uint8_t> SpContext::decode(uint32_t point) const
{
    uint64_t x = uint64_t(point) + 1;
    std::vector<uint8_t> v(2 * g_);
    for (uint32_t i = 0; i < 2 * g_; ++i) {
        v[i] = static_cast<uint8_t>(x % d_);
        x /= d_;
    }
    return v;
}

Perm SpContext::to_perm(const SpMat &a) const
{
    Perm p(npoints());
    for (uint32_t pt = 0; pt < npoints(); ++pt)
        p[pt] = encode(a.apply(decode(pt)));
    return p;
}

SpMat SpContext::root_short(uint32_t i, uint32_t j, uint32_t c) const
{
    SpMat a = SpMat::identity(2 * g_, d_);
    a.set(i - 1, j - 1, c);
    a.set(g_ + j - 1, g_ + i - 1, (d_ - c % d_) % d_);
    return a;
}

SpMat SpContext::root_mixed(uint32_t i, uint32_t j, uint32_t c) const
{
    SpMat a = SpMat::identity(2 * g_, d_);
    a.set(i - 1, g_ + j - 1, c);
    a.set(j - 1, g_ + i - 1, c);
    return a;
}

SpMat SpContext::root_long(uint32_t i, uint32_t c) const
{
    SpMat a = SpMat::identity(2 * g_, d_);
    a.set(i - 1, g_ + i - 1, c);
    return a;
}

SpMat SpContext::root_mixed_neg(uint32_t i, uint32_t j, uint32_t c) const
{
    SpMat a = SpMat::identity(2 * g_, d_);
    a.set(g_ + i - 1, j - 1, c);
    a.set(g_ + j - 1, i - 1, c);
    return a;
}

SpMat SpContext::root_long_neg(uint32_t i, uint32_t c) const
{
    SpMat a = SpMat::identity(2 * g_, d_);
    a.set(g_ + i - 1, i - 1, c);
    return a;
}

std::vector<SpMat> SpContext::transvection_generators() const
{
    std::vector<SpMat> gens;
    for (uint32_t i = 1; i < g_; ++i) {
        gens.push_back(root_short(i, i + 1, 1));
        gens.push_back(root_short(i + 1, i, 1));
    }
    gens.push_back(root_long(g_, 1));
    gens.push_back(root_long_neg(g_, 1));
    for (const auto &a : gens)
        if (!is_symplectic(a))
            throw soundness_error("transvection_generators: not symplectic");
    return gens;
}

std::vector<SpMat> SpContext::borel_generators() const
{
    std::vector<SpMat> gens;
    for (uint32_t i = 1; i <= g_; ++i) {
        for (uint32_t j = i + 1; j <= g_; ++j) {
            gens.push_back(root_short(i, j, 1));
            gens.push_back(root_mixed(i, j, 1));
        }
        gens.push_back(root_long(i, 1));
    }
    for (const auto &a : gens)
        if (!is_symplectic(a))
            throw soundness_error("borel_generators: not symplectic");
    return gens;
}

StabChain SpContext::chain() const
{
    return chain_of(transvection_generators());
}

StabChain SpContext::chain_of(const std::vector<SpMat> &gens) const
{
    std::vector<Perm> perms;
    perms.reserve(gens.size());
    for (const auto &a : gens) {
        if (!is_symplectic(a))
            throw input_error("chain_of: generator not symplectic");
        perms.push_back(to_perm(a));
    }
    return StabChain(std::move(perms), npoints(), seed_);
}

std::string SpContext::serialize_group(const std::vector<SpMat> &gens) const
{
    std::ostringstream out;
    out << g_ << ' ' << d_ << ' ' << seed_ << '\n';
    for (const auto &a : gens)
        out << a.to_text();
    return out.str();
}

// ---------------------------------------------------------------------
// Levi decomposition of the stabilizer of e_1 (d = 2)

LeviDecomposition levi_unipotent(const SpContext &ctx)
{
    if (ctx.d() != 2)
        throw input_error("levi_unipotent: implemented for d = 2");
    const uint32_t g = ctx.g(), n = 2 * g;
    std::vector<uint8_t> e1(n, 0);
    e1[0] = 1;
    auto full = ctx.chain();
    auto Gm = full.point_stabilizer(ctx.encode(e1));

    LeviDecomposition out;
    out.stab_order = Gm.order();

    // L: the embedded Sp_{2g-2} on coordinates {e_2..e_g, f_2..f_g}.
    std::vector<SpMat> levi_gens;
    if (g >= 2) {
        SpContext sub(g - 1, 2);
        for (const auto &small : sub.transvection_generators()) {
            SpMat a = SpMat::identity(n, 2);
            // embed: e'_k -> e_{k+1}, f'_k -> f_{k+1}
            auto map_idx = [&](uint32_t idx) {
                return idx < g - 1 ? idx + 1 : idx + 2;
            };
            for (uint32_t r = 0; r < 2 * (g - 1); ++r)
                for (uint32_t c = 0; c < 2 * (g - 1); ++c)
                    a.set(map_idx(r), map_idx(c), small.at(r, c));
            levi_gens.push_back(a);
        }
    }
    for (const auto &a : levi_gens)
        if (!ctx.is_symplectic(a))
            throw soundness_error("levi_unipotent: embedded L not symplectic");
    StabChain L = g >= 2 ? ctx.chain_of(levi_gens)
                         : StabChain({}, ctx.npoints());
    out.levi_order = L.order();

    // U: u_{a,c}: e1 -> e1, w -> w + <w,a> e1 (w in e1-perp basis),
    // f1 -> f1 + a + c e1.
    auto u_elem = [&](const std::vector<uint8_t> &avec, uint8_t c) {
        if (avec[0] || avec[g])
            throw soundness_error("levi_unipotent: a must avoid e1, f1");
        SpMat m = SpMat::identity(n, 2);
        // column for each basis vector w (index k != 0, k != g): entry
        // row 0 gets <w, a>.
        for (uint32_t k = 0; k < n; ++k) {
            if (k == 0 || k == g)
                continue;
            // <w, a> with w = basis_k under the standard form
            uint32_t pairing = 0;
            for (uint32_t t = 0; t < n; ++t) {
                // form(basis_k, basis_t) nonzero for partner index
                uint32_t partner = t < g ? t + g : t - g;
                if (k == partner)
                    pairing ^= avec[t];
            }
            m.set(0, k, pairing);
        }
        // f1 column: f1 + a + c e1
        for (uint32_t t = 0; t < n; ++t)
            if (avec[t])
                m.set(t, g, 1);
        m.set(0, g, c);
        m.set(g, g, 1); // keep the diagonal 1 even after the loop above
        if (!ctx.is_symplectic(m))
            throw soundness_error("levi_unipotent: u element not symplectic");
        return m;
    };

    std::vector<SpMat> u_gens;
    for (uint32_t t = 0; t < n; ++t) {
        if (t == 0 || t == g)
            continue;
        std::vector<uint8_t> a(n, 0);
        a[t] = 1;
        u_gens.push_back(u_elem(a, 0));
    }
    u_gens.push_back(u_elem(std::vector<uint8_t>(n, 0), 1));
    StabChain U = ctx.chain_of(u_gens);
    out.unipotent_order = U.order();

    // All of U explicitly (2^(2g-1) elements) for the small checks.
    std::vector<SpMat> u_all;
    for (uint64_t bits = 0; bits < (uint64_t(1) << (n - 2)); ++bits) {
        std::vector<uint8_t> a(n, 0);
        uint32_t pos = 0;
        for (uint32_t t = 0; t < n; ++t) {
            if (t == 0 || t == g)
                continue;
            a[t] = (bits >> pos) & 1;
            ++pos;
        }
        u_all.push_back(u_elem(a, 0));
        u_all.push_back(u_elem(a, 1));
    }
    if (u_all.size() != (size_t(1) << (n - 1)))
        throw soundness_error("levi_unipotent: U enumeration wrong size");

    // [U,U] by direct enumeration of commutators of the generators.
    std::vector<SpMat> comms;
    for (const auto &x : u_gens)
        for (const auto &y : u_gens) {
            SpMat c = x.mul(y).mul(x.inverse()).mul(y.inverse());
            comms.push_back(c);
        }
    StabChain UU = ctx.chain_of(comms);
    out.uu_order = UU.order();
    // I + E: f1 -> f1 + e1.
    out.uu_generator = u_elem(std::vector<uint8_t>(n, 0), 1);

    // L cap U = {1}: members of U fixing f1 must be the identity.
    out.levi_intersect_trivial = true;
    std::vector<uint8_t> f1(n, 0);
    f1[g] = 1;
    for (const auto &u : u_all) {
        bool fixes_f1 = u.apply(f1) == f1;
        if (fixes_f1 && !(u == SpMat::identity(n, 2)))
            out.levi_intersect_trivial = false;
    }
    // L normalizes U: conjugates of U generators stay in U.
    out.levi_normalizes_u = true;
    for (const auto &l : levi_gens)
        for (const auto &u : u_gens) {
            SpMat c = l.mul(u).mul(l.inverse());
            if (!U.contains(ctx.to_perm(c)))
                out.levi_normalizes_u = false;
        }
    out.product_covers = out.levi_order * out.unipotent_order ==
                         out.stab_order;
    return out;
}

std::vector<SpMat> enumerate_sp(uint32_t g, uint32_t d)
{
    SpContext ctx(g, d);
    const uint32_t n = 2 * g;
    uint64_t total = 1;
    for (uint32_t i = 0; i < n * n; ++i) {
        total *= d;
        if (total > (uint64_t(1) << 26))
            throw capacity_error("enumerate_sp: search space too large");
    }
    std::vector<SpMat> out;
    for (uint64_t code = 0; code < total; ++code) {
        SpMat a(n, d);
        uint64_t x = code;
        for (uint32_t i = 0; i < n * n; ++i) {
            a.e[i] = static_cast<uint8_t>(x % d);
            x /= d;
        }
        if (ctx.is_symplectic(a))
            out.push_back(a);
    }
    return out;
}

} // namespace thetaobs::spgroup
