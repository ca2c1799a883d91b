#include "thetaobs/cohom.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "thetaobs/ringlinalg.hpp"

namespace thetaobs::cohom {

using theta::ThetaAut;

// ---------------------------------------------------------------------
// GroupTable

GroupTable GroupTable::closure(const std::vector<SpMat> &gens, uint64_t cap)
{
    if (gens.empty())
        throw input_error("GroupTable::closure: no generators");
    GroupTable t;
    SpMat id = SpMat::identity(gens[0].n, gens[0].p);
    t.elems_.push_back(id);
    t.index_.emplace(id.e, 0);
    for (size_t head = 0; head < t.elems_.size(); ++head) {
        SpMat cur = t.elems_[head];
        for (const auto &s : gens) {
            SpMat next = cur.mul(s);
            if (t.index_.emplace(next.e, t.elems_.size()).second) {
                t.elems_.push_back(next);
                if (t.elems_.size() > cap)
                    throw capacity_error("GroupTable::closure: cap exceeded");
            }
        }
    }
    t.id_ = 0;
    for (const auto &s : gens)
        t.gen_idx_.push_back(t.index_.at(s.e));
    std::sort(t.gen_idx_.begin(), t.gen_idx_.end());
    t.gen_idx_.erase(std::unique(t.gen_idx_.begin(), t.gen_idx_.end()),
                     t.gen_idx_.end());
    // inverse table
    t.inv_.resize(t.size());
    for (size_t i = 0; i < t.size(); ++i)
        t.inv_[i] = static_cast<uint32_t>(t.index_.at(t.elems_[i].inverse().e));
    // dense multiplication table for small groups
    if (t.size() <= 1024) {
        t.mul_table_.resize(t.size() * t.size());
        for (size_t a = 0; a < t.size(); ++a)
            for (size_t b = 0; b < t.size(); ++b)
                t.mul_table_[a * t.size() + b] = static_cast<uint16_t>(
                    t.index_.at(t.elems_[a].mul(t.elems_[b]).e));
    }
    return t;
}

size_t GroupTable::mul(size_t a, size_t b) const
{
    if (!mul_table_.empty())
        return mul_table_[a * size() + b];
    return index_.at(elems_[a].mul(elems_[b]).e);
}

size_t GroupTable::inv(size_t a) const { return inv_[a]; }

size_t GroupTable::index_of(const SpMat &m) const
{
    auto it = index_.find(m.e);
    if (it == index_.end())
        throw input_error("GroupTable::index_of: element not in group");
    return it->second;
}

bool GroupTable::contains(const SpMat &m) const
{
    return index_.count(m.e) != 0;
}

// ---------------------------------------------------------------------
// Cocycle2

uint32_t Cocycle2::act(size_t g, uint32_t m) const
{
    return act_perm[g][m];
}

namespace {

// m -> key of pairing values against the generators; injective by
// nondegeneracy, inverted with a flat map.
struct PairingLookup {
    const ThetaGroup *H;
    std::map<std::vector<uint32_t>, uint32_t> to_index;
    std::vector<size_t> gen_indices;

    explicit PairingLookup(const ThetaGroup &Hg) : H(&Hg)
    {
        const auto &M = Hg.module();
        for (size_t j = 0; j < M.rank(); ++j) {
            theta::Vec g = M.zero();
            g[j] = 1 % M.moduli[j];
            gen_indices.push_back(Hg.index_of(g));
        }
        for (size_t m = 0; m < Hg.msize(); ++m) {
            auto key = key_of_element(m);
            if (!to_index.emplace(key, uint32_t(m)).second)
                throw soundness_error("PairingLookup: degenerate pairing");
        }
    }

    std::vector<uint32_t> key_of_element(size_t m) const
    {
        std::vector<uint32_t> key(gen_indices.size());
        for (size_t j = 0; j < key.size(); ++j)
            key[j] = H->module_pairing(m, gen_indices[j]);
        return key;
    }

    // beta must equal the scaled pairing ebar(m, .): recover m.
    std::optional<uint32_t> from_beta(const std::vector<uint32_t> &beta) const
    {
        std::vector<uint32_t> key(gen_indices.size());
        for (size_t j = 0; j < key.size(); ++j)
            key[j] = beta[gen_indices[j]];
        auto it = to_index.find(key);
        if (it == to_index.end())
            return std::nullopt;
        return it->second;
    }
};

} // namespace

Cocycle2 extension_cocycle(const ThetaGroup &H, const GroupTable &G,
                           uint64_t twist_seed)
{
    Cocycle2 c;
    c.G = &G;
    c.H = &H;
    const size_t ng = G.size();
    const size_t nm = H.msize();
    std::mt19937_64 twist(twist_seed);

    // one theta lift per group element, identity for the identity
    std::vector<ThetaAut> lifts(ng);
    std::vector<std::vector<uint32_t>> perms(ng);
    for (size_t g = 0; g < ng; ++g) {
        if (g == G.identity()) {
            lifts[g] = theta::aut_identity(H);
        } else {
            auto lifted = theta::lift_sp(H, theta::spmat_cols(G.elem(g)));
            if (!lifted)
                throw soundness_error(
                    "extension_cocycle: surjectivity violated");
            lifts[g] = std::move(*lifted);
            if (twist_seed) {
                auto inner =
                    theta::inner_aut(H, H.elem(twist() % nm));
                lifts[g] = theta::aut_compose(H, inner, lifts[g]);
            }
        }
        perms[g].resize(nm);
        for (size_t m = 0; m < nm; ++m)
            perms[g][m] =
                static_cast<uint32_t>(theta::apply_sp(H, lifts[g], m));
    }
    c.act_perm = perms;

    PairingLookup lookup(H);
    c.table.assign(ng * ng, 0);
    std::vector<uint32_t> beta_m(nm);
    for (size_t g = 0; g < ng; ++g) {
        for (size_t h = 0; h < ng; ++h) {
            size_t gh = G.mul(g, h);
            // alpha_g alpha_h = inner(m) alpha_{gh}; compare beta tables:
            // beta_comp(x) = beta_gh(x) + ebar(m, A_gh x)
            // with beta_comp(x) = beta_h(x) + beta_g(A_h x).
            for (size_t x = 0; x < nm; ++x) {
                uint32_t comp =
                    (lifts[h].beta[x] + lifts[g].beta[perms[h][x]]) % H.n();
                uint32_t diff =
                    (comp + H.n() - lifts[gh].beta[x]) % H.n();
                beta_m[perms[gh][x]] = diff; // ebar(m, y) at y = A_gh x
            }
            auto m = lookup.from_beta(beta_m);
            if (!m)
                throw soundness_error(
                    "extension_cocycle: defect is not an inner beta");
            c.table[g * ng + h] = *m;
        }
    }
    // normalization
    for (size_t g = 0; g < ng; ++g)
        if (c.at(G.identity(), g) != 0 || c.at(g, G.identity()) != 0)
            throw soundness_error("extension_cocycle: not normalized");
    return c;
}

bool validate_cocycle(const Cocycle2 &c, uint64_t exhaustive_cap,
                      size_t samples, uint64_t seed)
{
    const auto &G = *c.G;
    const auto &H = *c.H;
    const size_t ng = G.size();
    auto check = [&](size_t g, size_t h, size_t k) {
        // g.c(h,k) - c(gh,k) + c(g,hk) - c(g,h) = 0
        uint32_t lhs = H.add(c.act(g, c.at(h, k)), c.at(g, G.mul(h, k)));
        uint32_t rhs = H.add(c.at(G.mul(g, h), k), c.at(g, h));
        return lhs == rhs;
    };
    if (uint64_t(ng) * ng * ng <= exhaustive_cap) {
        for (size_t g = 0; g < ng; ++g)
            for (size_t h = 0; h < ng; ++h)
                for (size_t k = 0; k < ng; ++k)
                    if (!check(g, h, k))
                        return false;
        return true;
    }
    std::mt19937_64 gen(seed);
    for (size_t t = 0; t < samples; ++t)
        if (!check(gen() % ng, gen() % ng, gen() % ng))
            return false;
    return true;
}

CoboundaryResult is_coboundary(const Cocycle2 &c)
{
    const auto &G = *c.G;
    const auto &H = *c.H;
    const auto &M = H.module();
    const size_t ng = G.size();
    const size_t rank = M.rank();
    const uint32_t d = M.moduli.empty() ? 2 : M.moduli[0];
    for (uint32_t m : M.moduli)
        if (m != d)
            throw capacity_error(
                "is_coboundary: module must be homogeneous");

    if ((ng - 1) * rank > (size_t(1) << 23))
        throw capacity_error(
            "is_coboundary: system exceeds 2^23 unknowns; restrict to a "
            "Sylow subgroup (nonzero_via_sylow) instead");

    CoboundaryResult out;
    // unknowns: f(g)_i for g != 1, i < rank
    auto var = [&](size_t g, size_t i) {
        size_t gg = g > G.identity() ? g - 1 : g;
        return gg * rank + i;
    };
    const size_t nvars = (ng - 1) * rank;

    // equations over generators x all elements; full verification after
    std::vector<std::pair<size_t, size_t>> eqs;
    for (size_t s : G.generator_indices())
        for (size_t h = 0; h < ng; ++h)
            eqs.push_back({s, h});

    auto coords = [&](uint32_t mindex) { return H.elem(mindex); };

    if (d == 2) {
        ring::F2Solver solver(nvars);
        std::vector<uint64_t> row((nvars + 63) / 64);
        for (auto [g, h] : eqs) {
            size_t gh = G.mul(g, h);
            const auto &cv = coords(c.at(g, h));
            const SpMat &A = G.elem(g);
            for (size_t i = 0; i < rank; ++i) {
                std::fill(row.begin(), row.end(), 0);
                auto flip = [&](size_t v) { row[v / 64] ^= uint64_t(1)
                                                          << (v % 64); };
                // (A f(h))_i + f(gh)_i + f(g)_i = c(g,h)_i
                if (h != G.identity())
                    for (size_t j = 0; j < rank; ++j)
                        if (A.at(uint32_t(i), uint32_t(j)))
                            flip(var(h, j));
                if (gh != G.identity())
                    flip(var(gh, i));
                if (g != G.identity())
                    flip(var(g, i));
                if (!solver.add_equation(row, cv[i] != 0)) {
                    out.solvable = false;
                    out.certificate =
                        "inconsistent F2 subsystem over generator equations";
                    return out;
                }
            }
        }
        auto x = solver.solution();
        out.witness.assign(ng, 0);
        for (size_t g = 0; g < ng; ++g) {
            if (g == G.identity())
                continue;
            theta::Vec v(rank);
            for (size_t i = 0; i < rank; ++i)
                v[i] = x[var(g, i)];
            out.witness[g] = static_cast<uint32_t>(H.index_of(v));
        }
    } else {
        ring::ResMatrix A(eqs.size() * rank, nvars, d);
        std::vector<uint32_t> rhs(eqs.size() * rank, 0);
        size_t row = 0;
        for (auto [g, h] : eqs) {
            size_t gh = G.mul(g, h);
            const auto &cv = coords(c.at(g, h));
            const SpMat &Ag = G.elem(g);
            for (size_t i = 0; i < rank; ++i, ++row) {
                if (h != G.identity())
                    for (size_t j = 0; j < rank; ++j) {
                        uint32_t aij = Ag.at(uint32_t(i), uint32_t(j));
                        if (aij)
                            A.set(row, var(h, j),
                                  (A.at(row, var(h, j)) + aij) % d);
                    }
                if (gh != G.identity())
                    A.set(row, var(gh, i),
                          (A.at(row, var(gh, i)) + d - 1) % d);
                if (g != G.identity())
                    A.set(row, var(g, i), (A.at(row, var(g, i)) + 1) % d);
                rhs[row] = cv[i] % d;
            }
        }
        auto sol = ring::solve_mod(A, rhs);
        if (!sol.solvable) {
            out.solvable = false;
            out.certificate =
                "inconsistent Z/d subsystem over generator equations";
            return out;
        }
        out.witness.assign(ng, 0);
        for (size_t g = 0; g < ng; ++g) {
            if (g == G.identity())
                continue;
            theta::Vec v(rank);
            for (size_t i = 0; i < rank; ++i)
                v[i] = sol.x[var(g, i)];
            out.witness[g] = static_cast<uint32_t>(H.index_of(v));
        }
    }

    // verify the witness on every pair (the generator system plus the
    // cocycle identity make this a theorem; check it anyway)
    for (size_t g = 0; g < ng; ++g)
        for (size_t h = 0; h < ng; ++h) {
            size_t gh = G.mul(g, h);
            uint32_t lhs = H.add(c.act(g, out.witness[h]),
                                 H.add(out.witness[g],
                                       H.neg(out.witness[gh])));
            if (lhs != c.at(g, h))
                throw soundness_error(
                    "is_coboundary: witness failed full verification");
        }
    out.solvable = true;
    return out;
}

Cocycle2 restrict_cocycle(const Cocycle2 &c, const GroupTable &sub)
{
    Cocycle2 r;
    r.G = &sub;
    r.H = c.H;
    const size_t ns = sub.size();
    std::vector<size_t> into(ns);
    for (size_t i = 0; i < ns; ++i)
        into[i] = c.G->index_of(sub.elem(i));
    r.table.assign(ns * ns, 0);
    for (size_t a = 0; a < ns; ++a)
        for (size_t b = 0; b < ns; ++b)
            r.table[a * ns + b] = c.at(into[a], into[b]);
    r.act_perm.resize(ns);
    for (size_t a = 0; a < ns; ++a)
        r.act_perm[a] = c.act_perm[into[a]];
    return r;
}

Cocycle2 difference(const Cocycle2 &a, const Cocycle2 &b)
{
    if (a.G != b.G && a.G->size() != b.G->size())
        throw input_error("difference: group mismatch");
    Cocycle2 r = a;
    const auto &H = *a.H;
    for (size_t i = 0; i < r.table.size(); ++i)
        r.table[i] =
            static_cast<uint32_t>(H.add(a.table[i], H.neg(b.table[i])));
    return r;
}

SylowVerdict nonzero_via_sylow(uint32_t g)
{
    if (g < 1 || g > 3)
        throw capacity_error(
            "nonzero_via_sylow: supported for g <= 3 (Sylow order <= 512); "
            "larger g exceeds the full-solve capacity");
    SylowVerdict v;
    v.g = g;
    symmod::TypeD D;
    D.divisors.assign(g, 2);
    auto H = ThetaGroup::standard(D);
    spgroup::SpContext ctx(g, 2);
    auto sylow = GroupTable::closure(ctx.borel_generators());
    v.sylow_order = sylow.size();
    if (v.sylow_order != (uint64_t(1) << (g * g)))
        throw soundness_error("nonzero_via_sylow: wrong Sylow order");
    auto c = extension_cocycle(H, sylow);
    if (!validate_cocycle(c))
        throw soundness_error("nonzero_via_sylow: invalid cocycle");
    auto cb = is_coboundary(c);
    v.nonzero = !cb.solvable;
    v.detail = cb.solvable ? "restriction to the Sylow 2-subgroup splits"
                           : cb.certificate;
    return v;
}

NegligibilityReport negligibility_report(uint32_t g)
{
    if (g < 1 || g > 4)
        throw capacity_error("negligibility_report: g <= 4");
    NegligibilityReport rep;
    rep.g = g;

    spgroup::SpContext ctx(g, 2);
    auto chain = ctx.chain();
    // orbits of Sp_2g(F_2) on M_D: {0} and everything else
    if (chain.orbit_of(0).size() != ctx.npoints())
        throw soundness_error("negligibility_report: action not transitive");

    OrbitRow zero;
    zero.zero_orbit = true;
    zero.stab_order = chain.order();
    zero.stab_ab_order = 0; // not needed: phi_0 = 0 by definition
    zero.phi_vanishes = true;
    rep.rows.push_back(zero);

    std::vector<uint8_t> e1(2 * g, 0);
    e1[0] = 1;
    auto stab = chain.point_stabilizer(ctx.encode(e1));
    OrbitRow row;
    row.stab_order = stab.order();
    row.stab_ab_order = spgroup::abelianization_order(stab);
    row.phi_vanishes = (row.stab_ab_order == 1);
    rep.rows.push_back(row);

    rep.all_phi_vanish = true;
    for (const auto &r : rep.rows)
        rep.all_phi_vanish = rep.all_phi_vanish && r.phi_vanishes;

    if (g <= 3) {
        rep.cd_nonzero = nonzero_via_sylow(g).nonzero;
        rep.cd_nonzero_cited = false;
    } else {
        rep.cd_nonzero = true; // Griess (via the paper), not recomputed
        rep.cd_nonzero_cited = true;
    }

    if (rep.cd_nonzero && rep.all_phi_vanish)
        rep.verdict = "c_D not negligible";
    else if (rep.cd_nonzero)
        rep.verdict = "c_D nonzero; negligibility not concluded (some "
                      "stabilizer has nontrivial abelianization)";
    else
        rep.verdict = "c_D is a coboundary";
    return rep;
}

LiftingDecision lifting_decision(const ThetaGroup &H, const GroupTable &G,
                                 bool verify_all_pairs)
{
    LiftingDecision out;
    auto c = extension_cocycle(H, G);
    auto cb = is_coboundary(c);
    if (!cb.solvable) {
        out.lifts = false;
        out.certificate = cb.certificate;
        return out;
    }
    // section: s(g) = inner(-f(g)) o alpha_g; rebuild the alpha table the
    // same way extension_cocycle does (identity at 1)
    const size_t ng = G.size();
    out.section.resize(ng);
    for (size_t g = 0; g < ng; ++g) {
        ThetaAut alpha =
            g == G.identity()
                ? theta::aut_identity(H)
                : *theta::lift_sp(H, theta::spmat_cols(G.elem(g)));
        auto mf = H.elem(cb.witness[g]);
        ThetaAut inner = theta::inner_aut(H, H.module().neg(mf));
        out.section[g] = theta::aut_compose(H, inner, alpha);
    }
    if (verify_all_pairs) {
        for (size_t g = 0; g < ng; ++g)
            for (size_t h = 0; h < ng; ++h) {
                auto lhs =
                    theta::aut_compose(H, out.section[g], out.section[h]);
                if (!theta::aut_equal(H, lhs, out.section[G.mul(g, h)]))
                    throw soundness_error(
                        "lifting_decision: section is not a homomorphism");
            }
    }
    out.lifts = true;
    out.certificate = "verified homomorphic section";
    return out;
}

std::vector<uint32_t> odd_section_witness(const ThetaGroup &Hodd,
                                          const GroupTable &G,
                                          const Cocycle2 &c)
{
    // lift(g) = inner(f(g)) o s(g) with s the canonical section; the
    // defect cocycle is then exactly the coboundary of f.
    const size_t ng = G.size();
    PairingLookup lookup(Hodd);
    std::vector<uint32_t> f(ng, 0);
    for (size_t g = 0; g < ng; ++g) {
        // beta_lift(x) = ebar(n, A_g x): evaluate at x = A_g^{-1} gen_j
        const auto &perm = c.act_perm[g];
        std::vector<uint32_t> inv(perm.size());
        for (size_t x = 0; x < perm.size(); ++x)
            inv[perm[x]] = static_cast<uint32_t>(x);
        ThetaAut alpha = g == G.identity()
                             ? theta::aut_identity(Hodd)
                             : *theta::lift_sp(
                                   Hodd, theta::spmat_cols(G.elem(g)));
        std::vector<uint32_t> key(lookup.gen_indices.size());
        for (size_t j = 0; j < key.size(); ++j)
            key[j] = alpha.beta[inv[lookup.gen_indices[j]]];
        auto it = lookup.to_index.find(key);
        if (it == lookup.to_index.end())
            throw soundness_error("odd_section_witness: recovery failed");
        f[g] = it->second;
    }
    return f;
}

} // namespace thetaobs::cohom
