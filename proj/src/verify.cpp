#include "thetaobs/verify.hpp"

#include <future>
#include <random>
#include <set>
#include <sstream>

#include "thetaobs/cohom.hpp"
#include "thetaobs/exceptional.hpp"
#include "thetaobs/paramod.hpp"
#include "thetaobs/spgroup.hpp"
#include "thetaobs/symmod.hpp"
#include "thetaobs/theta.hpp"

namespace thetaobs::verify {

using report::Record;
using symmod::TypeD;
using symmod::Vec;
using theta::ThetaGroup;

namespace {

Record rec(const std::string &name, const std::string &anchor, bool pass,
           const std::string &witness = "-")
{
    return {name, anchor, pass ? "pass" : "fail", witness};
}

Record recval(const std::string &name, const std::string &anchor,
              const std::string &value, const std::string &witness = "-")
{
    return {name, anchor, "recorded:" + value, witness};
}

// all divisor chains d1 | d2 | ... with product <= cap, d1 >= 2
void enumerate_types(uint64_t cap, std::vector<uint32_t> &cur,
                     std::vector<TypeD> &out)
{
    uint64_t prod = 1;
    for (uint32_t d : cur)
        prod *= d;
    uint32_t start = cur.empty() ? 2 : cur.back();
    for (uint32_t d = start; prod * d <= cap; ++d) {
        if (!cur.empty() && d % cur.back() != 0)
            continue;
        cur.push_back(d);
        TypeD t;
        t.divisors = cur;
        out.push_back(t);
        enumerate_types(cap, cur, out);
        cur.pop_back();
    }
}

std::vector<TypeD> all_types_up_to(uint64_t cap)
{
    std::vector<uint32_t> cur;
    std::vector<TypeD> out;
    enumerate_types(cap, cur, out);
    return out;
}

// sparse evaluation of the module pairing: list of (i, j, value)
struct SparsePairing {
    std::vector<std::array<uint32_t, 3>> entries;
    uint32_t mod;
    explicit SparsePairing(const symmod::SymplecticModule &M) : mod(M.scalar_mod)
    {
        for (uint32_t i = 0; i < M.rank(); ++i)
            for (uint32_t j = 0; j < M.rank(); ++j)
                if (M.gram.at(i, j))
                    entries.push_back({i, j, M.gram.at(i, j)});
    }
    uint32_t pair(const Vec &a, const Vec &b) const
    {
        uint64_t acc = 0;
        for (const auto &[i, j, v] : entries)
            acc += uint64_t(a[i]) * b[j] % mod * v;
        return static_cast<uint32_t>(acc % mod);
    }
};

// random base change used by the classification round trip
std::vector<Vec> random_base_change(const symmod::SymplecticModule &M,
                                    std::mt19937_64 &gen)
{
    const size_t k = M.rank();
    std::vector<Vec> basis(k, Vec(k, 0));
    for (size_t i = 0; i < k; ++i)
        basis[i][i] = 1 % M.moduli[i];
    auto gcd_u = [](uint64_t a, uint64_t b) {
        while (b) {
            uint64_t t = a % b;
            a = b;
            b = t;
        }
        return a;
    };
    for (int step = 0; step < 48; ++step) {
        size_t op = gen() % 3;
        size_t i = gen() % k, j = gen() % k;
        if (op == 0 && i != j) {
            uint64_t mi = M.moduli[i], mj = M.moduli[j];
            uint64_t c0 = mi / gcd_u(mi, mj);
            uint64_t c = c0 * (gen() % (mi / c0 + 1)) % mi;
            for (size_t t = 0; t < k; ++t)
                basis[j][t] = static_cast<uint32_t>(
                    (basis[j][t] + c * basis[i][t]) % M.moduli[t]);
        } else if (op == 1) {
            uint64_t m = M.moduli[i];
            uint64_t u = 1 + gen() % m;
            while (gcd_u(u, m) != 1)
                u = 1 + gen() % m;
            for (size_t t = 0; t < k; ++t)
                basis[i][t] =
                    static_cast<uint32_t>(u * basis[i][t] % M.moduli[t]);
        } else if (M.moduli[i] == M.moduli[j]) {
            std::swap(basis[i], basis[j]);
        }
    }
    return basis;
}

} // namespace

Records c01_classification(const Options &opt)
{
    Records out;
    std::mt19937_64 gen(opt.seed ^ 0xc1);
    bool all = true;
    for (const char *t :
         {"2", "3", "2,2", "2,4", "3,3", "2,6", "2,2,2"}) {
        TypeD D = TypeD::parse(t);
        auto M = symmod::standard_module(D);
        for (int trial = 0; trial < 50 && all; ++trial) {
            auto basis = random_base_change(M, gen);
            symmod::SymplecticModule S;
            S.moduli = M.moduli;
            S.scalar_mod = M.scalar_mod;
            S.gram = ring::ResMatrix(M.rank(), M.rank(), M.scalar_mod);
            for (size_t a = 0; a < M.rank(); ++a)
                for (size_t b = 0; b < M.rank(); ++b)
                    S.gram.set(a, b, M.pair(basis[a], basis[b]));
            auto c = symmod::classify(S);
            all = all && (c.type == D);
            // Gram exactness of the recovered basis (also asserted
            // inside classify; fail loudly here as well)
            const uint32_t N = S.scalar_mod;
            for (size_t i = 0; i < D.g() && all; ++i)
                for (size_t j = 0; j < D.g() && all; ++j) {
                    uint32_t expect = i == j ? N / D.divisors[i] : 0;
                    all = all && S.pair(c.e[i], c.f[j]) == expect &&
                          S.pair(c.e[i], c.e[j]) == 0 &&
                          S.pair(c.f[i], c.f[j]) == 0;
                }
        }
    }
    out.push_back(rec("c01-classification-roundtrip",
                      "types-D-lagrangian-decomposition", all));
    return out;
}

Records c02_theta_axioms(const Options &opt)
{
    Records out;
    std::mt19937_64 gen(opt.seed ^ 0xc2);
    auto types = all_types_up_to(opt.full ? 64 : 16);
    bool order_ok = true, axioms_ok = true, pairing_ok = true;
    for (const auto &D : types) {
        auto H = ThetaGroup::standard(D);
        const size_t nm = H.msize();
        order_ok = order_ok &&
                   H.order() == uint64_t(D.scalar_modulus()) * D.card() *
                                    D.card();
        // phi and independent pairing tables (the pairing from the Gram
        // table, the structure constants from the group law)
        std::vector<uint16_t> phi(nm * nm), epair(nm * nm);
        SparsePairing sp(H.module());
        const uint32_t scale = H.n() / H.module().scalar_mod;
        for (size_t a = 0; a < nm; ++a) {
            const Vec &va = H.elem(a);
            for (size_t b = 0; b < nm; ++b) {
                phi[a * nm + b] = static_cast<uint16_t>(H.phi(a, b));
                epair[a * nm + b] = static_cast<uint16_t>(
                    uint64_t(sp.pair(va, H.elem(b))) * scale % H.n());
            }
        }
        // identity and inverses, exhaustive over H
        for (uint32_t t = 0; t < H.n() && axioms_ok; ++t)
            for (size_t m = 0; m < nm; ++m) {
                ThetaGroup::Elt x{t, uint32_t(m)};
                if (!(H.mul(x, H.inv(x)) == H.identity()) ||
                    !(H.mul(H.identity(), x) == x)) {
                    axioms_ok = false;
                    break;
                }
            }
        // associativity == the cocycle identity on module triples;
        // exhaustive (with an add table) for #D <= 16, sampled beyond
        if (D.card() <= 16) {
            std::vector<uint32_t> add(nm * nm);
            for (size_t a = 0; a < nm; ++a)
                for (size_t b = 0; b < nm; ++b)
                    add[a * nm + b] = static_cast<uint32_t>(H.add(a, b));
            const uint32_t n = H.n();
            for (size_t a = 0; a < nm && axioms_ok; ++a)
                for (size_t b = 0; b < nm && axioms_ok; ++b) {
                    uint32_t ab = add[a * nm + b];
                    for (size_t cc = 0; cc < nm; ++cc) {
                        uint32_t lhs = phi[b * nm + cc] +
                                       phi[a * nm + add[b * nm + cc]];
                        uint32_t rhs =
                            phi[ab * nm + cc] + phi[a * nm + b];
                        if (lhs % n != rhs % n) {
                            axioms_ok = false;
                            break;
                        }
                    }
                }
        } else {
            for (int s = 0; s < 10000 && axioms_ok; ++s)
                axioms_ok = H.cocycle_identity(gen() % nm, gen() % nm,
                                               gen() % nm);
        }
        // commutator pairing equals the module pairing, exhaustively
        const uint32_t n = H.n();
        for (size_t a = 0; a < nm && pairing_ok; ++a)
            for (size_t b = 0; b < nm; ++b) {
                uint32_t lhs =
                    (phi[a * nm + b] + n - phi[b * nm + a]) % n;
                if (lhs != epair[a * nm + b]) {
                    pairing_ok = false;
                    break;
                }
            }
    }
    out.push_back(rec("c02a-theta-order", "H_D order n(#D)^2", order_ok));
    out.push_back(rec("c02b-theta-axioms", "standard theta group law",
                      axioms_ok));
    out.push_back(rec("c02c-commutator-pairing", "commutator equals e_D",
                      pairing_ok));
    return out;
}

Records c03_schrodinger(const Options &opt)
{
    Records out;
    (void)opt;
    bool mult_ok = true, center_ok = true, dim_ok = true, faithful_ok = true;
    for (const auto &D : all_types_up_to(16)) {
        auto H = ThetaGroup::standard(D);
        theta::SchrodingerRep rep(D);
        dim_ok = dim_ok && rep.dim() == D.card();
        // R(t, m) = zeta^t R(0, m) in the monomial representation:
        // exponents just shift.  Verify that shift for every element,
        // then multiplicativity on all (0,m) pairs; together these give
        // R(x)R(y) = R(xy) for every pair of group elements exactly.
        std::vector<theta::MonomialMat> base(H.msize());
        for (size_t m = 0; m < H.msize(); ++m)
            base[m] = rep.image(H, {0, uint32_t(m)});
        auto id = theta::monomial_identity(rep.dim(), H.n());
        size_t kernel = 0;
        for (uint32_t t = 0; t < H.n(); ++t)
            for (size_t m = 0; m < H.msize(); ++m) {
                auto img = rep.image(H, {t, uint32_t(m)});
                if (img == id)
                    ++kernel;
                if (img.row_of_col != base[m].row_of_col) {
                    center_ok = false;
                    continue;
                }
                for (size_t col = 0; col < rep.dim(); ++col)
                    if (img.exp_of_col[col] !=
                        (base[m].exp_of_col[col] + t) % H.n())
                        center_ok = false;
            }
        faithful_ok = faithful_ok && kernel == 1;
        for (size_t a = 0; a < H.msize() && mult_ok; ++a)
            for (size_t b = 0; b < H.msize(); ++b) {
                auto prod = H.mul({0, uint32_t(a)}, {0, uint32_t(b)});
                auto lhs = theta::monomial_mul(base[a], base[b]);
                // R(prod) = zeta^{prod.t} R(0, prod.m)
                const auto &rm = base[prod.m];
                bool same = lhs.row_of_col == rm.row_of_col;
                for (size_t col = 0; col < rep.dim() && same; ++col)
                    same = lhs.exp_of_col[col] ==
                           (rm.exp_of_col[col] + prod.t) % H.n();
                if (!same) {
                    mult_ok = false;
                    break;
                }
            }
    }
    out.push_back(rec("c03a-schrodinger-mult", "V_D is a representation",
                      mult_ok));
    out.push_back(rec("c03b-schrodinger-center", "center acts by zeta_n",
                      center_ok));
    out.push_back(rec("c03c-schrodinger-dim", "dimension #D", dim_ok));
    out.push_back(rec("c03d-schrodinger-faithful", "kernel trivial",
                      faithful_ok));
    return out;
}

Records c04_odd_splitting(const Options &opt)
{
    Records out;
    std::mt19937_64 gen(opt.seed ^ 0xc4);
    bool ok3 = true, ok5 = true, ok33 = true;
    {
        auto M = symmod::standard_module(TypeD::parse("3"));
        auto H = ThetaGroup::odd_model(M);
        auto all = spgroup::enumerate_sp(1, 3);
        for (const auto &A : all)
            for (const auto &B : all) {
                auto sa = theta::odd_canonical_section(H, theta::spmat_cols(A));
                auto sb = theta::odd_canonical_section(H, theta::spmat_cols(B));
                auto sab = theta::odd_canonical_section(
                    H, theta::spmat_cols(A.mul(B)));
                if (!theta::aut_equal(H, theta::aut_compose(H, sa, sb), sab)) {
                    ok3 = false;
                    break;
                }
            }
    }
    {
        auto M = symmod::standard_module(TypeD::parse("5"));
        auto H = ThetaGroup::odd_model(M);
        auto all = spgroup::enumerate_sp(1, 5);
        ok5 = all.size() == 120;
        for (const auto &A : all)
            for (const auto &B : all) {
                auto sa = theta::odd_canonical_section(H, theta::spmat_cols(A));
                auto sb = theta::odd_canonical_section(H, theta::spmat_cols(B));
                auto sab = theta::odd_canonical_section(
                    H, theta::spmat_cols(A.mul(B)));
                if (!theta::aut_equal(H, theta::aut_compose(H, sa, sb), sab)) {
                    ok5 = false;
                    break;
                }
            }
    }
    {
        auto M = symmod::standard_module(TypeD::parse("3,3"));
        auto H = ThetaGroup::odd_model(M);
        spgroup::SpContext ctx(2, 3);
        auto gens = ctx.transvection_generators();
        auto rand_sp = [&] {
            spgroup::SpMat a = spgroup::SpMat::identity(4, 3);
            for (int t = 0; t < 24; ++t)
                a = a.mul(gens[gen() % gens.size()]);
            return a;
        };
        for (int t = 0; t < 10000 && ok33; ++t) {
            auto A = rand_sp(), B = rand_sp();
            auto sa = theta::odd_canonical_section(H, theta::spmat_cols(A));
            auto sb = theta::odd_canonical_section(H, theta::spmat_cols(B));
            auto sab =
                theta::odd_canonical_section(H, theta::spmat_cols(A.mul(B)));
            ok33 = theta::aut_equal(H, theta::aut_compose(H, sa, sb), sab);
            if (t % 1000 == 0)
                ok33 = ok33 && theta::is_automorphism(H, sa, 128, gen());
        }
    }
    out.push_back(rec("c04a-odd-section-3", "SL2(F3) 24^2 pairs", ok3));
    out.push_back(rec("c04b-odd-section-5", "SL2(F5) 120^2 pairs", ok5));
    out.push_back(rec("c04c-odd-section-33", "Sp4(F3) 10^4 pairs", ok33));
    return out;
}

Records c05_exceptional(const Options &opt)
{
    Records out;
    auto s6 = exceptional::certify_s6(opt.seed ^ 0xc5, 10000);
    out.push_back(rec("c05a-s6-sp4",
                      "six-point model S6 -> Sp4(F2)",
                      s6.all_images_symplectic && s6.homomorphism &&
                          s6.injective && s6.image_order == 720,
                      std::to_string(s6.image_order)));
    auto w = exceptional::certify_weyl_e7(opt.seed ^ 0xc5,
                                          opt.full ? 10000 : 500);
    bool weyl_ok = w.weyl_order == 2903040 && w.image_order == 1451520 &&
                   w.minus_id_in_w && w.kernel_is_pm_id &&
                   w.fibers_are_pm_pairs && w.det_splits &&
                   w.n_type == TypeD::parse("2,2,2");
    out.push_back(rec("c05b-weyl-e7", "W(E7) ->> Sp6(F2), kernel {+-1}",
                      weyl_ok,
                      std::to_string(w.weyl_order) + "/" +
                          std::to_string(w.image_order)));
    out.push_back(
        rec("c05c-e7-roots", "126 roots of norm 2",
            exceptional::build_e7().roots.size() == 126, "126"));
    return out;
}

Records c06_stabilizer_structure(const Options &opt)
{
    Records out;
    (void)opt;
    spgroup::SpContext ctx(4, 2);
    auto levi = spgroup::levi_unipotent(ctx);
    out.push_back(rec("c06a-stab-order", "|G_m| = 185794560",
                      levi.stab_order == 185794560ull,
                      std::to_string(levi.stab_order)));
    out.push_back(rec("c06b-levi-order", "|L| = |Sp6(F2)| = 1451520",
                      levi.levi_order == 1451520ull &&
                          levi.levi_intersect_trivial &&
                          levi.levi_normalizes_u && levi.product_covers,
                      std::to_string(levi.levi_order)));
    out.push_back(rec("c06c-unipotent-order", "|U| = 2^7 = 128",
                      levi.unipotent_order == 128,
                      std::to_string(levi.unipotent_order)));
    // The paper states |[U,U]| = 2 (generated by I + E); over F_2 the
    // computed value is 1 (U is elementary abelian).  The criterion is
    // implemented as stated and the computed value is recorded.
    out.push_back(rec("c06d-uu-order", "paper: |[U,U]| = 2",
                      levi.uu_order == 2, std::to_string(levi.uu_order)));
    auto chain = ctx.chain();
    std::vector<uint8_t> e1(8, 0);
    e1[0] = 1;
    auto gm = chain.point_stabilizer(ctx.encode(e1));
    uint64_t ab = spgroup::abelianization_order(gm);
    out.push_back(rec("c06e-abelianization", "G_m^ab trivial (g = 4)",
                      ab == 1, std::to_string(ab)));
    return out;
}

Records c07_obstruction(const Options &opt)
{
    Records out;
    // g = 3: Sylow-512 restriction certified non-coboundary
    auto v3 = cohom::nonzero_via_sylow(3);
    out.push_back(rec("c07a-sylow-512-nonzero",
                      "c_(2,2,2) nonzero via Sylow restriction", v3.nonzero,
                      std::to_string(v3.sylow_order)));
    // g = 2: the full 720-element solve; verdict recorded, plus cocycle
    // validity and stability under re-choice of lifts
    auto H = ThetaGroup::standard(TypeD::parse("2,2"));
    spgroup::SpContext ctx(2, 2);
    auto G = cohom::GroupTable::closure(ctx.transvection_generators());
    auto c = cohom::extension_cocycle(H, G);
    bool valid = cohom::validate_cocycle(
        c, opt.full ? (uint64_t(720) * 720 * 720 + 1) : (1 << 18), 1000000,
        opt.seed ^ 0xc7);
    auto cb1 = cohom::is_coboundary(c);
    auto c2 = cohom::extension_cocycle(H, G, opt.seed ^ 0x77);
    auto cb2 = cohom::is_coboundary(c2);
    auto diff = cohom::difference(c, c2);
    bool stable = cb1.solvable == cb2.solvable &&
                  cohom::is_coboundary(diff).solvable;
    out.push_back(rec("c07b-22-cocycle-valid",
                      "cocycle identity on all 720^3 triples", valid));
    out.push_back(rec("c07c-22-verdict-stable",
                      "verdict invariant under lift re-choice", stable));
    out.push_back(recval("c07d-22-verdict", "no paper assertion for (2,2)",
                         cb1.solvable ? "coboundary" : "nonzero"));
    return out;
}

Records c08_negligibility(const Options &opt)
{
    Records out;
    (void)opt;
    auto rep = cohom::negligibility_report(4);
    bool phi_ok = rep.all_phi_vanish;
    bool verdict_ok = rep.verdict == "c_D not negligible";
    out.push_back(rec("c08a-phi-vanish",
                      "all stabilizer abelianizations trivial (g = 4)",
                      phi_ok,
                      std::to_string(rep.rows.back().stab_ab_order)));
    out.push_back(rec("c08b-not-negligible",
                      "c_D != 0 (cited at g = 4) and phi_m = 0", verdict_ok,
                      rep.cd_nonzero_cited ? "cited-not-recomputed"
                                           : "recomputed"));
    // g = 3 for contrast: c_D != 0 recomputed, negligibility not concluded
    auto rep3 = cohom::negligibility_report(3);
    out.push_back(recval("c08c-g3-stab-ab", "G_m^ab at g = 3 (reported)",
                         std::to_string(rep3.rows.back().stab_ab_order)));
    return out;
}

Records c09_baer(const Options &opt)
{
    Records out;
    std::mt19937_64 gen(opt.seed ^ 0xc9);
    bool ok = true;
    auto run_case = [&](const char *t1, const char *t2) {
        auto H1 = ThetaGroup::standard(TypeD::parse(t1));
        auto H2 = ThetaGroup::standard(TypeD::parse(t2));
        // twist H1 by a random coboundary: same framed class
        std::vector<uint32_t> beta0(H1.msize(), 0);
        for (size_t i = 1; i < H1.msize(); ++i)
            beta0[i] = gen() % H1.n();
        std::vector<uint16_t> tw(H1.msize() * H1.msize());
        for (size_t a = 0; a < H1.msize(); ++a)
            for (size_t b = 0; b < H1.msize(); ++b)
                tw[a * H1.msize() + b] = static_cast<uint16_t>(
                    (H1.phi(a, b) + beta0[H1.add(a, b)] + 4ull * H1.n() -
                     beta0[a] - beta0[b]) %
                    H1.n());
        auto T1 = ThetaGroup::from_table(H1.module(), H1.n(), tw);
        auto S = theta::baer_sum(T1, H2);
        // restrict to the first factor, reduce the center, compare
        std::vector<size_t> keep1;
        for (size_t i = 0; i < H1.module().rank(); ++i)
            keep1.push_back(i);
        auto R1 = theta::center_reduce(theta::restrict_theta(S, keep1),
                                       H1.n());
        auto w1 = theta::framed_isomorphism(R1, H1);
        ok = ok && w1.has_value();
        // and to the second factor
        std::vector<size_t> keep2;
        for (size_t i = 0; i < H2.module().rank(); ++i)
            keep2.push_back(H1.module().rank() + i);
        auto R2 = theta::center_reduce(theta::restrict_theta(S, keep2),
                                       H2.n());
        auto w2 = theta::framed_isomorphism(R2, H2);
        ok = ok && w2.has_value();
        // commutator pairing of the sum is the orthogonal sum pairing
        for (size_t a = 0; a < S.msize() && ok; ++a)
            for (size_t b = 0; b < S.msize(); ++b)
                if (S.commutator(a, b) != S.module_pairing(a, b)) {
                    ok = false;
                    break;
                }
    };
    run_case("2", "2");
    run_case("2", "3");
    out.push_back(rec("c09-baer-restrict",
                      "restrict(baer_sum) framed-isomorphic to the summand",
                      ok));
    return out;
}

Records c10_quadratic(const Options &opt)
{
    Records out;
    (void)opt;
    bool ok = true;
    {
        auto H = ThetaGroup::standard(TypeD::parse("2"));
        auto qs = theta::quadratic_refinements(H);
        ok = ok && qs.size() == 4;
    }
    {
        auto H = ThetaGroup::standard(TypeD::parse("2,2"));
        auto qs = theta::quadratic_refinements(H);
        ok = ok && qs.size() == 16;
        // the defining identity holds for every counted refinement
        for (const auto &q : qs)
            for (size_t a = 0; a < H.msize() && ok; ++a)
                for (size_t b = 0; b < H.msize(); ++b) {
                    uint32_t e = H.module_pairing(a, b);
                    uint8_t target = e ? 1 : 0;
                    if ((q[H.add(a, b)] ^ q[a] ^ q[b]) != target) {
                        ok = false;
                        break;
                    }
                }
    }
    out.push_back(
        rec("c10-quadratic-refinements", "2^(2g) refinements, identity",
            ok));
    return out;
}

Records c11_appendix(const Options &opt)
{
    Records out;
    paramod::ParamodContext ctx(3, 2);
    size_t trials = opt.full ? 1000 : 100;

    bool ids_ok = true;
    std::string ids_detail;
    for (uint32_t bits : {3u, 4u}) {
        for (const auto &r :
             paramod::verify_commutator_identities(ctx, bits, trials,
                                                   opt.seed ^ 0xc11)) {
            if (!r.pass) {
                ids_ok = false;
                ids_detail = r.name + ": " + r.detail;
            }
        }
    }
    out.push_back(rec("c11a-commutator-identities",
                      "appendix displays, mod 8 and 16", ids_ok,
                      ids_detail.empty() ? "-" : ids_detail));

    bool spans_ok = true;
    for (uint32_t bits : {3u, 4u})
        for (const auto &r : paramod::verify_spanning_claims(ctx, bits))
            spans_ok = spans_ok && r.pass;
    out.push_back(rec("c11b-spanning-claims",
                      "XY-Y, YXt-Y, 2XYXt, GL4-kernel closure", spans_ok));

    bool reduce_ok = true;
    {
        std::mt19937_64 gen(opt.seed ^ 0x2b);
        size_t words = opt.full ? 100 : 10;
        for (size_t t = 0; t < words && reduce_ok; ++t) {
            paramod::PMat gamma = paramod::PMat::identity(10);
            for (int s = 0; s < 20; ++s)
                gamma = gamma.mul(
                    ctx.letter_matrix(ctx.random_letter(gen)));
            auto word = ctx.reduce_to_identity(gamma, 4);
            reduce_ok = ctx.letters_value(word).equal_mod(gamma, 4);
        }
    }
    out.push_back(rec("c11c-reduce-to-identity",
                      "100 random 20-letter kernel words, mod 16",
                      reduce_ok));

    bool express_ok = true;
    std::string express_detail;
    for (const auto &r : paramod::express_generators_as_commutators(
             ctx, 4, opt.full ? 3 : 1, opt.seed ^ 0x2c)) {
        if (!r.pass) {
            express_ok = false;
            express_detail = r.name + ": " + r.detail;
        }
    }
    out.push_back(rec("c11d-generators-as-commutators",
                      "structured L/U/U^opp generators, mod 16", express_ok,
                      express_detail.empty() ? "-" : express_detail));

    bool oddp_ok = true;
    for (auto [g, p] : std::vector<std::pair<uint32_t, uint32_t>>{
             {1, 3}, {2, 3}, {2, 5}}) {
        auto r = paramod::odd_p_kernel(g, p, opt.full ? 200 : 40,
                                       opt.seed ^ 0x2d);
        oddp_ok = oddp_ok && r.order_matches && r.abelian && r.elementary;
        if (g == 1)
            oddp_ok = oddp_ok && r.enumerated_order == 27;
    }
    out.push_back(rec("c11e-odd-p-kernel",
                      "ker(Sp -> Sp mod p) elementary of order p^(2g^2+g)",
                      oddp_ok));
    return out;
}

report::Report verify_all(const Options &opt)
{
    report::Report rep(std::string("verify-all level=") +
                           (opt.full ? "full" : "quick"),
                       opt.seed);
    using Fn = Records (*)(const Options &);
    std::vector<Fn> fns = {c01_classification,
                           c02_theta_axioms,
                           c03_schrodinger,
                           c04_odd_splitting,
                           c05_exceptional,
                           c06_stabilizer_structure,
                           c07_obstruction,
                           c08_negligibility,
                           c09_baer,
                           c10_quadratic,
                           c11_appendix};
    std::vector<Records> results(fns.size());
    unsigned threads = std::max(1u, opt.threads);
    if (threads <= 1) {
        for (size_t i = 0; i < fns.size(); ++i)
            results[i] = fns[i](opt);
    } else {
        std::vector<std::future<Records>> futs;
        futs.reserve(fns.size());
        for (size_t i = 0; i < fns.size(); ++i)
            futs.push_back(
                std::async(std::launch::async, fns[i], std::cref(opt)));
        for (size_t i = 0; i < fns.size(); ++i)
            results[i] = futs[i].get();
    }
    for (auto &records : results)
        for (auto &r : records)
            rep.add(std::move(r));
    return rep;
}

} // namespace thetaobs::verify
