#include "thetaobs/exceptional.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "thetaobs/cohom.hpp"

namespace thetaobs::exceptional {

using ring::IntMat;
using spgroup::SpMat;

// ---------------------------------------------------------------------
// six-point model

symmod::SymplecticModule SixPointModel::module() const
{
    symmod::SymplecticModule M;
    M.moduli = {2, 2, 2, 2};
    M.scalar_mod = 2;
    M.gram = ring::ResMatrix(4, 4, 2);
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j)
            M.gram.set(i, j, i == j ? 0 : 1);
    M.validate();
    return M;
}

SpMat SixPointModel::image(const std::array<uint8_t, 6> &sigma) const
{
    // express b_a + b_c in the u-basis: u_6 = 0, u_5 = u_1+u_2+u_3+u_4
    auto coset = [&](uint8_t a, uint8_t c) {
        std::array<uint8_t, 4> v{0, 0, 0, 0};
        auto add_u = [&](uint8_t k) {
            if (k < 4)
                v[k] ^= 1;
            else if (k == 4)
                for (int t = 0; t < 4; ++t)
                    v[size_t(t)] ^= 1;
            // k == 5: u_6 = 0
        };
        add_u(a);
        add_u(c);
        return v;
    };
    SpMat m(4, 2);
    for (uint8_t i = 0; i < 4; ++i) {
        // sigma(u_i) = b_{sigma(i)} + b_{sigma(6)}
        auto v = coset(sigma[i], sigma[5]);
        for (uint8_t r = 0; r < 4; ++r)
            m.set(r, i, v[r]);
    }
    return m;
}

SpMat s6_to_sp4(const std::array<uint8_t, 6> &sigma)
{
    return SixPointModel{}.image(sigma);
}

namespace {

std::vector<std::array<uint8_t, 6>> all_permutations6()
{
    std::array<uint8_t, 6> p{0, 1, 2, 3, 4, 5};
    std::vector<std::array<uint8_t, 6>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::array<uint8_t, 6> perm_compose(const std::array<uint8_t, 6> &a,
                                    const std::array<uint8_t, 6> &b)
{
    std::array<uint8_t, 6> r{};
    for (int i = 0; i < 6; ++i)
        r[size_t(i)] = a[b[size_t(i)]];
    return r;
}

} // namespace

S6Certification certify_s6(uint64_t seed, size_t samples)
{
    S6Certification cert;
    SixPointModel model;
    auto M = model.module();
    auto perms = all_permutations6();

    cert.all_images_symplectic = true;
    std::map<std::vector<uint8_t>, size_t> image_set;
    bool injective = true;
    SpMat id4 = SpMat::identity(4, 2);
    for (const auto &p : perms) {
        SpMat m = model.image(p);
        // preserves e_N
        for (uint32_t i = 0; i < 4 && cert.all_images_symplectic; ++i)
            for (uint32_t j = 0; j < 4; ++j) {
                uint32_t acc = 0;
                for (uint32_t a = 0; a < 4; ++a)
                    for (uint32_t b = 0; b < 4; ++b)
                        acc ^= uint32_t(m.at(a, i) & m.at(b, j) &
                                        (a == b ? 0 : 1));
                if (acc != uint32_t(M.gram.at(i, j))) {
                    cert.all_images_symplectic = false;
                    break;
                }
            }
        bool is_id = std::equal(p.begin(), p.end(),
                                std::array<uint8_t, 6>{0, 1, 2, 3, 4, 5}
                                    .begin());
        if (!is_id && m == id4)
            injective = false;
        image_set.emplace(m.e, image_set.size());
    }
    cert.injective = injective;
    cert.image_order = image_set.size();

    // homomorphism: transposition generators pairwise, then samples
    cert.homomorphism = true;
    std::vector<std::array<uint8_t, 6>> gens;
    for (int i = 0; i < 5; ++i) {
        std::array<uint8_t, 6> t{0, 1, 2, 3, 4, 5};
        std::swap(t[size_t(i)], t[size_t(i) + 1]);
        gens.push_back(t);
    }
    auto check_pair = [&](const std::array<uint8_t, 6> &a,
                          const std::array<uint8_t, 6> &b) {
        return model.image(perm_compose(a, b)) ==
               model.image(a).mul(model.image(b));
    };
    for (const auto &a : gens)
        for (const auto &b : gens)
            cert.homomorphism = cert.homomorphism && check_pair(a, b);
    std::mt19937_64 gen(seed);
    for (size_t t = 0; t < samples; ++t)
        cert.homomorphism =
            cert.homomorphism &&
            check_pair(perms[gen() % perms.size()],
                       perms[gen() % perms.size()]);
    return cert;
}

// ---------------------------------------------------------------------
// E7

int64_t int_det(const IntMat &a)
{
    // Bareiss fraction-free elimination
    if (a.rows != a.cols)
        throw input_error("int_det: square matrices only");
    IntMat m = a;
    const size_t n = m.rows;
    int64_t prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            size_t piv = k + 1;
            while (piv < n && m.at(piv, k) == 0)
                ++piv;
            if (piv == n)
                return 0;
            for (size_t j = 0; j < n; ++j)
                std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                int64_t num = m.at(i, j) * m.at(k, k) -
                              m.at(i, k) * m.at(k, j);
                m.at(i, j) = num / prev;
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

E7Data build_e7()
{
    E7Data e7;
    e7.cartan = IntMat(7, 7);
    // Bourbaki numbering: chain 1-3-4-5-6-7 with node 2 attached to 4.
    auto edge = [&](size_t a, size_t b) {
        e7.cartan.at(a - 1, b - 1) = -1;
        e7.cartan.at(b - 1, a - 1) = -1;
    };
    for (size_t i = 0; i < 7; ++i)
        e7.cartan.at(i, i) = 2;
    edge(1, 3);
    edge(3, 4);
    edge(4, 5);
    edge(5, 6);
    edge(6, 7);
    edge(2, 4);

    // simple reflections s_i = I - e_i (row i of C)
    for (size_t i = 0; i < 7; ++i) {
        IntMat s = IntMat::identity(7);
        for (size_t j = 0; j < 7; ++j)
            s.at(i, j) -= e7.cartan.at(i, j);
        e7.simple_reflections.push_back(s);
    }

    // reflection closure of the simple roots
    std::vector<std::array<int64_t, 7>> roots;
    std::map<std::array<int64_t, 7>, size_t> seen;
    for (size_t i = 0; i < 7; ++i) {
        std::array<int64_t, 7> r{};
        r[i] = 1;
        seen.emplace(r, roots.size());
        roots.push_back(r);
    }
    for (size_t head = 0; head < roots.size(); ++head) {
        auto cur = roots[head];
        for (const auto &s : e7.simple_reflections) {
            std::array<int64_t, 7> img{};
            for (size_t r = 0; r < 7; ++r) {
                int64_t acc = 0;
                for (size_t c = 0; c < 7; ++c)
                    acc += s.at(r, c) * cur[c];
                img[r] = acc;
            }
            if (seen.emplace(img, roots.size()).second)
                roots.push_back(img);
        }
    }
    std::sort(roots.begin(), roots.end());
    e7.roots = std::move(roots);
    return e7;
}

namespace {

// pairing (x, y) = x^t C y
int64_t lattice_pair(const IntMat &C, const std::array<int64_t, 7> &x,
                     const std::array<int64_t, 7> &y)
{
    int64_t acc = 0;
    for (size_t i = 0; i < 7; ++i)
        for (size_t j = 0; j < 7; ++j)
            acc += x[i] * C.at(i, j) * y[j];
    return acc;
}

} // namespace

WeylCertification certify_weyl_e7(uint64_t seed, size_t samples)
{
    WeylCertification cert;
    E7Data e7 = build_e7();
    const size_t nroots = e7.roots.size();
    if (nroots != 126)
        throw soundness_error("certify_weyl_e7: root count != 126");
    for (const auto &r : e7.roots)
        if (lattice_pair(e7.cartan, r, r) != 2)
            throw soundness_error("certify_weyl_e7: root norm != 2");
    if (int_det(e7.cartan) != 2)
        throw soundness_error("certify_weyl_e7: Cartan determinant != 2");
    {
        auto smith = ring::smith_form(e7.cartan);
        for (size_t i = 0; i < 6; ++i)
            if (smith.S.at(i, i) != 1)
                throw soundness_error("certify_weyl_e7: Smith form");
        if (smith.S.at(6, 6) != 2)
            throw soundness_error("certify_weyl_e7: coker(C) != Z/2");
    }

    // permutation action of the simple reflections on the roots
    std::map<std::array<int64_t, 7>, uint32_t> root_index;
    for (size_t i = 0; i < nroots; ++i)
        root_index.emplace(e7.roots[i], uint32_t(i));
    auto act = [&](const IntMat &w) {
        spgroup::Perm p(nroots);
        for (size_t i = 0; i < nroots; ++i) {
            std::array<int64_t, 7> img{};
            for (size_t r = 0; r < 7; ++r) {
                int64_t acc = 0;
                for (size_t c = 0; c < 7; ++c)
                    acc += w.at(r, c) * e7.roots[i][c];
                img[r] = acc;
            }
            auto it = root_index.find(img);
            if (it == root_index.end())
                throw soundness_error("certify_weyl_e7: roots not stable");
            p[i] = it->second;
        }
        return p;
    };
    std::vector<spgroup::Perm> wgens;
    for (const auto &s : e7.simple_reflections)
        wgens.push_back(act(s));
    spgroup::StabChain W(wgens, nroots, seed);
    cert.weyl_order = W.order();

    // -I lies in W
    IntMat minus = IntMat::identity(7);
    for (size_t i = 0; i < 7; ++i)
        minus.at(i, i) = -1;
    cert.minus_id_in_w = W.contains(act(minus));

    // N = im(C mod 2) with basis from the pivot columns of C mod 2
    ring::ResMatrix c2(7, 7, 2);
    for (size_t i = 0; i < 7; ++i)
        for (size_t j = 0; j < 7; ++j)
            c2.set(i, j, uint32_t(((e7.cartan.at(i, j) % 2) + 2) % 2));
    // column reduce: howell of columns (transpose rows)
    std::vector<std::vector<uint32_t>> cols(7, std::vector<uint32_t>(7));
    for (size_t j = 0; j < 7; ++j)
        for (size_t i = 0; i < 7; ++i)
            cols[j][i] = c2.at(i, j);
    auto basis = ring::howell_span(cols, 7, 2);
    if (basis.size() != 6)
        throw soundness_error("certify_weyl_e7: dim N != 6");
    // preimages x_k with C x_k = basis_k (mod 2), for the pairing
    std::vector<std::vector<uint32_t>> pre(6);
    {
        ring::ResMatrix A = c2;
        for (size_t k = 0; k < 6; ++k) {
            auto sol = ring::solve_mod(A, basis[k]);
            if (!sol.solvable)
                throw soundness_error("certify_weyl_e7: basis not in im C");
            pre[k] = sol.x;
        }
    }
    // e_N on the basis
    symmod::SymplecticModule N;
    N.moduli.assign(6, 2);
    N.scalar_mod = 2;
    N.gram = ring::ResMatrix(6, 6, 2);
    for (size_t a = 0; a < 6; ++a)
        for (size_t b = 0; b < 6; ++b) {
            uint64_t acc = 0;
            for (size_t i = 0; i < 7; ++i)
                for (size_t j = 0; j < 7; ++j)
                    acc += uint64_t(pre[a][i]) * c2.at(i, j) % 2 *
                           pre[b][j];
            N.gram.set(a, b, uint32_t(acc % 2));
        }
    N.validate();
    cert.n_type = symmod::classify(N).type;

    // rho(w): the matrix w^{-t} mod 2 in the chosen basis of N
    auto rho = [&](const IntMat &w) {
        // w in W has w^t C w = C, so C w = w^{-t} C: the action on
        // u = C x coordinates is u -> (C w C^{-1}) u = w^{-t} u.
        // Work directly: image of basis_k is C * (w x_k) mod 2.
        SpMat m(6, 2);
        for (size_t k = 0; k < 6; ++k) {
            std::vector<uint32_t> wx(7, 0);
            for (size_t r = 0; r < 7; ++r) {
                int64_t acc = 0;
                for (size_t c = 0; c < 7; ++c)
                    acc += w.at(r, c) * int64_t(pre[k][c]);
                wx[r] = uint32_t(((acc % 2) + 2) % 2);
            }
            std::vector<uint32_t> img(7, 0);
            for (size_t i = 0; i < 7; ++i) {
                uint64_t acc = 0;
                for (size_t j = 0; j < 7; ++j)
                    acc += uint64_t(c2.at(i, j)) * wx[j];
                img[i] = uint32_t(acc % 2);
            }
            // express img in the echelon basis by greedy elimination
            std::vector<uint32_t> res = img, coeff(6, 0);
            for (size_t a = 0; a < 6; ++a) {
                size_t lead = 0;
                while (lead < 7 && basis[a][lead] == 0)
                    ++lead;
                coeff[a] = res[lead];
                if (coeff[a])
                    for (size_t i = 0; i < 7; ++i)
                        res[i] ^= basis[a][i];
            }
            for (uint32_t v : res)
                if (v)
                    throw soundness_error(
                        "certify_weyl_e7: image outside N");
            for (size_t r = 0; r < 6; ++r)
                m.set(uint32_t(r), uint32_t(k), coeff[r]);
        }
        return m;
    };

    // conjugate into the standard symplectic basis to land in Sp_6(F_2)
    auto cls = symmod::classify(N);
    SpMat T(6, 2), Tinv(6, 2);
    for (size_t j = 0; j < 3; ++j)
        for (size_t i = 0; i < 6; ++i) {
            T.set(uint32_t(i), uint32_t(j), cls.e[j][i]);
            T.set(uint32_t(i), uint32_t(3 + j), cls.f[j][i]);
        }
    Tinv = T.inverse();
    spgroup::SpContext sp6(3, 2);
    auto to_std = [&](const SpMat &m) { return Tinv.mul(m).mul(T); };

    std::vector<SpMat> rho_std;
    for (const auto &s : e7.simple_reflections) {
        SpMat m = to_std(rho(s));
        if (!sp6.is_symplectic(m))
            throw soundness_error("certify_weyl_e7: image not symplectic");
        rho_std.push_back(m);
        cert.rho_simple.push_back(m);
    }
    auto image_chain = sp6.chain_of(rho_std);
    cert.image_order = image_chain.order();

    // kernel: |W| / |image| must be 2, and {I, -I} is inside
    cert.kernel_is_pm_id =
        (cert.weyl_order == 2 * cert.image_order) && cert.minus_id_in_w;
    // rho(-I) = I
    {
        SpMat m = to_std(rho(minus));
        cert.kernel_is_pm_id =
            cert.kernel_is_pm_id && (m == SpMat::identity(6, 2));
    }

    // roots -> nonzero vectors of N, fibers {alpha, -alpha}
    {
        std::map<std::vector<uint32_t>, std::vector<size_t>> fibers;
        for (size_t i = 0; i < nroots; ++i) {
            std::vector<uint32_t> img(7, 0);
            for (size_t r = 0; r < 7; ++r) {
                int64_t acc = 0;
                for (size_t c = 0; c < 7; ++c)
                    acc += e7.cartan.at(r, c) * e7.roots[i][c];
                img[r] = uint32_t(((acc % 2) + 2) % 2);
            }
            fibers[img].push_back(i);
        }
        cert.fibers_are_pm_pairs = fibers.size() == 63;
        for (const auto &[img, idxs] : fibers) {
            bool nonzero = false;
            for (uint32_t v : img)
                nonzero = nonzero || v;
            cert.fibers_are_pm_pairs = cert.fibers_are_pm_pairs && nonzero &&
                                       idxs.size() == 2;
            if (idxs.size() == 2) {
                for (size_t t = 0; t < 7; ++t)
                    cert.fibers_are_pm_pairs =
                        cert.fibers_are_pm_pairs &&
                        e7.roots[idxs[0]][t] == -e7.roots[idxs[1]][t];
            }
        }
    }

    // det splits W: -I is central of order 2 with det -1; simple
    // reflections have det -1
    {
        bool ok = int_det(minus) == -1;
        for (const auto &s : e7.simple_reflections)
            ok = ok && int_det(s) == -1;
        // -I commutes with everything (it is -identity)
        cert.det_splits = ok;
    }

    // homomorphism property of rho on generator pairs and samples
    std::mt19937_64 gen(seed);
    auto wmul = [](const IntMat &a, const IntMat &b) { return a.mul(b); };
    bool hom = true;
    for (const auto &a : e7.simple_reflections)
        for (const auto &b : e7.simple_reflections)
            hom = hom && (to_std(rho(wmul(a, b))) ==
                          to_std(rho(a)).mul(to_std(rho(b))));
    for (size_t t = 0; t < samples && hom; ++t) {
        // random short words
        IntMat a = IntMat::identity(7), b = IntMat::identity(7);
        for (int k = 0; k < 6; ++k) {
            a = a.mul(e7.simple_reflections[gen() % 7]);
            b = b.mul(e7.simple_reflections[gen() % 7]);
        }
        hom = hom && (to_std(rho(a.mul(b))) ==
                      to_std(rho(a)).mul(to_std(rho(b))));
    }
    if (!hom)
        throw soundness_error("certify_weyl_e7: rho not a homomorphism");
    return cert;
}

std::string e7_golden_text()
{
    E7Data e7 = build_e7();
    auto cert = certify_weyl_e7();
    std::ostringstream out;
    out << "e7-roots 126\n";
    for (const auto &r : e7.roots) {
        for (size_t i = 0; i < 7; ++i) {
            if (i)
                out << ' ';
            out << r[i];
        }
        out << '\n';
    }
    out << "rho-simple-reflections 7\n";
    for (const auto &m : cert.rho_simple)
        out << m.to_text();
    return out.str();
}

} // namespace thetaobs::exceptional
