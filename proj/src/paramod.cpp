#include "thetaobs/paramod.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace thetaobs::paramod {

namespace {

uint32_t inv_odd_u32(uint32_t u)
{
    if ((u & 1) == 0)
        throw input_error("inv_odd_u32: even argument");
    uint32_t x = u; // Newton iteration doubles correct bits
    for (int it = 0; it < 5; ++it)
        x *= 2u - u * x;
    return x;
}

uint32_t neg_u32(uint32_t v) { return ~v + 1u; }

bool bit_zero_mod(uint32_t v, uint32_t bits)
{
    if (bits >= 32)
        return v == 0;
    return (v & ((uint32_t(1) << bits) - 1)) == 0;
}

} // namespace

// ---------------------------------------------------------------------
// PMat

PMat PMat::identity(uint32_t n, uint32_t prec)
{
    PMat a(n, n, prec);
    for (uint32_t i = 0; i < n; ++i)
        a.set(i, i, 1);
    return a;
}

PMat PMat::mul(const PMat &o) const
{
    if (cols != o.rows)
        throw input_error("PMat::mul: shape mismatch");
    PMat r(rows, o.cols, std::min(prec, o.prec));
    for (uint32_t i = 0; i < rows; ++i)
        for (uint32_t k = 0; k < cols; ++k) {
            uint32_t a = at(i, k);
            if (!a)
                continue;
            for (uint32_t j = 0; j < o.cols; ++j)
                r.e[size_t(i) * o.cols + j] += a * o.at(k, j);
        }
    return r;
}

PMat PMat::add(const PMat &o) const
{
    PMat r = *this;
    r.prec = std::min(prec, o.prec);
    for (size_t i = 0; i < e.size(); ++i)
        r.e[i] += o.e[i];
    return r;
}

PMat PMat::sub(const PMat &o) const
{
    PMat r = *this;
    r.prec = std::min(prec, o.prec);
    for (size_t i = 0; i < e.size(); ++i)
        r.e[i] -= o.e[i];
    return r;
}

PMat PMat::neg() const
{
    PMat r = *this;
    for (auto &v : r.e)
        v = neg_u32(v);
    return r;
}

PMat PMat::transpose() const
{
    PMat r(cols, rows, prec);
    for (uint32_t i = 0; i < rows; ++i)
        for (uint32_t j = 0; j < cols; ++j)
            r.set(j, i, at(i, j));
    return r;
}

PMat PMat::inverse() const
{
    if (rows != cols)
        throw input_error("PMat::inverse: square only");
    PMat a = *this, inv = identity(rows, prec);
    const uint32_t n = rows;
    for (uint32_t col = 0; col < n; ++col) {
        uint32_t piv = col;
        while (piv < n && (a.at(piv, col) & 1) == 0)
            ++piv;
        if (piv == n)
            throw input_error("PMat::inverse: not invertible mod 2");
        if (piv != col)
            for (uint32_t j = 0; j < n; ++j) {
                std::swap(a.e[size_t(piv) * n + j], a.e[size_t(col) * n + j]);
                std::swap(inv.e[size_t(piv) * n + j],
                          inv.e[size_t(col) * n + j]);
            }
        uint32_t vinv = inv_odd_u32(a.at(col, col));
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
                a.set(r2, j, a.at(r2, j) - f * a.at(col, j));
                inv.set(r2, j, inv.at(r2, j) - f * inv.at(col, j));
            }
        }
    }
    return inv;
}

bool PMat::equal_mod(const PMat &o, uint32_t bits) const
{
    if (rows != o.rows || cols != o.cols)
        return false;
    if (bits > prec || bits > o.prec)
        throw soundness_error("PMat::equal_mod: precision exhausted");
    for (size_t i = 0; i < e.size(); ++i)
        if (!bit_zero_mod(e[i] - o.e[i], bits))
            return false;
    return true;
}

bool PMat::is_identity_mod(uint32_t bits) const
{
    return equal_mod(identity(rows, prec), bits);
}

// ---------------------------------------------------------------------
// context

ParamodContext::ParamodContext(uint32_t n, uint32_t k) : n_(n), k_(k)
{
    if (n + k == 0)
        throw input_error("ParamodContext: empty type");
    const uint32_t g = n + k;
    dmat_ = PMat(g, g);
    for (uint32_t i = 0; i < g; ++i)
        dmat_.set(i, i, i < n ? 1 : 2);
    J_ = PMat(2 * g, 2 * g);
    for (uint32_t i = 0; i < g; ++i) {
        J_.set(i, g + i, dmat_.at(i, i));
        J_.set(g + i, i, neg_u32(dmat_.at(i, i)));
    }
}

PMat ParamodContext::h() const
{
    const uint32_t g = n_ + k_;
    PMat m(2 * g, 2 * g);
    for (uint32_t i = 0; i < g; ++i) {
        m.set(i, g + i, 1);
        m.set(g + i, i, neg_u32(1));
    }
    return m;
}

namespace {

// quadrant of a 2g x 2g matrix: q in {0:X, 1:Y, 2:Z, 3:W}
PMat quadrant(const PMat &gamma, uint32_t g, int q)
{
    PMat b(g, g, gamma.prec);
    uint32_t r0 = (q / 2) ? g : 0, c0 = (q % 2) ? g : 0;
    for (uint32_t i = 0; i < g; ++i)
        for (uint32_t j = 0; j < g; ++j)
            b.set(i, j, gamma.at(r0 + i, c0 + j));
    return b;
}

void put_quadrant(PMat &gamma, uint32_t g, int q, const PMat &b)
{
    uint32_t r0 = (q / 2) ? g : 0, c0 = (q % 2) ? g : 0;
    for (uint32_t i = 0; i < g; ++i)
        for (uint32_t j = 0; j < g; ++j)
            gamma.set(r0 + i, c0 + j, b.at(i, j));
    gamma.prec = std::min(gamma.prec, b.prec);
}

// sub-block of a g x g block with the (n, k) split; s in {11,12,21,22}
PMat subblock(const PMat &b, uint32_t n, uint32_t k, int s)
{
    uint32_t r0 = (s / 10 == 2) ? n : 0, c0 = (s % 10 == 2) ? n : 0;
    uint32_t rr = (s / 10 == 2) ? k : n, cc = (s % 10 == 2) ? k : n;
    PMat out(rr, cc, b.prec);
    for (uint32_t i = 0; i < rr; ++i)
        for (uint32_t j = 0; j < cc; ++j)
            out.set(i, j, b.at(r0 + i, c0 + j));
    return out;
}

bool symmetric_mod(const PMat &b, uint32_t bits)
{
    for (uint32_t i = 0; i < b.rows; ++i)
        for (uint32_t j = 0; j < b.cols; ++j)
            if (!bit_zero_mod(b.at(i, j) - b.at(j, i), bits))
                return false;
    return true;
}

} // namespace

PMat ParamodContext::d_conj(const PMat &m) const
{
    // D^-1 M D: entry (i, j) scaled by d_j / d_i
    const uint32_t g = n_ + k_;
    PMat r(g, g, m.prec > 0 ? m.prec - 1 : 0);
    for (uint32_t i = 0; i < g; ++i)
        for (uint32_t j = 0; j < g; ++j) {
            uint32_t v = m.at(i, j);
            uint32_t di = dmat_.at(i, i), dj = dmat_.at(j, j);
            if (dj == di) {
                r.set(i, j, v);
            } else if (dj > di) {
                r.set(i, j, v * 2);
            } else {
                if (v & 1)
                    throw soundness_error(
                        "d_conj: non-integral entry (membership violated)");
                r.set(i, j, v >> 1);
            }
        }
    return r;
}

PMat ParamodContext::d_conj_inv(const PMat &m) const
{
    const uint32_t g = n_ + k_;
    PMat r(g, g, m.prec > 0 ? m.prec - 1 : 0);
    for (uint32_t i = 0; i < g; ++i)
        for (uint32_t j = 0; j < g; ++j) {
            uint32_t v = m.at(i, j);
            uint32_t di = dmat_.at(i, i), dj = dmat_.at(j, j);
            if (dj == di) {
                r.set(i, j, v);
            } else if (di > dj) {
                r.set(i, j, v * 2);
            } else {
                if (v & 1)
                    throw soundness_error("d_conj_inv: non-integral entry");
                r.set(i, j, v >> 1);
            }
        }
    return r;
}

bool ParamodContext::is_member(const PMat &gamma, uint32_t bits) const
{
    const uint32_t g = n_ + k_;
    if (gamma.rows != 2 * g || gamma.cols != 2 * g)
        return false;
    if (!gamma.transpose().mul(J_).mul(gamma).equal_mod(J_, bits))
        return false;
    // 12-subblock evenness of all four quadrants
    for (int q = 0; q < 4; ++q) {
        PMat b12 = subblock(quadrant(gamma, g, q), n_, k_, 12);
        for (uint32_t v : b12.e)
            if (v & 1)
                return false;
    }
    return true;
}

bool ParamodContext::member_conditions(const PMat &gamma, uint32_t bits) const
{
    const uint32_t g = n_ + k_;
    PMat X = quadrant(gamma, g, 0), Y = quadrant(gamma, g, 1);
    PMat Z = quadrant(gamma, g, 2), W = quadrant(gamma, g, 3);
    PMat XtDZ = X.transpose().mul(dmat_).mul(Z);
    PMat YtDW = Y.transpose().mul(dmat_).mul(W);
    PMat XtDW = X.transpose().mul(dmat_).mul(W);
    PMat ZtDY = Z.transpose().mul(dmat_).mul(Y);
    if (!symmetric_mod(XtDZ, bits) || !symmetric_mod(YtDW, bits))
        return false;
    if (!XtDW.sub(ZtDY).equal_mod(dmat_, bits))
        return false;
    for (int q = 0; q < 4; ++q) {
        PMat b12 = subblock(quadrant(gamma, g, q), n_, k_, 12);
        for (uint32_t v : b12.e)
            if (v & 1)
                return false;
    }
    return true;
}

spgroup::SpMat ParamodContext::red(const PMat &gamma) const
{
    const uint32_t g = n_ + k_;
    spgroup::SpMat m(2 * k_, 2);
    PMat X22 = subblock(quadrant(gamma, g, 0), n_, k_, 22);
    PMat Y22 = subblock(quadrant(gamma, g, 1), n_, k_, 22);
    PMat Z22 = subblock(quadrant(gamma, g, 2), n_, k_, 22);
    PMat W22 = subblock(quadrant(gamma, g, 3), n_, k_, 22);
    for (uint32_t i = 0; i < k_; ++i)
        for (uint32_t j = 0; j < k_; ++j) {
            m.set(i, j, X22.at(i, j) & 1);
            m.set(i, k_ + j, Y22.at(i, j) & 1);
            m.set(k_ + i, j, Z22.at(i, j) & 1);
            m.set(k_ + i, k_ + j, W22.at(i, j) & 1);
        }
    return m;
}

bool ParamodContext::in_kernel(const PMat &gamma, uint32_t bits) const
{
    if (!is_member(gamma, bits))
        return false;
    return red(gamma) == spgroup::SpMat::identity(2 * k_, 2);
}

bool ParamodContext::is_Lprime(const PMat &x, uint32_t bits) const
{
    const uint32_t g = n_ + k_;
    if (x.rows != g || x.cols != g)
        return false;
    (void)bits;
    // X12 even, X22 = I mod 2, X invertible mod 2
    PMat x12 = subblock(x, n_, k_, 12);
    for (uint32_t v : x12.e)
        if (v & 1)
            return false;
    PMat x22 = subblock(x, n_, k_, 22);
    for (uint32_t i = 0; i < k_; ++i)
        for (uint32_t j = 0; j < k_; ++j)
            if ((x22.at(i, j) & 1) != (i == j ? 1u : 0u))
                return false;
    // invertibility: X11 must be invertible mod 2 (then X is)
    PMat x11 = subblock(x, n_, k_, 11);
    if (n_ > 0) {
        try {
            (void)x11.inverse();
        } catch (const input_error &) {
            return false;
        }
    }
    return true;
}

bool ParamodContext::is_Uprime(const PMat &y, uint32_t bits) const
{
    const uint32_t g = n_ + k_;
    if (y.rows != g || y.cols != g)
        return false;
    PMat y11 = subblock(y, n_, k_, 11), y22 = subblock(y, n_, k_, 22);
    PMat y12 = subblock(y, n_, k_, 12), y21 = subblock(y, n_, k_, 21);
    if (!symmetric_mod(y11, bits) || !symmetric_mod(y22, bits))
        return false;
    for (uint32_t v : y22.e)
        if (v & 1)
            return false;
    // Y12 = 2 Y21^t
    PMat t = y21.transpose();
    for (uint32_t i = 0; i < n_; ++i)
        for (uint32_t j = 0; j < k_; ++j)
            if (!bit_zero_mod(y12.at(i, j) - 2 * t.at(i, j), bits))
                return false;
    return true;
}

PMat ParamodContext::embed_alpha(const PMat &x) const
{
    if (!is_Lprime(x, std::min(x.prec, 30u)))
        throw input_error("embed_alpha: parameter not in L'");
    const uint32_t g = n_ + k_;
    PMat w = d_conj(x.inverse().transpose());
    PMat m(2 * g, 2 * g, w.prec);
    put_quadrant(m, g, 0, x);
    put_quadrant(m, g, 3, w);
    return m;
}

PMat ParamodContext::embed_beta(const PMat &y) const
{
    if (!is_Uprime(y, std::min(y.prec, 30u)))
        throw input_error("embed_beta: parameter not in U'");
    const uint32_t g = n_ + k_;
    PMat m = PMat::identity(2 * g, y.prec);
    put_quadrant(m, g, 1, y);
    return m;
}

PMat ParamodContext::embed_beta_opp(const PMat &y) const
{
    if (!is_Uprime(y, std::min(y.prec, 30u)))
        throw input_error("embed_beta_opp: parameter not in U'");
    const uint32_t g = n_ + k_;
    PMat m = PMat::identity(2 * g, y.prec);
    put_quadrant(m, g, 2, y);
    return m;
}

PMat ParamodContext::letter_matrix(const Letter &l) const
{
    switch (l.kind) {
    case Letter::Kind::L:
        return embed_alpha(l.param);
    case Letter::Kind::U:
        return embed_beta(l.param);
    case Letter::Kind::Uopp:
        return embed_beta_opp(l.param);
    }
    throw input_error("letter_matrix: bad kind");
}

PMat ParamodContext::star(const PMat &gamma) const
{
    const uint32_t g = n_ + k_;
    PMat X = quadrant(gamma, g, 0), Y = quadrant(gamma, g, 1);
    PMat Z = quadrant(gamma, g, 2), W = quadrant(gamma, g, 3);
    PMat m(2 * g, 2 * g, gamma.prec);
    put_quadrant(m, g, 0, d_conj(W.transpose()));
    put_quadrant(m, g, 1, d_conj(Y.transpose()).neg());
    put_quadrant(m, g, 2, d_conj(Z.transpose()).neg());
    put_quadrant(m, g, 3, d_conj(X.transpose()));
    return m;
}

PMat ParamodContext::h_conj(const PMat &gamma) const
{
    const uint32_t g = n_ + k_;
    PMat X = quadrant(gamma, g, 0), Y = quadrant(gamma, g, 1);
    PMat Z = quadrant(gamma, g, 2), W = quadrant(gamma, g, 3);
    PMat m(2 * g, 2 * g, gamma.prec);
    put_quadrant(m, g, 0, W);
    put_quadrant(m, g, 1, Z.neg());
    put_quadrant(m, g, 2, Y.neg());
    put_quadrant(m, g, 3, X);
    return m;
}

PMat ParamodContext::embed_sp_n(const PMat &a) const
{
    const uint32_t g = n_ + k_;
    if (a.rows != 2 * n_)
        throw input_error("embed_sp_n: wrong size");
    PMat m = PMat::identity(2 * g, a.prec);
    for (uint32_t i = 0; i < 2 * n_; ++i)
        for (uint32_t j = 0; j < 2 * n_; ++j) {
            uint32_t r = i < n_ ? i : g + (i - n_);
            uint32_t c = j < n_ ? j : g + (j - n_);
            m.set(r, c, a.at(i, j));
        }
    return m;
}

PMat ParamodContext::embed_sp_k(const PMat &a) const
{
    const uint32_t g = n_ + k_;
    if (a.rows != 2 * k_)
        throw input_error("embed_sp_k: wrong size");
    PMat m = PMat::identity(2 * g, a.prec);
    for (uint32_t i = 0; i < 2 * k_; ++i)
        for (uint32_t j = 0; j < 2 * k_; ++j) {
            uint32_t r = i < k_ ? n_ + i : g + n_ + (i - k_);
            uint32_t c = j < k_ ? n_ + j : g + n_ + (j - k_);
            m.set(r, c, a.at(i, j));
        }
    return m;
}

PMat ParamodContext::random_Lprime(std::mt19937_64 &rng) const
{
    const uint32_t g = n_ + k_;
    while (true) {
        PMat x(g, g);
        for (uint32_t i = 0; i < g; ++i)
            for (uint32_t j = 0; j < g; ++j) {
                uint32_t v = static_cast<uint32_t>(rng());
                bool in12 = i < n_ && j >= n_;
                bool in22 = i >= n_ && j >= n_;
                if (in12)
                    v &= ~1u; // even
                if (in22)
                    v = (v & ~1u) | (i == j ? 1u : 0u); // I mod 2
                x.set(i, j, v);
            }
        if (is_Lprime(x, 30))
            return x;
    }
}

PMat ParamodContext::random_Uprime(std::mt19937_64 &rng) const
{
    const uint32_t g = n_ + k_;
    PMat y(g, g);
    for (uint32_t i = 0; i < n_; ++i)
        for (uint32_t j = i; j < n_; ++j) {
            uint32_t v = static_cast<uint32_t>(rng());
            y.set(i, j, v);
            y.set(j, i, v);
        }
    for (uint32_t i = 0; i < k_; ++i)
        for (uint32_t j = i; j < k_; ++j) {
            uint32_t v = static_cast<uint32_t>(rng()) * 2;
            y.set(n_ + i, n_ + j, v);
            y.set(n_ + j, n_ + i, v);
        }
    for (uint32_t i = 0; i < k_; ++i)
        for (uint32_t j = 0; j < n_; ++j) {
            uint32_t v = static_cast<uint32_t>(rng());
            y.set(n_ + i, j, v);
            y.set(j, n_ + i, 2 * v);
        }
    if (!is_Uprime(y, 30))
        throw soundness_error("random_Uprime: construction invalid");
    return y;
}

Letter ParamodContext::random_letter(std::mt19937_64 &rng) const
{
    switch (rng() % 3) {
    case 0:
        return {Letter::Kind::L, random_Lprime(rng)};
    case 1:
        return {Letter::Kind::U, random_Uprime(rng)};
    default:
        return {Letter::Kind::Uopp, random_Uprime(rng)};
    }
}

PMat ParamodContext::word_value(const CommutatorWord &w) const
{
    const uint32_t g = n_ + k_;
    PMat acc = PMat::identity(2 * g);
    for (const auto &[a, b] : w.pairs) {
        PMat c = a.mul(b).mul(a.inverse()).mul(b.inverse());
        acc = acc.mul(c);
    }
    return acc;
}

PMat ParamodContext::letters_value(const std::vector<Letter> &w) const
{
    const uint32_t g = n_ + k_;
    PMat acc = PMat::identity(2 * g);
    for (const auto &l : w)
        acc = acc.mul(letter_matrix(l));
    return acc;
}


// ---------------------------------------------------------------------
// symplectic factorization into root letters (standard Sp_2m over Z/2^32)

PMat ParamodContext::root_matrix(uint32_t m, const RootLetter &r)
{
    PMat a = PMat::identity(2 * m);
    uint32_t i = r.i - 1, j = r.j - 1, c = r.c;
    switch (r.type) {
    case 0: // short e_i - e_j
        a.set(i, j, c);
        a.set(m + j, m + i, neg_u32(c));
        break;
    case 1: // mixed e_i + e_j
        a.set(i, m + j, c);
        a.set(j, m + i, c);
        break;
    case 2: // long 2 e_i
        a.set(i, m + i, c);
        break;
    case 3: // mixed negative
        a.set(m + i, j, c);
        a.set(m + j, i, c);
        break;
    case 4: // long negative
        a.set(m + i, i, c);
        break;
    default:
        throw input_error("root_matrix: bad type");
    }
    return a;
}

std::vector<ParamodContext::RootLetter>
ParamodContext::sp_factor(const PMat &a, uint32_t m, uint32_t bits)
{
    // Left-multiply root letters onto R until R = I; the inverted list in
    // reverse order is then a factorization of a.
    PMat R = a;
    std::vector<RootLetter> applied;
    auto apply = [&](RootLetter r) {
        R = root_matrix(m, r).mul(R);
        applied.push_back(r);
    };
    for (uint32_t t = 0; t < m; ++t) {
        // --- reduce column e_t to the unit vector ---
        auto col = [&](uint32_t r) { return R.at(r, t); };
        // make the (t, t) entry odd
        if ((col(t) & 1) == 0) {
            bool done = false;
            for (uint32_t i = t + 1; i < m && !done; ++i)
                if (col(i) & 1) {
                    apply({0, t + 1, i + 1, 1}); // v_t += v_i
                    done = true;
                }
            if (!done && (col(m + t) & 1))
                apply({2, t + 1, 0, 1}), done = true; // v_t += w_t
            for (uint32_t i = t + 1; i < m && !done; ++i)
                if (col(m + i) & 1) {
                    apply({1, t + 1, i + 1, 1}); // v_t += w_i
                    done = true;
                }
            if (!done)
                throw soundness_error("sp_factor: column not primitive");
        }
        uint32_t pivinv = inv_odd_u32(col(t));
        // clear v_i (i > t)
        for (uint32_t i = t + 1; i < m; ++i)
            if (col(i))
                apply({0, i + 1, t + 1, neg_u32(col(i) * pivinv)});
        // clear w_i (i > t)
        for (uint32_t i = t + 1; i < m; ++i)
            if (col(m + i))
                apply({3, i + 1, t + 1, neg_u32(col(m + i) * pivinv)});
        // clear w_t
        if (col(m + t))
            apply({4, t + 1, 0, neg_u32(col(m + t) * pivinv)});
        // normalize the unit v_t -> 1 via the SL2 block at axis t:
        // h(u) = w(u) w(-1) with w(x) = upper(x) lower(-x^{-1}) upper(x)
        uint32_t u = col(t);
        if (u != 1) {
            uint32_t ui = inv_odd_u32(u);
            // we need R <- diag(u^{-1}, .., u, ..) R: apply h(u^{-1})
            auto wmat = [&](uint32_t x) {
                apply({2, t + 1, 0, x});
                apply({4, t + 1, 0, neg_u32(inv_odd_u32(x))});
                apply({2, t + 1, 0, x});
            };
            // left-applied: h(u^{-1}) = w(u^{-1}) w(-1), right factor first
            wmat(neg_u32(1));
            wmat(ui);
        }
        // --- reduce column f_t ---
        auto fol = [&](uint32_t r) { return R.at(r, m + t); };
        // clear f-coordinates f_i (i > t) using f_t = 1
        for (uint32_t i = t + 1; i < m; ++i)
            if (fol(m + i))
                apply({0, t + 1, i + 1, fol(m + i)});
        // clear e-coordinates
        for (uint32_t i = t + 1; i < m; ++i)
            if (fol(i))
                apply({1, t + 1, i + 1, neg_u32(fol(i))});
        if (fol(t))
            apply({2, t + 1, 0, neg_u32(fol(t))});
    }
    if (!R.is_identity_mod(std::min(bits, R.prec)))
        throw soundness_error("sp_factor: reduction failed");
    // r_m ... r_1 a = I, so a = r_1^{-1} r_2^{-1} ... r_m^{-1}
    std::vector<RootLetter> out;
    for (const auto &r : applied) {
        RootLetter inv = r;
        inv.c = neg_u32(inv.c);
        out.push_back(inv);
    }
    return out;
}

// ---------------------------------------------------------------------
// commutator words

namespace {

PMat cw_check(const ParamodContext &ctx, const CommutatorWord &w,
              const PMat &target, uint32_t bits, const char *who)
{
    PMat v = ctx.word_value(w);
    if (!v.equal_mod(target, bits))
        throw soundness_error(std::string(who) +
                              ": witness product mismatch");
    for (const auto &[a, b] : w.pairs)
        if (!ctx.in_kernel(a, std::min(bits, 30u)) ||
            !ctx.in_kernel(b, std::min(bits, 30u)))
            throw soundness_error(std::string(who) +
                                  ": witness factor outside Gamma");
    return v;
}

PMat gxg_elem(uint32_t g, uint32_t r, uint32_t c, uint32_t v)
{
    PMat m(g, g);
    m.set(r, c, v);
    return m;
}

} // namespace

CommutatorWord ParamodContext::cw_alpha_upper(const PMat &t12,
                                              uint32_t bits) const
{
    // alpha(((I, T),(0, I))) with T in 2 Mat_{n,k}: per entry (i, l),
    // [alpha(diag(I + E_ij, I)), alpha(upper(c E_jl))] = alpha(upper(c E_il))
    if (n_ < 2)
        throw capacity_error("cw_alpha_upper: needs n >= 2");
    const uint32_t g = n_ + k_;
    CommutatorWord w;
    for (uint32_t i = 0; i < n_; ++i)
        for (uint32_t l = 0; l < k_; ++l) {
            uint32_t c = t12.at(i, l);
            if (!c)
                continue;
            if (c & 1)
                throw input_error("cw_alpha_upper: entries must be even");
            uint32_t j = (i + 1) % n_;
            PMat x = PMat::identity(g);
            x.set(i, j, 1);
            PMat y = PMat::identity(g);
            y.set(j, n_ + l, c);
            w.pairs.push_back({embed_alpha(x), embed_alpha(y)});
        }
    PMat target = PMat::identity(g);
    for (uint32_t i = 0; i < n_; ++i)
        for (uint32_t l = 0; l < k_; ++l)
            target.set(i, n_ + l, t12.at(i, l));
    cw_check(*this, w, embed_alpha(target), bits, "cw_alpha_upper");
    return w;
}

CommutatorWord ParamodContext::cw_alpha_lower(const PMat &s21,
                                              uint32_t bits) const
{
    // alpha(((I, 0),(S, I))) with S in Mat_{k,n}: per entry (l, i),
    // [alpha(diag(X, I)), alpha(lower(c E_lj))] with X^{-1} = I + E_ji.
    if (n_ < 2)
        throw capacity_error("cw_alpha_lower: needs n >= 2");
    const uint32_t g = n_ + k_;
    CommutatorWord w;
    for (uint32_t l = 0; l < k_; ++l)
        for (uint32_t i = 0; i < n_; ++i) {
            uint32_t c = s21.at(l, i);
            if (!c)
                continue;
            uint32_t j = (i + 1) % n_;
            PMat x = PMat::identity(g);
            x.set(j, i, neg_u32(1)); // X = (I + E_ji)^{-1} = I - E_ji
            PMat y = PMat::identity(g);
            y.set(n_ + l, j, c);
            w.pairs.push_back({embed_alpha(x), embed_alpha(y)});
        }
    PMat target = PMat::identity(g);
    for (uint32_t l = 0; l < k_; ++l)
        for (uint32_t i = 0; i < n_; ++i)
            target.set(n_ + l, i, s21.at(l, i));
    cw_check(*this, w, embed_alpha(target), bits, "cw_alpha_lower");
    return w;
}

CommutatorWord ParamodContext::cw_root_sp2n(const RootLetter &r,
                                            uint32_t bits) const
{
    // Chevalley expressions inside the embedded Sp_2n, n >= 3.
    if (n_ < 3)
        throw capacity_error("cw_root_sp2n: needs n >= 3");
    const uint32_t m = n_;
    CommutatorWord w;
    auto E = [&](const RootLetter &rl) {
        return embed_sp_n(root_matrix(m, rl));
    };
    auto pick_other = [&](uint32_t i, uint32_t j) {
        for (uint32_t l = 1; l <= m; ++l)
            if (l != i && l != j)
                return l;
        throw capacity_error("cw_root_sp2n: no spare axis");
    };
    switch (r.type) {
    case 0: { // short(i,j,c) = [short(i,l,1), short(l,j,c)]
        uint32_t l = pick_other(r.i, r.j);
        w.pairs.push_back({E({0, r.i, l, 1}), E({0, l, r.j, r.c})});
        break;
    }
    case 1: { // mixed(i,j,c) = [short(i,l,s), mixed(l,j,c')], sign probed
        uint32_t l = pick_other(r.i, r.j);
        for (uint32_t sgn = 0; sgn < 2; ++sgn) {
            uint32_t cc = sgn ? neg_u32(r.c) : r.c;
            CommutatorWord probe;
            probe.pairs.push_back({E({0, r.i, l, 1}), E({1, l, r.j, cc})});
            if (word_value(probe).equal_mod(E(r), std::min(bits, 30u))) {
                w = probe;
                break;
            }
        }
        if (w.pairs.empty())
            throw soundness_error("cw_root_sp2n: mixed sign probe failed");
        break;
    }
    case 2: { // long(i,c): peel from [short(i,j,1), long(j,b)]
        uint32_t j = pick_other(r.i, r.i);
        for (uint32_t sgn = 0; sgn < 2 && w.pairs.empty(); ++sgn) {
            uint32_t b = sgn ? neg_u32(r.c) : r.c;
            CommutatorWord probe;
            probe.pairs.push_back({E({0, r.i, j, 1}), E({2, j, 0, b})});
            PMat K = word_value(probe);
            // K = mixed(i,j,s) * long(i,t): read s and t off K
            uint32_t g2 = n_ + k_;
            uint32_t s = K.at(r.i - 1, g2 + (j - 1));
            uint32_t t = K.at(r.i - 1, g2 + (r.i - 1));
            if (t != r.c)
                continue;
            // long(i,c) = mixed(i,j,-s) * K
            CommutatorWord mw = cw_root_sp2n({1, r.i, j, neg_u32(s)}, bits);
            CommutatorWord full;
            full.pairs = mw.pairs;
            full.pairs.insert(full.pairs.end(), probe.pairs.begin(),
                              probe.pairs.end());
            if (word_value(full).equal_mod(E(r), std::min(bits, 30u)))
                w = full;
        }
        if (w.pairs.empty())
            throw soundness_error("cw_root_sp2n: long peel failed");
        break;
    }
    case 3:
    case 4: { // negatives: conjugate the positive witness by h
        RootLetter pos = r;
        pos.type = (r.type == 3) ? 1 : 2;
        CommutatorWord pw = cw_root_sp2n(pos, bits);
        // h upper h^{-1} = lower(-param): probe both signs
        for (uint32_t sgn = 0; sgn < 2 && w.pairs.empty(); ++sgn) {
            RootLetter posb = pos;
            posb.c = sgn ? neg_u32(pos.c) : pos.c;
            CommutatorWord pwb = cw_root_sp2n(posb, bits);
            CommutatorWord conj;
            PMat hh = h();
            PMat hinv = hh.inverse();
            for (const auto &[a, b] : pwb.pairs)
                conj.pairs.push_back(
                    {hh.mul(a).mul(hinv), hh.mul(b).mul(hinv)});
            if (word_value(conj).equal_mod(E(r), std::min(bits, 30u)))
                w = conj;
        }
        if (w.pairs.empty())
            throw soundness_error("cw_root_sp2n: negative conj failed");
        break;
    }
    default:
        throw input_error("cw_root_sp2n: bad type");
    }
    cw_check(*this, w, embed_sp_n(root_matrix(m, r)), std::min(bits, 30u),
             "cw_root_sp2n");
    return w;
}

CommutatorWord ParamodContext::cw_sp2n(const PMat &a, uint32_t bits) const
{
    auto roots = sp_factor(a, n_, std::min(bits, 30u));
    CommutatorWord w;
    for (const auto &r : roots) {
        auto piece = cw_root_sp2n(r, bits);
        w.pairs.insert(w.pairs.end(), piece.pairs.begin(), piece.pairs.end());
    }
    cw_check(*this, w, embed_sp_n(a), std::min(bits, 30u), "cw_sp2n");
    return w;
}


// ---------------------------------------------------------------------
// the Sp_2k(Z_2, 2) derived-subgroup shadow: express elements that are
// I mod 4 with corner diagonals 0 mod 8 as products of commutators of
// embedded level-2 elements, by clearing one 2-adic level at a time

namespace {

struct FEntry {
    CommutatorWord word; // of full 2g x 2g Gamma members
    PMat value;          // 2k x 2k standard-coordinates value
    uint32_t level;      // value = I mod 2^level, not mod 2^(level+1)
    std::vector<uint64_t> lead; // ((value - I)/2^level) mod 2, bit-packed
};

uint32_t mat_level(const PMat &m, uint32_t cap)
{
    PMat d = m.sub(PMat::identity(m.rows, m.prec));
    for (uint32_t l = 0; l < cap; ++l)
        for (uint32_t v : d.e)
            if ((v >> l) & 1)
                return l;
    return cap;
}

std::vector<uint64_t> mat_lead(const PMat &m, uint32_t level)
{
    PMat d = m.sub(PMat::identity(m.rows, m.prec));
    std::vector<uint64_t> bits((d.e.size() + 63) / 64, 0);
    for (size_t i = 0; i < d.e.size(); ++i)
        if ((d.e[i] >> level) & 1)
            bits[i / 64] |= uint64_t(1) << (i % 64);
    return bits;
}

PMat pmat_pow2(PMat base, uint32_t e)
{
    PMat r = base;
    for (uint32_t t = 0; t < e; ++t)
        r = r.mul(r);
    return r;
}

} // namespace

CommutatorWord ParamodContext::cw_sp2k_48(const PMat &a, uint32_t bits) const
{
    if (k_ < 2)
        throw capacity_error("cw_sp2k_48: needs k >= 2");
    const uint32_t twok = 2 * k_;
    if (a.rows != twok)
        throw input_error("cw_sp2k_48: expects a 2k x 2k matrix");
    // precondition: a = I mod 4, corner diagonals 0 mod 8
    {
        PMat d = a.sub(PMat::identity(twok, a.prec));
        for (uint32_t v : d.e)
            if (v & 3)
                throw input_error("cw_sp2k_48: not I mod 4");
        for (uint32_t i = 0; i < k_; ++i)
            if ((a.at(i, k_ + i) & 7) || (a.at(k_ + i, i) & 7))
                throw input_error("cw_sp2k_48: corner diagonal not 0 mod 8");
    }

    // Generator table: single commutators of embedded level-2 elements
    // plus the two-commutator corner-diagonal words.
    auto d_embed = [&](const PMat &b) { // diag(A, A^{-t}) for A = I + 2B
        PMat A = PMat::identity(k_).add(b).add(b); // I + 2B
        PMat m = PMat::identity(twok);
        PMat Ait = A.inverse().transpose();
        for (uint32_t i = 0; i < k_; ++i)
            for (uint32_t j = 0; j < k_; ++j) {
                m.set(i, j, A.at(i, j));
                m.set(k_ + i, k_ + j, Ait.at(i, j));
            }
        return m;
    };
    auto u_embed = [&](const PMat &s) { // ((I, S),(0, I)), S in 2 Sym
        PMat m = PMat::identity(twok);
        for (uint32_t i = 0; i < k_; ++i)
            for (uint32_t j = 0; j < k_; ++j)
                m.set(i, k_ + j, s.at(i, j));
        return m;
    };
    auto l_embed = [&](const PMat &s) {
        PMat m = PMat::identity(twok);
        for (uint32_t i = 0; i < k_; ++i)
            for (uint32_t j = 0; j < k_; ++j)
                m.set(k_ + i, j, s.at(i, j));
        return m;
    };
    auto kelem = [&](uint32_t i, uint32_t j, uint32_t v) {
        PMat m(k_, k_);
        m.set(i, j, v);
        return m;
    };
    auto ksym = [&](uint32_t i, uint32_t j, uint32_t v) {
        PMat m(k_, k_);
        m.set(i, j, v);
        m.set(j, i, v);
        return m;
    };

    std::vector<FEntry> table;
    auto push_comm = [&](const PMat &p, const PMat &q) {
        FEntry fe;
        fe.value = p.mul(q).mul(p.inverse()).mul(q.inverse());
        fe.level = mat_level(fe.value, 30);
        if (fe.level >= 30)
            return; // identity commutator, useless
        fe.lead = mat_lead(fe.value, fe.level);
        fe.word.pairs.push_back({embed_sp_k(p), embed_sp_k(q)});
        table.push_back(std::move(fe));
    };
    for (uint32_t i = 0; i < k_; ++i)
        for (uint32_t j = 0; j < k_; ++j) {
            for (uint32_t i2 = 0; i2 < k_; ++i2)
                for (uint32_t j2 = i2; j2 < k_; ++j2) {
                    push_comm(d_embed(kelem(i, j, 1)),
                              u_embed(ksym(i2, j2, 2)));
                    push_comm(d_embed(kelem(i, j, 1)),
                              l_embed(ksym(i2, j2, 2)));
                    if (j >= i)
                        push_comm(u_embed(ksym(i, j, 2)),
                                  l_embed(ksym(i2, j2, 2)));
                }
            for (uint32_t i2 = 0; i2 < k_; ++i2)
                for (uint32_t j2 = 0; j2 < k_; ++j2)
                    if (i != i2 || j != j2)
                        push_comm(d_embed(kelem(i, j, 1)),
                                  d_embed(kelem(i2, j2, 1)));
        }
    // corner-diagonal two-commutator words: upper(8 E_ii) and lower(8 E_ii)
    for (uint32_t i = 0; i < k_; ++i) {
        uint32_t j = (i + 1) % k_;
        // v = [d(I+2E_ij), u(2E_jj)] = upper(4(E_ij+E_ji) + 8E_ii)
        // x = [d(I+2E_ii), u(2(E_ij+E_ji))] = upper(4(E_ij+E_ji))
        PMat pv = d_embed(kelem(i, j, 1)), qv = u_embed(ksym(j, j, 2));
        PMat px = d_embed(kelem(i, i, 1)), qx = u_embed(ksym(i, j, 2));
        FEntry fe;
        PMat v = pv.mul(qv).mul(pv.inverse()).mul(qv.inverse());
        PMat x = px.mul(qx).mul(px.inverse()).mul(qx.inverse());
        fe.value = v.mul(x.inverse());
        fe.level = mat_level(fe.value, 30);
        fe.lead = mat_lead(fe.value, fe.level);
        fe.word.pairs.push_back({embed_sp_k(pv), embed_sp_k(qv)});
        // x^{-1} = [p,q]^{-1} = [q,p]
        fe.word.pairs.push_back({embed_sp_k(qx), embed_sp_k(px)});
        table.push_back(fe); // keep fe for the conjugated variant below
        // lower variant via the k-block h-conjugation
        FEntry fl;
        auto hflip = [&](const PMat &m) {
            PMat hh(twok, twok);
            for (uint32_t t = 0; t < k_; ++t) {
                hh.set(t, k_ + t, 1);
                hh.set(k_ + t, t, neg_u32(1));
            }
            return hh.mul(m).mul(hh.inverse());
        };
        fl.value = hflip(fe.value);
        fl.level = mat_level(fl.value, 30);
        fl.lead = mat_lead(fl.value, fl.level);
        for (const auto &[p, q] : fe.word.pairs) {
            // conjugate the full-size pair by the full h
            PMat H = h();
            // careful: the k-block flip corresponds to conjugating the
            // embedded element by the global h as well
            fl.word.pairs.push_back(
                {H.mul(p).mul(H.inverse()), H.mul(q).mul(H.inverse())});
        }
        table.push_back(std::move(fl));
    }

    // verify the two-commutator entries against their words
    for (const auto &fe : table) {
        PMat wv = word_value(fe.word);
        // the word lives in the big group; compare through embed
        if (!wv.equal_mod(embed_sp_k(fe.value), std::min(bits, 28u)))
            throw soundness_error("cw_sp2k_48: table entry word mismatch");
    }

    // level clearing
    CommutatorWord out;
    PMat cur = a;
    uint32_t guard = 0;
    while (!cur.is_identity_mod(bits)) {
        if (++guard > 40)
            throw soundness_error("cw_sp2k_48: no progress");
        uint32_t j = mat_level(cur, bits);
        std::vector<uint64_t> target = mat_lead(cur, j);
        // solve over available table leads at this level
        ring::F2Solver solver(table.size());
        size_t nbits = cur.e.size();
        std::vector<size_t> usable;
        for (size_t t = 0; t < table.size(); ++t)
            if (table[t].level <= j)
                usable.push_back(t);
        // build the transposed system: for each matrix-entry bit, one
        // equation sum_t x_t lead_t[bit] = target[bit]
        bool ok = true;
        std::vector<std::vector<uint64_t>> rows(nbits);
        for (size_t bit = 0; bit < nbits && ok; ++bit) {
            std::vector<uint64_t> row((table.size() + 63) / 64, 0);
            for (size_t ui = 0; ui < usable.size(); ++ui) {
                size_t t = usable[ui];
                if ((table[t].lead[bit / 64] >> (bit % 64)) & 1)
                    row[t / 64] ^= uint64_t(1) << (t % 64);
            }
            bool rhs = (target[bit / 64] >> (bit % 64)) & 1;
            ok = solver.add_equation(row, rhs);
        }
        if (!ok)
            throw soundness_error(
                "cw_sp2k_48: level system unsolvable (table too small)");
        auto x = solver.solution();
        PMat w = PMat::identity(twok);
        for (size_t t = 0; t < table.size(); ++t) {
            if (!x[t])
                continue;
            uint32_t e = j - table[t].level;
            PMat piece = pmat_pow2(table[t].value, e);
            w = w.mul(piece);
            // the word: repeated concatenation of the commutator word
            CommutatorWord rep = table[t].word;
            uint64_t copies = uint64_t(1) << e;
            for (uint64_t cc = 0; cc < copies; ++cc)
                out.pairs.insert(out.pairs.end(), rep.pairs.begin(),
                                 rep.pairs.end());
        }
        cur = w.inverse().mul(cur);
        if (mat_level(cur, bits) <= j)
            throw soundness_error("cw_sp2k_48: level did not increase");
    }
    // out currently equals a * cur_residual^{-1}-ish: we built w's with
    // a = w_1 w_2 ... w_m * residual, residual = I mod 2^bits
    cw_check(*this, out, embed_sp_k(a), bits, "cw_sp2k_48");
    return out;
}


// ---------------------------------------------------------------------
// general L, U, U^opp elements as commutator products

CommutatorWord ParamodContext::cw_alpha(const PMat &x, uint32_t bits) const
{
    if (!is_Lprime(x, std::min(x.prec, 30u)))
        throw input_error("cw_alpha: parameter not in L'");
    const uint32_t g = n_ + k_;
    CommutatorWord out;
    auto extend = [&](const CommutatorWord &w) {
        out.pairs.insert(out.pairs.end(), w.pairs.begin(), w.pairs.end());
    };
    // Factor with the Schur part last: x = l(Lf) d(M11) u(U') diag(I, S),
    // so the loop below can keep peeling the trailing factor.
    auto peel_ldu = [&](const PMat &m) {
        PMat M11 = subblock(m, n_, k_, 11);
        PMat M12 = subblock(m, n_, k_, 12);
        PMat M21 = subblock(m, n_, k_, 21);
        PMat M22 = subblock(m, n_, k_, 22);
        PMat M11i = M11.inverse();
        PMat S = M22.sub(M21.mul(M11i).mul(M12));
        PMat Uf = M11i.mul(M12).mul(S.inverse());
        extend(cw_alpha_lower(M21.mul(M11i), bits));
        PMat a(2 * n_, 2 * n_);
        PMat it = M11i.transpose();
        for (uint32_t i = 0; i < n_; ++i)
            for (uint32_t j = 0; j < n_; ++j) {
                a.set(i, j, M11.at(i, j));
                a.set(n_ + i, n_ + j, it.at(i, j));
            }
        extend(cw_sp2n(a, bits));
        extend(cw_alpha_upper(Uf, bits));
        return S;
    };

    PMat S = peel_ldu(x);
    uint32_t guard = 0;
    while (true) {
        bool mod4 = true;
        PMat d = S.sub(PMat::identity(k_, S.prec));
        for (uint32_t v : d.e)
            if (v & 3)
                mod4 = false;
        if (mod4)
            break;
        if (++guard > 4)
            throw soundness_error("cw_alpha: Schur peel stuck");
        // realize a product P of [alpha(upper(2E)), alpha(lower(E))]
        // commutators whose 22 block is I - 2C = S mod 4
        CommutatorWord stage;
        PMat P = PMat::identity(g);
        for (uint32_t l = 0; l < k_; ++l)
            for (uint32_t m = 0; m < k_; ++m) {
                uint32_t dv = neg_u32(d.at(l, m)); // (I - S) entry
                if (!((dv >> 1) & 1))
                    continue;
                PMat xu = PMat::identity(g);
                xu.set(0, n_ + m, 2);
                PMat xl = PMat::identity(g);
                xl.set(n_ + l, 0, 1);
                stage.pairs.push_back({embed_alpha(xu), embed_alpha(xl)});
                P = P.mul(
                    xu.mul(xl).mul(xu.inverse()).mul(xl.inverse()));
            }
        extend(stage);
        // alpha(diag(I,S)) = alpha(P) * alpha(P^{-1} diag(I,S))
        PMat sdiag = PMat::identity(g);
        for (uint32_t i = 0; i < k_; ++i)
            for (uint32_t j = 0; j < k_; ++j)
                sdiag.set(n_ + i, n_ + j, S.at(i, j));
        PMat nxt = P.inverse().mul(sdiag);
        if (!is_Lprime(nxt, std::min(nxt.prec, 28u)))
            throw soundness_error("cw_alpha: peel left L'");
        S = peel_ldu(nxt);
    }
    // S = I mod 4: finish inside the embedded Sp_2k
    {
        PMat a(2 * k_, 2 * k_);
        PMat it = S.inverse().transpose();
        for (uint32_t i = 0; i < k_; ++i)
            for (uint32_t j = 0; j < k_; ++j) {
                a.set(i, j, S.at(i, j));
                a.set(k_ + i, k_ + j, it.at(i, j));
            }
        extend(cw_sp2k_48(a, bits));
    }
    cw_check(*this, out, embed_alpha(x), bits, "cw_alpha");
    return out;
}


CommutatorWord ParamodContext::cw_beta(const PMat &y, uint32_t bits) const
{
    if (!is_Uprime(y, std::min(y.prec, 30u)))
        throw input_error("cw_beta: parameter not in U'");
    if (n_ < 3)
        throw capacity_error("cw_beta: needs n >= 3");
    const uint32_t g = n_ + k_;
    CommutatorWord out;
    auto extend = [&](const CommutatorWord &w) {
        out.pairs.insert(out.pairs.end(), w.pairs.begin(), w.pairs.end());
    };
    PMat Y11 = subblock(y, n_, k_, 11);
    PMat Y21 = subblock(y, n_, k_, 21);
    PMat Y22 = subblock(y, n_, k_, 22);

    // beta(diag(Y11, 0)): the embedded Sp_2n upper unipotent
    {
        PMat a = PMat::identity(2 * n_);
        for (uint32_t i = 0; i < n_; ++i)
            for (uint32_t j = 0; j < n_; ++j)
                a.set(i, n_ + j, Y11.at(i, j));
        extend(cw_sp2n(a, bits));
    }

    // beta(diag(0, Y22)) with Y22 in 2 Sym_k, via the fourth-type
    // commutators [alpha(lower(X21)), beta(diag(Y11', 0))]; the
    // accumulated off-diagonal dirt D is corrected afterwards.
    PMat dirt(k_, n_);
    {
        PMat T = Y22; // halve
        for (auto &v : T.e) {
            if (v & 1)
                throw input_error("cw_beta: Y22 not even");
            v >>= 1;
        }
        T.prec = Y22.prec - 1;
        auto fourth = [&](const PMat &x21, uint32_t c) {
            PMat xl = PMat::identity(g);
            for (uint32_t r = 0; r < k_; ++r)
                for (uint32_t s = 0; s < n_; ++s)
                    if (x21.at(r, s))
                        xl.set(n_ + r, s, x21.at(r, s));
            PMat yb(g, g);
            yb.set(0, 0, c); // Y11' = c E_00
            out.pairs.push_back({embed_alpha(xl), embed_beta(yb)});
            // dirt: X21 Y11' rows; 22 contribution 2 X21 Y11' X21^t
            for (uint32_t r = 0; r < k_; ++r)
                dirt.set(r, 0, dirt.at(r, 0) + x21.at(r, 0) * c);
        };
        // pair terms first
        for (uint32_t l = 0; l < k_; ++l)
            for (uint32_t m = l + 1; m < k_; ++m) {
                uint32_t c = T.at(l, m);
                if (!c)
                    continue;
                PMat x21(k_, n_);
                x21.set(l, 0, 1);
                x21.set(m, 0, 1);
                fourth(x21, c);
            }
        // diagonal corrections
        for (uint32_t l = 0; l < k_; ++l) {
            uint32_t need = T.at(l, l);
            for (uint32_t m = 0; m < k_; ++m)
                if (m != l)
                    need -= T.at(l, m);
            if (!need)
                continue;
            PMat x21(k_, n_);
            x21.set(l, 0, 1);
            fourth(x21, need);
        }
    }

    // beta(offdiag(Y21 - dirt)): third-type single commutators
    {
        PMat R = Y21.sub(dirt.neg().neg()); // Y21 - dirt
        for (uint32_t l = 0; l < k_; ++l)
            for (uint32_t i = 0; i < n_; ++i) {
                uint32_t c = R.at(l, i);
                if (!c)
                    continue;
                uint32_t j = (i + 1) % n_;
                PMat xd = PMat::identity(g);
                xd.set(i, j, 1); // X11 = I + E_ij
                PMat yb(g, g);
                yb.set(n_ + l, j, c);
                yb.set(j, n_ + l, 2 * c);
                out.pairs.push_back({embed_alpha(xd), embed_beta(yb)});
            }
    }
    cw_check(*this, out, embed_beta(y), bits, "cw_beta");
    return out;
}

CommutatorWord ParamodContext::cw_beta_opp(const PMat &y, uint32_t bits) const
{
    // beta_opp(y) = h beta(-y) h^{-1}
    CommutatorWord inner = cw_beta(y.neg(), bits);
    PMat H = h(), Hi = h().inverse();
    CommutatorWord out;
    for (const auto &[a, b] : inner.pairs)
        out.pairs.push_back({H.mul(a).mul(Hi), H.mul(b).mul(Hi)});
    cw_check(*this, out, embed_beta_opp(y), bits, "cw_beta_opp");
    return out;
}

CommutatorWord ParamodContext::cw_letter(const Letter &l, uint32_t bits) const
{
    switch (l.kind) {
    case Letter::Kind::L:
        return cw_alpha(l.param, bits);
    case Letter::Kind::U:
        return cw_beta(l.param, bits);
    case Letter::Kind::Uopp:
        return cw_beta_opp(l.param, bits);
    }
    throw input_error("cw_letter: bad kind");
}

// ---------------------------------------------------------------------
// reduction of kernel elements to L/U/U^opp words

namespace {

Letter lift_letter(const Letter &l, uint32_t subg)
{
    // insert an identity row/column in front (position 0 of the 1-axes)
    PMat p(subg + 1, subg + 1, l.param.prec);
    if (l.kind == Letter::Kind::L)
        p.set(0, 0, 1);
    for (uint32_t i = 0; i < subg; ++i)
        for (uint32_t j = 0; j < subg; ++j)
            p.set(i + 1, j + 1, l.param.at(i, j));
    return {l.kind, p};
}

} // namespace

std::vector<Letter> ParamodContext::reduce_to_identity(const PMat &gamma,
                                                       uint32_t bits) const
{
    const uint32_t g = n_ + k_;
    if (!in_kernel(gamma, std::min(bits, 28u)))
        throw input_error("reduce_to_identity: not in the kernel");

    if (n_ == 0) {
        // gamma = I mod 2: clear Z, then Y, then the diagonal block
        std::vector<Letter> reducers;
        PMat cur = gamma;
        auto apply = [&](Letter l) {
            cur = letter_matrix(l).mul(cur);
            reducers.push_back(std::move(l));
        };
        PMat A = quadrant(cur, g, 0), C = quadrant(cur, g, 2);
        PMat S = C.mul(A.inverse()).neg();
        apply({Letter::Kind::Uopp, S});
        A = quadrant(cur, g, 0);
        PMat B = quadrant(cur, g, 1);
        PMat T = B.mul(A.transpose()).neg();
        apply({Letter::Kind::U, T});
        A = quadrant(cur, g, 0);
        apply({Letter::Kind::L, A.inverse()});
        if (!cur.is_identity_mod(std::min(bits, 28u)))
            throw soundness_error("reduce_to_identity: base case failed");
        // cur = r_m ... r_1 gamma = I, so gamma = r_1^{-1} ... r_m^{-1}
        std::vector<Letter> word;
        for (const auto &r : reducers) {
            Letter inv = r;
            if (inv.kind == Letter::Kind::L)
                inv.param = inv.param.inverse();
            else
                inv.param = inv.param.neg();
            word.push_back(std::move(inv));
        }
        PMat check = letters_value(word);
        if (!check.equal_mod(gamma, std::min(bits, 28u)))
            throw soundness_error("reduce_to_identity: base verify failed");
        return word;
    }

    std::vector<Letter> reducers;
    PMat cur = gamma;
    auto apply = [&](Letter l) {
        cur = letter_matrix(l).mul(cur);
        reducers.push_back(std::move(l));
    };
    auto apply_root = [&](const RootLetter &r) {
        // embed the Sp_2n root as a single letter
        if (r.type == 0) {
            PMat p = PMat::identity(g);
            p.set(r.i - 1, r.j - 1, r.c);
            apply({Letter::Kind::L, p});
        } else if (r.type == 1 || r.type == 2) {
            PMat p(g, g);
            if (r.type == 1) {
                p.set(r.i - 1, r.j - 1, r.c);
                p.set(r.j - 1, r.i - 1, r.c);
            } else {
                p.set(r.i - 1, r.i - 1, r.c);
            }
            apply({Letter::Kind::U, p});
        } else {
            PMat p(g, g);
            if (r.type == 3) {
                p.set(r.i - 1, r.j - 1, r.c);
                p.set(r.j - 1, r.i - 1, r.c);
            } else {
                p.set(r.i - 1, r.i - 1, r.c);
            }
            apply({Letter::Kind::Uopp, p});
        }
    };
    auto v_at = [&](uint32_t i) { return cur.at(i, 0); };     // e-part
    auto w_at = [&](uint32_t i) { return cur.at(g + i, 0); }; // f-part

    // Claim 2: move the (v1; w1) part of the first column to e_1.
    auto reduce_n_column = [&]() {
        if ((v_at(0) & 1) == 0) {
            bool done = false;
            for (uint32_t i = 1; i < n_ && !done; ++i)
                if (v_at(i) & 1) {
                    apply_root({0, 1, i + 1, 1});
                    done = true;
                }
            if (!done && (w_at(0) & 1)) {
                apply_root({2, 1, 0, 1});
                done = true;
            }
            for (uint32_t i = 1; i < n_ && !done; ++i)
                if (w_at(i) & 1) {
                    apply_root({1, 1, i + 1, 1});
                    done = true;
                }
            if (!done)
                throw soundness_error(
                    "reduce_to_identity: column not primitive");
        }
        uint32_t piv = inv_odd_u32(v_at(0));
        for (uint32_t i = 1; i < n_; ++i)
            if (v_at(i))
                apply_root({0, i + 1, 1, neg_u32(v_at(i) * piv)});
        for (uint32_t i = 1; i < n_; ++i)
            if (w_at(i))
                apply_root({3, i + 1, 1, neg_u32(w_at(i) * piv)});
        if (w_at(0))
            apply_root({4, 1, 0, neg_u32(w_at(0) * piv)});
        uint32_t u = v_at(0);
        if (u != 1) {
            uint32_t ui = inv_odd_u32(u);
            auto wmat = [&](uint32_t xpar) {
                apply_root({2, 1, 0, xpar});
                apply_root({4, 1, 0, neg_u32(inv_odd_u32(xpar))});
                apply_root({2, 1, 0, xpar});
            };
            wmat(neg_u32(1));
            wmat(ui);
        }
    };
    reduce_n_column();
    // Claim 3: clear the w2 part with a single U^opp letter
    {
        PMat z(g, g);
        bool any = false;
        for (uint32_t i = 0; i < k_; ++i) {
            uint32_t c = w_at(n_ + i);
            if (c) {
                any = true;
                z.set(n_ + i, 0, neg_u32(c));
                z.set(0, n_ + i, 2 * neg_u32(c));
            }
        }
        if (any)
            apply({Letter::Kind::Uopp, z});
    }
    // re-clear the n-part dirt
    reduce_n_column();
    // Claim 4 tail: clear v2 with one L letter
    {
        PMat x = PMat::identity(g);
        bool any = false;
        for (uint32_t i = 0; i < k_; ++i) {
            uint32_t c = v_at(n_ + i);
            if (c) {
                any = true;
                x.set(n_ + i, 0, neg_u32(c));
            }
        }
        if (any)
            apply({Letter::Kind::L, x});
    }
    for (uint32_t r = 0; r < 2 * g; ++r)
        if (!bit_zero_mod(cur.at(r, 0) - (r == 0 ? 1 : 0),
                          std::min(bits, 28u)))
            throw soundness_error("reduce_to_identity: column not cleared");

    // induction on the symplectic complement of (e_1, f_1)'s e_1 line
    ParamodContext sub(n_ - 1, k_);
    const uint32_t sg = g - 1;
    PMat subm(2 * sg, 2 * sg, cur.prec);
    auto map_idx = [&](uint32_t i) { return i < sg ? i + 1 : g + (i - sg) + 1; };
    for (uint32_t i = 0; i < 2 * sg; ++i)
        for (uint32_t j = 0; j < 2 * sg; ++j)
            subm.set(i, j, cur.at(map_idx(i), map_idx(j)));
    auto subword = sub.reduce_to_identity(subm, bits);
    std::vector<Letter> lifted;
    for (const auto &l : subword)
        lifted.push_back(lift_letter(l, sg));
    PMat gpp = letters_value(lifted);
    PMat delta = gpp.inverse().mul(cur);
    // delta is block upper triangular: split into alpha * beta
    {
        PMat Z = quadrant(delta, g, 2);
        for (uint32_t v : Z.e)
            if (!bit_zero_mod(v, std::min(bits, 26u)))
                throw soundness_error(
                    "reduce_to_identity: residual not block-upper");
    }
    PMat Xd = quadrant(delta, g, 0);
    PMat Yd = quadrant(delta, g, 1);
    PMat Yu = Xd.inverse().mul(Yd);
    std::vector<Letter> word;
    for (const auto &r : reducers) {
        Letter inv = r;
        if (inv.kind == Letter::Kind::L)
            inv.param = inv.param.inverse();
        else
            inv.param = inv.param.neg();
        word.push_back(std::move(inv));
    }
    word.insert(word.end(), lifted.begin(), lifted.end());
    word.push_back({Letter::Kind::L, Xd});
    word.push_back({Letter::Kind::U, Yu});
    PMat check = letters_value(word);
    if (!check.equal_mod(gamma, std::min({bits, check.prec, gamma.prec})))
        throw soundness_error("reduce_to_identity: verification failed");
    return word;
}


// ---------------------------------------------------------------------
// identity / spanning reports

std::vector<CheckReport> verify_commutator_identities(const ParamodContext &ctx,
                                                      uint32_t bits,
                                                      size_t trials,
                                                      uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const uint32_t n = ctx.n(), k = ctx.k(), g = n + k;
    std::vector<CheckReport> out;

    auto report = [&](const char *name, auto &&body) {
        CheckReport r;
        r.name = name;
        r.trials = trials;
        r.pass = true;
        for (size_t t = 0; t < trials && r.pass; ++t) {
            std::string detail;
            if (!body(detail)) {
                r.pass = false;
                r.detail = detail;
            }
        }
        out.push_back(std::move(r));
    };

    auto rand_mat = [&](uint32_t r, uint32_t c, uint32_t scale) {
        PMat m(r, c);
        for (auto &v : m.e)
            v = static_cast<uint32_t>(rng()) * scale;
        return m;
    };
    auto rand_gl = [&](uint32_t m) {
        while (true) {
            PMat x = rand_mat(m, m, 1);
            try {
                (void)x.inverse();
                return x;
            } catch (const input_error &) {
            }
        }
    };

    // [ (X 0; 0 I), (I Y; 0 I) ] = (I, XY - Y; 0 I) inside L'
    report("A3-L-internal-commutator", [&](std::string &detail) {
        PMat X = rand_gl(n), Y = rand_mat(n, k, 2);
        PMat a = PMat::identity(g), b = PMat::identity(g);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j)
                a.set(i, j, X.at(i, j));
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < k; ++j)
                b.set(i, n + j, Y.at(i, j));
        PMat lhs = a.mul(b).mul(a.inverse()).mul(b.inverse());
        PMat rhs = PMat::identity(g);
        PMat xy = X.mul(Y).sub(Y);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < k; ++j)
                rhs.set(i, n + j, xy.at(i, j));
        bool ok = lhs.equal_mod(rhs, bits);
        if (!ok)
            detail = "XY-Y commutator identity failed";
        return ok;
    });

    // [alpha(X), beta(Y)] = beta(X Y W^{-1} - Y)
    report("A4-alpha-beta-commutator", [&](std::string &detail) {
        std::mt19937_64 &r2 = rng;
        PMat X = ctx.random_Lprime(r2);
        PMat Y = ctx.random_Uprime(r2);
        PMat A = ctx.embed_alpha(X), B = ctx.embed_beta(Y);
        PMat lhs = A.mul(B).mul(A.inverse()).mul(B.inverse());
        // W^{-1} = D^{-1} X^t D
        PMat W = quadrant(A, g, 3);
        PMat val = X.mul(Y).mul(W.inverse()).sub(Y);
        PMat rhs = ctx.embed_beta(val);
        bool ok = lhs.equal_mod(rhs, std::min(bits, 28u));
        if (!ok)
            detail = "alpha-beta commutator identity failed";
        return ok;
    });

    // the displayed (I + .., -4XYX; 2YXY, I - 2YX) identity, exact
    report("A3-display-4XYX", [&](std::string &detail) {
        PMat X = rand_mat(n, k, 1), Y = rand_mat(k, n, 1);
        PMat a = PMat::identity(g), b = PMat::identity(g);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < k; ++j)
                a.set(i, n + j, 2 * X.at(i, j));
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < n; ++j)
                b.set(n + i, j, Y.at(i, j));
        PMat K = a.mul(b).mul(a.inverse()).mul(b.inverse());
        // expected blocks
        PMat XY = X.mul(Y), YX = Y.mul(X);
        PMat exp11 = PMat::identity(n)
                         .add(XY.add(XY))
                         .add(XY.mul(XY).add(XY.mul(XY)).add(XY.mul(XY)).add(
                             XY.mul(XY)));
        PMat expected = PMat::identity(g);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j)
                expected.set(i, j, exp11.at(i, j));
        PMat m4 = X.mul(Y).mul(X);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < k; ++j)
                expected.set(i, n + j, neg_u32(4 * m4.at(i, j)));
        PMat m2 = Y.mul(X).mul(Y);
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < n; ++j)
                expected.set(n + i, j, 2 * m2.at(i, j));
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < k; ++j)
                expected.set(n + i, n + j,
                             (i == j ? 1u : 0u) - 2 * YX.at(i, j));
        bool ok = K.equal_mod(expected, bits);
        if (!ok)
            detail = "display identity failed";
        return ok;
    });

    // Schur complement of the display = I - 2YX mod 8
    report("A3-schur-I-2YX-mod8", [&](std::string &detail) {
        PMat X = rand_mat(n, k, 1), Y = rand_mat(k, n, 1);
        PMat a = PMat::identity(g), b = PMat::identity(g);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < k; ++j)
                a.set(i, n + j, 2 * X.at(i, j));
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < n; ++j)
                b.set(n + i, j, Y.at(i, j));
        PMat K = a.mul(b).mul(a.inverse()).mul(b.inverse());
        PMat K11(n, n), K12(n, k), K21(k, n), K22(k, k);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j)
                K11.set(i, j, K.at(i, j));
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < k; ++j)
                K12.set(i, j, K.at(i, n + j));
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < n; ++j)
                K21.set(i, j, K.at(n + i, j));
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < k; ++j)
                K22.set(i, j, K.at(n + i, n + j));
        PMat schur = K22.sub(K21.mul(K11.inverse()).mul(K12));
        PMat tgt = PMat::identity(k).sub(Y.mul(X).add(Y.mul(X)));
        bool ok = schur.equal_mod(tgt, 3);
        if (!ok)
            detail = "Schur mod 8 congruence failed";
        return ok;
    });

    // membership is preserved by products, inverses, star, h_conj
    report("membership-closure", [&](std::string &detail) {
        std::mt19937_64 &r2 = rng;
        PMat a = ctx.letter_matrix(ctx.random_letter(r2));
        PMat b = ctx.letter_matrix(ctx.random_letter(r2));
        PMat word = a.mul(b).mul(ctx.letter_matrix(ctx.random_letter(r2)));
        uint32_t chk = std::min(bits, 28u);
        bool ok = ctx.is_member(word, chk) &&
                  ctx.member_conditions(word, chk) &&
                  ctx.is_member(word.inverse(), chk) &&
                  ctx.is_member(ctx.star(word), chk) &&
                  ctx.is_member(ctx.h_conj(word), chk) &&
                  ctx.star(ctx.star(word)).equal_mod(word, chk - 2);
        if (!ok)
            detail = "membership closure failed";
        return ok;
    });

    // red_D is a homomorphism; h maps U onto U^opp
    report("red-homomorphism-and-h", [&](std::string &detail) {
        std::mt19937_64 &r2 = rng;
        PMat a = ctx.letter_matrix(ctx.random_letter(r2));
        PMat b = ctx.letter_matrix(ctx.random_letter(r2));
        auto ra = ctx.red(a), rb = ctx.red(b), rab = ctx.red(a.mul(b));
        bool ok = ra.mul(rb) == rab;
        PMat y = ctx.random_Uprime(r2);
        PMat hU = ctx.h_conj(ctx.embed_beta(y));
        ok = ok && hU.equal_mod(ctx.embed_beta_opp(y.neg()),
                                std::min(bits, 28u));
        if (!ok)
            detail = "red or h-conjugation failed";
        return ok;
    });
    return out;
}


std::vector<CheckReport> verify_spanning_claims(const ParamodContext &ctx,
                                                uint32_t bits)
{
    const uint32_t n = ctx.n(), k = ctx.k();
    const uint32_t m = (uint32_t(1) << bits);
    std::vector<CheckReport> out;
    auto vec_of = [&](const PMat &a) {
        std::vector<uint32_t> v(a.e.size());
        for (size_t i = 0; i < v.size(); ++i)
            v[i] = a.e[i] % m;
        return v;
    };

    // span{XY - Y : X in GL_n, Y in 2Mat_{n,k}} = 2 Mat_{n,k}
    {
        CheckReport r;
        r.name = "span-XY-Y-equals-2Mat";
        std::vector<std::vector<uint32_t>> gens;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                PMat X = PMat::identity(n);
                X.set(i, j, 1);
                for (uint32_t a = 0; a < n; ++a)
                    for (uint32_t b = 0; b < k; ++b) {
                        PMat Y(n, k);
                        Y.set(a, b, 2);
                        gens.push_back(vec_of(X.mul(Y).sub(Y)));
                    }
            }
        std::vector<std::vector<uint32_t>> target;
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = 0; b < k; ++b) {
                PMat Y(n, k);
                Y.set(a, b, 2);
                target.push_back(vec_of(Y));
            }
        r.pass = ring::howell_span(gens, size_t(n) * k, m) ==
                 ring::howell_span(target, size_t(n) * k, m);
        r.trials = gens.size();
        out.push_back(std::move(r));
    }

    // span{Y X^t - Y : X in GL_n, Y in Mat_{k,n}} = Mat_{k,n}
    {
        CheckReport r;
        r.name = "span-YXt-Y-equals-Mat";
        std::vector<std::vector<uint32_t>> gens;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                PMat Xt = PMat::identity(n);
                Xt.set(i, j, 1);
                for (uint32_t a = 0; a < k; ++a)
                    for (uint32_t b = 0; b < n; ++b) {
                        PMat Y(k, n);
                        Y.set(a, b, 1);
                        gens.push_back(vec_of(Y.mul(Xt).sub(Y)));
                    }
            }
        std::vector<std::vector<uint32_t>> target;
        for (uint32_t a = 0; a < k; ++a)
            for (uint32_t b = 0; b < n; ++b) {
                PMat Y(k, n);
                Y.set(a, b, 1);
                target.push_back(vec_of(Y));
            }
        r.pass = ring::howell_span(gens, size_t(k) * n, m) ==
                 ring::howell_span(target, size_t(k) * n, m);
        r.trials = gens.size();
        out.push_back(std::move(r));
    }

    // span{2 X Y X^t : X in Mat_{k,n}, Y in Sym_n} = 2 Sym_k
    {
        CheckReport r;
        r.name = "span-2XYXt-equals-2Sym";
        auto sym_vec = [&](const PMat &s) {
            std::vector<uint32_t> v;
            for (uint32_t i = 0; i < k; ++i)
                for (uint32_t j = i; j < k; ++j)
                    v.push_back(s.at(i, j) % m);
            return v;
        };
        std::vector<std::vector<uint32_t>> gens;
        for (uint32_t i = 0; i < n; ++i) {
            PMat Y(n, n);
            Y.set(i, i, 1);
            for (uint32_t l = 0; l < k; ++l) {
                PMat X(k, n);
                X.set(l, i, 1);
                PMat v = X.mul(Y).mul(X.transpose());
                gens.push_back(sym_vec(v.add(v)));
                for (uint32_t m2 = 0; m2 < k; ++m2) {
                    if (m2 == l)
                        continue;
                    PMat X2(k, n);
                    X2.set(l, i, 1);
                    X2.set(m2, i, 1);
                    PMat w = X2.mul(Y).mul(X2.transpose());
                    gens.push_back(sym_vec(w.add(w)));
                }
            }
        }
        std::vector<std::vector<uint32_t>> target;
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = i; j < k; ++j) {
                PMat s(k, k);
                s.set(i, j, 2);
                s.set(j, i, 2);
                target.push_back(sym_vec(s));
            }
        size_t len = size_t(k) * (k + 1) / 2;
        r.pass = ring::howell_span(gens, len, m) ==
                 ring::howell_span(target, len, m);
        r.trials = gens.size();
        out.push_back(std::move(r));
    }

    // {I - 2YX} generates a subgroup surjecting onto
    // ker(GL_k(Z/4) -> GL_k(Z/2)), which has order 2^(k^2)
    {
        CheckReport r;
        r.name = "I-2YX-closure-GL4-kernel";
        std::map<std::vector<uint8_t>, size_t> seen;
        auto key4 = [&](const PMat &a) {
            std::vector<uint8_t> v(a.e.size());
            for (size_t i = 0; i < v.size(); ++i)
                v[i] = a.e[i] & 3;
            return v;
        };
        std::vector<PMat> queue;
        PMat idk = PMat::identity(k);
        seen.emplace(key4(idk), 0);
        queue.push_back(idk);
        std::vector<PMat> gens;
        for (uint32_t a = 0; a < k; ++a)
            for (uint32_t b = 0; b < n; ++b)
                for (uint32_t c2 = 0; c2 < n; ++c2)
                    for (uint32_t d = 0; d < k; ++d) {
                        PMat Y(k, n), X(n, k);
                        Y.set(a, b, 1);
                        X.set(c2, d, 1);
                        PMat v = idk.sub(Y.mul(X).add(Y.mul(X)));
                        gens.push_back(v);
                    }
        for (size_t head = 0; head < queue.size(); ++head) {
            PMat cur = queue[head];
            for (const auto &s : gens) {
                PMat nxt = cur.mul(s);
                if (seen.emplace(key4(nxt), seen.size()).second)
                    queue.push_back(nxt);
            }
        }
        r.pass = seen.size() == (size_t(1) << (k * k));
        r.trials = seen.size();
        if (!r.pass)
            r.detail = "closure order " + std::to_string(seen.size());
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckReport>
express_generators_as_commutators(const ParamodContext &ctx, uint32_t bits,
                                  size_t samples, uint64_t seed)
{
    if (ctx.n() < 3 || ctx.k() < 2)
        throw input_error(
            "express_generators_as_commutators: needs n >= 3, k >= 2");
    std::mt19937_64 rng(seed);
    const uint32_t n = ctx.n(), k = ctx.k(), g = n + k;
    std::vector<CheckReport> out;

    auto family = [&](const char *name, auto &&make_target, auto &&witness) {
        CheckReport r;
        r.name = name;
        r.pass = true;
        size_t words = 0;
        for (size_t t = 0; t < samples && r.pass; ++t) {
            try {
                auto target = make_target();
                auto w = witness(target);
                words += w.size();
            } catch (const std::exception &ex) {
                r.pass = false;
                r.detail = ex.what();
            }
        }
        r.trials = samples;
        if (r.pass)
            r.detail = "mean word length " +
                       std::to_string(words / std::max<size_t>(1, samples));
        out.push_back(std::move(r));
    };

    auto rand_gl = [&](uint32_t m) {
        while (true) {
            PMat x(m, m);
            for (auto &v : x.e)
                v = static_cast<uint32_t>(rng());
            try {
                (void)x.inverse();
                return x;
            } catch (const input_error &) {
            }
        }
    };

    family(
        "A3-1-diag-GLn",
        [&] {
            PMat X11 = rand_gl(n);
            PMat a(2 * n, 2 * n);
            PMat it = X11.inverse().transpose();
            for (uint32_t i = 0; i < n; ++i)
                for (uint32_t j = 0; j < n; ++j) {
                    a.set(i, j, X11.at(i, j));
                    a.set(n + i, n + j, it.at(i, j));
                }
            return a;
        },
        [&](const PMat &a) { return ctx.cw_sp2n(a, bits); });

    family(
        "A3-2-diag-GLk-mod4",
        [&] {
            PMat X22 = PMat::identity(k);
            for (auto &v : X22.e)
                v += 4 * static_cast<uint32_t>(rng());
            PMat a(2 * k, 2 * k);
            PMat it = X22.inverse().transpose();
            for (uint32_t i = 0; i < k; ++i)
                for (uint32_t j = 0; j < k; ++j) {
                    a.set(i, j, X22.at(i, j));
                    a.set(k + i, k + j, it.at(i, j));
                }
            return a;
        },
        [&](const PMat &a) { return ctx.cw_sp2k_48(a, bits); });

    family(
        "A3-L-upper-triangular",
        [&] {
            PMat t(n, k);
            for (auto &v : t.e)
                v = 2 * static_cast<uint32_t>(rng());
            return t;
        },
        [&](const PMat &t) { return ctx.cw_alpha_upper(t, bits); });

    family(
        "A3-L-lower-triangular",
        [&] {
            PMat s(k, n);
            for (auto &v : s.e)
                v = static_cast<uint32_t>(rng());
            return s;
        },
        [&](const PMat &s) { return ctx.cw_alpha_lower(s, bits); });

    family(
        "A3-L-general",
        [&] { return ctx.random_Lprime(rng); },
        [&](const PMat &x) { return ctx.cw_alpha(x, bits); });

    family(
        "A4-U-general",
        [&] { return ctx.random_Uprime(rng); },
        [&](const PMat &y) { return ctx.cw_beta(y, bits); });

    family(
        "A4-U-diag-8Sym",
        [&] {
            PMat y(g, g);
            for (uint32_t i = 0; i < k; ++i)
                for (uint32_t j = i; j < k; ++j) {
                    uint32_t v = 8 * static_cast<uint32_t>(rng());
                    y.set(n + i, n + j, v);
                    y.set(n + j, n + i, v);
                }
            return y;
        },
        [&](const PMat &y) { return ctx.cw_beta(y, bits); });

    family(
        "A4-Uopp-general",
        [&] { return ctx.random_Uprime(rng); },
        [&](const PMat &y) { return ctx.cw_beta_opp(y, bits); });

    return out;
}

// ---------------------------------------------------------------------
// odd prime congruence kernel

OddPKernelResult odd_p_kernel(uint32_t g, uint32_t p, size_t samples,
                              uint64_t seed)
{
    if (g < 1 || g > 3 || (p != 3 && p != 5))
        throw capacity_error("odd_p_kernel: g <= 3 and p in {3, 5}");
    OddPKernelResult res;
    res.g = g;
    res.p = p;
    res.expected_exponent = 2 * g * g + g;
    const uint32_t twog = 2 * g;
    const uint32_t p2 = p * p;

    // standard J over Z
    auto Jat = [&](uint32_t i, uint32_t j) -> int64_t {
        if (i < g && j == g + i)
            return 1;
        if (i >= g && j == i - g)
            return -1;
        return 0;
    };

    // dim over F_p of {B : B^t J + J B = 0}: vectorize and take the
    // kernel with the Howell machinery
    {
        ring::ResMatrix A(twog * twog, twog * twog, p);
        for (uint32_t r = 0; r < twog; ++r)
            for (uint32_t c = 0; c < twog; ++c) {
                size_t row = size_t(r) * twog + c;
                // (B^t J)_rc = sum_t B_tr J_tc ; (J B)_rc = sum_t J_rt B_tc
                for (uint32_t t = 0; t < twog; ++t) {
                    int64_t j1 = Jat(t, c);
                    if (j1)
                        A.set(row, size_t(t) * twog + r,
                              (A.at(row, size_t(t) * twog + r) +
                               uint32_t((j1 % p + p) % p)) %
                                  p);
                    int64_t j2 = Jat(r, t);
                    if (j2)
                        A.set(row, size_t(t) * twog + c,
                              (A.at(row, size_t(t) * twog + c) +
                               uint32_t((j2 % p + p) % p)) %
                                  p);
                }
            }
        auto sol = ring::solve_mod(A, std::vector<uint32_t>(twog * twog, 0));
        res.lie_kernel_dim = static_cast<uint32_t>(sol.kernel.size());
        res.order_matches = res.lie_kernel_dim == res.expected_exponent;
    }

    // sampled structure checks inside Sp_2g(Z/p^2)
    std::mt19937_64 rng(seed);
    auto random_sp_lie = [&]() {
        // random B in the Lie algebra: B = ((a, b),(c, -a^t)) with b, c
        // symmetric g x g blocks
        std::vector<uint32_t> B(twog * twog, 0);
        auto set = [&](uint32_t i, uint32_t j, uint32_t v) {
            B[size_t(i) * twog + j] = v % p;
        };
        for (uint32_t i = 0; i < g; ++i)
            for (uint32_t j = 0; j < g; ++j) {
                uint32_t a = rng() % p;
                set(i, j, a);
                set(g + j, g + i, (p - a) % p);
            }
        for (uint32_t i = 0; i < g; ++i)
            for (uint32_t j = i; j < g; ++j) {
                uint32_t b = rng() % p, c = rng() % p;
                set(i, g + j, b);
                set(j, g + i, b);
                set(g + i, j, c);
                set(g + j, i, c);
            }
        return B;
    };
    auto mat_mul = [&](const std::vector<uint32_t> &a,
                       const std::vector<uint32_t> &b) {
        std::vector<uint32_t> r(twog * twog, 0);
        for (uint32_t i = 0; i < twog; ++i)
            for (uint32_t t = 0; t < twog; ++t) {
                uint32_t v = a[size_t(i) * twog + t];
                if (!v)
                    continue;
                for (uint32_t j = 0; j < twog; ++j)
                    r[size_t(i) * twog + j] =
                        (r[size_t(i) * twog + j] +
                         v * b[size_t(t) * twog + j]) %
                        p2;
            }
        return r;
    };
    auto kernel_elem = [&](const std::vector<uint32_t> &B) {
        std::vector<uint32_t> m(twog * twog, 0);
        for (uint32_t i = 0; i < twog; ++i)
            m[size_t(i) * twog + i] = 1;
        for (size_t t = 0; t < B.size(); ++t)
            m[t] = (m[t] + p * B[t]) % p2;
        return m;
    };
    auto is_sp_p2 = [&](const std::vector<uint32_t> &m) {
        // m^t J m = J mod p^2
        for (uint32_t i = 0; i < twog; ++i)
            for (uint32_t j = 0; j < twog; ++j) {
                int64_t acc = 0;
                for (uint32_t a = 0; a < twog; ++a)
                    for (uint32_t b = 0; b < twog; ++b) {
                        int64_t jv = Jat(a, b);
                        if (jv)
                            acc += int64_t(m[size_t(a) * twog + i]) * jv %
                                   p2 * m[size_t(b) * twog + j];
                    }
                int64_t want = (Jat(i, j) % p2 + p2) % p2;
                if (((acc % p2) + p2) % p2 != uint64_t(want))
                    return false;
            }
        return true;
    };

    res.abelian = true;
    res.elementary = true;
    for (size_t t = 0; t < samples; ++t) {
        auto B1 = random_sp_lie(), B2 = random_sp_lie();
        auto m1 = kernel_elem(B1), m2 = kernel_elem(B2);
        if (!is_sp_p2(m1) || !is_sp_p2(m2)) {
            res.abelian = false;
            break;
        }
        if (mat_mul(m1, m2) != mat_mul(m2, m1))
            res.abelian = false;
        auto pw = m1;
        for (uint32_t e = 1; e < p; ++e)
            pw = mat_mul(pw, m1);
        std::vector<uint32_t> id(twog * twog, 0);
        for (uint32_t i = 0; i < twog; ++i)
            id[size_t(i) * twog + i] = 1;
        if (pw != id)
            res.elementary = false;
    }

    if (g == 1) {
        // oracle: enumerate all I + pA over Mat_2(F_p)
        uint64_t count = 0;
        for (uint32_t code = 0; code < p * p * p * p; ++code) {
            uint32_t x = code;
            std::vector<uint32_t> B(4);
            for (auto &v : B) {
                v = x % p;
                x /= p;
            }
            if (is_sp_p2(kernel_elem(B)))
                ++count;
        }
        res.enumerated_order = count;
    }
    return res;
}
} // namespace thetaobs::paramod
