#include "thetaobs/ringlinalg.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "thetaobs/kernels.hpp"

namespace thetaobs::ring {

// ---------------------------------------------------------------------
// ResMatrix

ResMatrix::ResMatrix(size_t rows, size_t cols, uint32_t modulus)
    : rows_(rows), cols_(cols), m_(modulus), e_(rows * cols, 0)
{
    if (modulus < 2 || modulus > (uint32_t(1) << 31))
        throw input_error("ResMatrix: modulus must be in [2, 2^31]");
}

ResMatrix ResMatrix::identity(size_t n, uint32_t m)
{
    ResMatrix a(n, n, m);
    for (size_t i = 0; i < n; ++i)
        a.set(i, i, 1 % m);
    return a;
}

ResMatrix ResMatrix::mul(const ResMatrix &o) const
{
    if (cols_ != o.rows_ || m_ != o.m_)
        throw input_error("ResMatrix::mul: shape or modulus mismatch");
    ResMatrix r(rows_, o.cols_, m_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t k = 0; k < cols_; ++k) {
            uint64_t aik = at(i, k);
            if (!aik)
                continue;
            kernels::ops().addmul_mod(r.row_ptr(i), o.row_ptr(k),
                                      static_cast<uint32_t>(aik), m_,
                                      o.cols_);
        }
    return r;
}

ResMatrix ResMatrix::transpose() const
{
    ResMatrix r(cols_, rows_, m_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j)
            r.set(j, i, at(i, j));
    return r;
}

std::string ResMatrix::to_text() const
{
    std::ostringstream out;
    out << rows_ << ' ' << cols_ << ' ' << m_ << '\n';
    for (size_t i = 0; i < rows_; ++i) {
        for (size_t j = 0; j < cols_; ++j) {
            if (j)
                out << ' ';
            out << at(i, j);
        }
        out << '\n';
    }
    return out.str();
}

ResMatrix ResMatrix::from_text(std::istream &in)
{
    size_t rows, cols;
    uint32_t m;
    if (!(in >> rows >> cols >> m))
        throw input_error("ResMatrix::from_text: bad header");
    ResMatrix a(rows, cols, m);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) {
            uint64_t v;
            if (!(in >> v))
                throw input_error("ResMatrix::from_text: short matrix body");
            a.set(i, j, v);
        }
    return a;
}

ResMatrix ResMatrix::from_text(const std::string &text)
{
    std::istringstream in(text);
    return from_text(in);
}

// ---------------------------------------------------------------------
// BitMatrix

BitMatrix::BitMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), w_(rows * wpr_, 0)
{
}

void BitMatrix::xor_row(size_t dst, size_t src)
{
    kernels::ops().xor_rows(row_ptr(dst), row_ptr(src), wpr_);
}

bool BitMatrix::row_is_zero(size_t r) const
{
    const uint64_t *p = row_ptr(r);
    for (size_t i = 0; i < wpr_; ++i)
        if (p[i])
            return false;
    return true;
}

BitMatrix BitMatrix::from_res(const ResMatrix &a)
{
    if (a.modulus() != 2)
        throw input_error("BitMatrix::from_res: modulus must be 2");
    BitMatrix b(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j)
            if (a.at(i, j))
                b.set(i, j, true);
    return b;
}

ResMatrix BitMatrix::to_res() const
{
    ResMatrix a(rows_, cols_, 2);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j)
            a.set(i, j, get(i, j) ? 1 : 0);
    return a;
}

// ---------------------------------------------------------------------
// F2Solver

F2Solver::F2Solver(size_t ncols)
    : n_(ncols), wpr_((ncols + 63) / 64), pivot_of_col_(ncols, -1)
{
}

bool F2Solver::add_equation(const std::vector<uint64_t> &lhs_in, bool rhs)
{
    std::vector<uint64_t> lhs = lhs_in;
    lhs.resize(wpr_, 0);
    // Reduce against the maintained RREF: clear every pivot bit.
    for (size_t w = 0; w < wpr_; ++w) {
        uint64_t bits = lhs[w];
        while (bits) {
            size_t col = w * 64 + static_cast<size_t>(std::countr_zero(bits));
            if (col >= n_)
                break;
            int64_t pr = pivot_of_col_[col];
            if (pr >= 0) {
                kernels::ops().xor_rows(lhs.data(), rows_[size_t(pr)].data(),
                                        wpr_);
                rhs ^= (rhs_[size_t(pr)] != 0);
                bits = lhs[w];
            } else {
                bits &= bits - 1;
            }
        }
    }
    size_t lead = n_;
    for (size_t w = 0; w < wpr_ && lead == n_; ++w)
        if (lhs[w])
            lead = w * 64 + static_cast<size_t>(std::countr_zero(lhs[w]));
    if (lead == n_) {
        if (rhs) {
            consistent_ = false;
            return false;
        }
        return true;
    }
    // Keep the basis in reduced form: clear this column everywhere else.
    for (size_t r = 0; r < rows_.size(); ++r) {
        if ((rows_[r][lead / 64] >> (lead % 64)) & 1) {
            kernels::ops().xor_rows(rows_[r].data(), lhs.data(), wpr_);
            rhs_[r] ^= rhs ? 1 : 0;
        }
    }
    pivot_of_col_[lead] = static_cast<int64_t>(rows_.size());
    rows_.push_back(std::move(lhs));
    rhs_.push_back(rhs ? 1 : 0);
    ++rank_;
    return true;
}

bool F2Solver::add_equation_bits(const std::vector<size_t> &ones, bool rhs)
{
    std::vector<uint64_t> lhs(wpr_, 0);
    for (size_t c : ones)
        lhs[c / 64] ^= uint64_t(1) << (c % 64);
    return add_equation(lhs, rhs);
}

std::vector<uint8_t> F2Solver::solution() const
{
    if (!consistent_)
        throw input_error("F2Solver::solution: system is inconsistent");
    // Full RREF: each row's only pivot bit is its own, so with free
    // variables at zero the pivot values are just the right-hand sides.
    std::vector<uint8_t> x(n_, 0);
    for (size_t c = 0; c < n_; ++c)
        if (pivot_of_col_[c] >= 0)
            x[c] = rhs_[size_t(pivot_of_col_[c])];
    return x;
}

std::vector<std::vector<uint8_t>> F2Solver::kernel() const
{
    std::vector<std::vector<uint8_t>> basis;
    for (size_t fc = 0; fc < n_; ++fc) {
        if (pivot_of_col_[fc] >= 0)
            continue;
        std::vector<uint8_t> v(n_, 0);
        v[fc] = 1;
        for (size_t c = 0; c < n_; ++c) {
            int64_t pr = pivot_of_col_[c];
            if (pr >= 0)
                v[c] = (rows_[size_t(pr)][fc / 64] >> (fc % 64)) & 1;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

// ---------------------------------------------------------------------
// Howell form over Z/m

namespace {

uint64_t gcd_u(uint64_t a, uint64_t b)
{
    while (b) {
        uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Extended gcd on int64; inputs are < 2^32 so no overflow.
int64_t xgcd(int64_t a, int64_t b, int64_t &s, int64_t &t)
{
    if (b == 0) {
        s = 1;
        t = 0;
        return a;
    }
    int64_t s1, t1;
    int64_t g = xgcd(b, a % b, s1, t1);
    s = t1;
    t = s1 - (a / b) * t1;
    return g;
}

struct RowVec {
    std::vector<uint32_t> v;
    size_t lead; // first nonzero index, or v.size()
    void find_lead()
    {
        lead = 0;
        while (lead < v.size() && v[lead] == 0)
            ++lead;
    }
};

void row_addmul(std::vector<uint32_t> &dst, const std::vector<uint32_t> &src,
                uint32_t c, uint32_t m)
{
    kernels::ops().addmul_mod(dst.data(), src.data(), c, m, dst.size());
}

} // namespace

uint32_t unit_multiplier(uint32_t g, uint32_t m)
{
    g %= m;
    if (g == 0)
        return 1;
    uint32_t gp = static_cast<uint32_t>(gcd_u(g, m));
    uint32_t a = g / gp; // coprime to m/gp
    uint32_t mg = m / gp;
    // a^{-1} mod mg, then nudge to a unit mod m.
    int64_t s, t;
    int64_t gg = xgcd(int64_t(a % mg == 0 ? 1 : a % mg), int64_t(mg), s, t);
    (void)gg;
    uint32_t u = mg == 1 ? 1 : static_cast<uint32_t>(((s % mg) + mg) % mg);
    if (u == 0)
        u = 1;
    for (uint32_t k = 0;; ++k) {
        uint64_t cand = (u + uint64_t(k) * mg) % m;
        if (cand != 0 && gcd_u(cand, m) == 1) {
            if ((cand * uint64_t(g)) % m != gp)
                throw soundness_error("unit_multiplier: normalization failed");
            return static_cast<uint32_t>(cand);
        }
        if (k > m)
            throw soundness_error("unit_multiplier: no unit found");
    }
}

std::vector<std::vector<uint32_t>>
howell_span(const std::vector<std::vector<uint32_t>> &vectors, size_t len,
            uint32_t m)
{
    std::vector<RowVec> work;
    for (const auto &src : vectors) {
        if (src.size() != len)
            throw input_error("howell_span: inconsistent vector length");
        RowVec r;
        r.v.resize(len);
        for (size_t i = 0; i < len; ++i)
            r.v[i] = src[i] % m;
        r.find_lead();
        if (r.lead < len)
            work.push_back(std::move(r));
    }

    std::vector<RowVec> placed;
    for (size_t col = 0; col < len; ++col) {
        // Collect rows with this leading column; gcd-combine into one.
        std::vector<RowVec> here;
        std::vector<RowVec> rest;
        for (auto &r : work)
            (r.lead == col ? here : rest).push_back(std::move(r));
        work = std::move(rest);
        if (here.empty())
            continue;
        RowVec pivot = std::move(here[0]);
        for (size_t i = 1; i < here.size(); ++i) {
            RowVec &b = here[i];
            uint32_t alpha = pivot.v[col], beta = b.v[col];
            int64_t s, t;
            int64_t g = xgcd(int64_t(alpha), int64_t(beta), s, t);
            // Unimodular 2x2: (pivot, b) <- (s*pivot + t*b,
            //                               -(beta/g)*pivot + (alpha/g)*b)
            auto modc = [&](int64_t x) {
                int64_t r = x % int64_t(m);
                return static_cast<uint32_t>(r < 0 ? r + m : r);
            };
            std::vector<uint32_t> newp(len, 0), newb(len, 0);
            row_addmul(newp, pivot.v, modc(s), m);
            row_addmul(newp, b.v, modc(t), m);
            row_addmul(newb, pivot.v, modc(-(int64_t(beta) / g)), m);
            row_addmul(newb, b.v, modc(int64_t(alpha) / g), m);
            pivot.v = std::move(newp);
            pivot.lead = col;
            if (pivot.v[col] == 0)
                throw soundness_error("howell_span: pivot vanished");
            RowVec nb;
            nb.v = std::move(newb);
            nb.find_lead();
            if (nb.lead < len) {
                if (nb.lead <= col)
                    throw soundness_error("howell_span: reduction regressed");
                work.push_back(std::move(nb));
            }
        }
        // Normalize the pivot's leading entry to gcd(entry, m).
        uint32_t u = unit_multiplier(pivot.v[col], m);
        if (u != 1) {
            std::vector<uint32_t> nv(len, 0);
            row_addmul(nv, pivot.v, u, m);
            pivot.v = std::move(nv);
        }
        uint32_t lead = pivot.v[col];
        // Howell completion: the annihilator multiple of the pivot row
        // belongs to the span and has a later leading column.
        if (lead != 0 && m % lead == 0 && m / lead > 1) {
            RowVec ann;
            ann.v.assign(len, 0);
            row_addmul(ann.v, pivot.v, m / lead, m);
            ann.find_lead();
            if (ann.lead < len)
                work.push_back(std::move(ann));
        }
        placed.push_back(std::move(pivot));
    }

    // Reduce entries above each leading entry modulo that entry.  Left to
    // right so that already-reduced pivot columns are never touched again
    // (later rows are zero at earlier pivot columns).
    for (size_t i = 0; i < placed.size(); ++i) {
        size_t c = placed[i].lead;
        uint32_t l = placed[i].v[c];
        for (size_t j = 0; j < i; ++j) {
            uint32_t e = placed[j].v[c];
            if (e >= l) {
                uint32_t q = e / l;
                row_addmul(placed[j].v, placed[i].v, m - q, m);
            }
        }
    }
    std::vector<std::vector<uint32_t>> out;
    out.reserve(placed.size());
    for (auto &r : placed)
        out.push_back(std::move(r.v));
    return out;
}

SolveResult solve_mod(const ResMatrix &A, const std::vector<uint32_t> &b)
{
    if (b.size() != A.rows())
        throw input_error("solve_mod: rhs length != rows");
    const uint32_t m = A.modulus();
    const size_t r = A.rows(), n = A.cols();

    // Row j of B is (A e_j | e_j); the row span is {(A u, u)}.
    std::vector<std::vector<uint32_t>> rowsB(n,
                                             std::vector<uint32_t>(r + n, 0));
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < r; ++i)
            rowsB[j][i] = A.at(i, j);
        rowsB[j][r + j] = 1 % m;
    }
    auto H = howell_span(rowsB, r + n, m);

    SolveResult res;
    // Kernel: Howell rows whose A-part vanishes; their u-parts generate
    // ker(A) and are already canonical (re-normalize for presentation).
    std::vector<std::vector<uint32_t>> kvecs;
    for (const auto &h : H) {
        bool azero = true;
        for (size_t i = 0; i < r && azero; ++i)
            azero = (h[i] == 0);
        if (azero) {
            std::vector<uint32_t> u(h.begin() + long(r), h.end());
            bool nz = false;
            for (uint32_t x : u)
                nz |= (x != 0);
            if (nz)
                kvecs.push_back(std::move(u));
        }
    }
    res.kernel = howell_span(kvecs, n, m);

    // Particular solution: reduce (b | 0) against the Howell rows.
    std::vector<uint32_t> t(r + n, 0);
    for (size_t i = 0; i < r; ++i)
        t[i] = b[i] % m;
    for (const auto &h : H) {
        size_t lead = 0;
        while (lead < r + n && h[lead] == 0)
            ++lead;
        if (lead >= r)
            break; // kernel rows cannot help clear the A-part
        uint32_t e = t[lead];
        if (e == 0)
            continue;
        uint32_t l = h[lead]; // divides m by Howell normalization
        if (e % l != 0)
            break; // not clearable: no solution
        uint32_t q = e / l;
        row_addmul(t, h, m - q, m);
    }
    bool cleared = true;
    for (size_t i = 0; i < r && cleared; ++i)
        cleared = (t[i] == 0);
    if (cleared) {
        res.solvable = true;
        res.x.resize(n);
        for (size_t j = 0; j < n; ++j)
            res.x[j] = (m - t[r + j]) % m;
        // Confirm.
        for (size_t i = 0; i < r; ++i) {
            uint64_t acc = 0;
            for (size_t j = 0; j < n; ++j)
                acc += uint64_t(A.at(i, j)) * res.x[j];
            if (acc % m != b[i] % m)
                throw soundness_error("solve_mod: verification failed");
        }
    }
    return res;
}

// ---------------------------------------------------------------------
// Smith normal form

namespace {

int64_t checked_add(int64_t a, int64_t b)
{
    int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw input_error("integer overflow in Smith reduction");
    return r;
}

int64_t checked_mul(int64_t a, int64_t b)
{
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw input_error("integer overflow in Smith reduction");
    return r;
}

} // namespace

IntMat IntMat::identity(size_t n)
{
    IntMat a(n, n);
    for (size_t i = 0; i < n; ++i)
        a.at(i, i) = 1;
    return a;
}

IntMat IntMat::mul(const IntMat &o) const
{
    if (cols != o.rows)
        throw input_error("IntMat::mul: shape mismatch");
    IntMat r(rows, o.cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t k = 0; k < cols; ++k) {
            int64_t a = at(i, k);
            if (!a)
                continue;
            for (size_t j = 0; j < o.cols; ++j)
                r.at(i, j) =
                    checked_add(r.at(i, j), checked_mul(a, o.at(k, j)));
        }
    return r;
}

SmithResult smith_form(const IntMat &A)
{
    const size_t rows = A.rows, cols = A.cols;
    SmithResult res;
    res.S = A;
    res.U = IntMat::identity(rows);
    res.V = IntMat::identity(cols);
    IntMat &S = res.S, &U = res.U, &V = res.V;

    // Row op S <- E S means U <- U E^{-1}; here E adds c*row j to row i,
    // so U's update subtracts c*col i from col j... track via explicit
    // inverse op application: U <- U * E^{-1}.
    auto row_addmul_S = [&](size_t i, size_t j, int64_t c) {
        for (size_t k = 0; k < cols; ++k)
            S.at(i, k) = checked_add(S.at(i, k), checked_mul(c, S.at(j, k)));
        for (size_t k = 0; k < rows; ++k)
            U.at(k, j) = checked_add(U.at(k, j), checked_mul(-c, U.at(k, i)));
    };
    auto col_addmul_S = [&](size_t j, size_t i, int64_t c) {
        for (size_t k = 0; k < rows; ++k)
            S.at(k, j) = checked_add(S.at(k, j), checked_mul(c, S.at(k, i)));
        for (size_t k = 0; k < cols; ++k)
            V.at(i, k) = checked_add(V.at(i, k), checked_mul(-c, V.at(j, k)));
    };
    auto row_swap = [&](size_t i, size_t j) {
        for (size_t k = 0; k < cols; ++k)
            std::swap(S.at(i, k), S.at(j, k));
        for (size_t k = 0; k < rows; ++k)
            std::swap(U.at(k, i), U.at(k, j));
    };
    auto col_swap = [&](size_t i, size_t j) {
        for (size_t k = 0; k < rows; ++k)
            std::swap(S.at(k, i), S.at(k, j));
        for (size_t k = 0; k < cols; ++k)
            std::swap(V.at(i, k), V.at(j, k));
    };
    auto row_negate = [&](size_t i) {
        for (size_t k = 0; k < cols; ++k)
            S.at(i, k) = checked_mul(S.at(i, k), -1);
        for (size_t k = 0; k < rows; ++k)
            U.at(k, i) = checked_mul(U.at(k, i), -1);
    };

    size_t t = 0;
    const size_t tmax = std::min(rows, cols);
    while (t < tmax) {
        // Find the nonzero entry of smallest magnitude in the trailing block.
        size_t pi = t, pj = t;
        int64_t best = 0;
        for (size_t i = t; i < rows; ++i)
            for (size_t j = t; j < cols; ++j) {
                int64_t v = S.at(i, j);
                if (v != 0 && (best == 0 || std::abs(v) < std::abs(best))) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0)
            break;
        row_swap(t, pi);
        col_swap(t, pj);
        if (S.at(t, t) < 0)
            row_negate(t);

        bool dirty = false;
        for (size_t i = t + 1; i < rows; ++i) {
            int64_t q = S.at(i, t) / S.at(t, t);
            if (q)
                row_addmul_S(i, t, -q);
            if (S.at(i, t))
                dirty = true;
        }
        for (size_t j = t + 1; j < cols; ++j) {
            int64_t q = S.at(t, j) / S.at(t, t);
            if (q)
                col_addmul_S(j, t, -q);
            if (S.at(t, j))
                dirty = true;
        }
        if (dirty)
            continue; // smaller remainders exist; rechoose pivot
        // Divisibility fix: pivot must divide every remaining entry.
        bool fixed = true;
        for (size_t i = t + 1; i < rows && fixed; ++i)
            for (size_t j = t + 1; j < cols && fixed; ++j)
                if (S.at(i, j) % S.at(t, t) != 0) {
                    row_addmul_S(t, i, 1);
                    fixed = false;
                }
        if (!fixed)
            continue;
        ++t;
    }

    // Verify A = U S V exactly; this is cheap at our sizes.
    if (!(U.mul(S).mul(V) == A))
        throw soundness_error("smith_form: U*S*V != A");
    return res;
}

} // namespace thetaobs::ring
