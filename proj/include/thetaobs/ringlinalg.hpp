#pragma once

// Exact linear algebra over Z/m (composite m allowed) and over Z:
// Howell canonical forms, linear solving with kernel bases, Smith normal
// form.  The F2 case is bit-packed and backed by the SIMD kernels.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thetaobs/error.hpp"

namespace thetaobs::ring {

// ---------------------------------------------------------------------
// Dense matrix over Z/m, row-major, entries reduced to [0, m).
// m must fit in 31 bits so that entry products fit in uint64.

class ResMatrix {
  public:
    ResMatrix() = default;
    ResMatrix(size_t rows, size_t cols, uint32_t modulus);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    uint32_t modulus() const { return m_; }

    uint32_t at(size_t r, size_t c) const { return e_[r * cols_ + c]; }
    void set(size_t r, size_t c, uint64_t v) { e_[r * cols_ + c] = v % m_; }

    const std::vector<uint32_t> &entries() const { return e_; }
    uint32_t *row_ptr(size_t r) { return e_.data() + r * cols_; }
    const uint32_t *row_ptr(size_t r) const { return e_.data() + r * cols_; }

    static ResMatrix identity(size_t n, uint32_t m);
    ResMatrix mul(const ResMatrix &other) const;
    ResMatrix transpose() const;
    bool operator==(const ResMatrix &other) const = default;

    // "rows cols modulus" header line, then one line per row.
    std::string to_text() const;
    static ResMatrix from_text(std::istream &in);
    static ResMatrix from_text(const std::string &text);

  private:
    size_t rows_ = 0, cols_ = 0;
    uint32_t m_ = 2;
    std::vector<uint32_t> e_;
};

// ---------------------------------------------------------------------
// Bit-packed matrix over F2.  Semantically ResMatrix with m=2.

class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t words_per_row() const { return wpr_; }

    bool get(size_t r, size_t c) const
    {
        return (w_[r * wpr_ + c / 64] >> (c % 64)) & 1;
    }
    void set(size_t r, size_t c, bool v)
    {
        uint64_t mask = uint64_t(1) << (c % 64);
        if (v)
            w_[r * wpr_ + c / 64] |= mask;
        else
            w_[r * wpr_ + c / 64] &= ~mask;
    }

    uint64_t *row_ptr(size_t r) { return w_.data() + r * wpr_; }
    const uint64_t *row_ptr(size_t r) const { return w_.data() + r * wpr_; }

    void xor_row(size_t dst, size_t src); // row[dst] ^= row[src]
    bool row_is_zero(size_t r) const;

    static BitMatrix from_res(const ResMatrix &a);
    ResMatrix to_res() const;
    bool operator==(const BitMatrix &other) const = default;

  private:
    size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<uint64_t> w_;
};

// Incremental Gaussian elimination over F2 with a right-hand-side bit.
// Feed equations one at a time; inconsistency is detected on arrival.
class F2Solver {
  public:
    explicit F2Solver(size_t ncols);

    // Adds lhs . x = rhs. Returns false iff this equation is inconsistent
    // with the ones already present (a reduced row 0 = 1).
    bool add_equation(const std::vector<uint64_t> &lhs, bool rhs);
    bool add_equation_bits(const std::vector<size_t> &ones, bool rhs);

    bool consistent() const { return consistent_; }
    size_t rank() const { return rank_; }

    // Particular solution with free variables set to 0.
    std::vector<uint8_t> solution() const;
    // Basis of the homogeneous kernel.
    std::vector<std::vector<uint8_t>> kernel() const;

    size_t ncols() const { return n_; }

  private:
    size_t n_, wpr_;
    size_t rank_ = 0;
    bool consistent_ = true;
    std::vector<std::vector<uint64_t>> rows_; // reduced echelon rows
    std::vector<uint8_t> rhs_;
    std::vector<int64_t> pivot_of_col_; // col -> row index or -1
};

// ---------------------------------------------------------------------
// Howell form machinery over Z/m.

// Canonical Howell basis of the span of the given vectors in (Z/m)^len.
// Two vector lists span the same submodule iff the outputs are identical.
std::vector<std::vector<uint32_t>>
howell_span(const std::vector<std::vector<uint32_t>> &vectors, size_t len,
            uint32_t m);

struct SolveResult {
    bool solvable = false;
    std::vector<uint32_t> x; // one solution, if solvable
    std::vector<std::vector<uint32_t>> kernel; // Howell basis of ker(A)
};

// Solve A x = b over Z/m.  The kernel basis is returned in every case.
SolveResult solve_mod(const ResMatrix &A, const std::vector<uint32_t> &b);

// u * g = gcd(g, m) mod m for a unit u; used by the Howell reduction.
uint32_t unit_multiplier(uint32_t g, uint32_t m);

// ---------------------------------------------------------------------
// Smith normal form over Z with checked 64-bit arithmetic.

struct IntMat {
    size_t rows = 0, cols = 0;
    std::vector<int64_t> e;
    IntMat() = default;
    IntMat(size_t r, size_t c) : rows(r), cols(c), e(r * c, 0) {}
    int64_t &at(size_t r, size_t c) { return e[r * cols + c]; }
    int64_t at(size_t r, size_t c) const { return e[r * cols + c]; }
    static IntMat identity(size_t n);
    IntMat mul(const IntMat &o) const; // checked
    bool operator==(const IntMat &o) const = default;
};

struct SmithResult {
    IntMat U, S, V; // A = U * S * V, S diagonal with s1 | s2 | ...
};

// Throws input_error on overflow during the reduction.
SmithResult smith_form(const IntMat &A);

} // namespace thetaobs::ring
