#include "thetaobs/symmod.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace thetaobs::symmod {

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

uint64_t lcm_u(uint64_t a, uint64_t b) { return a / gcd_u(a, b) * b; }

int64_t xgcd_i(int64_t a, int64_t b, int64_t &x, int64_t &y)
{
    if (!b) {
        x = 1;
        y = 0;
        return a;
    }
    int64_t x1, y1;
    int64_t g = xgcd_i(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

uint64_t inv_mod(uint64_t a, uint64_t m)
{
    int64_t s, t;
    int64_t g = xgcd_i(int64_t(a % m), int64_t(m), s, t);
    if (g != 1)
        throw soundness_error("inv_mod: not a unit");
    return uint64_t((s % int64_t(m) + int64_t(m)) % int64_t(m));
}

} // namespace

// ---------------------------------------------------------------------
// TypeD

uint64_t TypeD::card() const
{
    uint64_t p = 1;
    for (uint32_t d : divisors)
        p *= d;
    return p;
}

uint32_t TypeD::scalar_modulus() const
{
    uint32_t dg = divisors.back();
    return (dg % 2 == 1) ? dg : 2 * dg;
}

void TypeD::validate() const
{
    if (divisors.empty())
        throw input_error("TypeD: empty divisor sequence");
    for (size_t i = 0; i < divisors.size(); ++i) {
        if (divisors[i] < 2)
            throw input_error("TypeD: divisors must be >= 2");
        if (i && divisors[i] % divisors[i - 1] != 0)
            throw input_error("TypeD: divisibility chain violated");
    }
}

std::string TypeD::to_string() const
{
    std::string s;
    for (size_t i = 0; i < divisors.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(divisors[i]);
    }
    return s;
}

TypeD TypeD::parse(const std::string &text)
{
    TypeD d;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (part.empty())
            continue;
        d.divisors.push_back(
            static_cast<uint32_t>(std::stoul(part)));
    }
    d.validate();
    return d;
}

// ---------------------------------------------------------------------
// SymplecticModule

uint64_t SymplecticModule::order() const
{
    uint64_t p = 1;
    for (uint32_t m : moduli)
        p *= m;
    return p;
}

uint32_t SymplecticModule::pair(const Vec &a, const Vec &b) const
{
    if (a.size() != rank() || b.size() != rank())
        throw input_error("pair: element length mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < rank(); ++i) {
        if (!a[i])
            continue;
        for (size_t j = 0; j < rank(); ++j) {
            uint32_t g = gram.at(i, j);
            if (b[j] && g)
                acc += uint64_t(a[i]) * b[j] % scalar_mod * g % scalar_mod;
        }
    }
    return static_cast<uint32_t>(acc % scalar_mod);
}

Vec SymplecticModule::add(const Vec &a, const Vec &b) const
{
    Vec r(rank());
    for (size_t i = 0; i < rank(); ++i)
        r[i] = (a[i] + b[i]) % moduli[i];
    return r;
}

Vec SymplecticModule::neg(const Vec &a) const
{
    Vec r(rank());
    for (size_t i = 0; i < rank(); ++i)
        r[i] = (moduli[i] - a[i]) % moduli[i];
    return r;
}

Vec SymplecticModule::scale(const Vec &a, uint64_t c) const
{
    Vec r(rank());
    for (size_t i = 0; i < rank(); ++i)
        r[i] = static_cast<uint32_t>(uint64_t(a[i]) * (c % moduli[i]) %
                                     moduli[i]);
    return r;
}

uint64_t SymplecticModule::elem_order(const Vec &a) const
{
    uint64_t o = 1;
    for (size_t i = 0; i < rank(); ++i)
        o = lcm_u(o, moduli[i] / gcd_u(a[i], moduli[i]));
    return o;
}

std::vector<Vec> SymplecticModule::elements(uint64_t cap) const
{
    if (order() > cap)
        throw capacity_error("SymplecticModule: element enumeration over cap");
    std::vector<Vec> out;
    out.reserve(order());
    Vec cur = zero();
    while (true) {
        out.push_back(cur);
        size_t d = rank();
        for (size_t i = 0; i < rank(); ++i) {
            if (++cur[i] < moduli[i]) {
                d = i;
                break;
            }
            cur[i] = 0;
        }
        if (d == rank())
            break;
    }
    return out;
}

void SymplecticModule::validate() const
{
    if (gram.rows() != rank() || gram.cols() != rank() ||
        gram.modulus() != scalar_mod)
        throw input_error("SymplecticModule: Gram shape/modulus mismatch");
    for (uint32_t m : moduli)
        if (m < 1)
            throw input_error("SymplecticModule: modulus < 1");
    for (size_t i = 0; i < rank(); ++i) {
        if (gram.at(i, i) != 0)
            throw input_error("SymplecticModule: pairing not alternating");
        for (size_t j = 0; j < rank(); ++j) {
            uint32_t v = gram.at(i, j);
            if ((v + gram.at(j, i)) % scalar_mod != 0)
                throw input_error("SymplecticModule: Gram not antisymmetric");
            if (uint64_t(v) * moduli[i] % scalar_mod != 0 ||
                uint64_t(v) * moduli[j] % scalar_mod != 0)
                throw input_error(
                    "SymplecticModule: pairing not well defined");
        }
    }
}

std::string SymplecticModule::to_text() const
{
    std::ostringstream out;
    out << (type ? type->to_string() : std::string("-")) << '\n';
    for (size_t i = 0; i < rank(); ++i) {
        if (i)
            out << ' ';
        out << moduli[i];
    }
    out << '\n' << gram.to_text();
    return out.str();
}

SymplecticModule SymplecticModule::from_text(const std::string &text)
{
    std::istringstream in(text);
    std::string typeline;
    if (!std::getline(in, typeline))
        throw input_error("SymplecticModule::from_text: missing type line");
    std::string modline;
    if (!std::getline(in, modline))
        throw input_error("SymplecticModule::from_text: missing moduli line");
    SymplecticModule M;
    {
        std::istringstream ms(modline);
        uint32_t m;
        while (ms >> m)
            M.moduli.push_back(m);
    }
    M.gram = ring::ResMatrix::from_text(in);
    M.scalar_mod = M.gram.modulus();
    if (typeline != "-")
        M.type = TypeD::parse(typeline);
    M.validate();
    return M;
}

SymplecticModule standard_module(const TypeD &D)
{
    D.validate();
    const size_t g = D.g();
    const uint32_t n = D.scalar_modulus();
    SymplecticModule M;
    M.scalar_mod = n;
    M.moduli.resize(2 * g);
    for (size_t i = 0; i < g; ++i)
        M.moduli[i] = M.moduli[g + i] = D.divisors[i];
    M.gram = ring::ResMatrix(2 * g, 2 * g, n);
    for (size_t i = 0; i < g; ++i) {
        uint32_t v = n / D.divisors[i];
        M.gram.set(i, g + i, v);
        M.gram.set(g + i, i, n - v);
    }
    M.type = D;
    M.validate();
    return M;
}

// ---------------------------------------------------------------------
// classify

namespace {

std::string vec_str(const Vec &v)
{
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(v[i]);
    }
    return s + ")";
}

} // namespace

Classification classify(const SymplecticModule &M)
{
    M.validate();
    const uint32_t N = M.scalar_mod;

    // Work on explicit element sets; every module in scope is small.
    std::vector<Vec> S = M.elements();
    std::sort(S.begin(), S.end());

    Classification out;
    std::vector<uint32_t> ds; // decreasing orders, reversed at the end
    std::vector<Vec> es, fs;

    while (S.size() > 1) {
        // m of maximal order, ties by lexicographic order (S is sorted).
        Vec m = S[0];
        uint64_t dmax = 1;
        for (const auto &a : S) {
            uint64_t o = M.elem_order(a);
            if (o > dmax) {
                dmax = o;
                m = a;
            }
        }
        if (dmax == 1)
            break; // S = {0}
        // Partner with pairing of maximal order.
        Vec mp = S[0];
        uint64_t omax = 1;
        for (const auto &a : S) {
            uint32_t v = M.pair(m, a);
            uint64_t o = N / gcd_u(v, N);
            if (o > omax) {
                omax = o;
                mp = a;
            }
        }
        if (omax != dmax) {
            // e(m, .) has order omax < ord(m), so omax*m is a nonzero
            // element pairing to zero with everything: a radical element.
            Vec rad = M.scale(m, omax);
            throw input_error(
                "classify: degenerate pairing, radical element " +
                vec_str(rad));
        }
        const uint64_t d = dmax;
        const uint32_t step = static_cast<uint32_t>(N / d);
        // Normalize so e(m, mp) = N/d exactly.
        uint32_t v = M.pair(m, mp);
        uint32_t w = v / step; // unit mod d
        if (v % step != 0)
            throw soundness_error("classify: pairing value not in (N/d)Z");
        mp = M.scale(mp, inv_mod(w % d, d));
        if (M.pair(m, mp) != step)
            throw soundness_error("classify: normalization failed");

        es.push_back(m);
        fs.push_back(mp);
        ds.push_back(static_cast<uint32_t>(d));

        // Orthogonal complement of the hyperbolic plane <m, mp>.
        std::vector<Vec> C;
        C.reserve(S.size() / (d * d));
        for (const auto &a : S) {
            uint32_t pm = M.pair(a, m), pmp = M.pair(a, mp);
            if (pm % step != 0 || pmp % step != 0)
                throw soundness_error("classify: projection not divisible");
            // a' = a - e(a,mp)/step * m + e(a,m)/step * mp  kills both
            // pairings (e(m,mp) = step, e(mp,m) = -step).
            uint64_t lambda = pmp / step;
            uint64_t mu = (pm / step) % d;
            Vec ap = M.add(a, M.add(M.scale(m, (d - lambda % d) % d),
                                    M.scale(mp, mu)));
            if (M.pair(ap, m) != 0 || M.pair(ap, mp) != 0)
                throw soundness_error("classify: projection failed");
            C.push_back(ap);
        }
        std::sort(C.begin(), C.end());
        C.erase(std::unique(C.begin(), C.end()), C.end());
        if (C.size() * d * d != S.size())
            throw soundness_error("classify: complement size mismatch");
        S = std::move(C);
    }

    if (es.empty())
        throw input_error("classify: trivial module has no type (d1 >= 2)");

    // Reverse to the increasing divisibility convention.
    std::reverse(ds.begin(), ds.end());
    std::reverse(es.begin(), es.end());
    std::reverse(fs.begin(), fs.end());
    for (size_t i = 0; i + 1 < ds.size(); ++i)
        if (ds[i + 1] % ds[i] != 0)
            throw soundness_error("classify: divisibility chain violated");
    out.type.divisors = ds;
    out.type.validate();
    out.e = std::move(es);
    out.f = std::move(fs);

    // Gram exactness on the recovered basis.
    const size_t g = out.type.g();
    for (size_t i = 0; i < g; ++i)
        for (size_t j = 0; j < g; ++j) {
            uint32_t expected =
                (i == j) ? static_cast<uint32_t>(N / out.type.divisors[i]) : 0;
            if (M.pair(out.e[i], out.f[j]) != expected ||
                M.pair(out.e[i], out.e[j]) != 0 ||
                M.pair(out.f[i], out.f[j]) != 0)
                throw soundness_error("classify: basis Gram check failed");
        }
    return out;
}

SymplecticModule direct_sum(const SymplecticModule &a,
                            const SymplecticModule &b)
{
    a.validate();
    b.validate();
    SymplecticModule M;
    M.scalar_mod = static_cast<uint32_t>(lcm_u(a.scalar_mod, b.scalar_mod));
    M.moduli = a.moduli;
    M.moduli.insert(M.moduli.end(), b.moduli.begin(), b.moduli.end());
    const size_t ra = a.rank(), rb = b.rank();
    const uint32_t sa = M.scalar_mod / a.scalar_mod;
    const uint32_t sb = M.scalar_mod / b.scalar_mod;
    M.gram = ring::ResMatrix(ra + rb, ra + rb, M.scalar_mod);
    for (size_t i = 0; i < ra; ++i)
        for (size_t j = 0; j < ra; ++j)
            M.gram.set(i, j, uint64_t(a.gram.at(i, j)) * sa);
    for (size_t i = 0; i < rb; ++i)
        for (size_t j = 0; j < rb; ++j)
            M.gram.set(ra + i, ra + j, uint64_t(b.gram.at(i, j)) * sb);
    M.validate();
    return M;
}

std::map<uint32_t, SymplecticModule> prime_parts(const SymplecticModule &M)
{
    M.validate();
    // Primes dividing the group order.
    std::vector<uint32_t> primes;
    for (uint32_t m : M.moduli) {
        uint32_t x = m;
        for (uint32_t p = 2; p * p <= x; ++p)
            if (x % p == 0) {
                primes.push_back(p);
                while (x % p == 0)
                    x /= p;
            }
        if (x > 1)
            primes.push_back(x);
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    std::map<uint32_t, SymplecticModule> parts;
    for (uint32_t p : primes) {
        SymplecticModule P;
        std::vector<size_t> idx;        // ambient index per new generator
        std::vector<uint32_t> cofactor; // m_i / p^{v_i}
        for (size_t i = 0; i < M.rank(); ++i) {
            uint32_t m = M.moduli[i], q = 1;
            while (m % p == 0) {
                m /= p;
                q *= p;
            }
            if (q > 1) {
                idx.push_back(i);
                cofactor.push_back(m);
                P.moduli.push_back(q);
            }
        }
        if (P.moduli.empty())
            continue;
        // Scalar modulus of the part: the p-power part of N.
        uint32_t Np = 1, rest = M.scalar_mod;
        while (rest % p == 0) {
            rest /= p;
            Np *= p;
        }
        P.scalar_mod = Np;
        P.gram = ring::ResMatrix(P.rank(), P.rank(), Np);
        for (size_t i = 0; i < P.rank(); ++i)
            for (size_t j = 0; j < P.rank(); ++j) {
                // e(c_i g_i, c_j g_j), a p-power-torsion value in Z/N,
                // re-expressed as an exponent mod Np.
                uint64_t v = uint64_t(cofactor[i]) * cofactor[j] %
                             M.scalar_mod * M.gram.at(idx[i], idx[j]) %
                             M.scalar_mod;
                if (v % rest != 0)
                    throw soundness_error(
                        "prime_parts: value not p-primary");
                P.gram.set(i, j, v / rest);
            }
        P.validate();
        parts.emplace(p, std::move(P));
    }
    return parts;
}

} // namespace thetaobs::symmod
