#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "thetaobs/kernels.hpp"

using namespace thetaobs;

TEST_CASE("every compiled kernel table agrees with the scalar reference")
{
    std::mt19937_64 gen(12345);
    size_t count = 0;
    const kernels::Ops *tables = kernels::available_tables(&count);
    REQUIRE(count >= 1);
    CHECK(std::string(tables[0].name) == "scalar");

    for (size_t trial = 0; trial < 200; ++trial) {
        size_t nwords = 1 + gen() % 97;
        std::vector<uint64_t> a(nwords), b(nwords);
        for (auto &w : a)
            w = gen();
        for (auto &w : b)
            w = gen();

        std::vector<uint64_t> ref = a;
        kernels::xor_rows_scalar(ref.data(), b.data(), nwords);
        uint64_t refpc = kernels::and_popcount_scalar(a.data(), b.data(),
                                                      nwords);

        for (size_t t = 0; t < count; ++t) {
            std::vector<uint64_t> x = a;
            tables[t].xor_rows(x.data(), b.data(), nwords);
            CHECK(x == ref);
            CHECK(tables[t].and_popcount(a.data(), b.data(), nwords) == refpc);
        }

        // Residue kernels.
        uint32_t m = 2 + gen() % 1000;
        uint32_t scale = gen() % m;
        size_t n = 1 + gen() % 301;
        std::vector<uint32_t> d0(n), s(n);
        for (auto &v : d0)
            v = gen() % m;
        for (auto &v : s)
            v = gen() % m;
        std::vector<uint32_t> dref = d0;
        kernels::addmul_mod_scalar(dref.data(), s.data(), scale, m, n);
        for (size_t t = 0; t < count; ++t) {
            std::vector<uint32_t> d = d0;
            tables[t].addmul_mod(d.data(), s.data(), scale, m, n);
            CHECK(d == dref);
        }
    }
}

TEST_CASE("selected table is one of the compiled tables")
{
    size_t count = 0;
    const kernels::Ops *tables = kernels::available_tables(&count);
    const kernels::Ops &sel = kernels::ops();
    bool found = false;
    for (size_t t = 0; t < count; ++t)
        found = found || (tables[t].xor_rows == sel.xor_rows);
    CHECK(found);
}
