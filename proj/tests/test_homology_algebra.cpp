#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "hfh/error.hpp"
#include "hfh/homology_algebra.hpp"
#include "oracles.hpp"

using namespace hfh;

namespace {

IntMatrix matrix(std::size_t r, std::size_t c, std::vector<std::int64_t> v)
{
    IntMatrix m(r, c);
    m.data = std::move(v);
    return m;
}

std::vector<BigInt> factors(const IntMatrix& m) { return smith_normal_form(m).invariant_factors; }

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi)
{
    std::uniform_int_distribution<int> e(lo, hi);
    IntMatrix m(r, c);
    for (auto& v : m.data) v = e(rng);
    return m;
}

// Unimodular Q as a product of elementary row operations, with its inverse.
std::pair<IntMatrix, IntMatrix> random_unimodular(std::mt19937_64& rng, std::size_t n)
{
    IntMatrix q(n, n), qi(n, n);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = qi(i, i) = 1;
    if (n < 2) return {q, qi};
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    std::uniform_int_distribution<int> f(-2, 2);
    for (int step = 0; step < 3 * static_cast<int>(n); ++step) {
        const std::size_t i = idx(rng), j = idx(rng);
        const int k = f(rng);
        if (i == j || k == 0) continue;
        IntMatrix e(n, n), ei(n, n);
        for (std::size_t t = 0; t < n; ++t) e(t, t) = ei(t, t) = 1;
        e(i, j) = k;
        ei(i, j) = -k;
        q = multiply(e, q);
        qi = multiply(qi, ei);
    }
    return {q, qi};
}

GradedMatrices three_term(std::size_t c0, std::size_t c1, std::size_t c2, IntMatrix d1, IntMatrix d2)
{
    GradedMatrices g;
    g.chain_ranks[4] = c0;
    g.chain_ranks[5] = c1;
    g.chain_ranks[6] = c2;
    g.d[4] = IntMatrix(0, c0);
    g.d[5] = std::move(d1);
    g.d[6] = std::move(d2);
    g.d[7] = IntMatrix(c2, 0);
    for (int k : {-3, -2, -1}) g.d[static_cast<std::size_t>(k + 4)] = IntMatrix(0, 0);
    g.d[8] = IntMatrix(0, 0);
    return g;
}

}  // namespace

TEST_CASE("smith normal form of small examples")
{
    CHECK(factors(matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})) == std::vector<BigInt>{1, 1, 1});
    CHECK(factors(matrix(2, 2, {2, 0, 0, 0})) == std::vector<BigInt>{2});
    CHECK(factors(matrix(2, 2, {1, 1, 1, -1})) == std::vector<BigInt>{1, 2});
    CHECK(factors(matrix(2, 2, {2, 4, 6, 8})) == std::vector<BigInt>{2, 4});
    CHECK(factors(matrix(2, 3, {0, 0, 0, 0, 0, 0})).empty());
    CHECK(factors(IntMatrix(0, 3)).empty());
    CHECK(factors(matrix(1, 1, {-7})) == std::vector<BigInt>{7});
    const auto s = smith_normal_form(matrix(2, 3, {4, 6, 8, 6, 9, 12}));
    CHECK(s.rank == 1);
    CHECK(s.invariant_factors == std::vector<BigInt>{1});
    CHECK(multiply(multiply(s.U, to_big(matrix(2, 3, {4, 6, 8, 6, 9, 12}))), s.V) == s.D);
}

TEST_CASE("smith normal form against the reduction oracle on random matrices")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        const IntMatrix a = random_matrix(rng, dim(rng), dim(rng), -9, 9);
        const SNFResult s = smith_normal_form(a);
        CHECK(multiply(multiply(s.U, to_big(a)), s.V) == s.D);
        CHECK(abs(determinant(s.U)) == 1);
        CHECK(abs(determinant(s.V)) == 1);
        CHECK(s.invariant_factors == oracle::invariant_factors(a));
        CHECK(s.rank == oracle::rank(a));
        CHECK(rational_rank(a) == s.rank);
    }
}

TEST_CASE("low-rank products keep their factors")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const IntMatrix a = multiply(random_matrix(rng, 6, 2, -3, 3), random_matrix(rng, 2, 5, -3, 3));
        const SNFResult s = smith_normal_form(a);
        CHECK(s.rank <= 2);
        CHECK(s.invariant_factors == oracle::invariant_factors(a));
    }
}

TEST_CASE("determinant by elimination")
{
    CHECK(determinant(to_big(matrix(2, 2, {1, 2, 3, 4}))) == -2);
    CHECK(determinant(to_big(matrix(3, 3, {2, 0, 1, 1, 3, 2, 1, 1, 2}))) == 6);
    CHECK(determinant(BigMatrix::identity(4)) == 1);
}

TEST_CASE("homology of simple complexes")
{
    SUBCASE("zero boundaries give homology equal to chains")
    {
        const auto h = homology_of(three_term(2, 3, 1, IntMatrix(2, 3), IntMatrix(3, 1)));
        CHECK(h.h(0) == 2);
        CHECK(h.h(1) == 3);
        CHECK(h.h(2) == 1);
        CHECK(h.torsion_free());
        CHECK(h.euler_chain == h.euler_homology);
    }
    SUBCASE("projective plane cells: Z/2 in degree one")
    {
        const auto h = homology_of(three_term(1, 1, 1, matrix(1, 1, {0}), matrix(1, 1, {2})));
        CHECK(h.h(0) == 1);
        CHECK(h.h(1) == 0);
        CHECK(h.h(2) == 0);
        CHECK_FALSE(h.torsion_free());
        CHECK(h.torsion[5] == std::vector<BigInt>{2});
    }
    SUBCASE("Klein bottle cells: Z + Z/2 in degree one")
    {
        const auto h = homology_of(three_term(1, 2, 1, matrix(1, 2, {0, 0}), matrix(2, 1, {2, 0})));
        CHECK(h.h(1) == 1);
        CHECK(h.h(2) == 0);
        CHECK(h.torsion[5] == std::vector<BigInt>{2});
    }
    SUBCASE("hollow triangle")
    {
        // Edges 01, 12, 02 with d(ij) = j - i.
        const auto h = homology_of(three_term(3, 3, 0, matrix(3, 3, {-1, 0, -1, 1, -1, 0, 0, 1, 1}), IntMatrix(3, 0)));
        CHECK(h.h(0) == 1);
        CHECK(h.h(1) == 1);
        CHECK(h.torsion_free());
    }
    SUBCASE("nonzero d squared is a theorem violation")
    {
        CHECK_THROWS_AS(homology_of(three_term(1, 1, 1, matrix(1, 1, {1}), matrix(1, 1, {1}))), TheoremViolation);
    }
}

TEST_CASE("random exact complexes: ranks and torsion match independent oracles")
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t c0 = dim(rng), c1 = dim(rng), c2 = dim(rng);
        std::uniform_int_distribution<std::size_t> split(0, c1);
        const std::size_t r = split(rng);
        // d1 = X Q^-1 with X zero on the first r columns, d2 = Q Y with Y zero below row r.
        IntMatrix x = random_matrix(rng, c0, c1, -3, 3);
        IntMatrix y = random_matrix(rng, c1, c2, -3, 3);
        for (std::size_t i = 0; i < c0; ++i) {
            for (std::size_t j = 0; j < r; ++j) x(i, j) = 0;
        }
        for (std::size_t i = r; i < c1; ++i) {
            for (std::size_t j = 0; j < c2; ++j) y(i, j) = 0;
        }
        const auto [q, qi] = random_unimodular(rng, c1);
        const IntMatrix d1 = multiply(x, qi);
        const IntMatrix d2 = multiply(q, y);
        const auto h = homology_of(three_term(c0, c1, c2, d1, d2));
        const std::size_t r1 = oracle::rank(d1), r2 = oracle::rank(d2);
        CHECK(h.boundary_ranks[5] == r1);
        CHECK(h.boundary_ranks[6] == r2);
        CHECK(h.h(0) == c0 - r1);
        CHECK(h.h(1) == c1 - r1 - r2);
        CHECK(h.h(2) == c2 - r2);
        std::vector<BigInt> expected;
        for (const auto& f : oracle::invariant_factors(d2)) {
            if (f > 1) expected.push_back(f);
        }
        CHECK(h.torsion[5] == expected);
        CHECK(h.euler_chain == h.euler_homology);
    }
}

TEST_CASE("Morse inequalities")
{
    SUBCASE("zero complex")
    {
        GradedMatrices g;
        for (auto& d : g.d) d = IntMatrix(0, 0);
        const auto h = homology_of(g);
        const auto m = verify_morse_inequalities(h, 0);
        CHECK(m.all_pass());
        CHECK_FALSE(m.instances.empty());
    }
    SUBCASE("betti numbers above chain ranks fail")
    {
        HomologyResult h;
        h.chain_ranks[5] = 1;
        h.betti[5] = 2;
        const auto m = verify_morse_inequalities(h, 1);
        CHECK_FALSE(m.all_pass());
        CHECK_FALSE(m.failures().empty());
    }
    SUBCASE("class count must match the chain ranks")
    {
        HomologyResult h;
        h.chain_ranks[5] = 2;
        h.betti[5] = 2;
        CHECK_FALSE(verify_morse_inequalities(h, 3).all_pass());
        CHECK(verify_morse_inequalities(h, 2).all_pass());
    }
    SUBCASE("standard map k=1.2")
    {
        const auto& r = testing::standard_run();
        REQUIRE(r.morse);
        CHECK(r.morse->all_pass());
        CHECK(r.homology->torsion_free());
        for (int k = -3; k <= 4; ++k) {
            CHECK(rational_rank(r.complex->d(k)) == r.homology->boundary_ranks[static_cast<std::size_t>(k + 4)]);
        }
    }
}

TEST_CASE("BigInt printing")
{
    BigInt v = 1;
    for (int i = 0; i < 30; ++i) v *= 10;
    CHECK(to_string(v) == "1" + std::string(30, '0'));
    CHECK(to_string(BigInt(-12)) == "-12");
}
