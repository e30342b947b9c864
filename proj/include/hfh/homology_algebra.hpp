#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hfh/int_matrix.hpp"

namespace hfh {

using BigInt = boost::multiprecision::cpp_int;

struct BigMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<BigInt> data;

    BigMatrix() = default;
    BigMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    static BigMatrix identity(std::size_t n);

    BigInt& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const BigInt& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const BigMatrix&) const = default;
};

BigMatrix to_big(const IntMatrix& a);
BigMatrix multiply(const BigMatrix& a, const BigMatrix& b);

/// Exact determinant by fraction-free (Bareiss) elimination.
BigInt determinant(BigMatrix a);

struct SNFResult {
    BigMatrix U;  ///< rows x rows, unimodular
    BigMatrix V;  ///< cols x cols, unimodular
    BigMatrix V_inverse;
    BigMatrix D;  ///< U A V
    std::vector<BigInt> invariant_factors;  ///< positive, each divides the next
    std::size_t rank = 0;
};

/// Smith normal form with the product U A V = D, |det U| = |det V| = 1 and the divisibility chain
/// verified before returning (NumericalError otherwise).
SNFResult smith_normal_form(const BigMatrix& a);
SNFResult smith_normal_form(const IntMatrix& a);

/// Rank over the rationals by exact Gaussian elimination.
std::size_t rational_rank(const IntMatrix& a);

/// Chain data by degree, index k + 4 for k = -4..4; d[k + 4] : C_k -> C_{k-1}.
struct GradedMatrices {
    std::array<std::size_t, 9> chain_ranks{};
    std::array<IntMatrix, 9> d;
};

struct HomologyResult {
    std::array<std::size_t, 9> chain_ranks{};  ///< c_k, index k + 4
    std::array<std::size_t, 9> betti{};        ///< h_k
    std::array<std::size_t, 9> boundary_ranks{};  ///< rank d_k
    std::array<std::vector<BigInt>, 9> torsion;   ///< invariant factors > 1 of H_k
    long long euler_chain = 0;
    long long euler_homology = 0;

    std::size_t c(int k) const { return k < -4 || k > 4 ? 0 : chain_ranks[static_cast<std::size_t>(k + 4)]; }
    std::size_t h(int k) const { return k < -4 || k > 4 ? 0 : betti[static_cast<std::size_t>(k + 4)]; }
    bool torsion_free() const;
};

/// H_k = ker d_k / im d_{k+1}. Torsion of H_k from d_{k+1} written in a basis of ker d_k.
/// Throws TheoremViolation("d-squared nonzero") when d_{k-1} d_k != 0.
HomologyResult homology_of(const GradedMatrices& complex);

struct MorseInstance {
    int item = 0;  ///< 1..4
    std::string relation;  ///< e.g. "sum h <= sum c"
    int j = 0;
    int l = 0;
    long long lhs = 0;
    long long rhs = 0;
    bool pass = false;
};

struct MorseReport {
    std::vector<MorseInstance> instances;
    bool all_pass() const;
    std::vector<MorseInstance> failures() const;
};

/// Items (1)-(4) over -3 <= j <= l <= 3; item (4) with j = -3 and l up to 4, which covers every
/// l > 3 by parity.
MorseReport verify_morse_inequalities(const HomologyResult& homology, std::size_t primary_classes);

std::string to_string(const BigInt& v);

}  // namespace hfh
