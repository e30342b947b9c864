#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hfh {

/// Dense row-major integer matrix; zero-sized dimensions are allowed.
struct IntMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> data;

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    std::int64_t& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool is_zero() const
    {
        for (auto v : data) {
            if (v != 0) return false;
        }
        return true;
    }
};

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b)
{
    IntMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const auto v = a(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += v * b(k, j);
        }
    }
    return out;
}

}  // namespace hfh
