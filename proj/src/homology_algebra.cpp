#include "hfh/homology_algebra.hpp"

#include <algorithm>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "hfh/error.hpp"

namespace hfh {

using boost::multiprecision::cpp_rational;

BigMatrix BigMatrix::identity(std::size_t n)
{
    BigMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

BigMatrix to_big(const IntMatrix& a)
{
    BigMatrix m(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) m.data[i] = a.data[i];
    return m;
}

BigMatrix multiply(const BigMatrix& a, const BigMatrix& b)
{
    if (a.cols != b.rows) throw ConfigError("matrix dimensions do not match");
    BigMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += a(i, k) * b(k, j);
        }
    }
    return out;
}

BigInt determinant(BigMatrix a)
{
    if (a.rows != a.cols) throw ConfigError("determinant of a non-square matrix");
    const std::size_t n = a.rows;
    if (n == 0) return 1;
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t r = k + 1;
            while (r < n && a(r, k) == 0) ++r;
            if (r == n) return 0;
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(r, c));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

namespace {

class Reducer {
public:
    explicit Reducer(const BigMatrix& a)
        : d(a), u(BigMatrix::identity(a.rows)), v(BigMatrix::identity(a.cols)),
          v_inv(BigMatrix::identity(a.cols))
    {
    }

    void swap_rows(std::size_t i, std::size_t j)
    {
        if (i == j) return;
        for (std::size_t c = 0; c < d.cols; ++c) std::swap(d(i, c), d(j, c));
        for (std::size_t c = 0; c < u.cols; ++c) std::swap(u(i, c), u(j, c));
    }

    void swap_cols(std::size_t i, std::size_t j)
    {
        if (i == j) return;
        for (std::size_t r = 0; r < d.rows; ++r) std::swap(d(r, i), d(r, j));
        for (std::size_t r = 0; r < v.rows; ++r) std::swap(v(r, i), v(r, j));
        for (std::size_t c = 0; c < v_inv.cols; ++c) std::swap(v_inv(i, c), v_inv(j, c));
    }

    // row_dst += f * row_src
    void add_row(std::size_t dst, std::size_t src, const BigInt& f)
    {
        for (std::size_t c = 0; c < d.cols; ++c) d(dst, c) += f * d(src, c);
        for (std::size_t c = 0; c < u.cols; ++c) u(dst, c) += f * u(src, c);
    }

    // col_dst += f * col_src; the inverse subtracts f * row_dst from row_src.
    void add_col(std::size_t dst, std::size_t src, const BigInt& f)
    {
        for (std::size_t r = 0; r < d.rows; ++r) d(r, dst) += f * d(r, src);
        for (std::size_t r = 0; r < v.rows; ++r) v(r, dst) += f * v(r, src);
        for (std::size_t c = 0; c < v_inv.cols; ++c) v_inv(src, c) -= f * v_inv(dst, c);
    }

    void negate_row(std::size_t i)
    {
        for (std::size_t c = 0; c < d.cols; ++c) d(i, c) = -d(i, c);
        for (std::size_t c = 0; c < u.cols; ++c) u(i, c) = -u(i, c);
    }

    BigMatrix d, u, v, v_inv;
};

BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

}  // namespace

SNFResult smith_normal_form(const BigMatrix& a)
{
    Reducer r(a);
    BigMatrix& d = r.d;
    const std::size_t m = a.rows;
    const std::size_t n = a.cols;
    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
        // Smallest nonzero entry of the remaining block as pivot.
        std::size_t pr = m;
        std::size_t pc = n;
        for (std::size_t i = t; i < m; ++i) {
            for (std::size_t j = t; j < n; ++j) {
                if (d(i, j) != 0 && (pr == m || abs_big(d(i, j)) < abs_big(d(pr, pc)))) {
                    pr = i;
                    pc = j;
                }
            }
        }
        if (pr == m) break;
        r.swap_rows(t, pr);
        r.swap_cols(t, pc);
        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (d(i, t) == 0) continue;
                r.add_row(i, t, -(d(i, t) / d(t, t)));
                if (d(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (d(t, j) == 0) continue;
                r.add_col(j, t, -(d(t, j) / d(t, t)));
                if (d(t, j) != 0) clean = false;
            }
            if (!clean) {
                // A remainder is smaller than the pivot: move it to the pivot and repeat.
                std::size_t bi = t;
                std::size_t bj = t;
                for (std::size_t i = t + 1; i < m; ++i) {
                    if (d(i, t) != 0 && abs_big(d(i, t)) < abs_big(d(bi, bj))) {
                        bi = i;
                        bj = t;
                    }
                }
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (d(t, j) != 0 && abs_big(d(t, j)) < abs_big(d(bi, bj))) {
                        bi = t;
                        bj = j;
                    }
                }
                r.swap_rows(t, bi);
                r.swap_cols(t, bj);
                continue;
            }
            // The pivot must divide the rest of the block.
            std::size_t bad = m;
            for (std::size_t i = t + 1; i < m && bad == m; ++i) {
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (d(i, j) % d(t, t) != 0) {
                        bad = i;
                        break;
                    }
                }
            }
            if (bad == m) break;
            r.add_row(t, bad, 1);
        }
        if (d(t, t) < 0) r.negate_row(t);
    }

    SNFResult out;
    out.rank = t;
    for (std::size_t i = 0; i < t; ++i) out.invariant_factors.push_back(d(i, i));
    out.U = std::move(r.u);
    out.V = std::move(r.v);
    out.V_inverse = std::move(r.v_inv);
    out.D = std::move(r.d);

    if (!(multiply(multiply(out.U, a), out.V) == out.D)) {
        throw NumericalError("Smith normal form check failed: U A V != D");
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && out.D(i, j) != 0) throw NumericalError("Smith normal form not diagonal");
        }
    }
    if (abs_big(determinant(out.U)) != 1 || abs_big(determinant(out.V)) != 1) {
        throw NumericalError("Smith normal form transform not unimodular");
    }
    if (!(multiply(out.V, out.V_inverse) == BigMatrix::identity(n))) {
        throw NumericalError("Smith normal form inverse transform check failed");
    }
    for (std::size_t i = 0; i + 1 < out.invariant_factors.size(); ++i) {
        if (out.invariant_factors[i + 1] % out.invariant_factors[i] != 0) {
            throw NumericalError("invariant factors do not form a divisibility chain");
        }
    }
    return out;
}

SNFResult smith_normal_form(const IntMatrix& a) { return smith_normal_form(to_big(a)); }

std::size_t rational_rank(const IntMatrix& a)
{
    std::vector<std::vector<cpp_rational>> m(a.rows, std::vector<cpp_rational>(a.cols));
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) m[i][j] = a(i, j);
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < a.cols && rank < a.rows; ++c) {
        std::size_t p = rank;
        while (p < a.rows && m[p][c] == 0) ++p;
        if (p == a.rows) continue;
        std::swap(m[p], m[rank]);
        for (std::size_t i = rank + 1; i < a.rows; ++i) {
            if (m[i][c] == 0) continue;
            const cpp_rational f = m[i][c] / m[rank][c];
            for (std::size_t j = c; j < a.cols; ++j) m[i][j] -= f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

bool HomologyResult::torsion_free() const
{
    return std::all_of(torsion.begin(), torsion.end(), [](const auto& t) { return t.empty(); });
}

HomologyResult homology_of(const GradedMatrices& complex)
{
    HomologyResult h;
    h.chain_ranks = complex.chain_ranks;
    auto c = [&](int k) { return k < -4 || k > 4 ? std::size_t{0} : complex.chain_ranks[static_cast<std::size_t>(k + 4)]; };
    for (int k = -4; k <= 4; ++k) {
        const IntMatrix& d = complex.d[static_cast<std::size_t>(k + 4)];
        const bool empty_ok = d.data.empty() && (c(k) == 0 || c(k - 1) == 0);
        if (!empty_ok && (d.rows != c(k - 1) || d.cols != c(k))) {
            throw ConfigError("boundary map in degree " + std::to_string(k) + " has wrong shape");
        }
    }
    auto d_of = [&](int k) {
        const IntMatrix& d = complex.d[static_cast<std::size_t>(k + 4)];
        return d.data.empty() ? IntMatrix(c(k - 1), c(k)) : d;
    };
    for (int k = -3; k <= 4; ++k) {
        if (!multiply(d_of(k - 1), d_of(k)).is_zero()) {
            throw TheoremViolation("d-squared nonzero in degree " + std::to_string(k));
        }
    }

    std::array<SNFResult, 9> snf;
    for (int k = -4; k <= 4; ++k) {
        auto& s = snf[static_cast<std::size_t>(k + 4)];
        s = smith_normal_form(d_of(k));
        h.boundary_ranks[static_cast<std::size_t>(k + 4)] = s.rank;
    }
    auto rank_d = [&](int k) {
        return k < -4 || k > 4 ? std::size_t{0} : h.boundary_ranks[static_cast<std::size_t>(k + 4)];
    };

    for (int k = -4; k <= 4; ++k) {
        const auto idx = static_cast<std::size_t>(k + 4);
        const std::size_t r_k = rank_d(k);
        const std::size_t r_next = rank_d(k + 1);
        if (r_k + r_next > c(k)) throw NumericalError("boundary ranks exceed the chain rank");
        h.betti[idx] = c(k) - r_k - r_next;
        if (k == 4 || c(k) == 0) continue;
        // Image of d_{k+1} in the kernel basis given by the last columns of V_k.
        const BigMatrix image = multiply(snf[idx].V_inverse, to_big(d_of(k + 1)));
        BigMatrix restricted(c(k) - r_k, image.cols);
        for (std::size_t i = 0; i < image.rows; ++i) {
            for (std::size_t j = 0; j < image.cols; ++j) {
                if (i < r_k) {
                    if (image(i, j) != 0) throw NumericalError("image of d not inside ker d");
                } else {
                    restricted(i - r_k, j) = image(i, j);
                }
            }
        }
        const SNFResult pres = smith_normal_form(restricted);
        if (pres.rank != r_next) throw NumericalError("presentation rank mismatch");
        for (const auto& f : pres.invariant_factors) {
            if (f > 1) h.torsion[idx].push_back(f);
        }
    }
    for (int k = -4; k <= 4; ++k) {
        const long long sign = (k % 2 == 0) ? 1 : -1;
        h.euler_chain += sign * static_cast<long long>(c(k));
        h.euler_homology += sign * static_cast<long long>(h.h(k));
    }
    return h;
}

bool MorseReport::all_pass() const
{
    return std::all_of(instances.begin(), instances.end(), [](const auto& i) { return i.pass; });
}

std::vector<MorseInstance> MorseReport::failures() const
{
    std::vector<MorseInstance> out;
    for (const auto& i : instances) {
        if (!i.pass) out.push_back(i);
    }
    return out;
}

MorseReport verify_morse_inequalities(const HomologyResult& homology, std::size_t primary_classes)
{
    MorseReport report;
    auto add = [&](int item, const char* relation, int j, int l, long long lhs, long long rhs,
                   bool equality) {
        report.instances.push_back(
            {item, relation, j, l, lhs, rhs, equality ? lhs == rhs : lhs <= rhs});
    };
    auto ci = [&](int k) { return static_cast<long long>(homology.c(k)); };
    auto hi = [&](int k) { return static_cast<long long>(homology.h(k)); };
    const auto total = static_cast<long long>(primary_classes);

    for (int k = -3; k <= 3; ++k) add(1, "h <= c", k, k, hi(k), ci(k), false);

    long long sum_c = 0;
    for (int k = -3; k <= 3; ++k) sum_c += ci(k);
    add(2, "sum c = primary classes", -3, 3, sum_c, total, true);

    for (int j = -3; j <= 3; ++j) {
        for (int l = j; l <= 3; ++l) {
            long long sh = 0;
            long long sc = 0;
            for (int i = j; i <= l; ++i) {
                sh += hi(i);
                sc += ci(i);
            }
            add(3, "sum h <= sum c", j, l, sh, sc, false);
            add(3, "sum c <= primary classes", j, l, sc, total, false);
        }
    }

    // Beyond degree 3 only the parity of l matters.
    for (int l = -3; l <= 5; ++l) {
        long long ah = 0;
        long long ac = 0;
        for (int i = -3; i <= l; ++i) {
            const long long sign = ((l - i) % 2 == 0) ? 1 : -1;
            ah += sign * hi(i);
            ac += sign * ci(i);
        }
        add(4, "alternating sum h <= alternating sum c", -3, l, ah, ac, false);
    }
    return report;
}

std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace hfh
