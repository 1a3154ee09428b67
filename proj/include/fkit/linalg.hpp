/** @file linalg.hpp
 *  @brief Small dense exact linear algebra over a field (Gaussian elimination).
 */
#ifndef FKIT_LINALG_HPP
#define FKIT_LINALG_HPP

#include <optional>
#include <vector>

#include "fkit/field.hpp"

namespace fkit {

using Mat = std::vector<std::vector<FieldElement>>;

inline Mat mat_identity(FieldSpec s, std::size_t n) {
    Mat m(n, std::vector<FieldElement>(n, FieldElement::zero(s)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = FieldElement::one(s);
    return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    FieldSpec s = a[0][0].spec();
    Mat r(n, std::vector<FieldElement>(m, FieldElement::zero(s)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (std::size_t j = 0; j < m; ++j) r[i][j] = r[i][j] + a[i][l] * b[l][j];
        }
    return r;
}

inline FieldElement mat_trace(const Mat& a) {
    FieldElement t = FieldElement::zero(a[0][0].spec());
    for (std::size_t i = 0; i < a.size(); ++i) t = t + a[i][i];
    return t;
}

// row-reduces [A | B] in place; returns false if A is singular
inline bool eliminate(Mat& A, Mat& B) {
    std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A[piv][col].is_zero()) ++piv;
        if (piv == n) return false;
        std::swap(A[piv], A[col]);
        std::swap(B[piv], B[col]);
        FieldElement inv = A[col][col].inv();
        for (auto& x : A[col]) x = x * inv;
        for (auto& x : B[col]) x = x * inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            FieldElement f = A[r][col];
            for (std::size_t j = 0; j < n; ++j) A[r][j] = A[r][j] - f * A[col][j];
            for (std::size_t j = 0; j < B[r].size(); ++j) B[r][j] = B[r][j] - f * B[col][j];
        }
    }
    return true;
}

inline std::optional<Mat> mat_inverse(Mat a) {
    if (a.empty()) return Mat{};
    Mat b = mat_identity(a[0][0].spec(), a.size());
    if (!eliminate(a, b)) return std::nullopt;
    return b;
}

inline std::optional<std::vector<FieldElement>> mat_solve(Mat a, std::vector<FieldElement> rhs) {
    Mat b(rhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) b[i] = {rhs[i]};
    if (!eliminate(a, b)) return std::nullopt;
    std::vector<FieldElement> x;
    x.reserve(rhs.size());
    for (auto& row : b) x.push_back(row[0]);
    return x;
}

} // namespace fkit

#endif
