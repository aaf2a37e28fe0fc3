#pragma once

// Cyclic Jacobi eigensolver for small symmetric matrices (3x3 and 4x4).
// Sweeps until the off-diagonal Frobenius mass drops below 1e-14, capped at
// 50 sweeps. Returns eigenvalues in descending order with matching column
// eigenvectors. Shared by the voting and solver modules.

#include <array>
#include <cmath>
#include <numeric>

namespace ticp {

template <int N>
struct JacobiResult {
    std::array<double, N> eigenvalues{};                  // descending
    std::array<std::array<double, N>, N> eigenvectors{};  // eigenvectors[k] pairs with eigenvalues[k]
};

template <int N>
JacobiResult<N> jacobi_symmetric(std::array<std::array<double, N>, N> A) {
    std::array<std::array<double, N>, N> V{};
    for (int i = 0; i < N; ++i) V[i][i] = 1.0;  // V[i][k]: component i of eigenvector k

    constexpr double kOffTol = 1e-14;
    constexpr int kMaxSweeps = 50;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) off += 2.0 * A[p][q] * A[p][q];
        if (std::sqrt(off) < kOffTol) break;

        for (int p = 0; p < N; ++p) {
            for (int q = p + 1; q < N; ++q) {
                double apq = A[p][q];
                if (apq == 0.0) continue;
                double theta = (A[q][q] - A[p][p]) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (int k = 0; k < N; ++k) {
                    double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < N; ++k) {
                    double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < N; ++k) {
                    double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - s * vkq;
                    V[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    JacobiResult<N> out;
    std::array<int, N> order{};
    std::iota(order.begin(), order.end(), 0);
    // insertion sort by descending eigenvalue; stable so exact ties keep
    // the sweep's column order
    for (int i = 1; i < N; ++i) {
        int key = order[i];
        int j = i - 1;
        while (j >= 0 && A[order[j]][order[j]] < A[key][key]) {
            order[j + 1] = order[j];
            --j;
        }
        order[j + 1] = key;
    }
    for (int k = 0; k < N; ++k) {
        int c = order[k];
        out.eigenvalues[k] = A[c][c];
        for (int i = 0; i < N; ++i) out.eigenvectors[k][i] = V[i][c];
    }
    return out;
}

}  // namespace ticp
