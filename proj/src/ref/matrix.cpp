// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/ref/matrix.hpp"

#include <string>

#include "aaq/core/error.hpp"

namespace aaq::ref {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ContractError("matrix data size does not match its shape");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul_ref(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ContractError("matmul shape mismatch: (" + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            ") * (" + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

}  // namespace aaq::ref
