#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "biot/vector_ops.hpp"

namespace biot {

struct Triplet {
    int row;
    int col;
    double value;
};

/**
 * Compressed sparse row matrix. Column indices are strictly increasing within
 * each row; the constructor validates this. Immutable once built except for
 * in-place value edits through `values_mut()`.
 */
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_offsets, std::vector<int> col_indices,
                 std::vector<double> values);

    static SparseMatrix identity(int n);
    static SparseMatrix zero(int rows, int cols);
    /// Duplicate entries are summed; explicit zeros are kept.
    static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    std::span<const int> row_offsets() const { return row_offsets_; }
    std::span<const int> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values_mut() { return values_; }

    std::span<const int> row_cols(int r) const {
        return std::span<const int>(col_indices_).subspan(row_offsets_[r], row_offsets_[r + 1] - row_offsets_[r]);
    }
    std::span<const double> row_values(int r) const {
        return std::span<const double>(values_).subspan(row_offsets_[r], row_offsets_[r + 1] - row_offsets_[r]);
    }

    /// Entry (i, j), zero when not stored.
    double at(int i, int j) const;

    /// y = M x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y += alpha * M x
    void multiply_add(double alpha, std::span<const double> x, std::span<double> y) const;

    SparseMatrix transpose() const;
    SparseMatrix scaled(double alpha) const;

    /// Rows [r0, r1) and columns [c0, c1) as a new matrix.
    SparseMatrix block(int r0, int r1, int c0, int c1) const;

    /// Largest |M(i,j) - M(j,i)|.
    double max_asymmetry() const;
    double max_abs() const;

    std::vector<double> to_dense() const;

    /// "rows cols nnz" header, then zero-based "i j value" lines.
    void write_triplets(std::ostream& out) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

Vector spmv(const SparseMatrix& m, std::span<const double> x);

/// alpha * a + beta * b with the union sparsity pattern.
SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta);

/// Sparse product a * b.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/**
 * Assemble [[a, b], [c, d]] where any block may be an empty 0x0 matrix to
 * denote a zero block. Block dimensions must be consistent.
 */
SparseMatrix block_2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                       const SparseMatrix& d, int top_rows, int left_cols, int bottom_rows, int right_cols);

}  // namespace biot
