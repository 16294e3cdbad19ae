#include "biot/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace biot {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets, std::vector<int> col_indices,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    if (rows_ < 0 || cols_ < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
    if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1 || row_offsets_.front() != 0) {
        throw std::invalid_argument("SparseMatrix: row_offsets must have rows+1 entries starting at 0");
    }
    if (col_indices_.size() != values_.size() ||
        row_offsets_.back() != static_cast<int>(col_indices_.size())) {
        throw std::invalid_argument("SparseMatrix: inconsistent nnz");
    }
    for (int r = 0; r < rows_; ++r) {
        if (row_offsets_[r + 1] < row_offsets_[r]) {
            throw std::invalid_argument("SparseMatrix: row_offsets not monotone at row " + std::to_string(r));
        }
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const int c = col_indices_[k];
            if (c < 0 || c >= cols_ || (k > row_offsets_[r] && c <= col_indices_[k - 1])) {
                throw std::invalid_argument("SparseMatrix: column indices not strictly increasing in row " +
                                            std::to_string(r));
            }
            if (!std::isfinite(values_[k])) {
                throw std::invalid_argument("SparseMatrix: non-finite value in row " + std::to_string(r));
            }
        }
    }
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<int> offsets(n + 1);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 0);
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::zero(int rows, int cols) {
    return SparseMatrix(rows, cols, std::vector<int>(rows + 1, 0), {}, {});
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> entries) {
    std::vector<int> count(rows + 1, 0);
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::out_of_range("SparseMatrix::from_triplets: entry (" + std::to_string(t.row) + ", " +
                                    std::to_string(t.col) + ") outside matrix");
        }
        ++count[t.row + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());

    // Bucket by row, then sort each row by column and merge duplicates.
    std::vector<std::pair<int, double>> bucket(entries.size());
    std::vector<int> fill(count.begin(), count.end() - 1);
    for (const auto& t : entries) bucket[fill[t.row]++] = {t.col, t.value};

    std::vector<int> offsets(rows + 1, 0);
    std::vector<int> col_indices;
    std::vector<double> values;
    col_indices.reserve(entries.size());
    values.reserve(entries.size());
    for (int r = 0; r < rows; ++r) {
        auto first = bucket.begin() + count[r];
        auto last = bucket.begin() + count[r + 1];
        std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = first; it != last; ++it) {
            if (!col_indices.empty() && static_cast<int>(col_indices.size()) > offsets[r] &&
                col_indices.back() == it->first) {
                values.back() += it->second;
            } else {
                col_indices.push_back(it->first);
                values.push_back(it->second);
            }
        }
        offsets[r + 1] = static_cast<int>(col_indices.size());
    }
    return SparseMatrix(rows, cols, std::move(offsets), std::move(col_indices), std::move(values));
}

double SparseMatrix::at(int i, int j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_offsets_[i] + (it - cols.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_) {
        throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch (" + std::to_string(rows_) + "x" +
                                    std::to_string(cols_) + " times " + std::to_string(x.size()) + ")");
    }
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += values_[k] * x[col_indices_[k]];
        y[r] = s;
    }
}

void SparseMatrix::multiply_add(double alpha, std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_) {
        throw std::invalid_argument("SparseMatrix::multiply_add: dimension mismatch");
    }
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += values_[k] * x[col_indices_[k]];
        y[r] += alpha * s;
    }
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<int> offsets(cols_ + 1, 0);
    for (int c : col_indices_) ++offsets[c + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<int> fill(offsets.begin(), offsets.end() - 1);
    std::vector<int> cols(values_.size());
    std::vector<double> vals(values_.size());
    // Rows are visited in order, so each transposed row comes out sorted.
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const int dst = fill[col_indices_[k]]++;
            cols[dst] = r;
            vals[dst] = values_[k];
        }
    }
    return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
    SparseMatrix out = *this;
    for (double& v : out.values_) v *= alpha;
    return out;
}

SparseMatrix SparseMatrix::block(int r0, int r1, int c0, int c1) const {
    if (r0 < 0 || r1 > rows_ || r0 > r1 || c0 < 0 || c1 > cols_ || c0 > c1) {
        throw std::out_of_range("SparseMatrix::block: range outside matrix");
    }
    std::vector<int> offsets(r1 - r0 + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    for (int r = r0; r < r1; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const int c = col_indices_[k];
            if (c >= c0 && c < c1) {
                cols.push_back(c - c0);
                vals.push_back(values_[k]);
            }
        }
        offsets[r - r0 + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(r1 - r0, c1 - c0, std::move(offsets), std::move(cols), std::move(vals));
}

double SparseMatrix::max_asymmetry() const {
    if (rows_ != cols_) return INFINITY;
    double m = 0.0;
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            m = std::max(m, std::abs(values_[k] - at(col_indices_[k], r)));
        }
    }
    return m;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> d(static_cast<std::size_t>(rows_) * cols_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            d[static_cast<std::size_t>(r) * cols_ + col_indices_[k]] = values_[k];
        }
    }
    return d;
}

void SparseMatrix::write_triplets(std::ostream& out) const {
    out << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
    out.precision(17);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            out << r << ' ' << col_indices_[k] << ' ' << values_[k] << '\n';
        }
    }
}

Vector spmv(const SparseMatrix& m, std::span<const double> x) {
    Vector y(m.rows());
    m.multiply(x, y);
    return y;
}

SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("add: dimension mismatch");
    }
    std::vector<int> offsets(a.rows() + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(a.nnz() + b.nnz());
    vals.reserve(a.nnz() + b.nnz());
    for (int r = 0; r < a.rows(); ++r) {
        const auto ac = a.row_cols(r);
        const auto av = a.row_values(r);
        const auto bc = b.row_cols(r);
        const auto bv = b.row_values(r);
        std::size_t i = 0, j = 0;
        while (i < ac.size() || j < bc.size()) {
            if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
                cols.push_back(ac[i]);
                vals.push_back(alpha * av[i++]);
            } else if (i == ac.size() || bc[j] < ac[i]) {
                cols.push_back(bc[j]);
                vals.push_back(beta * bv[j++]);
            } else {
                cols.push_back(ac[i]);
                vals.push_back(alpha * av[i++] + beta * bv[j++]);
            }
        }
        offsets[r + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
    std::vector<int> offsets(a.rows() + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    std::vector<double> acc(b.cols(), 0.0);
    std::vector<int> marker(b.cols(), -1);
    std::vector<int> pattern;
    for (int r = 0; r < a.rows(); ++r) {
        pattern.clear();
        const auto ac = a.row_cols(r);
        const auto av = a.row_values(r);
        for (std::size_t i = 0; i < ac.size(); ++i) {
            const auto bc = b.row_cols(ac[i]);
            const auto bv = b.row_values(ac[i]);
            for (std::size_t j = 0; j < bc.size(); ++j) {
                if (marker[bc[j]] != r) {
                    marker[bc[j]] = r;
                    acc[bc[j]] = 0.0;
                    pattern.push_back(bc[j]);
                }
                acc[bc[j]] += av[i] * bv[j];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (int c : pattern) {
            cols.push_back(c);
            vals.push_back(acc[c]);
        }
        offsets[r + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(a.rows(), b.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix block_2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                       const SparseMatrix& d, int top_rows, int left_cols, int bottom_rows, int right_cols) {
    const auto check = [](const SparseMatrix& m, int rows, int cols, const char* name) {
        const bool empty = m.rows() == 0 && m.cols() == 0;
        if (!empty && (m.rows() != rows || m.cols() != cols)) {
            throw std::invalid_argument(std::string("block_2x2: block ") + name + " has inconsistent dimensions");
        }
        return !empty;
    };
    const bool has_a = check(a, top_rows, left_cols, "(0,0)");
    const bool has_b = check(b, top_rows, right_cols, "(0,1)");
    const bool has_c = check(c, bottom_rows, left_cols, "(1,0)");
    const bool has_d = check(d, bottom_rows, right_cols, "(1,1)");

    const int rows = top_rows + bottom_rows;
    const int cols_total = left_cols + right_cols;
    std::vector<int> offsets(rows + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    const auto append_row = [&](const SparseMatrix& m, bool present, int r, int col_shift) {
        if (!present) return;
        const auto mc = m.row_cols(r);
        const auto mv = m.row_values(r);
        for (std::size_t k = 0; k < mc.size(); ++k) {
            cols.push_back(mc[k] + col_shift);
            vals.push_back(mv[k]);
        }
    };
    for (int r = 0; r < top_rows; ++r) {
        append_row(a, has_a, r, 0);
        append_row(b, has_b, r, left_cols);
        offsets[r + 1] = static_cast<int>(cols.size());
    }
    for (int r = 0; r < bottom_rows; ++r) {
        append_row(c, has_c, r, 0);
        append_row(d, has_d, r, left_cols);
        offsets[top_rows + r + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(rows, cols_total, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace biot
