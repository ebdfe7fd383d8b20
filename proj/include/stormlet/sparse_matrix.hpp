#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stormlet/errors.hpp"
#include "stormlet/number.hpp"

namespace stormlet {

using index_t = std::size_t;

template <typename N>
struct Triplet {
  index_t row;
  index_t column;
  N value;
};

/// Compressed row storage. Row r owns entries [row_offsets[r], row_offsets[r+1]);
/// columns within a row are strictly ascending and values are non-zero.
template <typename N>
class SparseMatrix {
 public:
  using value_type = N;

  class RowView {
   public:
    RowView(std::span<const index_t> columns, std::span<const N> values)
        : columns_(columns), values_(values) {}

    std::size_t size() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return columns_.empty(); }
    index_t column(std::size_t i) const { return columns_[i]; }
    const N& value(std::size_t i) const { return values_[i]; }
    std::span<const index_t> columns() const noexcept { return columns_; }
    std::span<const N> values() const noexcept { return values_; }

    /// Entry for `column`, or nullptr.
    const N* find(index_t column) const {
      auto it = std::lower_bound(columns_.begin(), columns_.end(), column);
      if (it == columns_.end() || *it != column) return nullptr;
      return &values_[static_cast<std::size_t>(it - columns_.begin())];
    }

    N sum() const {
      N total = number_traits<N>::zero();
      for (const N& v : values_) total = total + v;
      return total;
    }

   private:
    std::span<const index_t> columns_;
    std::span<const N> values_;
  };

  SparseMatrix() : row_offsets_{0} {}

  /// Takes ownership of already-canonical CSR arrays; checks the layout.
  SparseMatrix(std::size_t columns, std::vector<std::size_t> row_offsets,
               std::vector<index_t> column_indices, std::vector<N> values)
      : columns_(columns),
        row_offsets_(std::move(row_offsets)),
        column_indices_(std::move(column_indices)),
        values_(std::move(values)) {
    check_layout();
  }

  std::size_t rows() const noexcept { return row_offsets_.size() - 1; }
  std::size_t columns() const noexcept { return columns_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  RowView row(index_t r) const {
    const std::size_t begin = row_offsets_[r];
    const std::size_t len = row_offsets_[r + 1] - begin;
    return RowView(std::span<const index_t>(column_indices_).subspan(begin, len),
                   std::span<const N>(values_).subspan(begin, len));
  }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<index_t>& column_indices() const noexcept { return column_indices_; }
  const std::vector<N>& values() const noexcept { return values_; }

  /// Entry at (r, c), zero when absent.
  N at(index_t r, index_t c) const {
    const N* v = row(r).find(c);
    return v ? *v : number_traits<N>::zero();
  }

  /// Element-wise conversion into another number domain; entries mapped to
  /// zero are dropped.
  template <typename M, typename F>
  SparseMatrix<M> map(F&& f) const {
    std::vector<std::size_t> offsets{0};
    std::vector<index_t> cols;
    std::vector<M> vals;
    offsets.reserve(row_offsets_.size());
    for (index_t r = 0; r < rows(); ++r) {
      auto view = row(r);
      for (std::size_t i = 0; i < view.size(); ++i) {
        M v = f(view.value(i));
        if (number_traits<M>::is_zero(v)) continue;
        cols.push_back(view.column(i));
        vals.push_back(std::move(v));
      }
      offsets.push_back(cols.size());
    }
    return SparseMatrix<M>(columns_, std::move(offsets), std::move(cols), std::move(vals));
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.columns_ != b.columns_ || a.row_offsets_ != b.row_offsets_ ||
        a.column_indices_ != b.column_indices_)
      return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i)
      if (!number_traits<N>::equal(a.values_[i], b.values_[i])) return false;
    return true;
  }

 private:
  void check_layout() const {
    if (row_offsets_.empty() || row_offsets_.front() != 0 ||
        row_offsets_.back() != values_.size() || column_indices_.size() != values_.size())
      throw Error("sparse matrix: inconsistent row offsets");
    for (std::size_t r = 0; r + 1 < row_offsets_.size(); ++r) {
      if (row_offsets_[r] > row_offsets_[r + 1]) throw Error("sparse matrix: decreasing row offsets");
      for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) {
        if (column_indices_[i] >= columns_) throw Error("sparse matrix: column out of bounds");
        if (i > row_offsets_[r] && column_indices_[i - 1] >= column_indices_[i])
          throw Error("sparse matrix: columns not strictly ascending in row " + std::to_string(r));
      }
    }
  }

  std::size_t columns_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<index_t> column_indices_;
  std::vector<N> values_;
};

/// Canonical matrix from unordered entries: duplicates summed in input
/// order, zeros dropped, columns sorted.
template <typename N>
SparseMatrix<N> from_triplets(std::size_t rows, std::size_t columns, std::vector<Triplet<N>> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.column >= columns)
      throw Error("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.column) +
                  ") out of bounds for " + std::to_string(rows) + "x" + std::to_string(columns) +
                  " matrix");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet<N>& a, const Triplet<N>& b) {
    return a.row != b.row ? a.row < b.row : a.column < b.column;
  });
  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<index_t> cols;
  std::vector<N> vals;
  std::size_t i = 0;
  for (index_t r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      const index_t c = entries[i].column;
      N sum = std::move(entries[i].value);
      ++i;
      while (i < entries.size() && entries[i].row == r && entries[i].column == c) {
        sum = sum + entries[i].value;
        ++i;
      }
      if (number_traits<N>::is_zero(sum)) continue;
      cols.push_back(c);
      vals.push_back(std::move(sum));
    }
    offsets[r + 1] = cols.size();
  }
  return SparseMatrix<N>(columns, std::move(offsets), std::move(cols), std::move(vals));
}

template <typename N>
SparseMatrix<N> from_triplets(std::size_t rows, std::vector<Triplet<N>> entries) {
  return from_triplets(rows, rows, std::move(entries));
}

/// Non-zero pattern only: offsets/indices as in CSR.
struct Adjacency {
  std::vector<std::size_t> offsets{0};
  std::vector<index_t> targets;

  std::size_t size() const noexcept { return offsets.size() - 1; }
  std::span<const index_t> operator[](index_t i) const {
    return std::span<const index_t>(targets).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
  friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

template <typename N>
Adjacency pattern(const SparseMatrix<N>& m) {
  Adjacency a;
  a.offsets = m.row_offsets();
  a.targets = m.column_indices();
  return a;
}

/// Transposed pattern: for every column, the rows with a non-zero entry in
/// it (ascending). `width` is the number of columns of the input.
inline Adjacency backward_edges(const Adjacency& forward, std::size_t width) {
  Adjacency out;
  out.offsets.assign(width + 1, 0);
  for (index_t t : forward.targets) ++out.offsets[t + 1];
  std::partial_sum(out.offsets.begin(), out.offsets.end(), out.offsets.begin());
  out.targets.resize(forward.targets.size());
  std::vector<std::size_t> fill(out.offsets.begin(), out.offsets.end() - 1);
  for (index_t r = 0; r < forward.size(); ++r)
    for (index_t c : forward[r]) out.targets[fill[c]++] = r;
  return out;
}

template <typename N>
Adjacency backward_edges(const SparseMatrix<N>& m) {
  return backward_edges(pattern(m), m.columns());
}

}  // namespace stormlet
