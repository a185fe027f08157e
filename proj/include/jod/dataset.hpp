#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace jod {

// One source's n x p observation matrix, column-centered at construction,
// with its Gram matrix X^T X cached.
class Dataset {
 public:
  Dataset() = default;
  // `columns` holds p contiguous columns of length n.
  static Dataset from_columns(int n, int p, std::vector<double> columns);
  // `rows` holds n contiguous rows of length p.
  static Dataset from_rows(int n, int p, std::span<const double> rows);

  int n() const { return n_; }
  int p() const { return p_; }
  std::span<const double> column(int j) const {
    return {data_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  double gram(int i, int j) const { return gram_[static_cast<std::size_t>(i * p_ + j)]; }
  const std::vector<double>& gram_matrix() const { return gram_; }
  double value(int row, int j) const { return column(j)[static_cast<std::size_t>(row)]; }

 private:
  int n_ = 0;
  int p_ = 0;
  std::vector<double> data_;  // column-major
  std::vector<double> gram_;  // row-major p x p
};

// Header "x1,...,xp" then n rows. Values written in round-trip scientific form.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
Dataset read_dataset_csv(std::istream& in);

}  // namespace jod
