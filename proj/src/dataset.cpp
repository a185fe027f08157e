#include "jod/dataset.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "jod/error.hpp"
#include "jod/io.hpp"
#include "jod/kernels.hpp"

namespace jod {

Dataset Dataset::from_columns(int n, int p, std::vector<double> columns) {
  if (n < 2) throw ValidationError("dataset needs at least 2 rows");
  if (p < 1) throw ValidationError("dataset needs at least 1 column");
  if (columns.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(p)) {
    throw ValidationError("dataset buffer has wrong size");
  }
  Dataset ds;
  ds.n_ = n;
  ds.p_ = p;
  ds.data_ = std::move(columns);
  const auto un = static_cast<std::size_t>(n);
  for (int j = 0; j < p; ++j) {
    std::span<double> col(ds.data_.data() + static_cast<std::size_t>(j) * un, un);
    // Two passes keep the residual mean at rounding level.
    for (int pass = 0; pass < 2; ++pass) kernels::shift(col, kernels::sum(col) / n);
  }
  ds.gram_.assign(static_cast<std::size_t>(p * p), 0.0);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double g = kernels::dot(ds.column(i), ds.column(j));
      ds.gram_[static_cast<std::size_t>(i * p + j)] = g;
      ds.gram_[static_cast<std::size_t>(j * p + i)] = g;
    }
  }
  return ds;
}

Dataset Dataset::from_rows(int n, int p, std::span<const double> rows) {
  if (rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(p)) {
    throw ValidationError("dataset buffer has wrong size");
  }
  std::vector<double> cols(rows.size());
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < p; ++j) {
      cols[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(r)] =
          rows[static_cast<std::size_t>(r) * static_cast<std::size_t>(p) + static_cast<std::size_t>(j)];
    }
  }
  return from_columns(n, p, std::move(cols));
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  for (int j = 0; j < ds.p(); ++j) out << (j ? ",x" : "x") << j + 1;
  out << '\n';
  std::string line;
  for (int r = 0; r < ds.n(); ++r) {
    line.clear();
    for (int j = 0; j < ds.p(); ++j) {
      if (j) line += ',';
      line += io::format_double(ds.value(r, j));
    }
    out << line << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty data file");
  const auto header = io::split_csv(line);
  const int p = static_cast<int>(header.size());
  std::vector<double> rows;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv(line);
    if (static_cast<int>(fields.size()) != p) {
      throw IoError("row " + std::to_string(n + 1) + " has " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(p));
    }
    for (const auto& f : fields) rows.push_back(io::parse_double(f));
    ++n;
  }
  return Dataset::from_rows(n, p, rows);
}

}  // namespace jod
