#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentirec/corpus_io.hpp"
#include "sentirec/error.hpp"

namespace sentirec {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// User x movie matrix with optional cells. Indices are zero-based; ids in
/// files and on the command line are one-based.
class RatingsMatrix {
 public:
  RatingsMatrix() = default;
  RatingsMatrix(std::size_t m, std::size_t n) : m_(m), n_(n), cells_(m * n) {}

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }

  const std::optional<double>& at(std::size_t u, std::size_t i) const {
    check(u, i);
    return cells_[u * n_ + i];
  }

  void set(std::size_t u, std::size_t i, double value) {
    check(u, i);
    if (!std::isfinite(value)) throw Error(ErrorKind::validation, "matrix values must be finite");
    cells_[u * n_ + i] = value;
  }

  void clear(std::size_t u, std::size_t i) {
    check(u, i);
    cells_[u * n_ + i].reset();
  }

  bool observed(std::size_t u, std::size_t i) const { return at(u, i).has_value(); }

  std::size_t observed_count() const {
    std::size_t k = 0;
    for (const auto& c : cells_) k += c.has_value();
    return k;
  }

  friend bool operator==(const RatingsMatrix&, const RatingsMatrix&) = default;

 private:
  void check(std::size_t u, std::size_t i) const {
    if (u >= m_ || i >= n_) {
      throw Error(ErrorKind::parameter, "cell (" + std::to_string(u + 1) + ", " + std::to_string(i + 1) +
                                            ") outside " + std::to_string(m_) + "x" + std::to_string(n_) + " matrix");
    }
  }

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<std::optional<double>> cells_;
};

/// Matrix of raw star values.
inline RatingsMatrix stars_matrix(const RatingsDataset& data) {
  RatingsMatrix matrix(static_cast<std::size_t>(data.num_users), static_cast<std::size_t>(data.num_movies));
  for (const auto& r : data.records)
    matrix.set(static_cast<std::size_t>(r.user_id - 1), static_cast<std::size_t>(r.movie_id - 1), r.stars);
  return matrix;
}

// Matrix file: header `{"m":M,"n":N}` then one `{"user_id","movie_id","value"}`
// object per observed cell in row-major order.

inline void write_matrix(std::ostream& out, const RatingsMatrix& matrix) {
  nlohmann::ordered_json header;
  header["m"] = matrix.rows();
  header["n"] = matrix.cols();
  out << header.dump() << '\n';
  for (std::size_t u = 0; u < matrix.rows(); ++u)
    for (std::size_t i = 0; i < matrix.cols(); ++i)
      if (const auto& v = matrix.at(u, i)) {
        nlohmann::ordered_json cell;
        cell["user_id"] = u + 1;
        cell["movie_id"] = i + 1;
        cell["value"] = *v;
        out << cell.dump() << '\n';
      }
}

inline RatingsMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<RatingsMatrix> matrix;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::parse, "matrix line " + std::to_string(line_no) + ": " + e.what());
    }
    auto int_field = [&](const char* key) -> long long {
      if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number_integer()) {
        throw Error(ErrorKind::parse, "matrix line " + std::to_string(line_no) + ": missing integer '" + key + "'");
      }
      return obj[key].get<long long>();
    };
    if (!matrix) {
      const long long m = int_field("m"), n = int_field("n");
      if (m < 1 || n < 1) throw Error(ErrorKind::validation, "matrix dimensions must be positive");
      matrix.emplace(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
      continue;
    }
    const long long u = int_field("user_id"), i = int_field("movie_id");
    if (!obj.contains("value") || !obj["value"].is_number()) {
      throw Error(ErrorKind::parse, "matrix line " + std::to_string(line_no) + ": missing numeric 'value'");
    }
    if (u < 1 || i < 1 || static_cast<std::size_t>(u) > matrix->rows() || static_cast<std::size_t>(i) > matrix->cols()) {
      throw Error(ErrorKind::validation, "matrix line " + std::to_string(line_no) + ": cell outside declared size");
    }
    const auto ur = static_cast<std::size_t>(u - 1), ir = static_cast<std::size_t>(i - 1);
    if (matrix->observed(ur, ir)) {
      throw Error(ErrorKind::validation, "matrix line " + std::to_string(line_no) + ": duplicate cell");
    }
    matrix->set(ur, ir, obj["value"].get<double>());
  }
  if (!matrix) throw Error(ErrorKind::empty_input, "matrix input has no header");
  return std::move(*matrix);
}

inline void save_matrix(const RatingsMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::configuration, "cannot write matrix file " + path.string());
  write_matrix(out, matrix);
}

inline RatingsMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::configuration, "cannot open matrix file " + path.string());
  return read_matrix(in);
}

}  // namespace sentirec
