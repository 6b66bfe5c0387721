#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ontoloss {

// row-major dense matrix of doubles
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;  // rows * cols

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return values[r * cols + c]; }
  double at(size_t r, size_t c) const { return values[r * cols + c]; }

  std::span<double> row(size_t r) { return {values.data() + r * cols, cols}; }
  std::span<const double> row(size_t r) const { return {values.data() + r * cols, cols}; }
};

// per-sample binary label assignments plus a labelled flag; label values of
// unlabelled rows are kept all-zero and must be ignored by consumers
struct LabelMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<uint8_t> values;    // rows * cols, 0/1
  std::vector<uint8_t> labelled;  // rows, 0/1

  LabelMatrix() = default;
  LabelMatrix(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0), labelled(r, 1) {}

  uint8_t& at(size_t r, size_t c) { return values[r * cols + c]; }
  uint8_t at(size_t r, size_t c) const { return values[r * cols + c]; }

  std::span<uint8_t> row(size_t r) { return {values.data() + r * cols, cols}; }
  std::span<const uint8_t> row(size_t r) const { return {values.data() + r * cols, cols}; }
};

// one sample's label view as consumed by the loss functions
struct LabelVector {
  std::span<const uint8_t> values;
  bool labelled = true;
};

struct Dataset {
  Matrix features;    // n x feature_dim
  LabelMatrix labels; // n x n_labels
  std::string source_path;  // set by load_dataset, empty otherwise

  size_t size() const { return features.rows; }
  size_t feature_dim() const { return features.cols; }
  size_t num_labels() const { return labels.cols; }

  LabelVector label_row(size_t r) const {
    return {labels.row(r), labels.labelled[r] != 0};
  }
};

// Text format:
//   line 1:  feature_dim<TAB>n_labels
//   rows:    f1,f2,...|b1,b2,...|flag      (flag 1 = labelled, 0 = unlabelled)
// Unlabelled rows must carry all-zero label bits. Malformed rows raise
// ParseError with the 1-based line number.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

// new Dataset holding the given rows, in order (indices may repeat)
Dataset select_rows(const Dataset& data, std::span<const size_t> indices);

}  // namespace ontoloss
