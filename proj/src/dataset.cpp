#include "ontoloss/dataset.hpp"

#include <algorithm>
#include <string>

#include "text_io.hpp"

namespace ontoloss {

Dataset load_dataset(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++lineno;
  detail::strip_trailing_cr(line);
  const auto header = detail::split(line, '\t');
  if (header.size() != 2) throw ParseError(path, 1, "header must be 'feature_dim<TAB>n_labels'");
  const long long fdim = detail::parse_int(path, 1, header[0]);
  const long long nlab = detail::parse_int(path, 1, header[1]);
  if (fdim <= 0 || nlab <= 0) throw ParseError(path, 1, "dimensions must be positive");

  Dataset ds;
  ds.features.cols = static_cast<size_t>(fdim);
  ds.labels.cols = static_cast<size_t>(nlab);
  ds.source_path = path;

  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_trailing_cr(line);
    if (line.empty()) continue;
    const auto parts = detail::split(line, '|');
    if (parts.size() != 3) {
      throw ParseError(path, lineno, "expected 'features|labels|flag'");
    }

    const auto feats = detail::split(parts[0], ',');
    if (feats.size() != ds.features.cols) {
      throw ParseError(path, lineno,
                       "expected " + std::to_string(ds.features.cols) + " features, got " +
                           std::to_string(feats.size()));
    }
    for (const auto& tok : feats) {
      ds.features.values.push_back(detail::parse_double(path, lineno, tok));
    }

    const auto bits = detail::split(parts[1], ',');
    if (bits.size() != ds.labels.cols) {
      throw ParseError(path, lineno,
                       "expected " + std::to_string(ds.labels.cols) + " label bits, got " +
                           std::to_string(bits.size()));
    }

    uint8_t flag;
    if (parts[2] == "0") {
      flag = 0;
    } else if (parts[2] == "1") {
      flag = 1;
    } else {
      throw ParseError(path, lineno, "flag must be 0 or 1");
    }

    bool any_bit = false;
    for (const auto& tok : bits) {
      if (tok == "0") {
        ds.labels.values.push_back(0);
      } else if (tok == "1") {
        ds.labels.values.push_back(1);
        any_bit = true;
      } else {
        throw ParseError(path, lineno, "label bits must be 0 or 1");
      }
    }
    if (!flag && any_bit) {
      throw ParseError(path, lineno, "unlabelled row carries nonzero label bits");
    }
    ds.labels.labelled.push_back(flag);
    ++ds.features.rows;
    ++ds.labels.rows;
  }

  return ds;
}

void save_dataset(const Dataset& data, const std::string& path) {
  auto out = detail::open_output(path);
  out << data.feature_dim() << '\t' << data.num_labels() << '\n';
  for (size_t r = 0; r < data.size(); ++r) {
    const auto feats = data.features.row(r);
    for (size_t c = 0; c < feats.size(); ++c) {
      if (c) out << ',';
      out << detail::format_double(feats[c]);
    }
    out << '|';
    const auto bits = data.labels.row(r);
    for (size_t c = 0; c < bits.size(); ++c) {
      if (c) out << ',';
      out << int(bits[c]);
    }
    out << '|' << int(data.labels.labelled[r]) << '\n';
  }
  if (!out) throw IoError("write failed on " + path);
}

Dataset select_rows(const Dataset& data, std::span<const size_t> indices) {
  Dataset out;
  out.features = Matrix(indices.size(), data.feature_dim());
  out.labels = LabelMatrix(indices.size(), data.num_labels());
  for (size_t i = 0; i < indices.size(); ++i) {
    const size_t r = indices[i];
    if (r >= data.size()) throw DomainError("row index out of range");
    auto fdst = out.features.row(i);
    auto fsrc = data.features.row(r);
    std::copy(fsrc.begin(), fsrc.end(), fdst.begin());
    auto ldst = out.labels.row(i);
    auto lsrc = data.labels.row(r);
    std::copy(lsrc.begin(), lsrc.end(), ldst.begin());
    out.labels.labelled[i] = data.labels.labelled[r];
  }
  return out;
}

}  // namespace ontoloss
