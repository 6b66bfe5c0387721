#include "ontoloss/config.hpp"

#include <cctype>
#include <string>

#include "ontoloss/errors.hpp"
#include "text_io.hpp"

namespace ontoloss {

namespace {

using detail::is_blank_or_comment;
using detail::open_input;
using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::strip_trailing_cr;

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_bool(const std::string& path, size_t line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError(path, line, "expected true|false|1|0, got '" + v + "'");
}

long long parse_positive_int(const std::string& path, size_t line, const std::string& v) {
  const long long n = parse_int(path, line, v);
  if (n <= 0) throw ParseError(path, line, "expected a positive integer, got '" + v + "'");
  return n;
}

std::vector<size_t> parse_dims(const std::string& path, size_t line, const std::string& v) {
  std::vector<size_t> dims;
  for (const auto& piece : split(v, ',')) {
    dims.push_back(static_cast<size_t>(parse_positive_int(path, line, trim(piece))));
  }
  return dims;
}

}  // namespace

TrainConfig default_train_config() { return TrainConfig{}; }

TrainConfig parse_train_config(const std::string& path) {
  auto in = open_input(path);
  TrainConfig tc;

  std::string raw;
  size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    strip_trailing_cr(raw);
    if (is_blank_or_comment(raw)) continue;

    const auto eq = raw.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path, lineno, "expected 'key = value'");
    }
    const std::string key = trim(raw.substr(0, eq));
    const std::string val = trim(raw.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ParseError(path, lineno, "expected 'key = value'");
    }

    if (key == "tnorm") {
      if (val == "product") {
        tc.loss.tnorm = TNormKind::Product;
      } else if (val == "lukasiewicz") {
        tc.loss.tnorm = TNormKind::Lukasiewicz;
      } else {
        throw ParseError(path, lineno, "tnorm must be product or lukasiewicz");
      }
    } else if (key == "variant") {
      if (val == "standard") {
        tc.loss.variant = LossVariantKind::FuzzyStandard;
      } else if (val == "balanced") {
        tc.loss.variant = LossVariantKind::FuzzyBalanced;
      } else if (val == "xu") {
        tc.loss.variant = LossVariantKind::XuSemantic;
      } else {
        throw ParseError(path, lineno, "variant must be standard, balanced or xu");
      }
    } else if (key == "k") {
      tc.loss.k = parse_double(path, lineno, val);
    } else if (key == "epsilon") {
      tc.loss.epsilon = parse_double(path, lineno, val);
    } else if (key == "w_impl") {
      tc.loss.w_impl = parse_double(path, lineno, val);
      if (tc.loss.w_impl < 0.0) throw ParseError(path, lineno, "w_impl must be >= 0");
    } else if (key == "w_disj") {
      tc.loss.w_disj = parse_double(path, lineno, val);
      if (tc.loss.w_disj < 0.0) throw ParseError(path, lineno, "w_disj must be >= 0");
    } else if (key == "beta") {
      tc.loss.beta = parse_double(path, lineno, val);
      if (!(tc.loss.beta >= 0.0 && tc.loss.beta < 1.0)) {
        throw ParseError(path, lineno, "beta must be in [0, 1)");
      }
    } else if (key == "max_epochs") {
      tc.max_epochs = static_cast<size_t>(parse_positive_int(path, lineno, val));
    } else if (key == "batch_size") {
      tc.batch_size = static_cast<size_t>(parse_positive_int(path, lineno, val));
    } else if (key == "learning_rate") {
      tc.learning_rate = parse_double(path, lineno, val);
      if (!(tc.learning_rate > 0.0)) {
        throw ParseError(path, lineno, "learning_rate must be > 0");
      }
    } else if (key == "hidden_dims") {
      tc.hidden_dims = parse_dims(path, lineno, val);
    } else if (key == "semi_supervised") {
      tc.semi_supervised = parse_bool(path, lineno, val);
    } else if (key == "split_train") {
      tc.split_train = parse_double(path, lineno, val);
    } else if (key == "split_val") {
      tc.split_val = parse_double(path, lineno, val);
    } else if (key == "split_test") {
      tc.split_test = parse_double(path, lineno, val);
    } else {
      throw ParseError(path, lineno, "unknown key '" + key + "'");
    }
  }

  if (tc.loss.variant == LossVariantKind::FuzzyBalanced) {
    if (!(tc.loss.k > 1.0)) throw DomainError("balanced variant requires k > 1");
    if (!(tc.loss.epsilon > 0.0)) throw DomainError("balanced variant requires epsilon > 0");
  }
  if (tc.split_train < 0.0 || tc.split_val < 0.0 || tc.split_test < 0.0) {
    throw DomainError("split ratios must be nonnegative");
  }
  return tc;
}

}  // namespace ontoloss
