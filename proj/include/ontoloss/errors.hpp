#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ontoloss {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes:
// domain errors (bad values, inconsistent inputs) vs I/O errors (missing or
// malformed files) vs training divergence. Everything derives from
// std::runtime_error so the C boundary can catch one base type.

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// malformed input file; carries path and 1-based line number
class ParseError : public IoError {
 public:
  ParseError(std::string path, size_t line, const std::string& what)
      : IoError(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  size_t line() const { return line_; }

 private:
  std::string path_;
  size_t line_;
};

// subsumption graph contains a directed cycle; `cycle` lists the class names
// along one witness cycle, first == last
class CycleError : public DomainError {
 public:
  CycleError(const std::string& what, std::vector<std::string> cycle)
      : DomainError(what), cycle_(std::move(cycle)) {}

  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

// disjointness axioms contradict the subsumption closure; `pairs` lists the
// offending class-name pairs, never auto-repaired
class InconsistentAxiomsError : public DomainError {
 public:
  InconsistentAxiomsError(const std::string& what,
                          std::vector<std::pair<std::string, std::string>> pairs)
      : DomainError(what), pairs_(std::move(pairs)) {}

  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

// non-finite loss or parameters during training
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int64_t last_finite_epoch)
      : std::runtime_error(what), last_finite_epoch_(last_finite_epoch) {}

  // index of the last epoch that completed with finite loss, -1 if none
  int64_t last_finite_epoch() const { return last_finite_epoch_; }

 private:
  int64_t last_finite_epoch_;
};

}  // namespace ontoloss
