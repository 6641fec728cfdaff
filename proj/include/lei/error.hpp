#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lei {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
      : Error(describe(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string describe(std::size_t offset, const std::vector<std::string>& expected,
                              const std::string& found) {
    std::string msg = "syntax error at offset " + std::to_string(offset) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += (i + 1 == expected.size()) ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + found;
    return msg;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

// A static-fragment operation was handed a formula containing [.] .
class DynamicFormulaError : public Error {
 public:
  DynamicFormulaError() : Error("dynamic formula requires update module") {}
  explicit DynamicFormulaError(const std::string& what) : Error(what) {}
};

// The bounded oracle could not decide a query the evaluation depends on.
class OracleInconclusive : public Error {
 public:
  OracleInconclusive(std::string query, std::string reason)
      : Error("oracle inconclusive on " + query + ": " + reason),
        query_(std::move(query)),
        reason_(std::move(reason)) {}

  const std::string& query() const noexcept { return query_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string query_;
  std::string reason_;
};

}  // namespace lei
