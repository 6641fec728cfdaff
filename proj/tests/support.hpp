#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "lei/lei.hpp"

namespace lei::test {

inline std::string data_path(const std::string& rel) { return std::string(LEI_DATA_DIR) + "/" + rel; }

inline std::string slurp(const std::string& rel) {
  std::ifstream in(data_path(rel), std::ios::binary);
  if (!in) throw Error("missing fixture " + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline KripkeModel fixture(const std::string& name) { return load_model(slurp("models/" + name)); }

inline Formula P(const char* s) { return parse(s); }

}  // namespace lei::test
