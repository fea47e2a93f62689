#pragma once
// Access to the example programs shipped with the tests.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "seqai/ast.hpp"

inline std::string corpus_path(const std::string& name) { return std::string(SEQAI_CORPUS) + "/" + name; }

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(corpus_path(name));
  if (!in) throw std::runtime_error("missing corpus file " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline seqai::NormalizedProgram load_corpus(const std::string& name) {
  return seqai::parse_program(read_corpus(name));
}
