#ifndef AID_TESTS_LOAD_HPP
#define AID_TESTS_LOAD_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aid/io.hpp"

namespace aid::testing {

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(AID_CORPUS_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing corpus file " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Model load_corpus(const std::string& name) {
  auto parsed = parse(read_corpus(name));
  if (!parsed.model) throw std::runtime_error("corpus file fails to parse: " + name);
  return std::move(*parsed.model);
}

}  // namespace aid::testing

#endif  // AID_TESTS_LOAD_HPP
