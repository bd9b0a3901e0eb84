#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cleanbound/matrix.hpp"

namespace testutil {

// Fresh per-test scratch directory under the working directory.
class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_("test_tmp/" + name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string path(const std::string& file = "") const {
    return file.empty() ? path_ : path_ + "/" + file;
  }

 private:
  std::string path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline cleanbound::Matrix make_matrix(std::size_t rows, std::size_t cols,
                                      std::initializer_list<double> values) {
  cleanbound::Matrix m(rows, cols);
  std::size_t k = 0;
  for (double v : values) m.data()[k++] = v;
  return m;
}

inline cleanbound::BinaryMatrix make_labels(std::size_t rows, std::size_t cols,
                                            std::initializer_list<int> values) {
  cleanbound::BinaryMatrix m(rows, cols);
  std::size_t k = 0;
  for (int v : values) m.data()[k++] = static_cast<std::uint8_t>(v);
  return m;
}

}  // namespace testutil
