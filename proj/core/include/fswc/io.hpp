#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "fswc/common.hpp"

namespace fswc {

/// Shortest round-trip decimal form of a double ("%.17g" trimmed); identical
/// doubles always print identically, so artifacts are byte-stable.
std::string format_double(Real x);

/// Deterministic CSV writer: fixed column order, format_double cells.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              const std::string& comment = "");
    void row(const std::vector<Real>& values);
    void row_mixed(const std::vector<std::string>& cells);
    ~CsvWriter();

  private:
    std::ofstream out_;
    std::size_t n_cols_;
};

/// FNV-1a 64-bit hex digest (stable across runs/platforms for config hashing).
std::string fnv1a_hex(const std::string& data);

}  // namespace fswc
