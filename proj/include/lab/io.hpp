#pragma once
// Artifact writers: CSV with stable formatting, JSON via nlohmann.
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace lab {

// Fixed shortest-roundtrip formatting so identical values give identical bytes.
std::string fmt_double(double v);

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    ~CsvWriter();

  private:
    std::ofstream out_;
    size_t ncols_;
};

void write_json(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace lab
