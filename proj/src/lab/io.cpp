#include "lab/io.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace lab {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), ncols_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != ncols_)
        throw std::runtime_error("csv row width mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << fmt_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_)
        throw std::runtime_error("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() = default;

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace lab
