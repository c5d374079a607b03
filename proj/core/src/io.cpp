#include "popdyn/io.hpp"
#include <stdexcept>
#include <cstring>

namespace popdyn {

CsvWriter::CsvWriter(const std::string& path) {
    f_ = std::fopen(path.c_str(), "w");
    if (!f_) throw std::runtime_error("CsvWriter: cannot open " + path);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    raw_row(names);
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) std::fputc(',', f_);
        std::fputs(format_double(values[i]).c_str(), f_);
    }
    std::fputc('\n', f_);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) std::fputc(',', f_);
        std::fputs(cells[i].c_str(), f_);
    }
    std::fputc('\n', f_);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_text_file: cannot open " + path);
    std::fwrite(content.data(), 1, content.size(), f);
    std::fclose(f);
}

std::string read_text_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("read_text_file: cannot open " + path);
    std::string out;
    char buf[8192];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    std::fclose(f);
    return out;
}

} // namespace popdyn
