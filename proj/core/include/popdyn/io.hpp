#pragma once
#include <string>
#include <vector>
#include <cstdio>

namespace popdyn {

// minimal CSV writing; numbers are printed with %.17g so files round-trip
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::FILE* f_ = nullptr;
};

std::string format_double(double x);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace popdyn
