#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace sat::io {

using Json = nlohmann::ordered_json;

// Shortest round-trippable decimal we emit anywhere: %.15g.
std::string num(double x);
std::string num(long long x);

std::string engine_string();

// RFC 4180 writer: CRLF line ends, quoting only where required.
// Rows are written in call order; the file is flushed on destruction.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

} // namespace sat::io
