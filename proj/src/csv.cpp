#include "sat/csv.hpp"

#include <cstdio>

#include "sat/errors.hpp"
#include "sat/version.hpp"

namespace sat::io {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string num(long long x) { return std::to_string(x); }

std::string engine_string() { return std::string(kEngineName) + " " + kVersion; }

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary);
    if (!out_) throw IoError("cannot open for writing: " + path.string());
}

namespace {
std::string escape(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}
} // namespace

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape(fields[i]);
    }
    out_ << "\r\n";
    if (!out_) throw IoError("write failed: " + path_.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace sat::io
