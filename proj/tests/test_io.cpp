#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sat/csv.hpp"
#include "sat/errors.hpp"

using namespace sat;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("numbers print with full round-trip precision") {
    CHECK(io::num(0.1) == "0.1");
    CHECK(io::num(-2.0) == "-2");
    CHECK(io::num(1e-9) == "1e-09");
    CHECK(io::num(2.0 / 3.0) == "0.666666666666667");
    CHECK(io::num(123456789LL) == "123456789");
    double parsed = std::stod(io::num(1.0 / 7.0));
    CHECK(parsed == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("csv rows use crlf endings and minimal quoting") {
    const std::string path = "io_writer_test.csv";
    {
        io::CsvWriter w(path);
        w.row({"t", "label", "value"});
        w.row({"0.5", "plain", "1"});
        w.row({"1", "with,comma", "quote\"inside"});
    }
    auto text = slurp(path);
    CHECK(text == "t,label,value\r\n0.5,plain,1\r\n1,\"with,comma\",\"quote\"\"inside\"\r\n");
    std::remove(path.c_str());
}

TEST_CASE("csv writer refuses unwritable locations") {
    CHECK_THROWS_AS(io::CsvWriter("no_such_dir/impossible.csv"), IoError);
}

TEST_CASE("json round trip preserves key order and values") {
    io::Json j;
    j["b_first"] = 2.5;
    j["a_second"] = io::Json::array({1, 2, 3});
    j["nested"]["flag"] = true;
    const std::string path = "io_json_test.json";
    io::write_json(path, j);
    auto back = io::read_json(path);
    CHECK(back == j);
    CHECK(back.begin().key() == "b_first"); // insertion order kept
    std::remove(path.c_str());
}

TEST_CASE("malformed json reports a configuration error with the path") {
    const std::string path = "io_bad_test.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS((void)io::read_json(path), ConfigError);
    try {
        (void)io::read_json(path);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS((void)io::read_json("missing_file.json"), IoError);
}

TEST_CASE("engine banner carries name and version") {
    auto s = io::engine_string();
    CHECK(s.find("sat") == 0);
    CHECK(s.find('.') != std::string::npos);
}

} // TEST_SUITE
