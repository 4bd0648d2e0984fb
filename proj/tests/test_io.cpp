#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fcs/io.hpp>
#include <fcs/rng.hpp>
#include <fcs/types.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>

using namespace fcs;

namespace fs = std::filesystem;

TEST_CASE("format_double round-trips bit-identically") {
  Rng rng(101);
  for (int i = 0; i < 5000; ++i) {
    // Random bit patterns, skipping NaN/inf.
    const std::uint64_t bits = rng.next_u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    if (!std::isfinite(v)) continue;
    const double back = parse_double(format_double(v), "test");
    std::uint64_t back_bits;
    std::memcpy(&back_bits, &back, sizeof(back));
    std::uint64_t v_bits;
    std::memcpy(&v_bits, &v, sizeof(v));
    CHECK(back_bits == v_bits);
  }
}

TEST_CASE("format_double uses the shortest form for simple values") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("parse_double accepts plain decimal and scientific forms") {
  CHECK(parse_double("3.25", "x") == 3.25);
  CHECK(parse_double("-1e-3", "x") == -0.001);
  CHECK(parse_double("0", "x") == 0.0);
}

TEST_CASE("parse_double rejects garbage with context") {
  CHECK_THROWS_WITH_AS(parse_double("abc", "field f"), "field f: not a number: \"abc\"",
                       ParseError);
  CHECK_THROWS_AS(parse_double("1.5x", "f"), ParseError);
  CHECK_THROWS_AS(parse_double("", "f"), ParseError);
}

TEST_CASE("parse_int parses and rejects") {
  CHECK(parse_int("42", "n") == 42);
  CHECK(parse_int("-7", "n") == -7);
  CHECK_THROWS_WITH_AS(parse_int("3.5", "count"), "count: not an integer: \"3.5\"", ParseError);
  CHECK_THROWS_AS(parse_int("", "n"), ParseError);
}

TEST_CASE("write_file_atomic then read_text_file round-trips") {
  const fs::path dir = fs::temp_directory_path() / "fcs_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  const std::string content = "line one\nline two\n";
  write_file_atomic(path, content);
  CHECK(read_text_file(path) == content);
  // No stray temporary left behind.
  CHECK_FALSE(fs::exists(path + ".tmp"));
  // Overwrite in place.
  write_file_atomic(path, "replaced");
  CHECK(read_text_file(path) == "replaced");
  fs::remove_all(dir);
}

TEST_CASE("read_text_file reports missing files") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/definitely/missing.txt"), Error);
}

TEST_CASE("write_file_atomic fails cleanly on an unwritable directory") {
  CHECK_THROWS_AS(write_file_atomic("/nonexistent/dir/file.txt", "x"), Error);
}

TEST_CASE("sorted_sum is permutation invariant") {
  std::vector<double> a = {1e16, 1.0, -1e16, 3.5, 0.25, -7.125};
  std::vector<double> b = {0.25, -1e16, 3.5, 1.0, -7.125, 1e16};
  CHECK(sorted_sum(a) == sorted_sum(b));
  CHECK(sorted_sum(std::vector<double>{}) == 0.0);
}
