#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/hash.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/parallel.hpp"
#include "nl2sql/common/text.hpp"
#include "test_support.hpp"

using namespace nl2sql;

TEST_CASE("sha256 matches published test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("fnv1a64 matches reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("text helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::to_upper("Select") == "SELECT");
  CHECK(text::iequals("From", "fROM"));
  CHECK_FALSE(text::iequals("From", "Fro"));
  CHECK(text::icontains("Hello World", "o w"));
  CHECK(text::collapse_whitespace("a \t\n b") == "a b");
  CHECK(text::single_line("a\nb\tc") == "a b c");
  CHECK(text::replace_all("a,b,c", ",", ";") == "a;b;c");
  CHECK(text::join({"x", "y"}, ", ") == "x, y");
  const auto lines = text::split_lines("a\nb\n\nc");
  REQUIRE(lines.size() == 4);
  CHECK(lines[2].empty());
}

TEST_CASE("jsonl files round-trip and skip blank lines") {
  testing::TempDir dir;
  const auto path = dir / "nested/out.jsonl";
  jsonl::write_file_atomic(path, jsonl::dump_lines({{{"a", 1}}, {{"b", "two"}}}) + "\n\n");
  const auto lines = jsonl::read_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].number == 1);
  CHECK(nlohmann::json::parse(lines[1].text)["b"] == "two");
  CHECK_THROWS_AS(jsonl::read_lines(dir / "missing.jsonl"), IoError);
}

TEST_CASE("dump replaces invalid UTF-8 instead of throwing") {
  const std::string bad = "x\xff";
  CHECK_NOTHROW(jsonl::dump({{"v", bad}}));
}

TEST_CASE("ordered_parallel_map keeps index order under concurrency") {
  for (std::size_t limit : {1, 2, 4, 8}) {
    auto out = ordered_parallel_map(50, limit, [](std::size_t i) {
      std::this_thread::sleep_for(std::chrono::microseconds((50 - i) * 20));
      return i * i;
    });
    REQUIRE(out.size() == 50);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
  }
}

TEST_CASE("ordered_parallel_map rethrows after all workers finish") {
  std::atomic<int> calls{0};
  CHECK_THROWS_AS(ordered_parallel_map(20, 4,
                                       [&](std::size_t i) {
                                         ++calls;
                                         if (i == 7) throw std::runtime_error("boom");
                                         return i;
                                       }),
                  std::runtime_error);
  CHECK(calls == 20);
}
