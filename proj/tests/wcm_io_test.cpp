#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "deqe/error.hpp"
#include "deqe/wcm.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace deqe;
using deqe::testing::seg;

namespace {

std::string serialize(const CooccurrenceMatrix& m) {
  std::ostringstream out;
  write_wcm(m, out);
  return out.str();
}

CooccurrenceMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_wcm(in, "test.wcm");
}

CooccurrenceMatrix toy_matrix() {
  const std::vector<TokenizedPair> corpus = {{seg({"a", "b"}), seg({"x", "y"})},
                                             {seg({"a", "c"}), seg({"x", "z"})}};
  return deqe::testing::build_from_pairs(corpus, {1, kNoCutoff, CountMode::Binary});
}

}  // namespace

TEST_CASE("serialized layout") {
  const auto m = CooccurrenceMatrix::from_entries({2, 50, CountMode::Product},
                                                  {{"b", "y", 3}, {"a", "x", 2}}, {"the", "of"}, {"le"});
  CHECK(serialize(m) ==
        "#wcm v1\n"
        "#min_cooccurrence 2\n"
        "#hifreq_cutoff 50\n"
        "#count_mode product\n"
        "#entries 2\n"
        "#excluded_source of the\n"
        "#excluded_target le\n"
        "a\tx\t2\n"
        "b\ty\t3\n");
}

TEST_CASE("toy matrix round trips") {
  const auto m = toy_matrix();
  const auto loaded = parse(serialize(m));
  CHECK(loaded == m);
  CHECK(loaded.entries() == m.entries());
  CHECK(serialize(loaded) == serialize(m));
}

TEST_CASE("empty matrix round trips") {
  const CooccurrenceMatrix empty = CooccurrenceMatrix::from_entries({}, {});
  const auto text = serialize(empty);
  CHECK(text.find("#entries 0\n") != std::string::npos);
  const auto loaded = parse(text);
  CHECK(loaded.empty());
  CHECK(loaded == empty);
}

TEST_CASE("unlimited cutoff survives the round trip") {
  const auto m = toy_matrix();
  CHECK(parse(serialize(m)).config().hifreq_cutoff == kNoCutoff);
}

TEST_CASE("file save and load") {
  deqe::testing::TempDir dir("wcmio");
  const auto m = toy_matrix();
  save_wcm(m, dir / "m.wcm");
  CHECK(load_wcm(dir / "m.wcm") == m);
  CHECK_THROWS_AS(load_wcm(dir / "missing.wcm"), DataError);
}

TEST_CASE("truncated body is rejected") {
  std::mt19937_64 rng(3);
  std::vector<WcmEntry> entries;
  for (int i = 0; i < 10; ++i) entries.push_back({"s" + std::to_string(i), "t", 5});
  auto text = serialize(CooccurrenceMatrix::from_entries({1, kNoCutoff, CountMode::Binary}, entries));
  text.erase(text.rfind("s9\t"));
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("header declares 10 entries, found 9"), FormatError);
}

TEST_CASE("truncated header is rejected") {
  CHECK_THROWS_WITH_AS(parse("#wcm v1\n#min_cooccurrence 2\n"), doctest::Contains("truncated"), FormatError);
  CHECK_THROWS_AS(parse(""), FormatError);
}

TEST_CASE("version mismatch names both versions") {
  auto text = serialize(toy_matrix());
  text.replace(0, 7, "#wcm v2");
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("expected v1, found v2"), FormatError);
  CHECK_THROWS_WITH_AS(parse("hello\n"), doctest::Contains("not a WCM file"), FormatError);
}

TEST_CASE("malformed bodies are rejected") {
  const std::string header =
      "#wcm v1\n#min_cooccurrence 2\n#hifreq_cutoff 10\n#count_mode binary\n#entries 2\n"
      "#excluded_source the\n#excluded_target\n";
  CHECK_NOTHROW(parse(header + "a\tx\t2\nb\tx\t3\n"));
  // Unsorted.
  CHECK_THROWS_AS(parse(header + "b\tx\t2\na\tx\t3\n"), FormatError);
  // Duplicate.
  CHECK_THROWS_AS(parse(header + "a\tx\t2\na\tx\t3\n"), FormatError);
  // Below threshold.
  CHECK_THROWS_AS(parse(header + "a\tx\t1\nb\tx\t3\n"), FormatError);
  // Excluded token.
  CHECK_THROWS_AS(parse(header + "a\tx\t2\nthe\tx\t3\n"), FormatError);
  // Bad field layout and counts.
  CHECK_THROWS_AS(parse(header + "a\tx\nb\tx\t3\n"), FormatError);
  CHECK_THROWS_AS(parse(header + "a\tx\t2x\nb\tx\t3\n"), FormatError);
  CHECK_THROWS_AS(parse(header + "a\tx\t-2\nb\tx\t3\n"), FormatError);
  // More entries than declared.
  CHECK_THROWS_AS(parse(header + "a\tx\t2\nb\tx\t3\nc\tx\t3\n"), FormatError);
  // Bad header values.
  auto bad_mode = header;
  bad_mode.replace(bad_mode.find("binary"), 6, "pmi");
  CHECK_THROWS_AS(parse(bad_mode + "a\tx\t2\nb\tx\t3\n"), FormatError);
  auto zero_min = header;
  zero_min.replace(zero_min.find("cooccurrence 2"), 14, "cooccurrence 0");
  CHECK_THROWS_AS(parse(zero_min + "a\tx\t2\nb\tx\t3\n"), FormatError);
}

TEST_CASE("random matrices round trip and reserialize byte-identically") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto corpus = deqe::testing::random_corpus(rng);
    const auto config = deqe::testing::random_config(rng, trial % 2 ? CountMode::Product : CountMode::Binary);
    const auto m = deqe::testing::build_from_pairs(corpus, config);
    const auto text = serialize(m);
    const auto loaded = parse(text);
    REQUIRE(loaded == m);
    REQUIRE(loaded.config() == m.config());
    REQUIRE(loaded.excluded_source() == m.excluded_source());
    REQUIRE(loaded.excluded_target() == m.excluded_target());
    REQUIRE(serialize(loaded) == text);
    REQUIRE(serialize(deqe::testing::build_from_pairs(corpus, config, 4)) == text);
  }
}
