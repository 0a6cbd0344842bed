#include <cstdio>
#include "doctest.h"
#include <stdexcept>
#include "ymh/config.hpp"
#include "ymh/io.hpp"

using namespace ymh;

TEST_CASE("config: empty file lists required keys") {
  CHECK_THROWS_WITH_AS(parse_config(""), doctest::Contains("missing required"),
                       std::invalid_argument);
}

TEST_CASE("config: invariants name the violated inequality") {
  std::string base =
      "[run]\nmodel = mkg\nh = 0.01\nv_max = 1\n[data]\nfamily = bump\n";
  CHECK_THROWS_WITH_AS(parse_config(base + "[params]\ngamma = 1.2\n"),
                       doctest::Contains("gamma in (0,1)"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(base + "[params]\ngamma1 = 2.5\n"),
                       doctest::Contains("gamma1 in (1,2)"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(base + "[params]\nepsilon = 0.4\n"),
                       doctest::Contains("epsilon <"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(base + "[params]\nR = 0.5\n"),
                       doctest::Contains("R > 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(base + "unknown_key = 3\n"),
                       doctest::Contains("unknown key"),
                       std::invalid_argument);
}

TEST_CASE("config: serialize/parse is a round-trip fixed point") {
  std::string text =
      "[run]\nmodel = mkg\nh = 0.0009765625\nv_max = 4\nseed = 42\n"
      "[params]\ngamma = 0.5\ngamma1 = 1.5\nepsilon = 0.0002\nR = 1.5\n"
      "[data]\nfamily = weighted\namplitude = 0.3\ndelta = 0.1\ncharge = 1\n"
      "[diagnostics]\nu_rays = 0.5,1,2\nboundary_charge = true\n";
  RunConfig c1 = parse_config(text);
  std::string s1 = serialize_config(c1);
  RunConfig c2 = parse_config(s1);
  std::string s2 = serialize_config(c2);
  CHECK(s1 == s2);
  CHECK(c1.hash() == c2.hash());
}

TEST_CASE("csv writer emits deterministic bodies") {
  write_csv("csv_test.csv", {"a", "b"}, {{1.5, 2.25}, {0.1, -3.0}});
  std::string body = read_text_file("csv_test.csv");
  CHECK(body == "a,b\n1.5,2.25\n0.1,-3\n");
  std::remove("csv_test.csv");
}

TEST_CASE("directory lock is exclusive") {
  {
    DirLock lock("lock_test_dir");
    CHECK_THROWS_AS(DirLock("lock_test_dir"), std::runtime_error);
  }
  // released on destruction
  DirLock again("lock_test_dir");
}
