#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "phm/common.hpp"
#include "test_util.hpp"

using namespace phm;

TEST_CASE("digest is deterministic and input-sensitive") {
  const char a[] = "some artifact bytes";
  const char b[] = "some artifact bytez";
  CHECK(digest_bytes(a, sizeof(a)) == digest_bytes(a, sizeof(a)));
  CHECK_FALSE(digest_bytes(a, sizeof(a)) == digest_bytes(b, sizeof(b)));
}

TEST_CASE("digest hex round-trips through parse") {
  Digest128 d = digest_bytes("x", 1);
  Digest128 back = parse_digest(d.hex());
  CHECK(back == d);
  CHECK(d.hex().size() == 32);
}

TEST_CASE("digest_file matches digest_bytes") {
  testutil::TempDir tmp("digest");
  std::string payload = "file payload\n";
  {
    std::ofstream os(tmp.path / "f.bin", std::ios::binary);
    os << payload;
  }
  CHECK(digest_file((tmp.path / "f.bin").string()) ==
        digest_bytes(payload.data(), payload.size()));
}

TEST_CASE("substream seeds separate by name and index") {
  std::uint64_t master = 42;
  CHECK(substream_seed(master, "sampling") == substream_seed(master, "sampling"));
  CHECK(substream_seed(master, "sampling") != substream_seed(master, "som"));
  CHECK(substream_seed(master, "sim-noise", 0) !=
        substream_seed(master, "sim-noise", 1));
  CHECK(substream_seed(1, "sampling") != substream_seed(2, "sampling"));
}

TEST_CASE("rng determinism and ranges") {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(9);
  for (int i = 0; i < 1000; ++i) CHECK(c.integer(13) < 13);
}

TEST_CASE("gaussian draws have the right first two moments") {
  Rng r(123);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = r.gaussian();
    s1 += g;
    s2 += g * g;
  }
  double mean = s1 / n;
  double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("require throws ValidationError") {
  CHECK_THROWS_AS(require(false, "nope"), ValidationError);
  CHECK_NOTHROW(require(true, "fine"));
}

TEST_CASE("ks helper sanity") {
  // a uniform grid has a tiny statistic, a constant sample a large one
  std::vector<double> grid, lump;
  for (int i = 0; i < 1000; ++i) {
    grid.push_back((i + 0.5) / 1000.0);
    lump.push_back(0.5);
  }
  CHECK(testutil::ks_uniform(grid) < 0.002);
  CHECK(testutil::ks_uniform(lump) > 0.45);
}
