#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>

#include "kaclab/parallel.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/son.hpp"

using namespace kaclab;

namespace {

double replicate(std::int64_t r) {
  Rng rng = make_stream(42, "parallel_test", static_cast<std::uint64_t>(r));
  const Matrix x = haar_sample(4, rng);
  return x(0, 0) + rng.normal();
}

}  // namespace

TEST(ParallelMap, MatchesSerialReferenceForEveryTeamSize) {
  const auto ref = serial_map(500, replicate);
  for (int threads : {1, 2, 3, 8}) EXPECT_EQ(parallel_map(500, replicate, threads), ref);
  EXPECT_TRUE(parallel_map(0, replicate, 4).empty());
}

TEST(ParallelMap, RethrowsLowestFailingIndex) {
  auto fn = [](std::int64_t r) -> int {
    if (r == 17 || r == 90) throw std::runtime_error("replicate " + std::to_string(r));
    return static_cast<int>(r);
  };
  try {
    parallel_map(100, fn, 4);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "replicate 17");
  }
}

TEST(Threads, ResolveAndEnvironment) {
  EXPECT_EQ(resolve_threads(3), 3);
  ::setenv("KACLAB_THREADS", "5", 1);
  EXPECT_EQ(default_threads(), 5);
  EXPECT_EQ(resolve_threads(0), 5);
  ::unsetenv("KACLAB_THREADS");
  EXPECT_GE(default_threads(), 1);
}

TEST(Streams, DistinctTagsAndIndicesGiveDistinctDraws) {
  Rng a = make_stream(1, "x", 0);
  Rng b = make_stream(1, "x", 1);
  Rng c = make_stream(1, "y", 0);
  Rng d = make_stream(2, "x", 0);
  const double va = a.uniform();
  EXPECT_NE(va, b.uniform());
  EXPECT_NE(va, c.uniform());
  EXPECT_NE(va, d.uniform());
  Rng again = make_stream(1, "x", 0);
  EXPECT_EQ(va, again.uniform());
}
