#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "occsim/harness/csv.hpp"
#include "occsim/harness/parallel.hpp"
#include "occsim/image.hpp"
#include "occsim/numerics.hpp"

using namespace occ;

TEST(Numerics, QFunctionKnownValues) {
  EXPECT_DOUBLE_EQ(numerics::q_function(0), 0.5);
  // Frozen values of the standard normal upper tail.
  EXPECT_NEAR(numerics::q_function(1), 0.15865525393145705, 1e-15);
  EXPECT_NEAR(numerics::q_function(3), 1.3498980316300946e-3, 1e-17);
  EXPECT_NEAR(numerics::q_function(-1), 1 - 0.15865525393145705, 1e-15);
}

TEST(Numerics, IntegrateHandlesEndpointSingularity) {
  // int_0^1 x^-1/2 dx = 2
  const auto r = numerics::integrate([](double x) { return 1 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
  const auto g = numerics::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  EXPECT_NEAR(g.value, std::sqrt(kPi), 1e-12);
}

TEST(Numerics, WilsonIntervalZeroSuccesses) {
  const double z = 1.959963984540054, n = 10;
  const auto ci = numerics::wilson_interval(0, 10);
  EXPECT_DOUBLE_EQ(ci.low, 0.0);
  EXPECT_NEAR(ci.high, z * z / (n + z * z), 1e-12);
  const auto half = numerics::wilson_interval(50, 100);
  EXPECT_NEAR(0.5 * (half.low + half.high), 0.5, 1e-12);
  EXPECT_LT(half.low, 0.5);
}

TEST(Core, DerivedStreamsAreIndependentAndRepeatable) {
  Rng a = derive_stream(42, 0), b = derive_stream(42, 0), c = derive_stream(42, 1), d = derive_stream(43, 0);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Image, BilinearAndClamp) {
  Image img(2, 2);
  img(0, 0) = 0;
  img(1, 0) = 1;
  img(0, 1) = 2;
  img(1, 1) = 3;
  EXPECT_DOUBLE_EQ(img.sample(0.5, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(img.at_clamped(-5, 9), 2);
  EXPECT_DOUBLE_EQ(mean_over(img, {0, 0, 2, 2}), 1.5);
}

TEST(Image, RectOps) {
  PixelRect r{2, 3, 5, 7};
  EXPECT_EQ(r.width(), 3);
  EXPECT_EQ(r.height(), 4);
  EXPECT_TRUE(r.intersects({4, 6, 9, 9}));
  EXPECT_FALSE(r.intersects({5, 3, 9, 9}));
  EXPECT_EQ(r.clipped(4, 4), (PixelRect{2, 3, 4, 4}));
}

TEST(Csv, ShortestRoundTripFormatting) {
  EXPECT_EQ(harness::format_number(0.1), "0.1");
  EXPECT_EQ(harness::format_number(1e-7), "1e-07");
  EXPECT_EQ(harness::format_number(std::numeric_limits<double>::infinity()), "inf");
  std::stringstream ss;
  harness::CsvWriter w(ss, "demo", {"a", "b"});
  w.cell(1.5).cell("x");
  w.end_row();
  EXPECT_EQ(ss.str(), "# occsim demo v1\na,b\n1.5,x\n");
  const auto t = harness::parse_csv(ss);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][t.column("b")], "x");
}

TEST(Parallel, OrderPreservedAndExceptionsPropagate) {
  const auto v = harness::parallel_map(100, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(harness::parallel_map(10, 3,
                                     [](std::size_t i) {
                                       if (i == 7) throw DomainError("boom");
                                       return i;
                                     }),
               DomainError);
}
