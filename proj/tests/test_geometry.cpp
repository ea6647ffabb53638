#include <gtest/gtest.h>

#include <set>

#include "srforge/geometry.hpp"
#include "srforge/image.hpp"
#include "synthetic.hpp"

using namespace srforge;
using srforge::testing::random_tensor;

TEST(Geometry, QuarterTurnIsCounterClockwise) {
  // 2x3 image: [[1 2 3], [4 5 6]] -> [[3 6], [2 5], [1 4]]
  const Tensor x({1, 1, 2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
  const Tensor y = GeomTransform(1, false).apply(x);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 3, 2}));
  EXPECT_EQ(y.values(), (std::vector<float>{3, 6, 2, 5, 1, 4}));
  const Tensor f = GeomTransform(0, true).apply(x);
  EXPECT_EQ(f.values(), (std::vector<float>{3, 2, 1, 6, 5, 4}));
}

TEST(Geometry, EightDistinctElements) {
  std::set<int> seen;
  for (const auto& t : GeomTransform::all()) {
    seen.insert(t.index());
    EXPECT_EQ(GeomTransform::from_index(t.index()), t);
  }
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_THROW(GeomTransform::from_index(8), UsageError);
}

TEST(Geometry, InverseUndoesEveryTransform) {
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor({2, 3, 4, 7}, rng);
  for (const auto& t : GeomTransform::all()) {
    EXPECT_TRUE(t.inverse().apply(t.apply(x)).bit_equal(x)) << t.name();
    EXPECT_EQ(t.after(t.inverse()), GeomTransform()) << t.name();
  }
}

TEST(Geometry, CompositionMatchesSequentialApplication) {
  std::mt19937_64 rng(2);
  const Tensor x = random_tensor({1, 2, 3, 5}, rng);
  for (const auto& a : GeomTransform::all())
    for (const auto& b : GeomTransform::all()) {
      EXPECT_TRUE(b.after(a).apply(x).bit_equal(b.apply(a.apply(x)))) << b.name() << " after " << a.name();
    }
}

TEST(Geometry, TensorAndEigenPathsAgree) {
  std::mt19937_64 rng(3);
  const Tensor x = random_tensor({1, 1, 5, 8}, rng);
  const Plane p = tensor_plane(x, 0);
  for (const auto& t : GeomTransform::all()) {
    const Tensor tt = t.apply(x);
    const Plane tp = t.apply(p);
    ASSERT_EQ(tp.rows(), tt.shape().h) << t.name();
    ASSERT_EQ(tp.cols(), tt.shape().w) << t.name();
    for (Eigen::Index r = 0; r < tp.rows(); ++r)
      for (Eigen::Index c = 0; c < tp.cols(); ++c) EXPECT_EQ(tp(r, c), tt.at(0, 0, r, c)) << t.name();
  }
}
