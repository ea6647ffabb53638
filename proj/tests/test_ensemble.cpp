#include <gtest/gtest.h>

#include "srforge/ensemble.hpp"
#include "srforge/resize.hpp"
#include "synthetic.hpp"

using namespace srforge;
using srforge::testing::random_tensor;

TEST(SelfEnsemble, IdentityOnlyEqualsPlainForward) {
  const Model m = build_edsr(ModelConfig::edsr(1, 4, 2), 1);
  std::mt19937_64 rng(2);
  const Tensor lr = random_tensor({1, 3, 6, 5}, rng, 0, 255);
  const std::array<GeomTransform, 1> id{GeomTransform()};
  EXPECT_TRUE(self_ensemble(as_upscaler(m, 2), lr, id).bit_equal(m.infer(lr, 2)));
}

TEST(SelfEnsemble, EquivariantUpscalerIsAFixedPoint) {
  // Nearest-neighbour upscaling commutes with every dihedral transform.
  const Upscaler nearest = [](const Tensor& x) {
    const Shape s = x.shape();
    Tensor out({s.n, s.c, s.h * 2, s.w * 2});
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t y = 0; y < 2 * s.h; ++y)
        for (std::int64_t xx = 0; xx < 2 * s.w; ++xx) out.at(0, c, y, xx) = x.at(0, c, y / 2, xx / 2);
    return out;
  };
  std::mt19937_64 rng(3);
  const Tensor lr = random_tensor({1, 3, 5, 7}, rng, 0, 255);
  const Tensor plain = nearest(lr);
  const Tensor ens = self_ensemble(nearest, lr);
  for (std::int64_t i = 0; i < plain.numel(); ++i) EXPECT_NEAR(ens[i], plain[i], 1e-4);
}

TEST(SelfEnsemble, BicubicIsNearlyEquivariant) {
  const Upscaler bicubic = [](const Tensor& x) {
    return bicubic_resize(x, static_cast<int>(x.shape().w * 3), static_cast<int>(x.shape().h * 3));
  };
  std::mt19937_64 rng(4);
  const Tensor lr = random_tensor({1, 3, 6, 9}, rng, 0, 255);
  const Tensor plain = bicubic(lr);
  const Tensor ens = self_ensemble(bicubic, lr);
  for (std::int64_t i = 0; i < plain.numel(); ++i) EXPECT_NEAR(ens[i], plain[i], 1e-3);
}

TEST(SelfEnsemble, OutputIsInvariantToInputTransform) {
  // Ensembling over the whole group: E(T x) = T E(x).
  const Model m = build_edsr(ModelConfig::edsr(1, 4, 2), 5);
  std::mt19937_64 rng(6);
  const Tensor lr = random_tensor({1, 3, 5, 6}, rng, 0, 255);
  const Tensor base = self_ensemble(as_upscaler(m, 2), lr);
  for (const auto& t : GeomTransform::all()) {
    const Tensor a = self_ensemble(as_upscaler(m, 2), t.apply(lr));
    const Tensor b = t.apply(base);
    ASSERT_EQ(a.shape(), b.shape());
    for (std::int64_t i = 0; i < a.numel(); ++i) EXPECT_NEAR(a[i], b[i], 1e-2) << t.name();
  }
}

TEST(SelfEnsemble, RejectsEmptyTransformSet) {
  const Upscaler id = [](const Tensor& x) { return x; };
  EXPECT_THROW(self_ensemble(id, Tensor({1, 3, 2, 2}), std::span<const GeomTransform>{}), UsageError);
}
