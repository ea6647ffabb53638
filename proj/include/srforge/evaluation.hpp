#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srforge/image.hpp"

namespace srforge {

/// benchmark: luma only, `scale` px border. div2k: all RGB channels, `6 + scale` px border.
enum class Convention { benchmark, div2k };

Convention convention_from_string(std::string_view s);
std::string_view to_string(Convention c);

struct EvalProtocol {
  Convention convention = Convention::benchmark;
  int scale = 2;

  int border() const { return convention == Convention::benchmark ? scale : 6 + scale; }
  bool luma_only() const { return convention == Convention::benchmark; }
  /// e.g. "convention=benchmark color=y border=2 scale=2".
  std::string describe() const;
};

struct ImageScore {
  std::string name;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct EvalReport {
  EvalProtocol protocol;
  std::vector<ImageScore> images;  // sorted by name
  std::vector<std::string> errors;
  double mean_psnr = 0.0;          // over finite PSNR values only
  double mean_ssim = 0.0;
  int infinite_psnr = 0;

  /// Sorts by name and recomputes the aggregates.
  void finalize();
  /// One tab-separated record per image, then a summary line.
  std::string to_text() const;
};

/// Scores one SR/GT pair under `protocol`; throws ShapeError on a size mismatch.
ImageScore score_pair(const std::string& name, const Image& sr, const Image& gt,
                      const EvalProtocol& protocol);

struct NamedImagePair {
  std::string name;
  Image sr;
  Image gt;
};

/// Scores pairs in parallel; mismatched pairs land in `errors` instead of `images`.
EvalReport evaluate(const std::vector<NamedImagePair>& pairs, const EvalProtocol& protocol);

/// Crops the bottom/right edges so both dimensions are multiples of `multiple`.
Image modcrop(const Image& img, int multiple);

/// Bicubic baseline SR of a ground-truth image: modcrop, antialiased bicubic
/// downscale, 8-bit store, bicubic upscale, 8-bit store. Returns {LR, SR, cropped GT}.
struct BicubicBaseline {
  Image lr;
  Image sr;
  Image gt;
};
BicubicBaseline bicubic_baseline(const Image& hr, int scale);

/// Runs bicubic_baseline over a set of HR images and scores it under the benchmark convention.
EvalReport bicubic_baseline_report(const std::vector<std::pair<std::string, Image>>& hr_images,
                                   int scale);

}  // namespace srforge
