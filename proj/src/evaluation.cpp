#include "srforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>

#include "srforge/metrics.hpp"
#include "srforge/parallel.hpp"
#include "srforge/resize.hpp"

namespace srforge {

Convention convention_from_string(std::string_view s) {
  if (s == "benchmark") return Convention::benchmark;
  if (s == "div2k") return Convention::div2k;
  throw UsageError("unknown convention \"" + std::string(s) + "\" (expected benchmark|div2k)");
}

std::string_view to_string(Convention c) { return c == Convention::benchmark ? "benchmark" : "div2k"; }

std::string EvalProtocol::describe() const {
  std::ostringstream os;
  os << "convention=" << to_string(convention) << " color=" << (luma_only() ? "y" : "rgb")
     << " border=" << border() << " scale=" << scale;
  return os.str();
}

namespace {

std::string format_psnr(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string format_ssim(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void EvalReport::finalize() {
  std::sort(images.begin(), images.end(),
            [](const ImageScore& a, const ImageScore& b) { return a.name < b.name; });
  std::sort(errors.begin(), errors.end());
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  int finite = 0;
  infinite_psnr = 0;
  for (const auto& s : images) {
    if (std::isinf(s.psnr)) {
      ++infinite_psnr;
    } else {
      psnr_sum += s.psnr;
      ++finite;
    }
    ssim_sum += s.ssim;
  }
  mean_psnr = finite > 0 ? psnr_sum / finite : kPsnrInfinity;
  mean_ssim = images.empty() ? 0.0 : ssim_sum / static_cast<double>(images.size());
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "# " << protocol.describe() << '\n';
  os << "# name\tpsnr_db\tssim\n";
  for (const auto& s : images) os << s.name << '\t' << format_psnr(s.psnr) << '\t' << format_ssim(s.ssim) << '\n';
  for (const auto& e : errors) os << "# error\t" << e << '\n';
  os << "mean\t" << format_psnr(mean_psnr) << '\t' << format_ssim(mean_ssim) << "\timages=" << images.size()
     << "\tinfinite_psnr_excluded=" << infinite_psnr << "\terrors=" << errors.size() << '\n';
  return os.str();
}

ImageScore score_pair(const std::string& name, const Image& sr, const Image& gt,
                      const EvalProtocol& protocol) {
  if (sr.width != gt.width || sr.height != gt.height) {
    throw ShapeError(name + ": size mismatch " + std::to_string(sr.width) + "x" + std::to_string(sr.height) +
                     " vs " + std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  const int border = protocol.border();
  ImageScore score{name, 0.0, 0.0};
  if (protocol.luma_only()) {
    const Plane a = rgb_to_y(sr);
    const Plane b = rgb_to_y(gt);
    const Plane ca = crop_border(a, border);
    const Plane cb = crop_border(b, border);
    score.psnr = psnr(ca, cb);
    score.ssim = ssim(ca, cb);
    return score;
  }
  const auto pa = to_planes(sr);
  const auto pb = to_planes(gt);
  double err = 0.0;
  double ssim_sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Plane ca = crop_border(pa[c], border);
    const Plane cb = crop_border(pb[c], border);
    err += mse(ca, cb);
    ssim_sum += ssim(ca, cb);
  }
  score.psnr = psnr_from_mse(err / 3.0);
  score.ssim = ssim_sum / 3.0;
  return score;
}

EvalReport evaluate(const std::vector<NamedImagePair>& pairs, const EvalProtocol& protocol) {
  EvalReport report;
  report.protocol = protocol;
  std::mutex mu;
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& p = pairs[i];
    try {
      ImageScore s = score_pair(p.name, p.sr, p.gt, protocol);
      std::lock_guard lock(mu);
      report.images.push_back(std::move(s));
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      report.errors.push_back(p.name + ": " + e.what());
    }
  });
  report.finalize();
  return report;
}

Image modcrop(const Image& img, int multiple) {
  if (multiple < 1) throw UsageError("modcrop multiple must be positive");
  const int w = img.width - img.width % multiple;
  const int h = img.height - img.height % multiple;
  if (w == 0 || h == 0) throw UsageError("image smaller than the crop multiple");
  return crop(img, 0, 0, w, h);
}

BicubicBaseline bicubic_baseline(const Image& hr, int scale) {
  BicubicBaseline out;
  out.gt = modcrop(hr, scale);
  out.lr = bicubic_resize(out.gt, out.gt.width / scale, out.gt.height / scale, true);
  out.sr = bicubic_resize(out.lr, out.gt.width, out.gt.height, true);
  return out;
}

EvalReport bicubic_baseline_report(const std::vector<std::pair<std::string, Image>>& hr_images,
                                   int scale) {
  std::vector<NamedImagePair> pairs(hr_images.size());
  parallel_for(hr_images.size(), [&](std::size_t i) {
    BicubicBaseline b = bicubic_baseline(hr_images[i].second, scale);
    pairs[i] = {hr_images[i].first, std::move(b.sr), std::move(b.gt)};
  });
  return evaluate(pairs, EvalProtocol{Convention::benchmark, scale});
}

}  // namespace srforge
