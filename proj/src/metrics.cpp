#include "srforge/metrics.hpp"

#include <cmath>

namespace srforge {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

Eigen::VectorXd gaussian_taps() {
  Eigen::VectorXd g(kWindow);
  const int half = kWindow / 2;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - half;
    g(i) = std::exp(-d * d / (2.0 * kSigma * kSigma));
  }
  return g / g.sum();
}

// Separable Gaussian filter keeping only fully covered positions.
Plane filter_valid(const Plane& x, const Eigen::VectorXd& g) {
  const Eigen::Index rows = x.rows() - kWindow + 1;
  const Eigen::Index cols = x.cols() - kWindow + 1;
  Plane horizontal = Plane::Zero(x.rows(), cols);
  for (int k = 0; k < kWindow; ++k) horizontal += g(k) * x.middleCols(k, cols);
  Plane out = Plane::Zero(rows, cols);
  for (int k = 0; k < kWindow; ++k) out += g(k) * horizontal.middleRows(k, rows);
  return out;
}

}  // namespace

Plane rgb_to_y(const Image& img) {
  const auto p = to_planes(img);
  return rgb_to_y(p[0], p[1], p[2]);
}

double mse(const Plane& a, const Plane& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("metric inputs differ in size: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  if (a.size() == 0) throw ShapeError("metric on an empty plane");
  return (a - b).array().square().mean();
}

double psnr_from_mse(double value, double peak) {
  if (value == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(peak * peak / value);
}

double ssim_plane(const Plane& a, const Plane& b, double data_range) {
  mse(a, b);  // shape check
  if (a.rows() < kWindow || a.cols() < kWindow) {
    throw ShapeError("ssim needs planes of at least 11x11");
  }
  const double c1 = std::pow(0.01 * data_range, 2);
  const double c2 = std::pow(0.03 * data_range, 2);
  const Eigen::VectorXd g = gaussian_taps();
  const Plane mu_a = filter_valid(a, g);
  const Plane mu_b = filter_valid(b, g);
  const Plane aa = filter_valid(a.cwiseProduct(a), g) - mu_a.cwiseProduct(mu_a);
  const Plane bb = filter_valid(b.cwiseProduct(b), g) - mu_b.cwiseProduct(mu_b);
  const Plane ab = filter_valid(a.cwiseProduct(b), g) - mu_a.cwiseProduct(mu_b);
  const auto num = (2.0 * mu_a.array() * mu_b.array() + c1) * (2.0 * ab.array() + c2);
  const auto den = (mu_a.array().square() + mu_b.array().square() + c1) * (aa.array() + bb.array() + c2);
  return (num / den).mean();
}

}  // namespace srforge
