#include "suno/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace suno {

namespace {
constexpr int kSsimWindow = 7;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

RealArray magnitude(const CxArray &x) { return x.abs(); }
} // namespace

CxArray central_crop(const CxArray &img, int h, int w) {
  require_dims(h >= 1 && w >= 1 && h <= img.rows() && w <= img.cols(),
               "crop larger than image");
  const Eigen::Index r0 = img.rows() / 2 - (h + 1) / 2;
  const Eigen::Index c0 = img.cols() / 2 - (w + 1) / 2;
  return img.block(r0, c0, h, w);
}

std::pair<int, int> default_crop(Eigen::Index h, Eigen::Index w) {
  const int side = static_cast<int>(std::min<Eigen::Index>({h, w, 320}));
  return {side, side};
}

double nrmse(const CxArray &ref, const CxArray &est) {
  require_dims(ref.rows() == est.rows() && ref.cols() == est.cols(),
               "nrmse shape mismatch");
  const RealArray rm = magnitude(ref);
  const double denom = std::sqrt(rm.square().sum());
  if (!(denom > 0.0)) throw UndefinedMetricError("nrmse: zero reference");
  return std::sqrt((magnitude(est) - rm).square().sum()) / denom;
}

double psnr(const CxArray &ref, const CxArray &est) {
  require_dims(ref.rows() == est.rows() && ref.cols() == est.cols(),
               "psnr shape mismatch");
  const RealArray rm = magnitude(ref);
  const double peak = rm.maxCoeff();
  if (!(peak > 0.0)) throw UndefinedMetricError("psnr: zero reference");
  const double mse = (magnitude(est) - rm).square().mean();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(peak / std::sqrt(mse));
}

double ssim_with_peak(const CxArray &a, const CxArray &b, double peak) {
  require_dims(a.rows() == b.rows() && a.cols() == b.cols(), "ssim shape mismatch");
  require_dims(a.rows() >= kSsimWindow && a.cols() >= kSsimWindow,
               "image smaller than the ssim window");
  const RealArray x = magnitude(a);
  const RealArray y = magnitude(b);
  const double c1 = (kSsimK1 * peak) * (kSsimK1 * peak);
  const double c2 = (kSsimK2 * peak) * (kSsimK2 * peak);

  // Box-filter the five moment maps with running column sums, then slide a
  // window sum across each row band.
  const Eigen::Index h = x.rows(), w = x.cols();
  const Eigen::Index oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
  RealArray mx(oh, w), my(oh, w), mxx(oh, w), myy(oh, w), mxy(oh, w);
  for (Eigen::Index j = 0; j < w; ++j) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (Eigen::Index i = 0; i < kSsimWindow; ++i) {
      sx += x(i, j);
      sy += y(i, j);
      sxx += x(i, j) * x(i, j);
      syy += y(i, j) * y(i, j);
      sxy += x(i, j) * y(i, j);
    }
    for (Eigen::Index i = 0;; ++i) {
      mx(i, j) = sx;
      my(i, j) = sy;
      mxx(i, j) = sxx;
      myy(i, j) = syy;
      mxy(i, j) = sxy;
      if (i + 1 >= oh) break;
      const Eigen::Index drop = i, add = i + kSsimWindow;
      sx += x(add, j) - x(drop, j);
      sy += y(add, j) - y(drop, j);
      sxx += x(add, j) * x(add, j) - x(drop, j) * x(drop, j);
      syy += y(add, j) * y(add, j) - y(drop, j) * y(drop, j);
      sxy += x(add, j) * y(add, j) - x(drop, j) * y(drop, j);
    }
  }

  const double inv_n = 1.0 / (kSsimWindow * kSsimWindow);
  double total = 0.0;
  for (Eigen::Index i = 0; i < oh; ++i) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (Eigen::Index j = 0; j < kSsimWindow; ++j) {
      sx += mx(i, j);
      sy += my(i, j);
      sxx += mxx(i, j);
      syy += myy(i, j);
      sxy += mxy(i, j);
    }
    for (Eigen::Index j = 0;; ++j) {
      const double ux = sx * inv_n, uy = sy * inv_n;
      const double vx = sxx * inv_n - ux * ux;
      const double vy = syy * inv_n - uy * uy;
      const double vxy = sxy * inv_n - ux * uy;
      total += ((2.0 * ux * uy + c1) * (2.0 * vxy + c2)) /
               ((ux * ux + uy * uy + c1) * (vx + vy + c2));
      if (j + 1 >= ow) break;
      const Eigen::Index drop = j, add = j + kSsimWindow;
      sx += mx(i, add) - mx(i, drop);
      sy += my(i, add) - my(i, drop);
      sxx += mxx(i, add) - mxx(i, drop);
      syy += myy(i, add) - myy(i, drop);
      sxy += mxy(i, add) - mxy(i, drop);
    }
  }
  return total / static_cast<double>(oh * ow);
}

double ssim(const CxArray &ref, const CxArray &est) {
  const double peak = magnitude(ref).maxCoeff();
  return ssim_with_peak(ref, est, peak);
}

MetricReport evaluate(const CxArray &ref, const CxArray &est, int crop_h, int crop_w) {
  const CxArray rc = central_crop(ref, crop_h, crop_w);
  const CxArray ec = central_crop(est, crop_h, crop_w);
  MetricReport r;
  r.crop_h = crop_h;
  r.crop_w = crop_w;
  r.nrmse = nrmse(rc, ec);
  r.ssim = ssim(rc, ec);
  r.psnr_db = psnr(rc, ec);
  return r;
}

} // namespace suno
