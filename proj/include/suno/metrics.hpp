#pragma once

#include "suno/types.hpp"

namespace suno {

struct MetricReport {
  double nrmse = 0.0;
  double ssim = 0.0;
  double psnr_db = 0.0; // +inf when the estimate matches the reference
  int crop_h = 0;
  int crop_w = 0;
};

// Centered h-by-w window using the same convention as the k-space center:
// rows [H/2 - ceil(h/2), H/2 + floor(h/2)), columns alike.
CxArray central_crop(const CxArray &img, int h, int w);

// Evaluation crop: 320x320 for paper-size inputs, min(h, w) square below.
std::pair<int, int> default_crop(Eigen::Index h, Eigen::Index w);

// || |est| - |ref| ||_2 / || |ref| ||_2 on magnitude images.
double nrmse(const CxArray &ref, const CxArray &est);

// 20 log10(max|ref| / RMSE(|est|, |ref|)); exact match returns +inf.
double psnr(const CxArray &ref, const CxArray &est);

// Mean of the Wang-2004 SSIM map over magnitudes, uniform 7x7 window,
// C1 = (0.01 L)^2, C2 = (0.03 L)^2. The one-argument peak uses
// L = max|ref|, which breaks ref/est symmetry; pass L explicitly for the
// symmetric variant.
double ssim(const CxArray &ref, const CxArray &est);
double ssim_with_peak(const CxArray &a, const CxArray &b, double peak);

// All three metrics on the central crop; used by the pipeline's CSV rows.
MetricReport evaluate(const CxArray &ref, const CxArray &est, int crop_h, int crop_w);

} // namespace suno
