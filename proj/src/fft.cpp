#define EIGEN_FFTW_DEFAULT
#include "suno/fft.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>
#include <unsupported/Eigen/FFT>

namespace suno::fft {

namespace {

// One engine per thread; plans are cached per length inside it. FFTW's
// planner mutates global state, so it is made thread-safe once up front.
Eigen::FFT<double> &engine() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_make_planner_thread_safe(); });
  thread_local Eigen::FFT<double> f(Eigen::FFT<double>::impl_type(),
                                    Eigen::FFT<double>::Unscaled);
  return f;
}

// Unnormalized transform of every column; scaling is applied by callers.
CxArray transform_cols(const CxArray &x, bool inverse) {
  CxArray out(x.rows(), x.cols());
  auto &f = engine();
  const int n = static_cast<int>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (inverse)
      f.inv(out.col(j).data(), x.col(j).data(), n);
    else
      f.fwd(out.col(j).data(), x.col(j).data(), n);
  }
  return out;
}

CxArray circshift(const CxArray &x, Eigen::Index dr, Eigen::Index dc) {
  const Eigen::Index h = x.rows(), w = x.cols();
  CxArray out(h, w);
  for (Eigen::Index j = 0; j < w; ++j) {
    const Eigen::Index sj = (j + dc) % w;
    for (Eigen::Index i = 0; i < h; ++i) out((i + dr) % h, sj) = x(i, j);
  }
  return out;
}

} // namespace

void fwd_raw(Complex *dst, const Complex *src, int n) { engine().fwd(dst, src, n); }

void inv_raw(Complex *dst, const Complex *src, int n) { engine().inv(dst, src, n); }

CxArray fftshift2(const CxArray &x) { return circshift(x, x.rows() / 2, x.cols() / 2); }

CxArray ifftshift2(const CxArray &x) {
  return circshift(x, x.rows() - x.rows() / 2, x.cols() - x.cols() / 2);
}

CxArray fftshift_width(const CxArray &x) { return circshift(x, 0, x.cols() / 2); }

CxArray ifftshift_width(const CxArray &x) {
  return circshift(x, 0, x.cols() - x.cols() / 2);
}

CxArray fft2c(const CxArray &x) {
  CxArray t = transform_cols(ifftshift2(x), false);
  t = transform_cols(t.transpose(), false).transpose();
  t *= 1.0 / std::sqrt(static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
  return fftshift2(t);
}

CxArray ifft2c(const CxArray &x) {
  CxArray t = transform_cols(ifftshift2(x), true);
  t = transform_cols(t.transpose(), true).transpose();
  t *= 1.0 / std::sqrt(static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
  return fftshift2(t);
}

namespace {

CxArray width_transform(const CxArray &x, bool inverse) {
  const Eigen::Index w = x.cols();
  CxArray t = ifftshift_width(x);
  t = transform_cols(t.transpose(), inverse).transpose();
  t *= 1.0 / std::sqrt(static_cast<double>(w));
  return fftshift_width(t);
}

} // namespace

CxArray fft_width_c(const CxArray &x) { return width_transform(x, false); }

CxArray ifft_width_c(const CxArray &x) { return width_transform(x, true); }

} // namespace suno::fft
