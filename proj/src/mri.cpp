#include "suno/mri.hpp"

#include <algorithm>

#include "suno/fft.hpp"

namespace suno {

void SensitivityMaps::validate() const {
  require(!coils.empty(), "sensitivity maps need at least one coil");
  for (const auto &c : coils)
    require_dims(c.rows() == rows() && c.cols() == cols(),
                 "sensitivity map coils disagree in shape");
}

void MultiCoilKSpace::validate() const {
  require(!coils.empty(), "k-space needs at least one coil");
  for (const auto &c : coils)
    require_dims(c.rows() == rows() && c.cols() == cols(),
                 "k-space coil planes disagree in shape");
}

std::pair<int, int> central_block(int n_y, int c) {
  require(c >= 0 && c <= n_y, "central block size out of range");
  const int mid = n_y / 2;
  return {mid - (c + 1) / 2, mid + c / 2};
}

bool CartesianMask::contains(int line) const {
  return std::binary_search(lines.begin(), lines.end(), line);
}

void CartesianMask::validate() const {
  require(n_y >= 1, "mask n_y must be positive");
  require(budget >= 1 && budget == static_cast<int>(lines.size()),
          "mask budget must equal the sampled line count and be >= 1");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    require(lines[i] >= 0 && lines[i] < n_y, "mask line index out of range");
    if (i > 0) require(lines[i] > lines[i - 1], "mask lines must be strictly increasing");
  }
  const auto [lo, hi] = central_block(n_y, static_cast<int>(fixed_center.size()));
  for (std::size_t i = 0; i < fixed_center.size(); ++i) {
    require(fixed_center[i] == lo + static_cast<int>(i),
            "fixed_center must be the conventional centered block");
    require(contains(fixed_center[i]), "fixed_center lines must be sampled");
  }
  (void)hi;
}

CartesianMask CartesianMask::make(int n_y, std::vector<int> lines, int c_fixed) {
  std::sort(lines.begin(), lines.end());
  CartesianMask m;
  m.n_y = n_y;
  m.budget = static_cast<int>(lines.size());
  m.lines = std::move(lines);
  const auto [lo, hi] = central_block(n_y, c_fixed);
  m.fixed_center.reserve(static_cast<std::size_t>(c_fixed));
  for (int k = lo; k < hi; ++k) m.fixed_center.push_back(k);
  m.validate();
  return m;
}

MultiCoilKSpace forward(const CxArray &x, const SensitivityMaps &s) {
  s.validate();
  require_dims(x.rows() == s.rows() && x.cols() == s.cols(),
               "image and sensitivity maps disagree in shape");
  MultiCoilKSpace y;
  y.coils.reserve(s.coils.size());
  for (const auto &coil : s.coils) y.coils.push_back(fft::fft2c(coil * x));
  return y;
}

CxArray adjoint(const MultiCoilKSpace &y, const SensitivityMaps &s) {
  y.validate();
  s.validate();
  require_dims(y.rows() == s.rows() && y.cols() == s.cols() && y.ncoils() == s.ncoils(),
               "k-space and sensitivity maps disagree in shape");
  CxArray out = CxArray::Zero(y.rows(), y.cols());
  for (int c = 0; c < y.ncoils(); ++c) out += s.coils[c].conjugate() * fft::ifft2c(y.coils[c]);
  return out;
}

MultiCoilKSpace apply_mask(const MultiCoilKSpace &y, const CartesianMask &m) {
  y.validate();
  m.validate();
  require_dims(static_cast<int>(y.cols()) == m.n_y, "mask n_y must match k-space width");
  MultiCoilKSpace out;
  out.coils.reserve(y.coils.size());
  for (const auto &plane : y.coils) {
    CxArray masked = CxArray::Zero(plane.rows(), plane.cols());
    for (int line : m.lines) masked.col(line) = plane.col(line);
    out.coils.push_back(std::move(masked));
  }
  return out;
}

CxArray zero_filled_recon(const MultiCoilKSpace &y, const CartesianMask &m,
                          const SensitivityMaps &s) {
  return adjoint(apply_mask(y, m), s);
}

} // namespace suno
