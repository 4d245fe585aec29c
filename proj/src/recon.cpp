#include "suno/recon.hpp"

#include <algorithm>
#include <cmath>

#include "suno/fft.hpp"
#include "suno/metrics.hpp"
#include "suno/parallel.hpp"

namespace suno {

void ReconConfig::validate() const {
  require(lambda >= 0.0, "lambda must be nonnegative");
  require(cg_tol > 0.0 && cg_tol < 1.0, "cg_tol must lie in (0, 1)");
  require(cg_max_iter >= 1, "cg_max_iter must be at least 1");
}

CxArray reconstruct_zero_filled(const MultiCoilKSpace &y_masked, const CartesianMask &m,
                                const SensitivityMaps &s) {
  require_dims(static_cast<int>(y_masked.cols()) == m.n_y, "mask n_y must match k-space width");
  return adjoint(y_masked, s);
}

namespace {

double self_inner(const CxArray &a) { return a.abs2().sum(); }

double real_inner(const CxArray &a, const CxArray &b) {
  return (a.conjugate() * b).sum().real();
}

// The normal operator runs in width-shifted, transposed coordinates: the
// transform axis is contiguous, the shifts move into the precomputed coil
// maps and the mask indices, and both unitary scalings fold into the mask
// weights. Same operator as adjoint(apply_mask(forward(x))) + lambda x.
struct MaskedNormalOperator {
  std::vector<CxArray> smap_t;      // ishiftW(S_c)^T, shape W x H
  std::vector<CxArray> smap_conj_t;
  Eigen::ArrayXcd keep_over_w;      // 1/W on raw indices of sampled lines
  double lambda = 0.0;
  Eigen::Index ht = 0, wt = 0; // transposed shape: rows = W, cols = H

  MaskedNormalOperator(const SensitivityMaps &s, const CartesianMask &m, double lam) {
    const Eigen::Index h = s.rows(), w = s.cols();
    ht = w;
    wt = h;
    lambda = lam;
    smap_t.reserve(s.coils.size());
    smap_conj_t.reserve(s.coils.size());
    for (const auto &coil : s.coils) {
      CxArray t = fft::ifftshift_width(coil).transpose();
      smap_conj_t.push_back(t.conjugate());
      smap_t.push_back(std::move(t));
    }
    keep_over_w = Eigen::ArrayXcd::Zero(w);
    for (int line : m.lines)
      keep_over_w[(line + w - w / 2) % w] = 1.0 / static_cast<double>(w);
  }

  void apply(const CxArray &z, CxArray &out, CxArray &t1, CxArray &t2) const {
    out = lambda * z;
    const int n = static_cast<int>(ht);
    for (std::size_t c = 0; c < smap_t.size(); ++c) {
      t1 = smap_t[c] * z;
      for (Eigen::Index j = 0; j < wt; ++j) {
        fft::fwd_raw(t2.col(j).data(), t1.col(j).data(), n);
        t2.col(j) *= keep_over_w;
        fft::inv_raw(t1.col(j).data(), t2.col(j).data(), n);
      }
      out += smap_conj_t[c] * t1;
    }
  }
};

} // namespace

CxArray reconstruct_cg_tikhonov(const MultiCoilKSpace &y_masked, const CartesianMask &m,
                                const SensitivityMaps &s, const ReconConfig &cfg,
                                CgStats *stats) {
  cfg.validate();
  const CxArray b = adjoint(apply_mask(y_masked, m), s);

  const double b_norm2 = self_inner(b);
  if (stats) {
    stats->iterations = 0;
    stats->rel_residuals.assign(1, 1.0);
  }
  if (b_norm2 == 0.0) return CxArray::Zero(b.rows(), b.cols());
  const double b_norm = std::sqrt(b_norm2);

  const MaskedNormalOperator op(s, m, cfg.lambda);
  CxArray x = CxArray::Zero(op.ht, op.wt);
  CxArray r = fft::ifftshift_width(b).transpose();
  CxArray p = r;
  CxArray q(op.ht, op.wt), t1(op.ht, op.wt), t2(op.ht, op.wt);

  double rs_old = b_norm2;
  for (int k = 1; k <= cfg.cg_max_iter; ++k) {
    op.apply(p, q, t1, t2);
    const double pq = real_inner(p, q);
    if (!std::isfinite(pq))
      throw NumericalError("cg_tikhonov: non-finite curvature at iteration " + std::to_string(k));
    if (pq <= 0.0) break; // numerically converged direction
    const double alpha = rs_old / pq;
    x += alpha * p;
    r -= alpha * q;
    const double rs_new = self_inner(r);
    if (!std::isfinite(rs_new))
      throw NumericalError("cg_tikhonov: non-finite residual at iteration " + std::to_string(k));
    const double rel = std::sqrt(rs_new) / b_norm;
    if (stats) {
      stats->iterations = k;
      stats->rel_residuals.push_back(rel);
    }
    if (rel <= cfg.cg_tol) break;
    p = r + (rs_new / rs_old) * p;
    rs_old = rs_new;
  }
  return fft::fftshift_width(x.transpose());
}

std::unique_ptr<Reconstructor> make_reconstructor(const ReconConfig &cfg) {
  if (cfg.method == ReconMethod::zero_filled) return std::make_unique<ZeroFilledReconstructor>();
  return std::make_unique<CgTikhonovReconstructor>(cfg);
}

LambdaFit fit_lambda(const std::vector<const ScanRecord *> &scans,
                     const std::vector<CartesianMask> &masks,
                     const std::vector<double> &grid, const ReconConfig &cfg) {
  require(!scans.empty(), "fit_lambda: empty training split");
  require(!grid.empty(), "fit_lambda: empty lambda grid");
  require(scans.size() == masks.size(), "fit_lambda: masks must align with scans");

  LambdaFit fit;
  fit.mean_nrmse.assign(grid.size(), 0.0);

  const auto [ch, cw] =
      default_crop(scans.front()->ground_truth.rows(), scans.front()->ground_truth.cols());
  std::vector<double> losses(grid.size() * scans.size());
  parallel_for(losses.size(), [&](std::size_t idx) {
    const std::size_t g = idx / scans.size();
    const std::size_t i = idx % scans.size();
    ReconConfig c = cfg;
    c.lambda = grid[g];
    const ScanRecord &scan = *scans[i];
    const CxArray est = reconstruct_cg_tikhonov(
        apply_mask(scan.kspace_full, masks[i]), masks[i], scan.smaps, c);
    losses[idx] = nrmse(central_crop(scan.ground_truth, ch, cw), central_crop(est, ch, cw));
  });

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < scans.size(); ++i) sum += losses[g * scans.size() + i];
    fit.mean_nrmse[g] = sum / static_cast<double>(scans.size());
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (fit.mean_nrmse[g] < fit.mean_nrmse[best] ||
        (fit.mean_nrmse[g] == fit.mean_nrmse[best] && grid[g] < grid[best]))
      best = g;
  }
  fit.lambda = grid[best];
  return fit;
}

LambdaFit local_adapt(const MaskDictionary &dict, const Dataset &train,
                      const std::vector<std::string> &neighbor_ids,
                      const std::vector<double> &grid, const ReconConfig &cfg) {
  require(!neighbor_ids.empty(), "local_adapt: no neighbors given");
  std::vector<const ScanRecord *> scans;
  std::vector<CartesianMask> masks;
  for (const auto &id : neighbor_ids) {
    const ScanRecord *rec = nullptr;
    for (const auto &r : train.records)
      if (r.id == id) {
        rec = &r;
        break;
      }
    if (!rec) throw LookupError("local_adapt: unknown scan id " + id);
    const DictionaryEntry *entry = dict.find(id);
    if (!entry) throw LookupError("local_adapt: scan id missing from dictionary: " + id);
    scans.push_back(rec);
    masks.push_back(entry->mask);
  }
  return fit_lambda(scans, masks, grid, cfg);
}

} // namespace suno
