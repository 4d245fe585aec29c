#pragma once

#include <memory>
#include <string>
#include <vector>

#include "suno/dictionary.hpp"
#include "suno/mri.hpp"
#include "suno/phantom.hpp"

namespace suno {

enum class ReconMethod { zero_filled, cg_tikhonov };

struct ReconConfig {
  ReconMethod method = ReconMethod::cg_tikhonov;
  double lambda = 1e-3;
  double cg_tol = 1e-5;
  int cg_max_iter = 50;

  void validate() const;
};

// Deterministic, reentrant f(A^H M y) -> image estimate.
class Reconstructor {
public:
  virtual ~Reconstructor() = default;
  virtual CxArray reconstruct(const MultiCoilKSpace &y_masked, const CartesianMask &m,
                              const SensitivityMaps &s) const = 0;
  virtual std::string name() const = 0;
};

// adjoint(y_masked, s); assumes the mask was applied upstream.
CxArray reconstruct_zero_filled(const MultiCoilKSpace &y_masked, const CartesianMask &m,
                                const SensitivityMaps &s);

struct CgStats {
  int iterations = 0;
  std::vector<double> rel_residuals; // starts at 1.0, one entry per iteration after
};

// Solves (A^H M A + lambda I) x = A^H M y by CG from zero, stopping at
// relative residual <= cg_tol or the iteration cap. Column masks commute
// with the height-axis FFT, so the normal operator is applied with
// width-axis transforms only; the result is the same operator as the
// forward/mask/adjoint composition.
CxArray reconstruct_cg_tikhonov(const MultiCoilKSpace &y_masked, const CartesianMask &m,
                                const SensitivityMaps &s, const ReconConfig &cfg,
                                CgStats *stats = nullptr);

class ZeroFilledReconstructor final : public Reconstructor {
public:
  CxArray reconstruct(const MultiCoilKSpace &y, const CartesianMask &m,
                      const SensitivityMaps &s) const override {
    return reconstruct_zero_filled(y, m, s);
  }
  std::string name() const override { return "zero_filled"; }
};

class CgTikhonovReconstructor final : public Reconstructor {
public:
  explicit CgTikhonovReconstructor(ReconConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  CxArray reconstruct(const MultiCoilKSpace &y, const CartesianMask &m,
                      const SensitivityMaps &s) const override {
    return reconstruct_cg_tikhonov(y, m, s, cfg_);
  }
  std::string name() const override { return "cg_tikhonov"; }
  const ReconConfig &config() const { return cfg_; }

private:
  ReconConfig cfg_;
};

std::unique_ptr<Reconstructor> make_reconstructor(const ReconConfig &cfg);

struct LambdaFit {
  double lambda = 0.0;
  std::vector<double> mean_nrmse; // aligned with the grid as passed
};

// Grid search minimizing mean central-crop NRMSE over the given scans,
// each reconstructed with its own mask; ties break toward smaller lambda.
LambdaFit fit_lambda(const std::vector<const ScanRecord *> &scans,
                     const std::vector<CartesianMask> &masks,
                     const std::vector<double> &grid, const ReconConfig &cfg);

// fit_lambda restricted to the K dictionary neighbors, each using its own
// dictionary mask.
LambdaFit local_adapt(const MaskDictionary &dict, const Dataset &train,
                      const std::vector<std::string> &neighbor_ids,
                      const std::vector<double> &grid, const ReconConfig &cfg);

} // namespace suno
