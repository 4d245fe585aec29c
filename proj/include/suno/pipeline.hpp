#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "suno/dictionary.hpp"
#include "suno/metrics.hpp"
#include "suno/phantom.hpp"
#include "suno/recon.hpp"
#include "suno/sampler.hpp"

namespace suno {

enum class MaskKind { lf, equispaced, uniform_random, vdpd, suno, oracle };

std::string mask_kind_name(MaskKind k);
MaskKind mask_kind_from_name(const std::string &name);

enum class InitKind { greedy, uniform_random, lf, vdpd, equispaced, provided };

std::string init_kind_name(InitKind k);
InitKind init_kind_from_name(const std::string &name);

// Versioned run configuration ("suno-manifest/1"). The budget follows
// B = round(n_y / accel) and c = round(B / 3); accel "custom" takes
// explicit budget/fixed_center instead.
struct RunManifest {
  double accel = 4.0;
  int budget_override = 0;       // custom accel only
  int fixed_center_override = 0; // custom accel only
  int rounds = 2;                // ICD rounds after initialization
  InitKind init = InitKind::greedy;
  std::string init_masks_dir;    // when init == provided
  int n_iter = 1;
  SamplerLoss loss = SamplerLoss::nrmse;
  std::uint64_t seed = 1234;
  double vdpd_density_power = 1.0;
  ReconConfig recon;
  std::vector<double> lambda_grid{1e-4, 1e-3, 1e-2};
  int n_low_freq = 0; // 0 -> derived c
  std::string dataset_path;
  bool emit_images = true;
  double error_display_max = 0.1; // error maps render [0, this] over 8 bits

  SamplerConfig sampler_for(int n_y) const;
  int derived_n_low_freq(int n_y) const;

  static RunManifest from_json_file(const std::filesystem::path &path);
  void to_json_file(const std::filesystem::path &path) const;
};

struct RoundLog {
  std::string stage; // "fit", "greedy", "icd"
  double lambda = 0.0;
  double mean_loss = 0.0;
};

struct TrainResult {
  MaskDictionary dict;
  double lambda_star = 0.0;
  std::vector<RoundLog> logs;
  std::vector<std::string> train_ids;           // optimization order
  std::vector<OptTrace> greedy_traces;          // aligned with train_ids (greedy init only)
  std::vector<std::vector<OptTrace>> icd_traces; // per round, aligned with train_ids
  long recon_calls = 0;
  double seconds = 0.0;
};

// Alternating loop: initialize per-scan masks, fit lambda, run greedy when
// init == greedy, then per round refit lambda and ICD every scan. Ends with
// a final lambda refit so the returned reconstructor matches the returned
// masks. With the nrmse loss the per-round mean training loss is
// non-increasing across fits and ICD rounds.
TrainResult alternating_train(const Dataset &dataset, const RunManifest &manifest);

struct BenchRow {
  std::string id;
  std::string mask_kind;
  double accel = 0.0;
  MetricReport metrics;
  CartesianMask mask;
  std::string neighbor_id;    // suno / oracle rows
  double neighbor_distance = 0.0;
  CxArray recon_image;        // kept when manifest.emit_images
  CxArray reference;
};

struct KindAggregate {
  int rows = 0;
  double nrmse_mean = 0.0, nrmse_std = 0.0;
  double ssim_mean = 0.0, ssim_std = 0.0;
  double psnr_mean = 0.0, psnr_std = 0.0;
};

struct BenchReport {
  double accel = 0.0;
  double error_display_max = 0.1;
  std::vector<BenchRow> rows;
  std::map<std::string, KindAggregate> aggregates;
  std::map<std::string, long> recon_calls;
  std::map<std::string, double> timings_sec;
  std::vector<OptTrace> oracle_traces;
};

KindAggregate aggregate_rows(const std::vector<BenchRow> &rows, const std::string &kind);

// Nearest-neighbor selection + reconstruction + metrics for every test
// scan ("suno" rows only).
BenchReport test_pipeline(const MaskDictionary &dict, double lambda_star,
                          const std::vector<const ScanRecord *> &test,
                          const RunManifest &manifest);

// Full comparison across mask kinds on the test split. Training runs
// internally when suno/oracle rows are requested and no result is passed
// in. The oracle runs ICD on the test scan starting from its SUNO mask, so
// oracle <= suno holds per scan by construction.
BenchReport bench(const Dataset &dataset, const RunManifest &manifest,
                  const std::vector<MaskKind> &kinds, const TrainResult *pretrained = nullptr);

// metrics.csv, summary.json, mask JSON files, and 8-bit PGM images of
// masks, reconstructions, and error maps.
void emit_reports(const BenchReport &report, const std::filesystem::path &out_dir);

} // namespace suno
