#include "suno/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "suno/metrics.hpp"
#include "suno/parallel.hpp"
#include "suno/rng.hpp"

namespace suno {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagInit = 0x696E6974;     // "init"
constexpr std::uint64_t kTagBench = 0x626E6368;    // "bnch"

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string loss_name(SamplerLoss l) {
  return l == SamplerLoss::nrmse ? "nrmse" : "one_minus_ssim";
}

SamplerLoss loss_from_name(const std::string &s) {
  if (s == "nrmse") return SamplerLoss::nrmse;
  if (s == "one_minus_ssim") return SamplerLoss::one_minus_ssim;
  throw DataError("unknown sampler loss: " + s);
}

std::string method_name(ReconMethod m) {
  return m == ReconMethod::zero_filled ? "zero_filled" : "cg_tikhonov";
}

ReconMethod method_from_name(const std::string &s) {
  if (s == "zero_filled") return ReconMethod::zero_filled;
  if (s == "cg_tikhonov") return ReconMethod::cg_tikhonov;
  throw DataError("unknown recon method: " + s);
}

} // namespace

std::string mask_kind_name(MaskKind k) {
  switch (k) {
    case MaskKind::lf: return "lf";
    case MaskKind::equispaced: return "equispaced";
    case MaskKind::uniform_random: return "uniform_random";
    case MaskKind::vdpd: return "vdpd";
    case MaskKind::suno: return "suno";
    case MaskKind::oracle: return "oracle";
  }
  return "lf";
}

MaskKind mask_kind_from_name(const std::string &name) {
  for (MaskKind k : {MaskKind::lf, MaskKind::equispaced, MaskKind::uniform_random,
                     MaskKind::vdpd, MaskKind::suno, MaskKind::oracle})
    if (mask_kind_name(k) == name) return k;
  throw UsageError("unknown mask kind: " + name);
}

std::string init_kind_name(InitKind k) {
  switch (k) {
    case InitKind::greedy: return "greedy";
    case InitKind::uniform_random: return "uniform_random";
    case InitKind::lf: return "lf";
    case InitKind::vdpd: return "vdpd";
    case InitKind::equispaced: return "equispaced";
    case InitKind::provided: return "provided";
  }
  return "greedy";
}

InitKind init_kind_from_name(const std::string &name) {
  for (InitKind k : {InitKind::greedy, InitKind::uniform_random, InitKind::lf, InitKind::vdpd,
                     InitKind::equispaced, InitKind::provided})
    if (init_kind_name(k) == name) return k;
  throw UsageError("unknown init kind: " + name);
}

SamplerConfig RunManifest::sampler_for(int n_y) const {
  SamplerConfig cfg;
  if (budget_override > 0) {
    cfg.budget = budget_override;
    cfg.fixed_center = fixed_center_override;
  } else {
    require(accel > 0.0, "accel must be positive");
    cfg.budget = static_cast<int>(std::llround(n_y / accel));
    cfg.fixed_center = static_cast<int>(std::llround(cfg.budget / 3.0));
  }
  cfg.n_iter = n_iter;
  cfg.loss = loss;
  cfg.rng_seed = seed;
  cfg.validate(n_y);
  return cfg;
}

int RunManifest::derived_n_low_freq(int n_y) const {
  return n_low_freq > 0 ? n_low_freq : sampler_for(n_y).fixed_center;
}

RunManifest RunManifest::from_json_file(const std::filesystem::path &path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed manifest JSON: ") + e.what());
  }

  RunManifest m;
  try {
    const std::string schema = j.at("schema").get<std::string>();
    if (schema != "suno-manifest/1") throw DataError("unsupported manifest schema: " + schema);
    m.accel = j.at("accel").get<double>();
    m.budget_override = j.value("budget", 0);
    m.fixed_center_override = j.value("fixed_center", 0);
    m.rounds = j.value("rounds", 2);
    m.init = init_kind_from_name(j.value("init", std::string("greedy")));
    m.init_masks_dir = j.value("init_masks_dir", std::string());
    m.n_iter = j.value("n_iter", 1);
    m.loss = loss_from_name(j.value("loss", std::string("nrmse")));
    m.seed = j.value("seed", std::uint64_t{1234});
    m.vdpd_density_power = j.value("vdpd_density_power", 1.0);
    if (j.contains("recon")) {
      const auto &r = j.at("recon");
      m.recon.method = method_from_name(r.value("method", std::string("cg_tikhonov")));
      m.recon.lambda = r.value("lambda", 1e-3);
      m.recon.cg_tol = r.value("cg_tol", 1e-5);
      m.recon.cg_max_iter = r.value("cg_max_iter", 50);
    }
    if (j.contains("lambda_grid")) m.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    m.n_low_freq = j.value("n_low_freq", 0);
    m.dataset_path = j.value("dataset", std::string());
    m.emit_images = j.value("emit_images", true);
    m.error_display_max = j.value("error_display_max", 0.1);
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed manifest fields: ") + e.what());
  }
  require(m.rounds >= 0, "rounds must be nonnegative");
  require(!m.lambda_grid.empty(), "lambda_grid must be non-empty");
  m.recon.validate();
  return m;
}

void RunManifest::to_json_file(const std::filesystem::path &path) const {
  json j;
  j["schema"] = "suno-manifest/1";
  j["accel"] = accel;
  if (budget_override > 0) {
    j["budget"] = budget_override;
    j["fixed_center"] = fixed_center_override;
  }
  j["rounds"] = rounds;
  j["init"] = init_kind_name(init);
  if (!init_masks_dir.empty()) j["init_masks_dir"] = init_masks_dir;
  j["n_iter"] = n_iter;
  j["loss"] = loss_name(loss);
  j["seed"] = seed;
  j["vdpd_density_power"] = vdpd_density_power;
  j["recon"] = {{"method", method_name(recon.method)},
                {"lambda", recon.lambda},
                {"cg_tol", recon.cg_tol},
                {"cg_max_iter", recon.cg_max_iter}};
  j["lambda_grid"] = lambda_grid;
  j["n_low_freq"] = n_low_freq;
  j["dataset"] = dataset_path;
  j["emit_images"] = emit_images;
  j["error_display_max"] = error_display_max;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
}

namespace {

std::vector<CartesianMask> initial_masks(const std::vector<const ScanRecord *> &train,
                                         const RunManifest &mf, const SamplerConfig &cfg,
                                         int n_y) {
  std::vector<CartesianMask> masks;
  masks.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    switch (mf.init) {
      case InitKind::greedy: // greedy mode still seeds the first lambda fit
      case InitKind::uniform_random:
        masks.push_back(mask_uniform_random(n_y, cfg.budget, cfg.fixed_center,
                                            derive_seed(mf.seed, kTagInit, i)));
        break;
      case InitKind::lf:
        masks.push_back(mask_low_frequency(n_y, cfg.budget));
        break;
      case InitKind::vdpd:
        masks.push_back(mask_vdpd_1d(n_y, cfg.budget, cfg.fixed_center,
                                     derive_seed(mf.seed, kTagInit, i), mf.vdpd_density_power));
        break;
      case InitKind::equispaced:
        masks.push_back(mask_equispaced(n_y, cfg.budget, cfg.fixed_center));
        break;
      case InitKind::provided: {
        require(!mf.init_masks_dir.empty(), "init=provided needs init_masks_dir");
        masks.push_back(read_mask_json(std::filesystem::path(mf.init_masks_dir) /
                                       (train[i]->id + ".json")));
        break;
      }
    }
  }
  return masks;
}

double mean_of(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

} // namespace

TrainResult alternating_train(const Dataset &dataset, const RunManifest &manifest) {
  const double t0 = now_seconds();
  const auto train = dataset.split_view(Split::train);
  require(!train.empty(), "alternating_train: empty train split");
  const int n_y = static_cast<int>(dataset.width());
  const SamplerConfig cfg = manifest.sampler_for(n_y);
  require(manifest.recon.method == ReconMethod::cg_tikhonov,
          "alternating_train: training expects the cg_tikhonov reconstructor");

  TrainResult result;
  for (const auto *scan : train) result.train_ids.push_back(scan->id);

  std::vector<CartesianMask> masks = initial_masks(train, manifest, cfg, n_y);

  ReconConfig rcfg = manifest.recon;
  LambdaFit fit0 = fit_lambda(train, masks, manifest.lambda_grid, rcfg);
  rcfg.lambda = fit0.lambda;
  result.logs.push_back({"fit", fit0.lambda,
                         *std::min_element(fit0.mean_nrmse.begin(), fit0.mean_nrmse.end())});

  if (manifest.init == InitKind::greedy) {
    const CgTikhonovReconstructor recon(rcfg);
    result.greedy_traces.resize(train.size());
    std::vector<double> finals(train.size());
    std::vector<std::string> failures(train.size());
    parallel_for(train.size(), [&](std::size_t i) {
      try {
        auto [mask, trace] = greedy_optimize(*train[i], recon, cfg);
        masks[i] = std::move(mask);
        finals[i] = trace.final_loss;
        result.greedy_traces[i] = std::move(trace);
      } catch (const Error &e) {
        failures[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < train.size(); ++i)
      if (!failures[i].empty())
        throw NumericalError("greedy failed on scan " + train[i]->id + ": " + failures[i]);
    for (const auto &t : result.greedy_traces) result.recon_calls += t.recon_calls;

    result.logs.push_back({"greedy", rcfg.lambda, mean_of(finals)});
  }

  result.icd_traces.resize(static_cast<std::size_t>(manifest.rounds));
  for (int round = 1; round <= manifest.rounds; ++round) {
    LambdaFit fit = fit_lambda(train, masks, manifest.lambda_grid, manifest.recon);
    rcfg.lambda = fit.lambda;
    result.logs.push_back({"fit", fit.lambda,
                           *std::min_element(fit.mean_nrmse.begin(), fit.mean_nrmse.end())});

    const CgTikhonovReconstructor recon(rcfg);
    auto &traces = result.icd_traces[static_cast<std::size_t>(round - 1)];
    traces.resize(train.size());
    std::vector<double> finals(train.size());
    std::vector<std::string> failures(train.size());
    parallel_for(train.size(), [&](std::size_t i) {
      try {
        auto [mask, trace] = icd_optimize(*train[i], recon, cfg, masks[i]);
        masks[i] = std::move(mask);
        finals[i] = trace.final_loss;
        traces[i] = std::move(trace);
      } catch (const Error &e) {
        failures[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < train.size(); ++i)
      if (!failures[i].empty())
        throw NumericalError("icd round " + std::to_string(round) + " failed on scan " +
                             train[i]->id + ": " + failures[i]);
    for (const auto &t : traces) result.recon_calls += t.recon_calls;
    result.logs.push_back({"icd", rcfg.lambda, mean_of(finals)});
  }

  LambdaFit final_fit = fit_lambda(train, masks, manifest.lambda_grid, manifest.recon);
  result.lambda_star = final_fit.lambda;
  result.logs.push_back(
      {"fit", final_fit.lambda,
       *std::min_element(final_fit.mean_nrmse.begin(), final_fit.mean_nrmse.end())});

  result.dict = build_dictionary(train, masks, manifest.derived_n_low_freq(n_y));
  result.seconds = now_seconds() - t0;
  return result;
}

KindAggregate aggregate_rows(const std::vector<BenchRow> &rows, const std::string &kind) {
  KindAggregate a;
  std::vector<double> nr, ss, ps;
  for (const auto &r : rows) {
    if (r.mask_kind != kind) continue;
    nr.push_back(r.metrics.nrmse);
    ss.push_back(r.metrics.ssim);
    ps.push_back(r.metrics.psnr_db);
  }
  a.rows = static_cast<int>(nr.size());
  if (a.rows == 0) return a;
  auto mean_std = [](const std::vector<double> &v, double &mean, double &sd) {
    mean = mean_of(v);
    if (v.size() < 2) {
      sd = 0.0;
      return;
    }
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
  };
  mean_std(nr, a.nrmse_mean, a.nrmse_std);
  mean_std(ss, a.ssim_mean, a.ssim_std);
  mean_std(ps, a.psnr_mean, a.psnr_std);
  return a;
}

namespace {

BenchRow make_row(const ScanRecord &scan, const CartesianMask &mask, const std::string &kind,
                  const RunManifest &mf, const Reconstructor &recon) {
  BenchRow row;
  row.id = scan.id;
  row.mask_kind = kind;
  row.accel = mf.accel;
  row.mask = mask;
  const CxArray est = recon.reconstruct(apply_mask(scan.kspace_full, mask), mask, scan.smaps);
  const auto [ch, cw] = default_crop(scan.ground_truth.rows(), scan.ground_truth.cols());
  row.metrics = evaluate(scan.ground_truth, est, ch, cw);
  if (mf.emit_images) {
    row.recon_image = est;
    row.reference = scan.ground_truth;
  }
  return row;
}

} // namespace

BenchReport test_pipeline(const MaskDictionary &dict, double lambda_star,
                          const std::vector<const ScanRecord *> &test,
                          const RunManifest &manifest) {
  require(!dict.entries.empty(), "test_pipeline: empty dictionary");
  BenchReport report;
  report.accel = manifest.accel;
  report.error_display_max = manifest.error_display_max;

  ReconConfig rcfg = manifest.recon;
  rcfg.lambda = lambda_star;
  const auto recon = make_reconstructor(rcfg);

  const double t0 = now_seconds();
  report.rows.resize(test.size());
  std::vector<std::string> failures(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    try {
      const ScanRecord &scan = *test[i];
      const SelectResult sel = select_mask(dict, scan.kspace_full, scan.smaps);
      BenchRow row = make_row(scan, sel.mask, "suno", manifest, *recon);
      row.neighbor_id = sel.neighbor_id;
      row.neighbor_distance = sel.distance;
      report.rows[i] = std::move(row);
    } catch (const Error &e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < test.size(); ++i)
    if (!failures[i].empty())
      throw DataError("test_pipeline failed on scan " + test[i]->id + ": " + failures[i]);

  report.timings_sec["test_pipeline"] = now_seconds() - t0;
  report.recon_calls["test_recons"] = static_cast<long>(test.size());
  report.aggregates["suno"] = aggregate_rows(report.rows, "suno");
  return report;
}

BenchReport bench(const Dataset &dataset, const RunManifest &manifest,
                  const std::vector<MaskKind> &kinds, const TrainResult *pretrained) {
  require(!kinds.empty(), "bench: no mask kinds requested");
  const auto test = dataset.split_view(Split::test);
  require(!test.empty(), "bench: empty test split");
  const int n_y = static_cast<int>(dataset.width());
  const SamplerConfig cfg = manifest.sampler_for(n_y);

  const bool needs_dict =
      std::any_of(kinds.begin(), kinds.end(),
                  [](MaskKind k) { return k == MaskKind::suno || k == MaskKind::oracle; });

  BenchReport report;
  report.accel = manifest.accel;
  report.error_display_max = manifest.error_display_max;

  std::optional<TrainResult> local_train;
  const TrainResult *trained = pretrained;
  if (needs_dict && !trained) {
    local_train = alternating_train(dataset, manifest);
    trained = &*local_train;
  }
  if (trained) {
    report.recon_calls["train"] = trained->recon_calls;
    report.timings_sec["train"] = trained->seconds;
  }

  ReconConfig rcfg = manifest.recon;
  if (trained) rcfg.lambda = trained->lambda_star;
  const auto recon = make_reconstructor(rcfg);

  const double t0 = now_seconds();
  long oracle_calls = 0;

  for (MaskKind kind : kinds) {
    std::vector<BenchRow> rows(test.size());
    std::vector<OptTrace> traces(test.size());
    std::vector<std::string> failures(test.size());
    parallel_for(test.size(), [&](std::size_t i) {
      try {
        const ScanRecord &scan = *test[i];
        switch (kind) {
          case MaskKind::lf:
            rows[i] = make_row(scan, mask_low_frequency(n_y, cfg.budget), "lf", manifest, *recon);
            break;
          case MaskKind::equispaced:
            rows[i] = make_row(scan, mask_equispaced(n_y, cfg.budget, cfg.fixed_center),
                               "equispaced", manifest, *recon);
            break;
          case MaskKind::uniform_random:
            rows[i] = make_row(scan,
                               mask_uniform_random(n_y, cfg.budget, cfg.fixed_center,
                                                   derive_seed(manifest.seed, kTagBench, 1, i)),
                               "uniform_random", manifest, *recon);
            break;
          case MaskKind::vdpd:
            rows[i] = make_row(scan,
                               mask_vdpd_1d(n_y, cfg.budget, cfg.fixed_center,
                                            derive_seed(manifest.seed, kTagBench, 2, i),
                                            manifest.vdpd_density_power),
                               "vdpd", manifest, *recon);
            break;
          case MaskKind::suno: {
            const SelectResult sel = select_mask(trained->dict, scan.kspace_full, scan.smaps);
            rows[i] = make_row(scan, sel.mask, "suno", manifest, *recon);
            rows[i].neighbor_id = sel.neighbor_id;
            rows[i].neighbor_distance = sel.distance;
            break;
          }
          case MaskKind::oracle: {
            const SelectResult sel = select_mask(trained->dict, scan.kspace_full, scan.smaps);
            auto [mask, trace] = icd_optimize(scan, *recon, cfg, sel.mask);
            rows[i] = make_row(scan, mask, "oracle", manifest, *recon);
            rows[i].neighbor_id = sel.neighbor_id;
            traces[i] = std::move(trace);
            break;
          }
        }
      } catch (const Error &e) {
        failures[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < test.size(); ++i)
      if (!failures[i].empty())
        throw DataError("bench kind " + mask_kind_name(kind) + " failed on scan " +
                        test[i]->id + ": " + failures[i]);

    if (kind == MaskKind::oracle) {
      report.oracle_traces = traces;
      for (const auto &t : traces) oracle_calls += t.recon_calls;
    }
    for (auto &r : rows) report.rows.push_back(std::move(r));
    report.aggregates[mask_kind_name(kind)] = aggregate_rows(report.rows, mask_kind_name(kind));
  }

  report.recon_calls["oracle"] = oracle_calls;
  report.recon_calls["bench_recons"] =
      static_cast<long>(report.rows.size()) + oracle_calls;
  report.timings_sec["bench"] = now_seconds() - t0;
  return report;
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_pgm(const std::filesystem::path &path, const RealArray &img01) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f << "P5\n" << img01.cols() << " " << img01.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < img01.rows(); ++i)
    for (Eigen::Index j = 0; j < img01.cols(); ++j) {
      const double clamped = std::clamp(img01(i, j), 0.0, 1.0);
      f.put(static_cast<char>(std::lround(clamped * 255.0)));
    }
}

} // namespace

void emit_reports(const BenchReport &report, const std::filesystem::path &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "masks");
  fs::create_directories(out_dir / "images");

  {
    std::ofstream csv(out_dir / "metrics.csv", std::ios::trunc);
    if (!csv) throw DataError("cannot open for writing: " + (out_dir / "metrics.csv").string());
    csv << "id,mask_kind,accel,nrmse,ssim,psnr_db\n";
    for (const auto &r : report.rows)
      csv << r.id << "," << r.mask_kind << "," << format_double(r.accel) << ","
          << format_double(r.metrics.nrmse) << "," << format_double(r.metrics.ssim) << ","
          << format_double(r.metrics.psnr_db) << "\n";
  }

  {
    json summary;
    summary["accel"] = report.accel;
    summary["rows"] = report.rows.size();
    for (const auto &[kind, agg] : report.aggregates) {
      summary["aggregates"][kind] = {
          {"rows", agg.rows},
          {"nrmse_mean", agg.nrmse_mean}, {"nrmse_std", agg.nrmse_std},
          {"ssim_mean", agg.ssim_mean},   {"ssim_std", agg.ssim_std},
          {"psnr_mean", agg.psnr_mean},   {"psnr_std", agg.psnr_std}};
    }
    for (const auto &[stage, calls] : report.recon_calls) summary["recon_calls"][stage] = calls;
    for (const auto &[stage, sec] : report.timings_sec) summary["timings_sec"][stage] = sec;
    std::ofstream sf(out_dir / "summary.json", std::ios::trunc);
    if (!sf) throw DataError("cannot open for writing: " + (out_dir / "summary.json").string());
    sf << summary.dump(2) << "\n";
  }

  for (const auto &r : report.rows) {
    const std::string stem = r.id + "_" + r.mask_kind;
    write_mask_json(out_dir / "masks" / (stem + ".json"), r.mask);

    const Eigen::Index rows =
        r.recon_image.size() > 0 ? r.recon_image.rows() : static_cast<Eigen::Index>(r.mask.n_y);
    RealArray mask_img = RealArray::Zero(rows, r.mask.n_y);
    for (int line : r.mask.lines) mask_img.col(line).setOnes();
    write_pgm(out_dir / "images" / ("mask_" + stem + ".pgm"), mask_img);

    if (r.recon_image.size() > 0) {
      const RealArray mag = r.recon_image.abs();
      const double peak = mag.maxCoeff();
      write_pgm(out_dir / "images" / ("recon_" + stem + ".pgm"),
                peak > 0 ? RealArray(mag / peak) : mag);

      // display_max maps to 255, everything above clips.
      const RealArray err = (r.recon_image.abs() - r.reference.abs()).abs();
      write_pgm(out_dir / "images" / ("error_" + stem + ".pgm"),
                RealArray(err / report.error_display_max));
    }
  }
}

} // namespace suno
