#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "suno/metrics.hpp"
#include "suno/parallel.hpp"
#include "suno/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  int threads = 0;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

void vlog(const GlobalOpts &g, const std::string &msg) {
  if (g.verbose) std::cerr << "[suno] " << msg << "\n";
}

const suno::ScanRecord &find_record(const suno::Dataset &ds, const std::string &id) {
  for (const auto &r : ds.records)
    if (r.id == id) return r;
  throw suno::LookupError("no such scan id in the dataset: " + id);
}

int run(int argc, char **argv) {
  CLI::App app{"SUNO: scan-adaptive Cartesian undersampling toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->capture_default_str();
  std::uint64_t seed_arg = 0;
  auto *seed_opt = app.add_option("--seed", seed_arg, "override the configured seed");
  app.add_flag("--verbose", g.verbose, "log progress to stderr");

  // phantom gen
  auto *phantom_cmd = app.add_subcommand("phantom", "synthetic data utilities");
  auto *gen = phantom_cmd->add_subcommand("gen", "generate a phantom dataset container");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "dataset spec JSON")->required();
  gen->add_option("--out", gen_out, "output container path")->required();

  // train
  auto *train_cmd = app.add_subcommand("train", "alternating mask/reconstructor training");
  std::string train_data, train_manifest, train_out;
  train_cmd->add_option("--data", train_data, "dataset container")->required();
  train_cmd->add_option("--manifest", train_manifest, "run manifest JSON")->required();
  train_cmd->add_option("--out", train_out, "output dictionary directory")->required();

  // select
  auto *select_cmd = app.add_subcommand("select", "nearest-neighbor mask selection");
  std::string sel_dict, sel_data, sel_scan, sel_out;
  select_cmd->add_option("--dict", sel_dict, "dictionary directory")->required();
  select_cmd->add_option("--data", sel_data, "dataset container")->required();
  select_cmd->add_option("--scan", sel_scan, "scan id")->required();
  select_cmd->add_option("--out", sel_out, "write the selected mask JSON here");

  // recon
  auto *recon_cmd = app.add_subcommand("recon", "reconstruct one scan with a mask");
  std::string rec_data, rec_mask, rec_scan, rec_out, rec_gt, rec_method = "cg_tikhonov";
  double rec_lambda = 1e-3, rec_tol = 1e-5;
  int rec_iters = 50;
  recon_cmd->add_option("--data", rec_data, "dataset container")->required();
  recon_cmd->add_option("--scan", rec_scan, "scan id")->required();
  recon_cmd->add_option("--mask", rec_mask, "mask JSON")->required();
  recon_cmd->add_option("--lambda", rec_lambda, "Tikhonov weight")->capture_default_str();
  recon_cmd->add_option("--method", rec_method, "cg_tikhonov | zero_filled")
      ->capture_default_str();
  recon_cmd->add_option("--cg-tol", rec_tol, "CG relative residual")->capture_default_str();
  recon_cmd->add_option("--cg-max-iter", rec_iters, "CG iteration cap")->capture_default_str();
  recon_cmd->add_option("--out", rec_out, "output image file")->required();
  recon_cmd->add_option("--dump-gt", rec_gt, "also write the ground truth image here");

  // eval
  auto *eval_cmd = app.add_subcommand("eval", "metrics between two image files");
  std::string ev_pred, ev_ref;
  int ev_crop_h = 0, ev_crop_w = 0;
  eval_cmd->add_option("--pred", ev_pred, "estimate image file")->required();
  eval_cmd->add_option("--ref", ev_ref, "reference image file")->required();
  eval_cmd->add_option("--crop-h", ev_crop_h, "crop height (0 = default convention)");
  eval_cmd->add_option("--crop-w", ev_crop_w, "crop width (0 = default convention)");

  // bench
  auto *bench_cmd = app.add_subcommand("bench", "mask-kind comparison on the test split");
  std::string b_data, b_manifest, b_out, b_kinds = "lf,equispaced,uniform_random,vdpd,suno,oracle";
  std::string b_dict;
  bench_cmd->add_option("--data", b_data, "dataset container")->required();
  bench_cmd->add_option("--manifest", b_manifest, "run manifest JSON")->required();
  bench_cmd->add_option("--kinds", b_kinds, "comma-separated mask kinds")->capture_default_str();
  bench_cmd->add_option("--out", b_out, "report output directory")->required();
  bench_cmd->add_option("--dict", b_dict, "reuse a trained dictionary directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  suno::set_thread_count(g.threads);
  if (seed_opt->count() > 0) g.seed = seed_arg;

  if (gen->parsed()) {
    suno::DatasetSpec spec = suno::DatasetSpec::from_json_file(gen_spec);
    if (g.seed) spec.phantom.seed = *g.seed;
    vlog(g, "generating " + std::to_string(spec.n_train + spec.n_val + spec.n_test) + " scans");
    const suno::Dataset ds =
        suno::generate_dataset(spec.phantom, spec.n_train, spec.n_val, spec.n_test);
    suno::write_container(gen_out, ds);
    std::cout << "wrote " << gen_out << " (" << ds.records.size() << " records)\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    suno::RunManifest mf = suno::RunManifest::from_json_file(train_manifest);
    if (g.seed) mf.seed = *g.seed;
    const suno::Dataset ds = suno::read_container(train_data);
    vlog(g, "training on " + std::to_string(ds.split_view(suno::Split::train).size()) + " scans");
    const suno::TrainResult result = suno::alternating_train(ds, mf);
    suno::save_dictionary(train_out, result.dict);

    json tj;
    tj["lambda_star"] = result.lambda_star;
    tj["recon_calls"] = result.recon_calls;
    tj["seconds"] = result.seconds;
    tj["n_low_freq"] = result.dict.n_low_freq;
    tj["rounds"] = json::array();
    for (const auto &log : result.logs)
      tj["rounds"].push_back(
          {{"stage", log.stage}, {"lambda", log.lambda}, {"mean_loss", log.mean_loss}});
    std::ofstream tf(fs::path(train_out) / "training.json", std::ios::trunc);
    tf << tj.dump(2) << "\n";
    std::cout << "lambda_star " << result.lambda_star << ", recon_calls " << result.recon_calls
              << ", wrote " << train_out << "\n";
    return 0;
  }

  if (select_cmd->parsed()) {
    const suno::MaskDictionary dict = suno::load_dictionary(sel_dict);
    const suno::Dataset ds = suno::read_container(sel_data);
    const auto &scan = find_record(ds, sel_scan);
    const suno::SelectResult sel = suno::select_mask(dict, scan.kspace_full, scan.smaps);
    json out = {{"scan", sel_scan},
                {"neighbor_id", sel.neighbor_id},
                {"distance", sel.distance}};
    if (!sel_out.empty()) {
      suno::write_mask_json(sel_out, sel.mask);
      out["mask_file"] = sel_out;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (recon_cmd->parsed()) {
    const suno::Dataset ds = suno::read_container(rec_data);
    const auto &scan = find_record(ds, rec_scan);
    const suno::CartesianMask mask = suno::read_mask_json(rec_mask);
    suno::ReconConfig cfg;
    cfg.method = rec_method == "zero_filled" ? suno::ReconMethod::zero_filled
                                             : suno::ReconMethod::cg_tikhonov;
    if (rec_method != "zero_filled" && rec_method != "cg_tikhonov")
      throw suno::UsageError("unknown recon method: " + rec_method);
    cfg.lambda = rec_lambda;
    cfg.cg_tol = rec_tol;
    cfg.cg_max_iter = rec_iters;
    const auto recon = suno::make_reconstructor(cfg);
    const suno::CxArray est =
        recon->reconstruct(suno::apply_mask(scan.kspace_full, mask), mask, scan.smaps);
    suno::write_image(rec_out, est);
    if (!rec_gt.empty()) suno::write_image(rec_gt, scan.ground_truth);
    std::cout << "wrote " << rec_out << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    const suno::CxArray pred = suno::read_image(ev_pred);
    const suno::CxArray ref = suno::read_image(ev_ref);
    int ch = ev_crop_h, cw = ev_crop_w;
    if (ch <= 0 || cw <= 0) std::tie(ch, cw) = suno::default_crop(ref.rows(), ref.cols());
    const suno::MetricReport r = suno::evaluate(ref, pred, ch, cw);
    json out = {{"nrmse", r.nrmse},
                {"ssim", r.ssim},
                {"psnr_db", std::isinf(r.psnr_db) ? json("inf") : json(r.psnr_db)},
                {"crop", {r.crop_h, r.crop_w}}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (bench_cmd->parsed()) {
    suno::RunManifest mf = suno::RunManifest::from_json_file(b_manifest);
    if (g.seed) mf.seed = *g.seed;
    const suno::Dataset ds = suno::read_container(b_data);

    std::vector<suno::MaskKind> kinds;
    std::string token;
    for (char ch : b_kinds + ",") {
      if (ch == ',') {
        if (!token.empty()) kinds.push_back(suno::mask_kind_from_name(token));
        token.clear();
      } else {
        token.push_back(ch);
      }
    }

    std::optional<suno::TrainResult> pre;
    if (!b_dict.empty()) {
      suno::TrainResult t;
      t.dict = suno::load_dictionary(b_dict);
      std::ifstream tf(fs::path(b_dict) / "training.json");
      if (!tf) throw suno::DataError("missing training.json next to the dictionary");
      json tj;
      tf >> tj;
      t.lambda_star = tj.at("lambda_star").get<double>();
      pre = std::move(t);
    }

    vlog(g, "running bench with " + std::to_string(kinds.size()) + " kinds");
    const suno::BenchReport report = suno::bench(ds, mf, kinds, pre ? &*pre : nullptr);
    suno::emit_reports(report, b_out);
    for (const auto &[kind, agg] : report.aggregates) {
      std::printf("%-15s nrmse %.4f +- %.4f  ssim %.4f  psnr %.2f dB  (n=%d)\n", kind.c_str(),
                  agg.nrmse_mean, agg.nrmse_std, agg.ssim_mean, agg.psnr_mean, agg.rows);
    }
    std::cout << "wrote " << b_out << "\n";
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const suno::UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const suno::NumericalError &e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const suno::Error &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
