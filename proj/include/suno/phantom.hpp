#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "suno/mri.hpp"
#include "suno/types.hpp"

namespace suno {

// Controls the synthetic scan generator. Every output is a pure function
// of (spec, scan_index); the generator chain is SplitMix64 seeded from
// derive_seed(seed, purpose, scan_index).
struct PhantomSpec {
  int height = 64;
  int width = 64;
  int n_ellipses = 10;
  std::uint64_t seed = 0;
  int ncoils = 4;
  double noise_sigma = 0.0;
  double jitter = 0.0; // in [0, 0.5], scales per-scan parameter offsets

  void validate() const;
};

enum class Split { train, val, test };

std::string split_name(Split s);
Split split_from_name(const std::string &name);

struct Dataset {
  std::vector<ScanRecord> records;
  std::vector<Split> splits;

  Eigen::Index height() const { return records.empty() ? 0 : records.front().ground_truth.rows(); }
  Eigen::Index width() const { return records.empty() ? 0 : records.front().ground_truth.cols(); }
  void validate() const;

  std::vector<const ScanRecord *> split_view(Split s) const;
};

// Ellipse-superposition phantom with per-scan jittered parameters, a smooth
// phase ramp, and peak magnitude normalized to 1.
CxArray generate_phantom(const PhantomSpec &spec, int scan_index);

// Smooth Gaussian-lobe coil profiles, pixelwise normalized to unit
// sum-of-squares magnitude.
SensitivityMaps generate_smaps(const PhantomSpec &spec);

// Ground truth + maps + forward model k-space with iid complex Gaussian
// noise of std noise_sigma per component.
ScanRecord simulate_scan(const PhantomSpec &spec, int scan_index);

// n_train/n_val/n_test consecutive scan indices, ids "scan_0000"...
Dataset generate_dataset(const PhantomSpec &spec, int n_train, int n_val, int n_test);

// JSON description consumed by `phantom gen`: the PhantomSpec fields plus
// split sizes. Desk-scale defaults.
struct DatasetSpec {
  PhantomSpec phantom;
  int n_train = 40;
  int n_val = 8;
  int n_test = 8;

  static DatasetSpec from_json_file(const std::filesystem::path &path);
  void to_json_file(const std::filesystem::path &path) const;
};

// SUNO container v1: "SUNO" magic, u32 version, u64 header length, JSON
// header, then per-record float64 complex payloads (row-major, coil-major).
void write_container(const std::filesystem::path &path, const Dataset &dataset);
Dataset read_container(const std::filesystem::path &path);

// Mask JSON file: {n_y, budget, fixed_center, lines}.
void write_mask_json(const std::filesystem::path &path, const CartesianMask &m);
CartesianMask read_mask_json(const std::filesystem::path &path);

// Single complex image: "SIMG" magic, u32 version, u32 height, u32 width,
// row-major float64 (re, im) pairs. Written by the recon CLI, read by eval.
void write_image(const std::filesystem::path &path, const CxArray &img);
CxArray read_image(const std::filesystem::path &path);

} // namespace suno
