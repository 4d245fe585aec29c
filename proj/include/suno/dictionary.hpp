#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "suno/phantom.hpp"

namespace suno {

struct DictionaryEntry {
  std::string scan_id;
  Eigen::VectorXd feature; // unit L2 norm
  CartesianMask mask;
};

// Training-time dictionary of (low-frequency feature, optimized mask)
// pairs; queried by nearest neighbor at test time.
struct MaskDictionary {
  int n_low_freq = 0;
  int height = 0;
  int width = 0;
  std::vector<DictionaryEntry> entries; // sorted by scan_id

  const DictionaryEntry *find(const std::string &scan_id) const;
};

// Low-frequency query vector: LF mask of n_low_freq central lines ->
// adjoint -> magnitude -> central crop -> flatten row-major -> unit L2.
Eigen::VectorXd extract_feature(const MultiCoilKSpace &y, const SensitivityMaps &s,
                                int n_low_freq);

MaskDictionary build_dictionary(const std::vector<const ScanRecord *> &train,
                                const std::vector<CartesianMask> &masks, int n_low_freq);

struct SelectResult {
  CartesianMask mask;
  std::string neighbor_id;
  double distance = 0.0;
};

// Linear scan over entries by Euclidean distance between unit features;
// ties resolve to the smallest scan_id.
SelectResult select_mask(const MaskDictionary &dict, const MultiCoilKSpace &y_lf_test,
                         const SensitivityMaps &s_test);

// K smallest distances, ascending, ties by scan_id.
std::vector<std::pair<std::string, double>> k_nearest(const MaskDictionary &dict,
                                                      const Eigen::VectorXd &feature, int k);

// On-disk layout: manifest.json + masks/<id>.json + features/<id>.f64
// (little-endian float64).
void save_dictionary(const std::filesystem::path &dir, const MaskDictionary &dict);
MaskDictionary load_dictionary(const std::filesystem::path &dir);

} // namespace suno
