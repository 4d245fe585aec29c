#include "suno/dictionary.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "suno/metrics.hpp"

namespace suno {

using nlohmann::json;

const DictionaryEntry *MaskDictionary::find(const std::string &scan_id) const {
  const auto it = std::lower_bound(
      entries.begin(), entries.end(), scan_id,
      [](const DictionaryEntry &e, const std::string &id) { return e.scan_id < id; });
  if (it != entries.end() && it->scan_id == scan_id) return &*it;
  return nullptr;
}

Eigen::VectorXd extract_feature(const MultiCoilKSpace &y, const SensitivityMaps &s,
                                int n_low_freq) {
  require(n_low_freq >= 1 && n_low_freq <= static_cast<int>(y.cols()),
          "n_low_freq out of range");
  std::vector<int> lf_lines;
  const auto [lo, hi] = central_block(static_cast<int>(y.cols()), n_low_freq);
  for (int k = lo; k < hi; ++k) lf_lines.push_back(k);
  const CartesianMask lf =
      CartesianMask::make(static_cast<int>(y.cols()), std::move(lf_lines), n_low_freq);

  const CxArray zf = zero_filled_recon(y, lf, s);
  const auto [ch, cw] = default_crop(zf.rows(), zf.cols());
  const RealArray mag = central_crop(zf, ch, cw).abs();

  Eigen::VectorXd f(mag.size());
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < mag.rows(); ++i)
    for (Eigen::Index j = 0; j < mag.cols(); ++j) f[at++] = mag(i, j);

  const double norm = f.norm();
  if (!(norm > 0.0)) throw DegenerateFeatureError("zero-energy low-frequency feature");
  return f / norm;
}

MaskDictionary build_dictionary(const std::vector<const ScanRecord *> &train,
                                const std::vector<CartesianMask> &masks, int n_low_freq) {
  require(!train.empty(), "build_dictionary: empty training set");
  require(train.size() == masks.size(), "build_dictionary: masks must align with scans");

  MaskDictionary dict;
  dict.n_low_freq = n_low_freq;
  dict.height = static_cast<int>(train.front()->ground_truth.rows());
  dict.width = static_cast<int>(train.front()->ground_truth.cols());
  dict.entries.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    DictionaryEntry e;
    e.scan_id = train[i]->id;
    e.feature = extract_feature(train[i]->kspace_full, train[i]->smaps, n_low_freq);
    e.mask = masks[i];
    e.mask.validate();
    dict.entries.push_back(std::move(e));
  }
  std::sort(dict.entries.begin(), dict.entries.end(),
            [](const DictionaryEntry &a, const DictionaryEntry &b) { return a.scan_id < b.scan_id; });
  return dict;
}

SelectResult select_mask(const MaskDictionary &dict, const MultiCoilKSpace &y_lf_test,
                         const SensitivityMaps &s_test) {
  require(!dict.entries.empty(), "select_mask: empty dictionary");
  require_dims(static_cast<int>(y_lf_test.rows()) == dict.height &&
                   static_cast<int>(y_lf_test.cols()) == dict.width,
               "select_mask: test scan shape differs from the dictionary");
  const Eigen::VectorXd f = extract_feature(y_lf_test, s_test, dict.n_low_freq);

  // Entries are sorted by scan_id, so keeping the first strict minimum
  // also resolves ties toward the smallest id.
  std::size_t best = 0;
  double best_d = (dict.entries[0].feature - f).norm();
  for (std::size_t i = 1; i < dict.entries.size(); ++i) {
    const double d = (dict.entries[i].feature - f).norm();
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return {dict.entries[best].mask, dict.entries[best].scan_id, best_d};
}

std::vector<std::pair<std::string, double>> k_nearest(const MaskDictionary &dict,
                                                      const Eigen::VectorXd &feature, int k) {
  require(k >= 1 && k <= static_cast<int>(dict.entries.size()), "k_nearest: K out of range");
  std::vector<std::pair<std::string, double>> all;
  all.reserve(dict.entries.size());
  for (const auto &e : dict.entries) {
    require_dims(e.feature.size() == feature.size(), "k_nearest: feature length mismatch");
    all.emplace_back(e.scan_id, (e.feature - feature).norm());
  }
  std::sort(all.begin(), all.end(), [](const auto &a, const auto &b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  all.resize(static_cast<std::size_t>(k));
  return all;
}

void save_dictionary(const std::filesystem::path &dir, const MaskDictionary &dict) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "masks");
  fs::create_directories(dir / "features");

  json manifest;
  manifest["n_low_freq"] = dict.n_low_freq;
  manifest["height"] = dict.height;
  manifest["width"] = dict.width;
  manifest["entries"] = json::array();
  for (const auto &e : dict.entries) {
    const std::string mask_file = "masks/" + e.scan_id + ".json";
    const std::string feature_file = "features/" + e.scan_id + ".f64";
    write_mask_json(dir / mask_file, e.mask);

    std::ofstream f(dir / feature_file, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + (dir / feature_file).string());
    for (Eigen::Index i = 0; i < e.feature.size(); ++i) {
      const double v = e.feature[i];
      char bytes[8];
      std::memcpy(bytes, &v, 8);
      f.write(bytes, 8);
    }
    manifest["entries"].push_back(
        {{"scan_id", e.scan_id}, {"mask_file", mask_file}, {"feature_file", feature_file}});
  }
  std::ofstream mf(dir / "manifest.json", std::ios::trunc);
  if (!mf) throw DataError("cannot open for writing: " + (dir / "manifest.json").string());
  mf << manifest.dump(2) << "\n";
}

MaskDictionary load_dictionary(const std::filesystem::path &dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw DataError("cannot open: " + (dir / "manifest.json").string());
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed dictionary manifest: ") + e.what());
  }

  MaskDictionary dict;
  try {
    dict.n_low_freq = manifest.at("n_low_freq").get<int>();
    dict.height = manifest.at("height").get<int>();
    dict.width = manifest.at("width").get<int>();
    const Eigen::Index feat_len = [&] {
      const auto [ch, cw] = default_crop(dict.height, dict.width);
      return static_cast<Eigen::Index>(ch) * cw;
    }();
    for (const auto &je : manifest.at("entries")) {
      DictionaryEntry e;
      e.scan_id = je.at("scan_id").get<std::string>();
      e.mask = read_mask_json(dir / je.at("mask_file").get<std::string>());

      const auto fpath = dir / je.at("feature_file").get<std::string>();
      std::ifstream ff(fpath, std::ios::binary);
      if (!ff) throw DataError("cannot open: " + fpath.string());
      std::string buf((std::istreambuf_iterator<char>(ff)), std::istreambuf_iterator<char>());
      if (static_cast<Eigen::Index>(buf.size()) != feat_len * 8)
        throw DataError("feature payload size mismatch: " + fpath.string());
      e.feature.resize(feat_len);
      for (Eigen::Index i = 0; i < feat_len; ++i)
        std::memcpy(&e.feature[i], buf.data() + i * 8, 8);
      dict.entries.push_back(std::move(e));
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed dictionary manifest fields: ") + e.what());
  }
  std::sort(dict.entries.begin(), dict.entries.end(),
            [](const DictionaryEntry &a, const DictionaryEntry &b) { return a.scan_id < b.scan_id; });
  return dict;
}

} // namespace suno
