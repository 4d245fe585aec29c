#include "suno/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "suno/rng.hpp"

namespace suno {

namespace {

using nlohmann::json;

// Seed-stream tags.
constexpr std::uint64_t kTagJitter = 0x6A697474; // "jitt"
constexpr std::uint64_t kTagNoise = 0x6E6F6973;  // "nois"

struct Ellipse {
  double intensity, ax, ay, cx, cy, theta_deg;
};

// Modified Shepp-Logan table (Toft's variant); cycled with shrinking axes
// and rotated centers when more ellipses are requested.
constexpr Ellipse kBase[10] = {
    {1.00, 0.6900, 0.9200, 0.00, 0.000, 0.0},
    {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.20, 0.1100, 0.3100, 0.22, 0.000, -18.0},
    {-0.20, 0.1600, 0.4100, -0.22, 0.000, 18.0},
    {0.10, 0.2100, 0.2500, 0.00, 0.350, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, 0.100, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, -0.100, 0.0},
    {0.10, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.10, 0.0230, 0.0230, 0.00, -0.606, 0.0},
    {0.10, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

Ellipse base_ellipse(int k) {
  Ellipse e = kBase[k % 10];
  const int wrap = k / 10;
  if (wrap > 0) {
    const double shrink = std::pow(0.6, wrap);
    e.ax *= shrink;
    e.ay *= shrink;
    e.cx = 0.5 * std::cos(0.7 * k) * (1.0 - shrink) + e.cx * shrink;
    e.cy = 0.5 * std::sin(0.7 * k) * (1.0 - shrink) + e.cy * shrink;
    e.intensity *= 0.5;
  }
  return e;
}

} // namespace

void PhantomSpec::validate() const {
  require(height >= 8 && width >= 8, "phantom images must be at least 8x8");
  require(n_ellipses >= 1, "need at least one ellipse");
  require(ncoils >= 1, "need at least one coil");
  require(noise_sigma >= 0.0, "noise_sigma must be nonnegative");
  require(jitter >= 0.0 && jitter <= 0.5, "jitter must lie in [0, 0.5]");
}

std::string split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_name(const std::string &name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw DataError("unknown split label: " + name);
}

void Dataset::validate() const {
  require(records.size() == splits.size(), "split labels must align with records");
  std::set<std::string> ids;
  for (const auto &r : records) {
    require(ids.insert(r.id).second, "duplicate scan id: " + r.id);
    require_dims(r.ground_truth.rows() == height() && r.ground_truth.cols() == width() &&
                     r.smaps.rows() == height() && r.smaps.cols() == width() &&
                     r.kspace_full.rows() == height() && r.kspace_full.cols() == width() &&
                     r.smaps.ncoils() == r.kspace_full.ncoils(),
                 "dataset records disagree in shape");
  }
}

std::vector<const ScanRecord *> Dataset::split_view(Split s) const {
  std::vector<const ScanRecord *> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (splits[i] == s) out.push_back(&records[i]);
  return out;
}

CxArray generate_phantom(const PhantomSpec &spec, int scan_index) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, kTagJitter, static_cast<std::uint64_t>(scan_index)));

  std::vector<Ellipse> ellipses(static_cast<std::size_t>(spec.n_ellipses));
  for (int k = 0; k < spec.n_ellipses; ++k) {
    Ellipse e = base_ellipse(k);
    // Multiplicative jitter on sizes/intensity, additive on pose. With
    // jitter <= 0.5 every axis stays positive.
    e.intensity *= 1.0 + spec.jitter * 0.3 * rng.uniform_pm1();
    e.ax *= 1.0 + spec.jitter * 0.5 * rng.uniform_pm1();
    e.ay *= 1.0 + spec.jitter * 0.5 * rng.uniform_pm1();
    e.cx += spec.jitter * 0.15 * rng.uniform_pm1();
    e.cy += spec.jitter * 0.15 * rng.uniform_pm1();
    e.theta_deg += spec.jitter * 30.0 * rng.uniform_pm1();
    ellipses[static_cast<std::size_t>(k)] = e;
  }
  const double phase_u = 0.30 + spec.jitter * 0.3 * rng.uniform_pm1();
  const double phase_v = -0.20 + spec.jitter * 0.3 * rng.uniform_pm1();

  const int h = spec.height, w = spec.width;
  RealArray mag = RealArray::Zero(h, w);
  for (const Ellipse &e : ellipses) {
    const double rad = e.theta_deg * M_PI / 180.0;
    const double ct = std::cos(rad), st = std::sin(rad);
    for (int j = 0; j < w; ++j) {
      const double u = (j - w / 2) / (w / 2.0);
      for (int i = 0; i < h; ++i) {
        const double v = (i - h / 2) / (h / 2.0);
        const double du = u - e.cx, dv = v - e.cy;
        const double p = (du * ct + dv * st) / e.ax;
        const double q = (-du * st + dv * ct) / e.ay;
        if (p * p + q * q <= 1.0) mag(i, j) += e.intensity;
      }
    }
  }

  const double peak = mag.abs().maxCoeff();
  require(peak > 0.0, "degenerate phantom: all ellipses cancelled");

  CxArray img(h, w);
  for (int j = 0; j < w; ++j) {
    const double u = (j - w / 2) / (w / 2.0);
    for (int i = 0; i < h; ++i) {
      const double v = (i - h / 2) / (h / 2.0);
      const double phase = phase_u * u + phase_v * v;
      img(i, j) = (mag(i, j) / peak) * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return img;
}

SensitivityMaps generate_smaps(const PhantomSpec &spec) {
  spec.validate();
  const int h = spec.height, w = spec.width, nc = spec.ncoils;
  constexpr double radius = 1.2;   // coil centers just outside the FOV
  constexpr double sigma = 1.0;    // lobe width in normalized coordinates
  constexpr double phase_slope = 0.5;

  SensitivityMaps s;
  s.coils.assign(static_cast<std::size_t>(nc), CxArray(h, w));
  RealArray sos = RealArray::Zero(h, w);
  for (int c = 0; c < nc; ++c) {
    const double angle = 2.0 * M_PI * c / nc;
    const double uc = radius * std::cos(angle), vc = radius * std::sin(angle);
    for (int j = 0; j < w; ++j) {
      const double u = (j - w / 2) / (w / 2.0);
      for (int i = 0; i < h; ++i) {
        const double v = (i - h / 2) / (h / 2.0);
        const double d2 = (u - uc) * (u - uc) + (v - vc) * (v - vc);
        const double lobe = std::exp(-d2 / (2.0 * sigma * sigma));
        const double phase = phase_slope * (-u * std::sin(angle) + v * std::cos(angle));
        s.coils[static_cast<std::size_t>(c)](i, j) =
            lobe * Complex(std::cos(phase), std::sin(phase));
        sos(i, j) += lobe * lobe;
      }
    }
  }
  const RealArray norm = sos.sqrt();
  for (auto &coil : s.coils) coil /= norm.cast<Complex>();
  return s;
}

ScanRecord simulate_scan(const PhantomSpec &spec, int scan_index) {
  spec.validate();
  ScanRecord rec;
  char id[16];
  std::snprintf(id, sizeof(id), "scan_%04d", scan_index);
  rec.id = id;
  rec.ground_truth = generate_phantom(spec, scan_index);
  rec.smaps = generate_smaps(spec);
  rec.kspace_full = forward(rec.ground_truth, rec.smaps);
  rec.noise_sigma = spec.noise_sigma;
  if (spec.noise_sigma > 0.0) {
    SplitMix64 rng(derive_seed(spec.seed, kTagNoise, static_cast<std::uint64_t>(scan_index)));
    // Coil-major, then row-major within each plane; one stream per scan.
    for (auto &plane : rec.kspace_full.coils) {
      for (Eigen::Index i = 0; i < plane.rows(); ++i) {
        for (Eigen::Index j = 0; j < plane.cols(); ++j) {
          double g0, g1;
          rng.gaussian_pair(g0, g1);
          plane(i, j) += spec.noise_sigma * Complex(g0, g1);
        }
      }
    }
  }
  return rec;
}

Dataset generate_dataset(const PhantomSpec &spec, int n_train, int n_val, int n_test) {
  require(n_train >= 0 && n_val >= 0 && n_test >= 0 && n_train + n_val + n_test >= 1,
          "dataset needs at least one record");
  Dataset ds;
  const int total = n_train + n_val + n_test;
  ds.records.resize(static_cast<std::size_t>(total));
  ds.splits.resize(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    ds.records[static_cast<std::size_t>(i)] = simulate_scan(spec, i);
    ds.splits[static_cast<std::size_t>(i)] =
        i < n_train ? Split::train : (i < n_train + n_val ? Split::val : Split::test);
  }
  ds.validate();
  return ds;
}

DatasetSpec DatasetSpec::from_json_file(const std::filesystem::path &path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path.string());
  json j;
  try {
    f >> j;
    DatasetSpec s;
    s.phantom.height = j.value("height", 64);
    s.phantom.width = j.value("width", 64);
    s.phantom.n_ellipses = j.value("n_ellipses", 10);
    s.phantom.seed = j.value("seed", std::uint64_t{0});
    s.phantom.ncoils = j.value("ncoils", 4);
    s.phantom.noise_sigma = j.value("noise_sigma", 0.01);
    s.phantom.jitter = j.value("jitter", 0.15);
    s.n_train = j.value("n_train", 40);
    s.n_val = j.value("n_val", 8);
    s.n_test = j.value("n_test", 8);
    s.phantom.validate();
    return s;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed dataset spec JSON: ") + e.what());
  }
}

void DatasetSpec::to_json_file(const std::filesystem::path &path) const {
  json j;
  j["height"] = phantom.height;
  j["width"] = phantom.width;
  j["n_ellipses"] = phantom.n_ellipses;
  j["seed"] = phantom.seed;
  j["ncoils"] = phantom.ncoils;
  j["noise_sigma"] = phantom.noise_sigma;
  j["jitter"] = phantom.jitter;
  j["n_train"] = n_train;
  j["n_val"] = n_val;
  j["n_test"] = n_test;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
}

namespace {

constexpr char kMagic[4] = {'S', 'U', 'N', 'O'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string &buf, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[at + static_cast<std::size_t>(i)])) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::string &buf, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[at + static_cast<std::size_t>(i)])) << (8 * i);
  return v;
}

// Planes are serialized row-major as interleaved (re, im) float64 pairs.
void append_plane(std::string &out, const CxArray &p) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const Complex z = p(i, j);
      double re = z.real(), im = z.imag();
      char bytes[16];
      std::memcpy(bytes, &re, 8);
      std::memcpy(bytes + 8, &im, 8);
      out.append(bytes, 16);
    }
  }
}

CxArray read_plane(const std::string &buf, std::size_t &at, int h, int w) {
  CxArray p(h, w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double re, im;
      std::memcpy(&re, buf.data() + at, 8);
      std::memcpy(&im, buf.data() + at + 8, 8);
      at += 16;
      p(i, j) = Complex(re, im);
    }
  }
  return p;
}

std::uint64_t record_payload_bytes(int h, int w, int ncoils) {
  return static_cast<std::uint64_t>(h) * static_cast<std::uint64_t>(w) *
         (1 + 2 * static_cast<std::uint64_t>(ncoils)) * 16;
}

} // namespace

void write_container(const std::filesystem::path &path, const Dataset &dataset) {
  dataset.validate();

  std::string payload;
  json header;
  header["records"] = json::array();
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const ScanRecord &r = dataset.records[i];
    const int h = static_cast<int>(r.ground_truth.rows());
    const int w = static_cast<int>(r.ground_truth.cols());
    json rec;
    rec["id"] = r.id;
    rec["height"] = h;
    rec["width"] = w;
    rec["ncoils"] = r.smaps.ncoils();
    rec["noise_sigma"] = r.noise_sigma;
    rec["split"] = split_name(dataset.splits[i]);
    rec["offset"] = payload.size();
    rec["nbytes"] = record_payload_bytes(h, w, r.smaps.ncoils());
    header["records"].push_back(rec);

    append_plane(payload, r.ground_truth);
    for (const auto &c : r.smaps.coils) append_plane(payload, c);
    for (const auto &c : r.kspace_full.coils) append_plane(payload, c);
  }

  const std::string header_str = header.dump();
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, header_str.size());
  out += header_str;
  out += payload;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

Dataset read_container(const std::filesystem::path &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (buf.size() < 16) throw DataError("truncated payload: file shorter than the fixed header");
  if (std::memcmp(buf.data(), kMagic, 4) != 0) throw DataError("bad magic");
  const std::uint32_t version = get_u32(buf, 4);
  if (version != kVersion)
    throw DataError("version mismatch: got " + std::to_string(version));
  const std::uint64_t header_len = get_u64(buf, 8);
  if (16 + header_len > buf.size()) throw DataError("truncated payload: header cut short");

  json header;
  try {
    header = json::parse(buf.substr(16, header_len));
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed header JSON: ") + e.what());
  }

  const std::size_t payload_base = 16 + static_cast<std::size_t>(header_len);
  const std::uint64_t payload_size = buf.size() - payload_base;

  Dataset ds;
  try {
    for (const auto &rec : header.at("records")) {
      const int h = rec.at("height").get<int>();
      const int w = rec.at("width").get<int>();
      const int nc = rec.at("ncoils").get<int>();
      const std::uint64_t offset = rec.at("offset").get<std::uint64_t>();
      const std::uint64_t nbytes = rec.at("nbytes").get<std::uint64_t>();
      if (nbytes != record_payload_bytes(h, w, nc))
        throw DataError("header/payload shape disagreement for record " +
                        rec.at("id").get<std::string>());
      if (offset + nbytes > payload_size)
        throw DataError("truncated payload: record " + rec.at("id").get<std::string>() +
                        " extends past end of file");

      ScanRecord r;
      r.id = rec.at("id").get<std::string>();
      r.noise_sigma = rec.at("noise_sigma").get<double>();
      std::size_t at = payload_base + static_cast<std::size_t>(offset);
      r.ground_truth = read_plane(buf, at, h, w);
      r.smaps.coils.reserve(static_cast<std::size_t>(nc));
      for (int c = 0; c < nc; ++c) r.smaps.coils.push_back(read_plane(buf, at, h, w));
      r.kspace_full.coils.reserve(static_cast<std::size_t>(nc));
      for (int c = 0; c < nc; ++c) r.kspace_full.coils.push_back(read_plane(buf, at, h, w));
      ds.records.push_back(std::move(r));
      ds.splits.push_back(split_from_name(rec.at("split").get<std::string>()));
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed header fields: ") + e.what());
  }

  ds.validate();
  return ds;
}

void write_mask_json(const std::filesystem::path &path, const CartesianMask &m) {
  m.validate();
  json j;
  j["n_y"] = m.n_y;
  j["budget"] = m.budget;
  j["fixed_center"] = m.fixed_center;
  j["lines"] = m.lines;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
}

void write_image(const std::filesystem::path &path, const CxArray &img) {
  std::string out;
  out.append("SIMG", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(img.rows()));
  put_u32(out, static_cast<std::uint32_t>(img.cols()));
  append_plane(out, img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

CxArray read_image(const std::filesystem::path &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < 16) throw DataError("truncated payload: image file too short");
  if (std::memcmp(buf.data(), "SIMG", 4) != 0) throw DataError("bad magic");
  if (get_u32(buf, 4) != 1) throw DataError("version mismatch");
  const int h = static_cast<int>(get_u32(buf, 8));
  const int w = static_cast<int>(get_u32(buf, 12));
  if (buf.size() != 16 + static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 16)
    throw DataError("header/payload shape disagreement in image file");
  std::size_t at = 16;
  return read_plane(buf, at, h, w);
}

CartesianMask read_mask_json(const std::filesystem::path &path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path.string());
  json j;
  try {
    f >> j;
    CartesianMask m;
    m.n_y = j.at("n_y").get<int>();
    m.budget = j.at("budget").get<int>();
    m.fixed_center = j.at("fixed_center").get<std::vector<int>>();
    m.lines = j.at("lines").get<std::vector<int>>();
    m.validate();
    return m;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed mask JSON: ") + e.what());
  }
}

} // namespace suno
