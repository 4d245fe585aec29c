#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "suno/phantom.hpp"

using namespace suno;
namespace fs = std::filesystem;

namespace {

PhantomSpec small_spec() {
  PhantomSpec s;
  s.height = 16;
  s.width = 16;
  s.ncoils = 2;
  s.seed = 99;
  s.jitter = 0.2;
  s.noise_sigma = 0.0;
  return s;
}

bool bit_equal(const CxArray &a, const CxArray &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return ((a - b).abs() == 0.0).all();
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "suno_phantom_test";
  fs::create_directories(d);
  return d;
}

} // namespace

TEST_CASE("phantom generation is deterministic in (seed, scan_index)") {
  const PhantomSpec spec = small_spec();
  CHECK(bit_equal(generate_phantom(spec, 3), generate_phantom(spec, 3)));
  CHECK_FALSE(bit_equal(generate_phantom(spec, 3), generate_phantom(spec, 4)));
}

TEST_CASE("zero jitter collapses all scans onto the base phantom") {
  PhantomSpec spec = small_spec();
  spec.jitter = 0.0;
  CHECK(bit_equal(generate_phantom(spec, 0), generate_phantom(spec, 17)));
}

TEST_CASE("peak magnitude is normalized to one") {
  const PhantomSpec spec = small_spec();
  for (int idx : {0, 1, 5}) {
    const double peak = generate_phantom(spec, idx).abs().maxCoeff();
    CHECK(std::abs(peak - 1.0) <= 1e-12);
  }
}

TEST_CASE("sensitivity maps normalize to unit sum of squares") {
  PhantomSpec spec = small_spec();
  for (int nc : {1, 2, 5}) {
    spec.ncoils = nc;
    const SensitivityMaps s = generate_smaps(spec);
    RealArray sos = RealArray::Zero(spec.height, spec.width);
    for (const auto &c : s.coils) sos += c.abs2();
    CHECK((sos - 1.0).abs().maxCoeff() <= 1e-6);
    if (nc == 1) CHECK((s.coils[0].abs() - 1.0).abs().maxCoeff() <= 1e-6);
  }
  const SensitivityMaps a = generate_smaps(spec);
  const SensitivityMaps b = generate_smaps(spec);
  for (int c = 0; c < spec.ncoils; ++c) CHECK(bit_equal(a.coils[c], b.coils[c]));
}

TEST_CASE("noiseless scans satisfy adjoint(kspace) = ground truth") {
  const PhantomSpec spec = small_spec();
  const ScanRecord rec = simulate_scan(spec, 2);
  const CxArray back = adjoint(rec.kspace_full, rec.smaps);
  CHECK(std::sqrt((back - rec.ground_truth).abs2().sum()) <
        1e-6 * std::sqrt(rec.ground_truth.abs2().sum()));

  const ScanRecord again = simulate_scan(spec, 2);
  CHECK(bit_equal(rec.kspace_full.coils[0], again.kspace_full.coils[0]));
}

TEST_CASE("empirical k-space noise std tracks noise_sigma") {
  PhantomSpec spec;
  spec.height = 64;
  spec.width = 64;
  spec.ncoils = 1;
  spec.seed = 7;
  spec.noise_sigma = 0.01;
  spec.jitter = 0.1;

  PhantomSpec clean = spec;
  clean.noise_sigma = 0.0;

  double acc = 0.0;
  long n = 0;
  for (int idx = 0; idx < 10; ++idx) {
    const ScanRecord noisy = simulate_scan(spec, idx);
    const ScanRecord ref = simulate_scan(clean, idx);
    for (int c = 0; c < 1; ++c) {
      const CxArray d = noisy.kspace_full.coils[c] - ref.kspace_full.coils[c];
      acc += d.abs2().sum(); // |z|^2 sums both components
      n += 2 * d.size();
    }
  }
  const double est = std::sqrt(acc / static_cast<double>(n));
  CHECK(est > 0.008);
  CHECK(est < 0.012);
}

TEST_CASE("container round trip is bit-exact") {
  PhantomSpec spec = small_spec();
  spec.noise_sigma = 0.02;
  const Dataset ds = generate_dataset(spec, 1, 0, 1);
  const fs::path p = temp_dir() / "roundtrip.suno";
  write_container(p, ds);
  const Dataset back = read_container(p);

  REQUIRE(back.records.size() == 2);
  CHECK(back.splits == ds.splits);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.records[i].id == ds.records[i].id);
    CHECK(back.records[i].noise_sigma == ds.records[i].noise_sigma);
    CHECK(bit_equal(back.records[i].ground_truth, ds.records[i].ground_truth));
    for (int c = 0; c < 2; ++c) {
      CHECK(bit_equal(back.records[i].smaps.coils[c], ds.records[i].smaps.coils[c]));
      CHECK(bit_equal(back.records[i].kspace_full.coils[c], ds.records[i].kspace_full.coils[c]));
    }
  }
}

TEST_CASE("container errors are distinct and named") {
  const PhantomSpec spec = small_spec();
  const Dataset ds = generate_dataset(spec, 1, 0, 0);
  const fs::path p = temp_dir() / "corrupt.suno";
  write_container(p, ds);

  auto slurp = [&] {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  };
  auto dump = [&](const std::string &buf, const fs::path &q) {
    std::ofstream f(q, std::ios::binary | std::ios::trunc);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  };

  SUBCASE("bad magic") {
    std::string buf = slurp();
    buf[0] = 'X';
    const fs::path q = temp_dir() / "badmagic.suno";
    dump(buf, q);
    CHECK_THROWS_WITH_AS(read_container(q), "bad magic", DataError);
  }

  SUBCASE("version mismatch") {
    std::string buf = slurp();
    buf[4] = 9;
    const fs::path q = temp_dir() / "badver.suno";
    dump(buf, q);
    CHECK_THROWS_AS(read_container(q), DataError);
  }

  SUBCASE("truncated payload") {
    std::string buf = slurp();
    buf.resize(buf.size() - 64);
    const fs::path q = temp_dir() / "trunc.suno";
    dump(buf, q);
    try {
      read_container(q);
      FAIL("expected a DataError");
    } catch (const DataError &e) {
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
  }

  SUBCASE("header/payload coil count disagreement") {
    // Rewrite the header to claim 3 coils while the payload holds 2.
    std::string buf = slurp();
    const std::string needle = "\"ncoils\":2";
    const std::size_t at = buf.find(needle);
    REQUIRE(at != std::string::npos);
    buf.replace(at, needle.size(), "\"ncoils\":3");
    const fs::path q = temp_dir() / "shape.suno";
    dump(buf, q);
    try {
      read_container(q);
      FAIL("expected a DataError");
    } catch (const DataError &e) {
      CHECK(std::string(e.what()).find("shape disagreement") != std::string::npos);
    }
  }
}

TEST_CASE("mask json round trip") {
  const CartesianMask m = CartesianMask::make(16, {2, 6, 7, 8, 14}, 3);
  const fs::path p = temp_dir() / "mask.json";
  write_mask_json(p, m);
  const CartesianMask back = read_mask_json(p);
  CHECK(back.n_y == m.n_y);
  CHECK(back.budget == m.budget);
  CHECK(back.lines == m.lines);
  CHECK(back.fixed_center == m.fixed_center);
}

TEST_CASE("image file round trip and errors") {
  PhantomSpec spec = small_spec();
  const CxArray img = generate_phantom(spec, 1);
  const fs::path p = temp_dir() / "img.cimg";
  write_image(p, img);
  CHECK(bit_equal(read_image(p), img));

  std::ifstream f(p, std::ios::binary);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  buf[0] = 'Z';
  const fs::path q = temp_dir() / "img_bad.cimg";
  std::ofstream g(q, std::ios::binary);
  g.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  g.close();
  CHECK_THROWS_AS(read_image(q), DataError);
}

TEST_CASE("dataset validation catches duplicate ids") {
  const PhantomSpec spec = small_spec();
  Dataset ds = generate_dataset(spec, 2, 0, 0);
  ds.records[1].id = ds.records[0].id;
  CHECK_THROWS_AS(ds.validate(), UsageError);
}
