#include "suno/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "suno/metrics.hpp"
#include "suno/parallel.hpp"
#include "suno/rng.hpp"

namespace suno {

void SamplerConfig::validate(int n_y) const {
  require(budget >= 1 && budget <= n_y, "budget must lie in [1, n_y]");
  require(fixed_center >= 0 && fixed_center <= budget, "fixed_center must lie in [0, budget]");
  require(n_iter >= 1, "n_iter must be at least 1");
}

double mask_loss(const ScanRecord &scan, const Reconstructor &recon, const CartesianMask &m,
                 SamplerLoss loss) {
  const CxArray est = recon.reconstruct(apply_mask(scan.kspace_full, m), m, scan.smaps);
  const auto [ch, cw] = default_crop(scan.ground_truth.rows(), scan.ground_truth.cols());
  const CxArray ref_c = central_crop(scan.ground_truth, ch, cw);
  const CxArray est_c = central_crop(est, ch, cw);
  if (loss == SamplerLoss::nrmse) return nrmse(ref_c, est_c);
  return 1.0 - ssim(ref_c, est_c);
}

CartesianMask mask_low_frequency(int n_y, int budget) {
  require(budget >= 1 && budget <= n_y, "budget must lie in [1, n_y]");
  const auto [lo, hi] = central_block(n_y, budget);
  std::vector<int> lines;
  lines.reserve(static_cast<std::size_t>(budget));
  for (int k = lo; k < hi; ++k) lines.push_back(k);
  return CartesianMask::make(n_y, std::move(lines), budget);
}

namespace {

// Ascending positions outside the central block of c lines.
std::vector<int> complement_of_center(int n_y, int c_fixed) {
  const auto [lo, hi] = central_block(n_y, c_fixed);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n_y - c_fixed));
  for (int k = 0; k < n_y; ++k)
    if (k < lo || k >= hi) out.push_back(k);
  return out;
}

std::vector<int> center_lines(int n_y, int c_fixed) {
  const auto [lo, hi] = central_block(n_y, c_fixed);
  std::vector<int> out;
  for (int k = lo; k < hi; ++k) out.push_back(k);
  return out;
}

} // namespace

CartesianMask mask_equispaced(int n_y, int budget, int c_fixed) {
  require(budget >= 1 && budget <= n_y, "budget must lie in [1, n_y]");
  require(c_fixed >= 0 && c_fixed <= budget, "fixed_center must lie in [0, budget]");
  std::vector<int> lines = center_lines(n_y, c_fixed);
  const std::vector<int> comp = complement_of_center(n_y, c_fixed);
  const int extra = budget - c_fixed;
  for (int k = 0; k < extra; ++k) {
    const std::size_t pos = static_cast<std::size_t>(
        static_cast<long long>(k) * static_cast<long long>(comp.size()) / extra);
    lines.push_back(comp[pos]);
  }
  return CartesianMask::make(n_y, std::move(lines), c_fixed);
}

CartesianMask mask_uniform_random(int n_y, int budget, int c_fixed, std::uint64_t seed) {
  require(budget >= 1 && budget <= n_y, "budget must lie in [1, n_y]");
  require(c_fixed >= 0 && c_fixed <= budget, "fixed_center must lie in [0, budget]");
  std::vector<int> lines = center_lines(n_y, c_fixed);
  std::vector<int> comp = complement_of_center(n_y, c_fixed);
  SplitMix64 rng(seed);
  // Partial Fisher-Yates; the first budget - c entries are the draw.
  const int extra = budget - c_fixed;
  for (int k = 0; k < extra; ++k) {
    const std::size_t j =
        static_cast<std::size_t>(k) + rng.below(comp.size() - static_cast<std::size_t>(k));
    std::swap(comp[static_cast<std::size_t>(k)], comp[j]);
    lines.push_back(comp[static_cast<std::size_t>(k)]);
  }
  return CartesianMask::make(n_y, std::move(lines), c_fixed);
}

namespace {

// One dart-throwing pass at gap g; returns the sampled lines or an empty
// vector when the attempt budget runs out before budget - c lines land.
std::vector<int> vdpd_attempt(int n_y, int budget, int c_fixed, double density_power, int gap,
                              SplitMix64 &rng) {
  const std::vector<int> comp = complement_of_center(n_y, c_fixed);
  const double center = n_y / 2.0;
  const int want = budget - c_fixed;

  std::vector<int> picked;
  std::vector<char> blocked(static_cast<std::size_t>(n_y), 0);
  long attempts = 0;
  const long attempt_cap = 2000L * std::max(want, 1);
  while (static_cast<int>(picked.size()) < want && attempts < attempt_cap) {
    ++attempts;
    const int k = comp[static_cast<std::size_t>(rng.below(comp.size()))];
    if (blocked[static_cast<std::size_t>(k)]) continue;
    const double dist = std::abs(k - center) / std::max(center, 1.0);
    const double accept = std::pow(1.0 + dist, -density_power);
    if (rng.uniform() >= accept) continue;
    picked.push_back(k);
    for (int b = std::max(0, k - gap + 1); b < std::min(n_y, k + gap); ++b)
      blocked[static_cast<std::size_t>(b)] = 1;
  }
  if (static_cast<int>(picked.size()) < want) picked.clear();
  return picked;
}

} // namespace

CartesianMask mask_vdpd_1d(int n_y, int budget, int c_fixed, std::uint64_t seed,
                           double density_power, int *chosen_gap) {
  require(budget >= 1 && budget <= n_y, "budget must lie in [1, n_y]");
  require(c_fixed >= 0 && c_fixed <= budget, "fixed_center must lie in [0, budget]");
  require(density_power >= 0.0, "density_power must be nonnegative");
  if (budget == c_fixed) {
    if (chosen_gap) *chosen_gap = 1;
    return mask_low_frequency(n_y, budget);
  }

  // Largest gap at which the seeded dart process still places all lines.
  // The predicate is evaluated with a per-gap substream so the search is
  // deterministic.
  const auto try_gap = [&](int gap) {
    SplitMix64 rng(derive_seed(seed, 0x76647064ULL /* "vdpd" */, static_cast<std::uint64_t>(gap)));
    return vdpd_attempt(n_y, budget, c_fixed, density_power, gap, rng);
  };

  int lo = 1, hi = n_y; // invariant: gap lo fits (checked below), gap hi does not
  std::vector<int> best = try_gap(1);
  require(!best.empty(), "vdpd: cannot place the requested lines even at gap 1");
  while (lo + 1 < hi) {
    const int mid = lo + (hi - lo) / 2;
    std::vector<int> attempt = try_gap(mid);
    if (!attempt.empty()) {
      lo = mid;
      best = std::move(attempt);
    } else {
      hi = mid;
    }
  }

  if (chosen_gap) *chosen_gap = lo;
  std::vector<int> lines = center_lines(n_y, c_fixed);
  lines.insert(lines.end(), best.begin(), best.end());
  return CartesianMask::make(n_y, std::move(lines), c_fixed);
}

namespace {

CartesianMask make_from_sorted(int n_y, std::vector<int> lines, int c_fixed) {
  return CartesianMask::make(n_y, std::move(lines), c_fixed);
}

// Argmin of losses with ties to the lowest candidate index; candidates are
// evaluated in parallel but reduced sequentially, so results do not depend
// on the thread count.
std::size_t argmin_strict(const std::vector<double> &losses) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < losses.size(); ++i)
    if (losses[i] < losses[best]) best = i;
  return best;
}

} // namespace

std::pair<CartesianMask, OptTrace> greedy_optimize(const ScanRecord &scan,
                                                   const Reconstructor &recon,
                                                   const SamplerConfig &cfg) {
  const int n_y = static_cast<int>(scan.kspace_full.cols());
  cfg.validate(n_y);

  std::vector<int> current = center_lines(n_y, cfg.fixed_center);
  OptTrace trace;
  std::vector<char> sampled(static_cast<std::size_t>(n_y), 0);
  for (int k : current) sampled[static_cast<std::size_t>(k)] = 1;

  for (int step = 0; step < cfg.budget - cfg.fixed_center; ++step) {
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(n_y));
    for (int k = 0; k < n_y; ++k)
      if (!sampled[static_cast<std::size_t>(k)]) candidates.push_back(k);

    std::vector<double> losses(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
      std::vector<int> lines = current;
      lines.push_back(candidates[i]);
      losses[i] = mask_loss(scan, recon,
                            make_from_sorted(n_y, std::move(lines), cfg.fixed_center), cfg.loss);
    });
    trace.recon_calls += static_cast<long>(candidates.size());

    const std::size_t best = argmin_strict(losses);
    const int chosen = candidates[best];
    current.insert(std::upper_bound(current.begin(), current.end(), chosen), chosen);
    sampled[static_cast<std::size_t>(chosen)] = 1;
    trace.loss_history.push_back(losses[best]);
    trace.moved_lines.emplace_back(-1, chosen);
    trace.final_loss = losses[best];
  }

  CartesianMask mask = make_from_sorted(n_y, std::move(current), cfg.fixed_center);
  if (cfg.budget == cfg.fixed_center) trace.final_loss = mask_loss(scan, recon, mask, cfg.loss);
  return {std::move(mask), std::move(trace)};
}

std::pair<CartesianMask, OptTrace> icd_optimize(const ScanRecord &scan,
                                                const Reconstructor &recon,
                                                const SamplerConfig &cfg,
                                                const CartesianMask &init) {
  const int n_y = static_cast<int>(scan.kspace_full.cols());
  cfg.validate(n_y);
  init.validate();
  require(init.n_y == n_y, "icd: init mask n_y mismatch");
  require(init.budget == cfg.budget, "icd: init mask budget mismatch");
  require(static_cast<int>(init.fixed_center.size()) == cfg.fixed_center,
          "icd: init mask fixed_center mismatch");

  const auto [center_lo, center_hi] = central_block(n_y, cfg.fixed_center);
  std::vector<int> current = init.lines;
  std::vector<char> sampled(static_cast<std::size_t>(n_y), 0);
  for (int k : current) sampled[static_cast<std::size_t>(k)] = 1;

  OptTrace trace;
  // The initial incumbent evaluation seeds the cache; per the cost model
  // only candidate evaluations count as recon_calls.
  double incumbent = mask_loss(scan, recon, init, cfg.loss);
  trace.final_loss = incumbent;

  for (int iter = 0; iter < cfg.n_iter; ++iter) {
    std::vector<int> movable;
    for (int k : current)
      if (k < center_lo || k >= center_hi) movable.push_back(k);

    for (int line : movable) {
      std::vector<int> without;
      without.reserve(current.size() - 1);
      for (int k : current)
        if (k != line) without.push_back(k);

      std::vector<int> candidates;
      candidates.reserve(static_cast<std::size_t>(n_y - cfg.budget));
      for (int k = 0; k < n_y; ++k) {
        if (sampled[static_cast<std::size_t>(k)]) continue;        // covers all of omega'
        if (k >= center_lo && k < center_hi) continue;             // center is not a destination
        candidates.push_back(k);
      }

      std::vector<double> losses(candidates.size());
      parallel_for(candidates.size(), [&](std::size_t i) {
        std::vector<int> lines = without;
        lines.push_back(candidates[i]);
        losses[i] = mask_loss(scan, recon,
                              make_from_sorted(n_y, std::move(lines), cfg.fixed_center), cfg.loss);
      });
      trace.recon_calls += static_cast<long>(candidates.size());

      if (!candidates.empty()) {
        const std::size_t best = argmin_strict(losses);
        if (losses[best] < incumbent) { // ties keep the incumbent
          sampled[static_cast<std::size_t>(line)] = 0;
          sampled[static_cast<std::size_t>(candidates[best])] = 1;
          without.insert(std::upper_bound(without.begin(), without.end(), candidates[best]),
                         candidates[best]);
          current = std::move(without);
          trace.moved_lines.emplace_back(line, candidates[best]);
          incumbent = losses[best];
        }
      }
      trace.loss_history.push_back(incumbent);
    }
  }

  trace.final_loss = incumbent;
  return {make_from_sorted(n_y, std::move(current), cfg.fixed_center), std::move(trace)};
}

std::pair<CartesianMask, double> exhaustive_oracle(const ScanRecord &scan,
                                                   const Reconstructor &recon,
                                                   const SamplerConfig &cfg) {
  const int n_y = static_cast<int>(scan.kspace_full.cols());
  cfg.validate(n_y);

  const std::vector<int> domain = complement_of_center(n_y, cfg.fixed_center);
  const int k = cfg.budget - cfg.fixed_center;

  // C(|domain|, k) with early bail-out against the guard.
  constexpr double kGuard = 1e5;
  double count = 1.0;
  for (int i = 0; i < k; ++i) {
    count *= static_cast<double>(domain.size() - static_cast<std::size_t>(i)) / (i + 1);
    if (count > kGuard * 8) break;
  }
  require(count <= kGuard, "exhaustive_oracle: combination count exceeds the 1e5 guard");

  const std::vector<int> center = center_lines(n_y, cfg.fixed_center);

  // Enumerate k-combinations of the movable domain in lexicographic order;
  // strict improvement keeps the lexicographically smallest optimum.
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;

  std::vector<std::vector<int>> combos;
  if (k == 0) {
    combos.emplace_back();
  } else {
    for (;;) {
      std::vector<int> combo(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = domain[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      combos.push_back(std::move(combo));
      int i = k - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] ==
                           static_cast<int>(domain.size()) - k + i)
        --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  std::vector<double> losses(combos.size());
  parallel_for(combos.size(), [&](std::size_t i) {
    std::vector<int> lines = center;
    lines.insert(lines.end(), combos[i].begin(), combos[i].end());
    losses[i] = mask_loss(scan, recon, make_from_sorted(n_y, std::move(lines), cfg.fixed_center),
                          cfg.loss);
  });

  const std::size_t best = argmin_strict(losses);
  std::vector<int> lines = center;
  lines.insert(lines.end(), combos[best].begin(), combos[best].end());
  return {make_from_sorted(n_y, std::move(lines), cfg.fixed_center), losses[best]};
}

} // namespace suno
