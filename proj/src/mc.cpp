#include "wigner/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "wigner/eigensolver.hpp"
#include "wigner/rng.hpp"

namespace wigner::mc {

namespace {

constexpr std::uint64_t kBootstrapSalt = 0xb007b007b007b007ull;

std::vector<double> resolved_grid(const ExperimentConfig& config,
                                  std::initializer_list<double> fallback) {
  if (!config.grid.empty()) return config.grid;
  return std::vector<double>(fallback);
}

void require_positive_grid(const std::vector<double>& grid, const char* what) {
  for (const double g : grid) {
    if (!(g > 0.0)) {
      throw ConfigError(std::string("grid for ") + what + " must be strictly positive");
    }
  }
}

std::vector<double> sample_spectrum(const ExperimentConfig& config, std::size_t index) {
  const HermitianMatrix h = ensemble::sample_wigner(
      config.n, config.entry_spec, rng::stream_seed(config.master_seed, index));
  return eig::eigh(h, false).eigenvalues;
}

// Column extraction in sample order, used samples only. Every moment and
// count below goes through this fixed ordering.
std::vector<double> used_column(const SampleBatch& batch, std::size_t offset) {
  std::vector<double> out;
  out.reserve(batch.status.size());
  for (std::size_t s = 0; s < batch.status.size(); ++s) {
    if (batch.status[s] == SampleStatus::kUsed) out.push_back(batch.row(s)[offset]);
  }
  return out;
}

std::size_t count_events(const std::vector<double>& values,
                         const std::function<bool(double)>& pred) {
  std::size_t events = 0;
  for (const double v : values) {
    if (pred(v)) ++events;
  }
  return events;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.n < 1) throw ConfigError("n must be at least 1");
  if (config.n_samples < 1) throw ConfigError("samples must be at least 1");
  if (!(config.kappa > 0.0 && config.kappa <= 2.0)) {
    throw ConfigError("kappa must lie in (0, 2]");
  }
  if (!(std::abs(config.energy) <= 2.0 - config.kappa)) {
    throw ConfigError("energy E = " + std::to_string(config.energy) +
                      " violates the bulk window |E| <= 2 - kappa = " +
                      std::to_string(2.0 - config.kappa) +
                      "; lower kappa explicitly to work closer to the edge");
  }
  if (config.repulsion_order < 1) throw ConfigError("k must be at least 1");
  if (!(config.p_norm >= 2.0)) throw ConfigError("p must be at least 2");
  if (!(config.delta > 0.0)) throw ConfigError("delta must be positive");
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    if (!(config.grid[i] >= 0.0) || !std::isfinite(config.grid[i])) {
      throw ConfigError("grid values must be finite and nonnegative");
    }
    if (i > 0 && !(config.grid[i] > config.grid[i - 1])) {
      throw ConfigError("grid must be sorted strictly ascending");
    }
  }
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

std::size_t SampleBatch::count(SampleStatus s) const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

std::size_t VarSampleBatch::count(SampleStatus s) const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

namespace {

// Shared scheduling core: an atomic ticket over sample indices. Output
// slots are disjoint per sample, so scheduling order never shows in the
// results.
template <typename Work>
void drive_pool(std::size_t n_samples, std::size_t workers, const Work& work) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto loop = [&]() {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= n_samples) return;
      try {
        work(index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

void enforce_failure_budget(std::size_t failed, std::size_t n_samples) {
  if (static_cast<double>(failed) > 0.001 * static_cast<double>(n_samples)) {
    throw ExperimentError("solver failure rate " + std::to_string(failed) + "/" +
                          std::to_string(n_samples) + " exceeds the 0.1% budget");
  }
}

}  // namespace

SampleBatch run_samples(const ExperimentConfig& config, std::size_t record_len,
                        const FixedReducer& reducer) {
  validate_config(config);
  SampleBatch batch;
  batch.record_len = record_len;
  batch.status.assign(config.n_samples, SampleStatus::kFailed);
  batch.values.assign(config.n_samples * record_len, 0.0);

  drive_pool(config.n_samples, resolve_workers(config.workers), [&](std::size_t index) {
    try {
      batch.status[index] = reducer(index, batch.values.data() + index * record_len);
    } catch (const eig::SolverError&) {
      batch.status[index] = SampleStatus::kFailed;
    }
  });
  enforce_failure_budget(batch.count(SampleStatus::kFailed), config.n_samples);
  return batch;
}

VarSampleBatch run_samples_var(const ExperimentConfig& config, const VarReducer& reducer) {
  validate_config(config);
  VarSampleBatch batch;
  batch.status.assign(config.n_samples, SampleStatus::kFailed);
  batch.values.assign(config.n_samples, {});

  drive_pool(config.n_samples, resolve_workers(config.workers), [&](std::size_t index) {
    try {
      batch.status[index] = reducer(index, batch.values[index]);
    } catch (const eig::SolverError&) {
      batch.status[index] = SampleStatus::kFailed;
    }
  });
  enforce_failure_budget(batch.count(SampleStatus::kFailed), config.n_samples);
  return batch;
}

SemicircleResult semicircle_concentration(const ExperimentConfig& config) {
  const std::vector<double> grid = resolved_grid(config, {0.05, 0.1, 0.2, 0.4});
  require_positive_grid(grid, "semicircle (eta values)");
  const std::size_t g = grid.size();
  const double n = static_cast<double>(config.n);
  const double rho_target = spectral::semicircle_density(config.energy);

  const SampleBatch batch =
      run_samples(config, 3 * g, [&](std::size_t index, double* out) {
        const std::vector<double> evals = sample_spectrum(config, index);
        for (std::size_t j = 0; j < g; ++j) {
          const spectral::SpectralPoint point{config.energy, grid[j]};
          const std::complex<double> m = spectral::stieltjes(evals, point);
          const spectral::SpectralInterval window{config.energy, grid[j]};
          out[3 * j] = m.real();
          out[3 * j + 1] = m.imag();
          out[3 * j + 2] =
              static_cast<double>(spectral::count_in_interval(evals, window));
        }
        return SampleStatus::kUsed;
      });

  SemicircleResult result;
  result.delta = config.delta;
  result.n_samples = batch.count(SampleStatus::kUsed);
  for (std::size_t j = 0; j < g; ++j) {
    SemicircleRow row;
    row.eta = grid[j];
    const std::complex<double> target = spectral::m_sc({config.energy, grid[j]});
    std::complex<double> mean{0.0, 0.0};
    std::size_t m_events = 0, count_events_n = 0;
    for (std::size_t s = 0; s < batch.status.size(); ++s) {
      if (batch.status[s] != SampleStatus::kUsed) continue;
      const double* rec = batch.row(s) + 3 * j;
      const std::complex<double> m{rec[0], rec[1]};
      mean += m;
      if (std::abs(m - target) >= config.delta) ++m_events;
      if (std::abs(rec[2] / (n * grid[j]) - rho_target) >= config.delta) ++count_events_n;
    }
    row.mean_m = mean / static_cast<double>(result.n_samples);
    row.m_exceed = stats::tail_probability(m_events, result.n_samples);
    row.count_exceed = stats::tail_probability(count_events_n, result.n_samples);
    result.rows.push_back(row);
  }
  return result;
}

WegnerResult wegner_moments(const ExperimentConfig& config) {
  const std::vector<double> grid = resolved_grid(config, {0.125, 0.25, 0.5, 1.0});
  require_positive_grid(grid, "wegner (epsilon values)");
  const std::size_t g = grid.size();
  const double n = static_cast<double>(config.n);
  const int k = config.repulsion_order;

  const SampleBatch batch =
      run_samples(config, 2 * g, [&](std::size_t index, double* out) {
        const std::vector<double> evals = sample_spectrum(config, index);
        for (std::size_t j = 0; j < g; ++j) {
          const double eta = grid[j] / n;
          const spectral::SpectralInterval window{config.energy, eta};
          const spectral::SpectralPoint point{config.energy, eta};
          out[2 * j] = static_cast<double>(spectral::count_in_interval(evals, window));
          out[2 * j + 1] = std::norm(spectral::stieltjes(evals, point));
        }
        return SampleStatus::kUsed;
      });

  WegnerResult result;
  result.n_samples = batch.count(SampleStatus::kUsed);
  std::vector<std::vector<double>> ni_sq_columns(g);
  for (std::size_t j = 0; j < g; ++j) {
    WegnerRow row;
    row.epsilon = grid[j];
    const std::vector<double> ni = used_column(batch, 2 * j);
    const std::vector<double> msq = used_column(batch, 2 * j + 1);
    std::vector<double> ni_sq(ni.size()), ni_k(ni.size());
    for (std::size_t s = 0; s < ni.size(); ++s) {
      ni_sq[s] = ni[s] * ni[s];
      ni_k[s] = std::pow(ni[s], k);
    }
    row.mean_ni = stats::mean_with_ci(ni);
    row.mean_ni_sq = stats::mean_with_ci(ni_sq);
    row.mean_ni_k = stats::mean_with_ci(ni_k);
    double msq_mean = 0.0;
    for (const double v : msq) msq_mean += v;
    msq_mean /= static_cast<double>(msq.size());
    row.neta_mean_m_sq = grid[j] * msq_mean;  // n * eta = epsilon
    ni_sq_columns[j] = std::move(ni_sq);
    result.rows.push_back(row);
  }

  auto ratio_of = [&](const std::vector<double>& means) {
    double lo = means[0] / grid[0], hi = means[0] / grid[0];
    for (std::size_t j = 1; j < g; ++j) {
      lo = std::min(lo, means[j] / grid[j]);
      hi = std::max(hi, means[j] / grid[j]);
    }
    return hi / lo;
  };
  std::vector<double> point_means(g);
  for (std::size_t j = 0; j < g; ++j) point_means[j] = result.rows[j].mean_ni_sq.point;
  result.ratio_max_over_min = ratio_of(point_means);

  // Bootstrap interval for the flatness ratio: resample the used rows with
  // a salted deterministic stream.
  const std::size_t used = ni_sq_columns[0].size();
  constexpr std::size_t kResamples = 200;
  std::vector<double> ratios(kResamples);
  for (std::size_t b = 0; b < kResamples; ++b) {
    rng::Stream stream(rng::stream_seed(config.master_seed ^ kBootstrapSalt, b));
    std::vector<double> sums(g, 0.0);
    for (std::size_t s = 0; s < used; ++s) {
      const std::size_t pick = static_cast<std::size_t>(stream.bits() % used);
      for (std::size_t j = 0; j < g; ++j) sums[j] += ni_sq_columns[j][pick];
    }
    for (std::size_t j = 0; j < g; ++j) sums[j] /= static_cast<double>(used);
    ratios[b] = ratio_of(sums);
  }
  std::sort(ratios.begin(), ratios.end());
  result.ratio_lo = quantile_sorted(ratios, 0.025);
  result.ratio_hi = quantile_sorted(ratios, 0.975);
  return result;
}

RepulsionResult repulsion_fit(const ExperimentConfig& config) {
  const std::vector<double> grid = resolved_grid(config, {0.25, 0.35, 0.5, 0.7, 1.0});
  require_positive_grid(grid, "repulsion (epsilon values)");
  const std::size_t g = grid.size();
  const double n = static_cast<double>(config.n);

  RepulsionResult result;
  result.k = config.repulsion_order;
  result.counts = run_samples(config, g, [&](std::size_t index, double* out) {
    const std::vector<double> evals = sample_spectrum(config, index);
    for (std::size_t j = 0; j < g; ++j) {
      const spectral::SpectralInterval window{config.energy, grid[j] / n};
      out[j] = static_cast<double>(spectral::count_in_interval(evals, window));
    }
    return SampleStatus::kUsed;
  });
  result.n_samples = result.counts.count(SampleStatus::kUsed);

  std::vector<std::size_t> events(g, 0);
  for (std::size_t j = 0; j < g; ++j) {
    const std::vector<double> column = used_column(result.counts, j);
    events[j] = count_events(column, [&](double v) {
      return v >= static_cast<double>(result.k);
    });
    RepulsionRow row;
    row.epsilon = grid[j];
    row.p_ge_k = stats::tail_probability(events[j], result.n_samples);
    result.rows.push_back(row);
  }
  result.fit = stats::fit_log_log(grid, events, result.n_samples);
  return result;
}

RepulsionResult refit_repulsion(const RepulsionResult& base, int k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  RepulsionResult result;
  result.k = k;
  result.n_samples = base.n_samples;
  result.counts = base.counts;

  const std::size_t g = base.rows.size();
  std::vector<double> grid(g);
  std::vector<std::size_t> events(g, 0);
  for (std::size_t j = 0; j < g; ++j) {
    grid[j] = base.rows[j].epsilon;
    const std::vector<double> column = used_column(base.counts, j);
    events[j] =
        count_events(column, [&](double v) { return v >= static_cast<double>(k); });
    RepulsionRow row;
    row.epsilon = grid[j];
    row.p_ge_k = stats::tail_probability(events[j], base.n_samples);
    result.rows.push_back(row);
  }
  result.fit = stats::fit_log_log(grid, events, base.n_samples);
  return result;
}

GapTailResult gap_tail(const ExperimentConfig& config) {
  const std::vector<double> grid = resolved_grid(config, {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0});
  const double n = static_cast<double>(config.n);

  const SampleBatch batch = run_samples(config, 1, [&](std::size_t index, double* out) {
    const std::vector<double> evals = sample_spectrum(config, index);
    const auto above = std::upper_bound(evals.begin(), evals.end(), config.energy);
    // Censor samples where E does not split the spectrum: the scaled gap to
    // the next eigenvalue above E is undefined at the extremes.
    if (above == evals.begin() || above == evals.end()) return SampleStatus::kCensored;
    out[0] = n * (*above - config.energy);
    return SampleStatus::kUsed;
  });

  GapTailResult result;
  result.used = batch.count(SampleStatus::kUsed);
  result.censored = batch.count(SampleStatus::kCensored);
  result.failed = batch.count(SampleStatus::kFailed);
  const std::vector<double> gaps = used_column(batch, 0);
  for (const double big_k : grid) {
    GapTailRow row;
    row.big_k = big_k;
    const std::size_t events =
        count_events(gaps, [&](double v) { return v >= big_k; });
    row.p_exceed = stats::tail_probability(events, result.used);
    result.rows.push_back(row);
  }
  return result;
}

DelocalizationResult delocalization_stats(const ExperimentConfig& config,
                                          double interval_width) {
  const double n = static_cast<double>(config.n);
  const double width = interval_width > 0.0 ? interval_width : 8.0 / n;
  const spectral::SpectralInterval window{config.energy, width};
  const std::vector<double> m_grid = resolved_grid(config, {2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0});
  const double p = config.p_norm;

  const VarSampleBatch batch =
      run_samples_var(config, [&](std::size_t index, std::vector<double>& out) {
        const HermitianMatrix h = ensemble::sample_wigner(
            config.n, config.entry_spec, rng::stream_seed(config.master_seed, index));
        const eig::SpectralDecomposition dec = eig::eigh(h, true);
        for (std::size_t alpha = 0; alpha < config.n; ++alpha) {
          if (!window.contains(dec.eigenvalues[alpha])) continue;
          const std::complex<double>* v = dec.vector(alpha);
          double sup = 0.0, psum = 0.0;
          for (std::size_t i = 0; i < config.n; ++i) {
            const double mag = std::abs(v[i]);
            sup = std::max(sup, mag);
            psum += std::pow(mag, p);
          }
          out.push_back(std::sqrt(n) * sup);
          out.push_back(std::pow(n, 0.5 - 1.0 / p) * std::pow(psum, 1.0 / p));
        }
        return SampleStatus::kUsed;
      });

  DelocalizationResult result;
  result.interval_width = width;
  result.n_samples = batch.count(SampleStatus::kUsed);
  std::vector<double> sups, pnorms;
  for (std::size_t s = 0; s < batch.status.size(); ++s) {
    if (batch.status[s] != SampleStatus::kUsed) continue;
    for (std::size_t i = 0; i + 1 < batch.values[s].size(); i += 2) {
      sups.push_back(batch.values[s][i]);
      pnorms.push_back(batch.values[s][i + 1]);
    }
  }
  result.n_vectors = sups.size();

  std::vector<double> sorted_sups(sups), sorted_pnorms(pnorms);
  std::sort(sorted_sups.begin(), sorted_sups.end());
  std::sort(sorted_pnorms.begin(), sorted_pnorms.end());
  for (const double q : {0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) {
    DelocalizationQuantileRow row;
    row.quantile = q;
    row.sup_norm_scaled = quantile_sorted(sorted_sups, q);
    row.p_norm_scaled = quantile_sorted(sorted_pnorms, q);
    result.quantiles.push_back(row);
  }
  for (const double m : m_grid) {
    GapTailRow row;
    row.big_k = m;
    const std::size_t events = count_events(sups, [&](double v) { return v >= m; });
    row.p_exceed = stats::tail_probability(events, std::max<std::size_t>(result.n_vectors, 1));
    result.exceedance.push_back(row);
  }
  return result;
}

XiTailResult xi_lower_tail(const ExperimentConfig& config) {
  const std::vector<double> grid = resolved_grid(config, {0.10, 0.13, 0.17, 0.22, 0.29});
  require_positive_grid(grid, "xi-tail (delta values)");
  const std::size_t m = static_cast<std::size_t>(config.repulsion_order);
  if (config.n < m + 1) {
    throw ConfigError("xi-tail requires n >= k + 1 (index set of the minor spectrum)");
  }

  const SampleBatch batch = run_samples(config, 1, [&](std::size_t index, double* out) {
    const HermitianMatrix h = ensemble::sample_wigner(
        config.n, config.entry_spec, rng::stream_seed(config.master_seed, index));
    const MinorDecomposition md = minor(h, 0);
    const eig::SpectralDecomposition dec = eig::eigh(md.b, true);
    const spectral::OverlapVector xi = spectral::overlaps_xi(dec, md.a, config.n);

    // The m eigenvalues closest to E form a contiguous range in the sorted
    // spectrum; grow it pointwise from the insertion position.
    const auto& evals = dec.eigenvalues;
    std::size_t hi = static_cast<std::size_t>(
        std::lower_bound(evals.begin(), evals.end(), config.energy) - evals.begin());
    std::size_t lo = hi;
    while (hi - lo < m) {
      if (lo == 0) {
        ++hi;
      } else if (hi == evals.size()) {
        --lo;
      } else if (config.energy - evals[lo - 1] <= evals[hi] - config.energy) {
        --lo;
      } else {
        ++hi;
      }
    }
    double sum = 0.0;
    for (std::size_t a = lo; a < hi; ++a) sum += xi.xi[a];
    out[0] = sum / static_cast<double>(m);
    return SampleStatus::kUsed;
  });

  XiTailResult result;
  result.m = m;
  result.n_samples = batch.count(SampleStatus::kUsed);
  const std::vector<double> sums = used_column(batch, 0);
  std::vector<std::size_t> events(grid.size(), 0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    events[j] = count_events(sums, [&](double v) { return v <= grid[j]; });
    XiTailRow row;
    row.delta = grid[j];
    row.p_le = stats::tail_probability(events[j], result.n_samples);
    result.rows.push_back(row);
  }
  result.fit = stats::fit_log_log(grid, events, result.n_samples);
  return result;
}

XiMeanResult xi_concentration(const ExperimentConfig& config) {
  if (config.n < 2) throw ConfigError("concentration requires n >= 2");
  const double eta = config.grid.empty() ? 0.5 : config.grid[0];
  if (!(eta > 0.0)) throw ConfigError("concentration requires eta > 0 (grid[0])");
  const spectral::SpectralPoint point{config.energy, eta};
  const spectral::SpectralInterval window{config.energy, eta};

  const SampleBatch batch = run_samples(config, 3, [&](std::size_t index, double* out) {
    const HermitianMatrix h = ensemble::sample_wigner(
        config.n, config.entry_spec, rng::stream_seed(config.master_seed, index));
    const MinorDecomposition md = minor(h, 0);
    const eig::SpectralDecomposition dec = eig::eigh(md.b, true);
    const spectral::OverlapVector xi = spectral::overlaps_xi(dec, md.a, config.n);
    const spectral::XZStatistics xz =
        spectral::x_and_z_statistics(xi, dec.eigenvalues, point, window);
    out[0] = xi.sum() / static_cast<double>(config.n - 1);
    out[1] = xz.x_stat.real();
    out[2] = xz.x_stat.imag();
    return SampleStatus::kUsed;
  });

  XiMeanResult result;
  result.eta = eta;
  result.xi_mean = stats::mean_with_ci(used_column(batch, 0));
  result.x_stat_re = stats::mean_with_ci(used_column(batch, 1));
  result.x_stat_im = stats::mean_with_ci(used_column(batch, 2));
  result.n_pairs = batch.count(SampleStatus::kUsed) * (config.n - 1);
  return result;
}

HansonWrightResult hanson_wright_trial(const std::vector<std::complex<double>>& a_matrix,
                                       std::size_t m,
                                       const ensemble::EntryDistributionSpec& spec,
                                       std::size_t n_samples,
                                       const std::vector<double>& delta_grid,
                                       std::uint64_t seed, std::size_t workers) {
  if (a_matrix.size() != m * m) {
    throw ConfigError("hanson-wright kernel must be square (m x m entries)");
  }
  if (delta_grid.empty()) throw ConfigError("hanson-wright needs a delta grid");
  require_positive_grid(delta_grid, "hanson-wright (delta values)");

  HansonWrightResult result;
  double hs_sq = 0.0;
  std::complex<double> trace{0.0, 0.0};
  for (std::size_t j = 0; j < m; ++j) {
    trace += a_matrix[j * m + j];
    for (std::size_t k2 = 0; k2 < m; ++k2) hs_sq += std::norm(a_matrix[j * m + k2]);
  }
  result.hs_norm = std::sqrt(hs_sq);

  ExperimentConfig harness;
  harness.n = m;
  harness.n_samples = n_samples;
  harness.master_seed = seed;
  harness.workers = workers;

  const SampleBatch batch = run_samples(harness, 1, [&](std::size_t index, double* out) {
    rng::Stream stream(rng::stream_seed(seed, index));
    std::vector<std::complex<double>> b(m);
    for (std::size_t j = 0; j < m; ++j) b[j] = ensemble::sample_offdiagonal(spec.family, stream);
    std::complex<double> x{0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      std::complex<double> inner{0.0, 0.0};
      const std::complex<double>* row = a_matrix.data() + j * m;
      for (std::size_t k2 = 0; k2 < m; ++k2) inner += row[k2] * std::conj(b[k2]);
      x += b[j] * inner;
    }
    out[0] = std::abs(x - trace);
    return SampleStatus::kUsed;
  });

  result.n_samples = batch.count(SampleStatus::kUsed);
  const std::vector<double> magnitudes = used_column(batch, 0);
  const double a_norm = result.hs_norm;

  // A zero kernel makes X identically zero; every tail is empty and the
  // decay rate is unbounded, so the envelope collapses to zero as well.
  if (a_norm == 0.0) {
    result.fitted_c = 0.0;
    result.tails_monotone = true;
    std::vector<double> sorted_grid(delta_grid);
    std::sort(sorted_grid.begin(), sorted_grid.end());
    for (const double delta : sorted_grid) {
      const std::size_t events =
          count_events(magnitudes, [&](double v) { return v >= delta; });
      HansonWrightRow row;
      row.delta = delta;
      row.p_exceed = stats::tail_probability(events, result.n_samples);
      row.envelope = 0.0;
      result.rows.push_back(row);
    }
    return result;
  }

  auto rate = [&](double delta) {
    return std::min(delta / a_norm, delta * delta / (a_norm * a_norm));
  };

  std::vector<double> sorted_grid(delta_grid);
  std::sort(sorted_grid.begin(), sorted_grid.end());
  double fitted_c = std::numeric_limits<double>::infinity();
  double fallback_c = std::numeric_limits<double>::infinity();
  std::vector<stats::EstimateWithCI> estimates;
  for (const double delta : sorted_grid) {
    const std::size_t events =
        count_events(magnitudes, [&](double v) { return v >= delta; });
    const auto est = stats::tail_probability(events, result.n_samples);
    estimates.push_back(est);
    if (est.n_events > 0) {
      fitted_c = std::min(fitted_c, -std::log(est.point / 4.0) / rate(delta));
    }
    fallback_c = std::min(fallback_c, -std::log(est.hi / 4.0) / rate(delta));
  }
  result.fitted_c = std::isfinite(fitted_c) ? fitted_c : fallback_c;

  result.tails_monotone = true;
  for (std::size_t j = 0; j < sorted_grid.size(); ++j) {
    HansonWrightRow row;
    row.delta = sorted_grid[j];
    row.p_exceed = estimates[j];
    row.envelope = 4.0 * std::exp(-result.fitted_c * rate(sorted_grid[j]));
    if (j > 0 && estimates[j].point > estimates[j - 1].point) result.tails_monotone = false;
    result.rows.push_back(row);
  }
  return result;
}

bool ValidationResult::all_ok() const {
  for (const auto& row : rows) {
    if (row.n_violations > 0) return false;
  }
  return true;
}

ValidationResult validate_identities(const ExperimentConfig& config) {
  if (config.n < 2) throw ConfigError("validate requires n >= 2");
  const double eta = config.grid.empty() ? 0.5 : config.grid[0];
  if (!(eta > 0.0)) throw ConfigError("validate requires eta > 0 (grid[0])");
  const spectral::SpectralPoint point{config.energy, eta};
  const std::complex<double> z = point.z();
  const double nd = static_cast<double>(config.n);

  struct Tally {
    std::size_t evaluated = 0;
    std::size_t violations = 0;
    double worst = 0.0;
    void record(bool ok, double excess) {
      ++evaluated;
      if (!ok) {
        ++violations;
        worst = std::max(worst, excess);
      }
    }
  };
  Tally interlace, completeness, resolvent, minor_gap, count_bound;
  std::mutex tally_mutex;

  const SampleBatch batch = run_samples(config, 1, [&](std::size_t index, double* out) {
    out[0] = 0.0;
    const HermitianMatrix h = ensemble::sample_wigner(
        config.n, config.entry_spec, rng::stream_seed(config.master_seed, index));
    const eig::SpectralDecomposition full = eig::eigh(h, true);
    Tally li, lc, lr, lm, lb;

    const auto bound_check = spectral::basic_count_bound(full.eigenvalues, config.energy, eta);
    lb.record(bound_check.ok,
              static_cast<double>(bound_check.count) - bound_check.bound);

    for (std::size_t k = 0; k < config.n; ++k) {
      const MinorDecomposition md = minor(h, k);
      const eig::SpectralDecomposition mdec = eig::eigh(md.b, true);

      const auto inter = eig::interlacing_check(full, mdec);
      li.record(inter.ok, inter.worst_violation);

      const spectral::OverlapVector xi = spectral::overlaps_xi(mdec, md.a, config.n);
      double a_norm_sq = 0.0;
      for (const auto& v : md.a) a_norm_sq += std::norm(v);
      const double comp_err = std::abs(xi.sum() - nd * a_norm_sq);
      const double comp_tol = 1e-10 * nd * std::max(1.0, nd * a_norm_sq);
      lc.record(comp_err <= comp_tol, comp_err - comp_tol);

      std::complex<double> weighted{0.0, 0.0};
      for (std::size_t alpha = 0; alpha + 1 < config.n; ++alpha) {
        weighted += xi.xi[alpha] / (mdec.eigenvalues[alpha] - z);
      }
      const std::complex<double> via_minor = 1.0 / (md.h_kk - z - weighted / nd);
      const std::complex<double> direct = spectral::resolvent_diag_minor(h, k, z).direct;
      const double res_err = std::abs(direct - via_minor);
      const double res_tol = 1e-8 / (eta * eta);
      lr.record(res_err <= res_tol, res_err - res_tol);

      const auto gap = spectral::minor_stieltjes_gap(full.eigenvalues, mdec.eigenvalues, point);
      lm.record(gap.ok, gap.gap - gap.bound);
    }

    std::lock_guard<std::mutex> lock(tally_mutex);
    for (auto [global, local] :
         {std::pair{&interlace, &li}, {&completeness, &lc}, {&resolvent, &lr},
          {&minor_gap, &lm}, {&count_bound, &lb}}) {
      global->evaluated += local->evaluated;
      global->violations += local->violations;
      global->worst = std::max(global->worst, local->worst);
    }
    return SampleStatus::kUsed;
  });

  ValidationResult result;
  result.n_samples = batch.count(SampleStatus::kUsed);
  result.rows = {
      {"interlacing", interlace.evaluated, interlace.violations, interlace.worst},
      {"overlap-completeness", completeness.evaluated, completeness.violations,
       completeness.worst},
      {"resolvent-dual-route", resolvent.evaluated, resolvent.violations, resolvent.worst},
      {"minor-gap-bound", minor_gap.evaluated, minor_gap.violations, minor_gap.worst},
      {"count-bound", count_bound.evaluated, count_bound.violations, count_bound.worst},
  };
  return result;
}

PerturbationCheck perturbation_gradient_check(const HermitianMatrix& h, std::size_t alpha,
                                              std::size_t i,
                                              const std::vector<double>& steps) {
  const std::size_t n = h.dim();
  if (alpha >= n) throw ConfigError("perturbation check: alpha out of range");
  if (i >= n) throw ConfigError("perturbation check: i out of range");
  if (steps.empty()) throw ConfigError("perturbation check: need at least one step");

  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const eig::SpectralDecomposition base = eig::eigh(h, true);
  const std::complex<double>* v = base.vector(alpha);
  PerturbationCheck check;
  check.weight = std::norm(v[i]);

  // First-order perturbation theory needs a simple eigenvalue: a finite
  // difference across a near-degenerate pair tracks the wrong branch.
  double gap = std::numeric_limits<double>::infinity();
  if (alpha > 0) gap = std::min(gap, base.eigenvalues[alpha] - base.eigenvalues[alpha - 1]);
  if (alpha + 1 < n) {
    gap = std::min(gap, base.eigenvalues[alpha + 1] - base.eigenvalues[alpha]);
  }
  check.neighbor_gap = gap;
  if (gap <= 1e3 * base.residual_bound) {
    check.skipped = true;
    check.diagnostic = "eigenvalue " + std::to_string(alpha) +
                       " is near-degenerate (neighbor gap " + std::to_string(gap) +
                       " <= 1000 x residual bound " + std::to_string(base.residual_bound) +
                       "); derivative check skipped";
    return check;
  }

  const double analytic = check.weight / sqrt_n;
  double smallest_step = std::numeric_limits<double>::infinity();
  for (const double step : steps) {
    if (!(step > 0.0)) throw ConfigError("perturbation check: steps must be positive");
    HermitianMatrix plus = h, minus = h;
    // A shift t of the unscaled diagonal variable moves h_ii by t / sqrt(n).
    plus(i, i) += step / sqrt_n;
    minus(i, i) -= step / sqrt_n;
    const double mu_plus = eig::eigh(plus, false).eigenvalues[alpha];
    const double mu_minus = eig::eigh(minus, false).eigenvalues[alpha];

    PerturbationStepRow row;
    row.step = step;
    row.analytic = analytic;
    row.finite_difference = (mu_plus - mu_minus) / (2.0 * step);
    row.observed_constant = row.finite_difference * sqrt_n / check.weight;
    check.rows.push_back(row);
    if (step < smallest_step) {
      smallest_step = step;
      check.observed_constant = row.observed_constant;
    }
  }
  return check;
}

}  // namespace wigner::mc
