#include "ccpinn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "ccpinn/gradient.hpp"
#include "ccpinn/kernels.hpp"
#include "ccpinn/optimizer.hpp"
#include "ccpinn/parallel.hpp"

namespace ccpinn {

namespace {

void validate_problem(const Grid& grid,
                      const std::vector<FrequencyChannel>& channels,
                      const std::vector<double>& truth_eps,
                      const std::vector<double>& truth_sig,
                      const TrainConfig& cfg) {
  if (channels.empty())
    throw std::invalid_argument("at least one frequency channel is required");
  const std::size_t cells = static_cast<std::size_t>(grid.num_cells());
  if (truth_eps.size() != cells || truth_sig.size() != cells)
    throw std::invalid_argument("truth map size does not match the grid");
  for (const FrequencyChannel& ch : channels) {
    if (ch.kernel.n != grid.n ||
        static_cast<std::size_t>(ch.e_inc.cols) != cells)
      throw std::invalid_argument(
          "channel operators do not match the inversion grid");
    if (!(ch.d_meas > 0.0))
      throw std::invalid_argument("channel has no measurements attached");
  }
  if (cfg.strategy == Strategy::hopping) {
    for (std::size_t i = 1; i < channels.size(); ++i)
      if (!(channels[i].freq > channels[i - 1].freq))
        throw std::invalid_argument(
            "hopping requires strictly ascending channel frequencies");
    if (!cfg.stage_fractions.empty() &&
        cfg.stage_fractions.size() != channels.size())
      throw std::invalid_argument(
          "stage_fractions must have one entry per frequency");
  }
  if (cfg.total_epochs < 0)
    throw std::invalid_argument("total_epochs must be non-negative");
  if (cfg.psnr_every < 1)
    throw std::invalid_argument("psnr_every must be positive");
  if (!(cfg.lr_theta > 0.0) || !(cfg.lr_j > 0.0))
    throw std::invalid_argument("learning rates must be positive");
  if (cfg.lr_floor < 0.0 || cfg.lr_floor > cfg.lr_theta ||
      cfg.lr_floor > cfg.lr_j)
    throw std::invalid_argument(
        "lr_floor must lie in [0, min(lr_theta, lr_j)]");
}

/// Linear-interpolation quantile of an ascending-sorted sample.
double quantile7(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

FiveNumber five_number_summary(std::vector<double> sample) {
  if (sample.empty())
    throw std::invalid_argument("five_number_summary needs a non-empty sample");
  std::sort(sample.begin(), sample.end());
  FiveNumber f;
  f.min = sample.front();
  f.q1 = quantile7(sample, 0.25);
  f.median = quantile7(sample, 0.5);
  f.q3 = quantile7(sample, 0.75);
  f.max = sample.back();
  return f;
}

std::vector<double> default_stage_fractions(int n_stages) {
  if (n_stages < 1)
    throw std::invalid_argument("n_stages must be positive");
  if (n_stages == 1) return {1.0};
  std::vector<double> f(static_cast<std::size_t>(n_stages),
                        0.4 / (n_stages - 1));
  f.back() = 0.6;
  return f;
}

std::vector<int> stage_boundaries(const std::vector<double>& fractions,
                                  int total_epochs) {
  if (fractions.empty())
    throw std::invalid_argument("stage fractions must be non-empty");
  if (total_epochs < 0)
    throw std::invalid_argument("total_epochs must be non-negative");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0))
      throw std::invalid_argument("stage fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("stage fractions must sum to 1");
  std::vector<int> ends(fractions.size());
  double cum = 0.0;
  int prev = 0;
  for (std::size_t s = 0; s < fractions.size(); ++s) {
    cum += fractions[s];
    int e = static_cast<int>(std::llround(cum * total_epochs));
    e = std::min(std::max(e, prev), total_epochs);
    ends[s] = e;
    prev = e;
  }
  ends.back() = total_epochs;
  return ends;
}

double psnr(const std::vector<double>& truth,
            const std::vector<double>& estimate) {
  if (truth.empty() || truth.size() != estimate.size())
    throw std::invalid_argument("psnr needs two equal-size non-empty maps");
  const double peak = *std::max_element(truth.begin(), truth.end());
  if (!(peak > 0.0))
    throw std::invalid_argument("psnr needs a positive truth peak");
  double mse = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - estimate[i];
    mse += d * d;
  }
  mse /= static_cast<double>(truth.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

CMatrix backprojection_init(const FrequencyChannel& ch) {
  if (!(ch.d_meas > 0.0))
    throw std::invalid_argument("channel has no measurements attached");
  const int p_tx = ch.e_meas.rows;
  const int q_rx = ch.e_meas.cols;
  const int cells = ch.gs.cols;

  CMatrix adj(p_tx, cells);
  kernels::cmat_adjoint_rows(ch.gs.data.data(), ch.e_meas.data.data(),
                             adj.data.data(), p_tx, q_rx, cells);
  CMatrix fwd(p_tx, q_rx);
  kernels::cmat_apply_rows(ch.gs_t.data.data(), adj.data.data(),
                           fwd.data.data(), p_tx, cells, q_rx);

  for (int p = 0; p < p_tx; ++p) {
    cplx* row = adj.row(p);
    const cplx* frow = fwd.row(p);
    double num = 0.0;
    for (int n = 0; n < cells; ++n) num += std::norm(row[n]);
    // Exact line search on the active-entry misfit along the adjoint
    // direction, so masked receivers do not bias the scale.
    double den = 0.0;
    for (int q = 0; q < q_rx; ++q)
      if (ch.mask[static_cast<std::size_t>(p) * q_rx + q] != 0)
        den += std::norm(frow[q]);
    const double alpha = (num > 0.0 && den > 0.0) ? num / den : 0.0;
    for (int n = 0; n < cells; ++n) row[n] *= alpha;
  }
  return adj;
}

RunRecord run_inversion(const Grid& grid,
                        const std::vector<FrequencyChannel>& channels,
                        const std::vector<double>& truth_eps,
                        const std::vector<double>& truth_sig,
                        const TrainConfig& cfg) {
  validate_problem(grid, channels, truth_eps, truth_sig, cfg);
  const auto t0 = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.seed = cfg.seed;

  const int n_freq = static_cast<int>(channels.size());
  const int total = cfg.total_epochs;

  std::vector<int> ends;
  if (cfg.strategy == Strategy::hopping) {
    const std::vector<double> fractions = cfg.stage_fractions.empty()
                                              ? default_stage_fractions(n_freq)
                                              : cfg.stage_fractions;
    ends = stage_boundaries(fractions, total);
  } else {
    ends = {total};
  }
  const int n_stages = static_cast<int>(ends.size());

  FourierEmbedding embedding;
  NetworkParams params;
  const std::vector<int> dims = cfg.dims.empty() ? default_dims() : cfg.dims;
  init_network(cfg.seed, dims, cfg.feature_std, &embedding, &params);

  const int cells = grid.num_cells();
  const std::vector<double> coords =
      normalized_grid_coords(grid, grid.half_width);
  std::vector<double> features(static_cast<std::size_t>(cells) * 2 *
                               embedding.m);
  embed(embedding, coords.data(), features.data(), cells);

  std::vector<TensorView> views = parameter_views(params);
  std::vector<AdamState> theta_state(views.size());
  for (std::size_t i = 0; i < views.size(); ++i)
    adam_init(theta_state[i], views[i].size);

  std::vector<CMatrix> currents(channels.size());
  std::vector<AdamState> j_state(channels.size());
  std::vector<char> active(channels.size(), 0);

  const bool score_sigma =
      *std::max_element(truth_sig.begin(), truth_sig.end()) > 0.0;
  auto record_psnr = [&](int epoch, const NetworkOutput& maps) {
    rec.psnr_epochs.push_back(epoch);
    rec.psnr_eps.push_back(psnr(truth_eps, maps.eps_r));
    if (score_sigma) rec.psnr_sig.push_back(psnr(truth_sig, maps.sigma));
  };
  auto stage_of = [&](int e) {
    int s = 0;
    while (s + 1 < n_stages && e >= ends[s]) ++s;
    return s;
  };

  std::vector<const FrequencyChannel*> act_ch;
  std::vector<const CMatrix*> act_j;

  try {
    for (int e = 0; e < total; ++e) {
      const int s = stage_of(e);
      const int upto =
          cfg.strategy == Strategy::hopping ? s : n_freq - 1;
      for (int c = 0; c <= upto; ++c) {
        if (active[c]) continue;
        currents[c] = backprojection_init(channels[c]);
        adam_init(j_state[c], currents[c].data.size() * 2);
        active[c] = 1;
      }

      double beta = 0.0;
      if (cfg.beta_mode == BetaMode::cross_correlated) {
        if (cfg.strategy == Strategy::hopping) {
          const int start = s == 0 ? 0 : ends[s - 1];
          beta = beta_decay(e - start, ends[s] - start);
        } else {
          beta = beta_decay(e, total);
        }
      }

      act_ch.clear();
      act_j.clear();
      for (int c = 0; c <= upto; ++c) {
        act_ch.push_back(&channels[c]);
        act_j.push_back(&currents[c]);
      }

      TermWeights w;
      w.cross = beta;
      const Evaluation ev =
          loss_and_gradient(embedding, params, features, act_ch, act_j, w);

      LossRow row;
      row.epoch = e;
      row.stage = s;
      row.beta = beta;
      row.data.assign(channels.size(), 0.0);
      row.state.assign(channels.size(), 0.0);
      row.cross.assign(channels.size(), 0.0);
      for (int c = 0; c <= upto; ++c) {
        row.data[c] = ev.per_freq[c].data;
        row.state[c] = ev.per_freq[c].state;
        row.cross[c] = ev.per_freq[c].cross;
      }
      row.total = ev.loss;
      rec.loss_trace.push_back(std::move(row));

      if (e % cfg.psnr_every == 0) record_psnr(e, ev.maps);

      const double lr_t = cosine_lr(e, total, cfg.lr_theta, cfg.lr_floor);
      const double lr_j = cosine_lr(e, total, cfg.lr_j, cfg.lr_floor);
      const std::vector<ConstTensorView> gviews = gradient_views(ev.d_theta);
      for (std::size_t i = 0; i < views.size(); ++i)
        adam_step(theta_state[i], views[i].data, gviews[i].data,
                  views[i].size, lr_t);
      for (int c = 0; c <= upto; ++c)
        adam_step(j_state[c],
                  reinterpret_cast<double*>(currents[c].data.data()),
                  reinterpret_cast<const double*>(ev.d_j[c].data.data()),
                  currents[c].data.size() * 2, lr_j);
    }
  } catch (const std::runtime_error& err) {
    rec.failed = true;
    rec.failure_reason = err.what();
  }

  const NetworkOutput maps =
      forward_from_features(params, features.data(), cells);
  rec.final_eps = maps.eps_r;
  rec.final_sig = maps.sigma;
  if (!rec.failed && total % cfg.psnr_every == 0) record_psnr(total, maps);

  rec.checkpoint.schema_version = 1;
  rec.checkpoint.seed = cfg.seed;
  rec.checkpoint.half_width = grid.half_width;
  rec.checkpoint.embedding = std::move(embedding);
  rec.checkpoint.params = std::move(params);
  rec.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

NetworkOutput infer(const Checkpoint& ckpt, const Grid& grid) {
  if (!(ckpt.half_width > 0.0))
    throw std::invalid_argument("checkpoint carries no training half-width");
  const std::vector<double> coords =
      normalized_grid_coords(grid, ckpt.half_width);
  return forward(ckpt.embedding, ckpt.params, coords.data(), grid.num_cells());
}

EnsembleResult multi_run(const Grid& grid,
                         const std::vector<FrequencyChannel>& channels,
                         const std::vector<double>& truth_eps,
                         const std::vector<double>& truth_sig,
                         const TrainConfig& cfg, int n_runs) {
  if (n_runs < 2)
    throw std::invalid_argument("an ensemble needs at least two runs");
  validate_problem(grid, channels, truth_eps, truth_sig, cfg);
  {
    // Config errors must surface here, not inside the parallel loop.
    FourierEmbedding e;
    NetworkParams p;
    const std::vector<int> dims = cfg.dims.empty() ? default_dims() : cfg.dims;
    init_network(cfg.seed, dims, cfg.feature_std, &e, &p);
  }

  EnsembleResult res;
  res.records.resize(static_cast<std::size_t>(n_runs));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (parallel::enabled())
#endif
  for (int r = 0; r < n_runs; ++r) {
    TrainConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    try {
      res.records[r] =
          run_inversion(grid, channels, truth_eps, truth_sig, run_cfg);
    } catch (const std::exception& ex) {
      res.records[r].seed = run_cfg.seed;
      res.records[r].failed = true;
      res.records[r].failure_reason = ex.what();
    }
  }

  std::vector<int> done;
  for (int r = 0; r < n_runs; ++r)
    if (!res.records[r].failed) done.push_back(r);
  if (done.empty())
    throw std::runtime_error("every run in the ensemble failed: " +
                             res.records[0].failure_reason);

  EnsembleStats st;
  const RunRecord& ref = res.records[static_cast<std::size_t>(done[0])];
  st.epochs = ref.psnr_epochs;
  const std::size_t n_t = st.epochs.size();
  const bool have_sigma = !ref.psnr_sig.empty();
  st.mean_eps.assign(n_t, 0.0);
  st.std_eps.assign(n_t, 0.0);
  if (have_sigma) {
    st.mean_sig.assign(n_t, 0.0);
    st.std_sig.assign(n_t, 0.0);
  }
  const double n_done = static_cast<double>(done.size());
  auto curve_stats = [&](auto getter, std::vector<double>& mean,
                         std::vector<double>& sd) {
    for (std::size_t t = 0; t < n_t; ++t) {
      double mu = 0.0;
      for (int r : done) mu += getter(res.records[r])[t];
      mu /= n_done;
      double var = 0.0;
      for (int r : done) {
        const double d = getter(res.records[r])[t] - mu;
        var += d * d;
      }
      mean[t] = mu;
      sd[t] = done.size() > 1 ? std::sqrt(var / (n_done - 1.0)) : 0.0;
    }
  };
  curve_stats([](const RunRecord& r) -> const std::vector<double>& {
    return r.psnr_eps;
  }, st.mean_eps, st.std_eps);
  if (have_sigma)
    curve_stats([](const RunRecord& r) -> const std::vector<double>& {
      return r.psnr_sig;
    }, st.mean_sig, st.std_sig);

  std::vector<double> finals;
  finals.reserve(done.size());
  for (int r : done)
    finals.push_back(psnr(truth_eps, res.records[r].final_eps));
  st.final_eps = five_number_summary(finals);

  st.median_run = done[0];
  double best = std::abs(finals[0] - st.final_eps.median);
  for (std::size_t i = 1; i < done.size(); ++i) {
    const double d = std::abs(finals[i] - st.final_eps.median);
    if (d < best) {
      best = d;
      st.median_run = done[i];
    }
  }
  res.stats = st;
  return res;
}

}  // namespace ccpinn
