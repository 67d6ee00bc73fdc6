// Command-line shell around the library: dataset synthesis and ingestion,
// single inversions, seeded ensembles, and report regeneration. All numerics
// live in the core modules; this file only wires configuration to calls.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccpinn/config.hpp"
#include "ccpinn/dataset.hpp"
#include "ccpinn/export.hpp"
#include "ccpinn/fresnel.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/phantom.hpp"
#include "ccpinn/trainer.hpp"

namespace fs = std::filesystem;
using namespace ccpinn;

namespace {

std::string output_root() {
  const char* env = std::getenv("CCPINN_OUT");
  return env && *env ? env : "out";
}

std::vector<double> parse_double_list(const std::string& text,
                                      const char* flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
      throw std::invalid_argument(std::string(flag) + ": bad number '" +
                                  field + "'");
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

/// Refuses to reuse an existing output path unless --force, which wipes it.
void claim_path(const std::string& path, bool force) {
  if (!fs::exists(path)) return;
  if (!force)
    throw std::runtime_error(path +
                             " already exists; pass --force to replace it");
  fs::remove_all(path);
}

/// Config flag overrides shared by the compute subcommands. Each flag only
/// overrides its field when actually passed on the command line.
struct CommonFlags {
  std::string config_path, scene, dataset, out;
  double snr = 0.0, roi = 0.0;
  std::string freqs, stages, strategy, beta_mode;
  int epochs = 0, grid_n = 0, runs = 0, psnr_every = 0, pad = 0;
  std::uint64_t seed = 0, noise_seed = 0;
  bool force = false;

  CLI::Option *snr_opt = nullptr, *roi_opt = nullptr, *freqs_opt = nullptr,
              *stages_opt = nullptr, *strategy_opt = nullptr,
              *beta_opt = nullptr, *epochs_opt = nullptr,
              *grid_opt = nullptr, *runs_opt = nullptr,
              *psnr_opt = nullptr, *pad_opt = nullptr, *seed_opt = nullptr,
              *noise_opt = nullptr, *scene_opt = nullptr,
              *dataset_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config JSON");
    scene_opt = cmd->add_option("--scene", scene, "Phantom JSON path");
    dataset_opt =
        cmd->add_option("--dataset", dataset, "Dataset container path");
    cmd->add_option("--out", out, "Output path (default under $CCPINN_OUT)");
    snr_opt = cmd->add_option("--snr", snr, "SNR in dB (omit for noiseless)");
    roi_opt = cmd->add_option("--roi", roi, "ROI half-width in meters");
    freqs_opt = cmd->add_option("--freqs", freqs,
                                "Comma-separated frequencies in Hz");
    stages_opt = cmd->add_option("--stages", stages,
                                 "Comma-separated stage fractions");
    strategy_opt = cmd->add_option("--strategy", strategy,
                                   "hopping | simultaneous");
    beta_opt = cmd->add_option("--beta-mode", beta_mode,
                               "cross_correlated | classical");
    epochs_opt = cmd->add_option("--epochs", epochs, "Training epochs");
    grid_opt = cmd->add_option("--grid-n", grid_n, "Inversion grid side");
    runs_opt = cmd->add_option("--runs", runs, "Ensemble size");
    psnr_opt = cmd->add_option("--psnr-every", psnr_every,
                               "PSNR sampling stride in epochs");
    pad_opt = cmd->add_option("--pad", pad, "FFT padding factor");
    seed_opt = cmd->add_option("--seed", seed, "Base RNG seed");
    noise_opt = cmd->add_option("--noise-seed", noise_seed,
                                "Measurement noise seed");
    cmd->add_flag("--force", force, "Replace an existing output path");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (scene_opt->count()) cfg.scene = scene;
    if (dataset_opt->count()) cfg.dataset = dataset;
    if (snr_opt->count()) cfg.snr_db = snr;
    if (roi_opt->count()) cfg.roi_half_width = roi;
    if (freqs_opt->count())
      cfg.frequencies_hz = parse_double_list(freqs, "--freqs");
    if (stages_opt->count())
      cfg.train.stage_fractions = parse_double_list(stages, "--stages");
    if (strategy_opt->count())
      cfg.train.strategy = strategy_from_name(strategy);
    if (beta_opt->count()) cfg.train.beta_mode = beta_mode_from_name(beta_mode);
    if (epochs_opt->count()) cfg.train.total_epochs = epochs;
    if (grid_opt->count()) cfg.grid_n = grid_n;
    if (runs_opt->count()) cfg.n_runs = runs;
    if (psnr_opt->count()) cfg.train.psnr_every = psnr_every;
    if (pad_opt->count()) cfg.pad_factor = pad;
    if (seed_opt->count()) cfg.train.seed = seed;
    if (noise_opt->count()) cfg.noise_seed = noise_seed;
    if (!out.empty()) cfg.output_dir = out;
    validate(cfg);
    return cfg;
  }
};

ExportOptions export_options(const ExperimentConfig& cfg) {
  ExportOptions opt;
  opt.eps_vmin = cfg.eps_vmin;
  opt.eps_vmax = cfg.eps_vmax;
  opt.sig_vmin = cfg.sig_vmin;
  opt.sig_vmax = cfg.sig_vmax;
  opt.upscale = cfg.render_upscale;
  opt.half_width = cfg.roi_half_width;
  if (!cfg.scene.empty()) {
    try {
      opt.truth = load_phantom(cfg.scene);
    } catch (const std::exception&) {
      // Contour overlay is decoration; a missing scene file only drops it.
    }
  }
  return opt;
}

std::string resolved_out(const ExperimentConfig& cfg, const char* fallback) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return output_root() + "/" + fallback;
}

int cmd_generate(const CommonFlags& flags, const std::string& fresnel_path,
                 const std::string& band_text) {
  ExperimentConfig cfg = flags.resolve();
  const std::string out =
      !cfg.dataset.empty() ? cfg.dataset : output_root() + "/dataset.bin";
  claim_path(out, flags.force);
  if (const fs::path parent = fs::path(out).parent_path(); !parent.empty())
    fs::create_directories(parent);

  SyntheticDataset ds;
  if (!fresnel_path.empty()) {
    if (band_text.empty())
      throw std::runtime_error("--fresnel needs --band (e.g. --band 3,4,5)");
    const std::vector<RawFresnelRecord> records = parse_fresnel(fresnel_path);
    const FresnelBandRaw band =
        subsample_and_split(records, parse_double_list(band_text, "--band"));
    for (const FresnelChannelRaw& ch : band.channels)
      std::printf("calibration spread at %.3g GHz: %.3g\n", ch.freq / 1e9,
                  calibration_spread(ch, band.layout));
    ds = fresnel_to_dataset(band, cfg.grid_n, cfg.roi_half_width);
  } else {
    if (cfg.scene.empty())
      throw std::runtime_error("generate needs --scene or --fresnel");
    SyntheticSpec spec;
    spec.phantom = load_phantom(cfg.scene);
    spec.roi_half_width = cfg.roi_half_width;
    spec.inversion_n = cfg.grid_n;
    spec.fine_factor = cfg.fine_factor;
    spec.freqs = cfg.frequencies_hz;
    spec.snr_db = cfg.snr_db;
    spec.noise_seed = cfg.noise_seed;
    spec.array_radius = cfg.array_radius;
    spec.n_tx = cfg.n_tx;
    spec.n_rx = cfg.n_rx;
    spec.exclusion_halfangle_deg = cfg.exclusion_halfangle_deg;
    ds = generate_synthetic(spec);
  }

  save_dataset(out, ds);
  cfg.dataset = out;
  save_config(cfg, out + ".config.json");
  std::printf("wrote %s: %zu channels of %d x %d measurements, grid %d\n",
              out.c_str(), ds.freqs.size(), ds.layout.ntx(), ds.layout.nrx(),
              ds.n);
  return 0;
}

struct LoadedProblem {
  SyntheticDataset ds;
  std::vector<FrequencyChannel> channels;
  Grid grid;
};

LoadedProblem load_problem(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty())
    throw std::runtime_error("inversion needs --dataset (see generate)");
  LoadedProblem p;
  p.ds = load_dataset(cfg.dataset);
  p.channels = build_channels(p.ds, cfg.pad_factor);
  p.grid = build_grid(p.ds.roi_half_width, p.ds.n);
  return p;
}

void print_final_psnr(const RunRecord& rec) {
  if (rec.failed)
    std::printf("run FAILED: %s\n", rec.failure_reason.c_str());
  if (!rec.psnr_eps.empty())
    std::printf("final eps_r PSNR: %.3f dB\n", rec.psnr_eps.back());
  if (!rec.psnr_sig.empty())
    std::printf("final sigma PSNR: %.3f dB\n", rec.psnr_sig.back());
}

int cmd_invert(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.resolve();
  const std::string dir = resolved_out(cfg, "invert");
  claim_path(dir, flags.force);
  const LoadedProblem p = load_problem(cfg);

  const RunRecord rec = run_inversion(p.grid, p.channels, p.ds.truth_eps,
                                      p.ds.truth_sig, cfg.train);
  cfg.output_dir = dir;
  export_run(dir, rec, p.ds.n, export_options(cfg));
  save_config(cfg, dir + "/config.json");
  print_final_psnr(rec);
  std::printf("run directory: %s\n", dir.c_str());
  return rec.failed ? 1 : 0;
}

int cmd_ensemble(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.resolve();
  const std::string dir = resolved_out(cfg, "ensemble");
  claim_path(dir, flags.force);
  const LoadedProblem p = load_problem(cfg);

  const EnsembleResult ens = multi_run(p.grid, p.channels, p.ds.truth_eps,
                                       p.ds.truth_sig, cfg.train, cfg.n_runs);
  cfg.output_dir = dir;
  export_ensemble(dir, ens, p.ds.n, export_options(cfg));
  save_config(cfg, dir + "/config.json");

  int completed = 0;
  for (const RunRecord& rec : ens.records)
    if (!rec.failed) ++completed;
  const FiveNumber& fn = ens.stats.final_eps;
  std::printf("completed %d/%d runs\n", completed, cfg.n_runs);
  std::printf("final eps_r PSNR: min %.3f  q1 %.3f  median %.3f  q3 %.3f  "
              "max %.3f dB\n",
              fn.min, fn.q1, fn.median, fn.q3, fn.max);
  std::printf("median run: seed %llu\n",
              static_cast<unsigned long long>(
                  ens.records[ens.stats.median_run].seed));
  std::printf("ensemble directory: %s\n", dir.c_str());
  return 0;
}

/// One input directory of a report: its config snapshot plus the PSNR curves
/// of the runs it holds (itself, or its run_* children for ensembles).
struct ReportSource {
  ExperimentConfig cfg;
  std::vector<std::vector<std::vector<double>>> runs;  // per run: psnr rows
  std::vector<std::string> run_dirs;
};

ReportSource read_source(const std::string& dir) {
  ReportSource src;
  src.cfg = load_config(dir + "/config.json");
  if (fs::exists(dir + "/psnr.csv")) {
    src.runs.push_back(read_csv(dir + "/psnr.csv"));
    src.run_dirs.push_back(dir);
    return src;
  }
  std::vector<std::pair<std::uint64_t, std::string>> children;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) != 0) continue;
    children.emplace_back(std::strtoull(name.c_str() + 4, nullptr, 10),
                          entry.path().string());
  }
  std::sort(children.begin(), children.end());
  for (const auto& [seed, run_dir] : children) {
    src.runs.push_back(read_csv(run_dir + "/psnr.csv"));
    src.run_dirs.push_back(run_dir);
  }
  if (src.runs.empty())
    throw std::runtime_error(dir + " holds no psnr.csv and no run_* children");
  return src;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out,
               bool force) {
  const std::string report_dir =
      out.empty() ? output_root() + "/report" : out;
  claim_path(report_dir, force);
  fs::create_directories(report_dir);

  std::vector<ReportSource> sources;
  for (const std::string& dir : dirs) sources.push_back(read_source(dir));

  // Directories must describe the same experiment; only the seed and the
  // beta mode (for cc vs classical pairings) may differ.
  ExperimentConfig canon = sources.front().cfg;
  for (const ReportSource& src : sources) {
    ExperimentConfig neutral = src.cfg;
    neutral.train.seed = canon.train.seed;
    neutral.train.beta_mode = canon.train.beta_mode;
    neutral.output_dir = canon.output_dir;
    neutral.n_runs = canon.n_runs;
    if (!(neutral == canon))
      throw std::runtime_error(
          "mixed-config directories: report inputs must differ only in seed "
          "and beta mode");
  }

  for (const BetaMode mode :
       {BetaMode::cross_correlated, BetaMode::classical}) {
    std::vector<const ReportSource*> group;
    for (const ReportSource& src : sources)
      if (src.cfg.train.beta_mode == mode) group.push_back(&src);
    if (group.empty()) continue;
    const std::string tag = beta_mode_name(mode);

    std::vector<std::vector<double>> curves;
    std::vector<double> finals;
    std::vector<std::string> run_dirs;
    const std::vector<std::vector<double>>& ref = group.front()->runs.front();
    std::vector<int> epochs;
    for (const auto& row : ref) epochs.push_back(static_cast<int>(row[0]));
    for (const ReportSource* src : group)
      for (std::size_t r = 0; r < src->runs.size(); ++r) {
        const auto& rows = src->runs[r];
        if (rows.size() != ref.size())
          throw std::runtime_error(
              "PSNR curves disagree in length; cannot average");
        std::vector<double> curve;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (static_cast<int>(rows[i][0]) != epochs[i])
            throw std::runtime_error("PSNR epoch grids disagree");
          curve.push_back(rows[i][1]);
        }
        curves.push_back(std::move(curve));
        finals.push_back(rows.back()[1]);
        run_dirs.push_back(src->run_dirs[r]);
      }

    std::vector<double> mean(epochs.size(), 0.0), sd(epochs.size(), 0.0);
    for (std::size_t i = 0; i < epochs.size(); ++i) {
      double s = 0.0;
      for (const auto& c : curves) s += c[i];
      mean[i] = s / static_cast<double>(curves.size());
      if (curves.size() > 1) {
        double varsum = 0.0;
        for (const auto& c : curves)
          varsum += (c[i] - mean[i]) * (c[i] - mean[i]);
        sd[i] = std::sqrt(varsum / static_cast<double>(curves.size() - 1));
      }
    }
    write_mean_curve_csv(report_dir + "/psnr_eps_mean_" + tag + ".csv",
                         epochs, mean, sd);
    const FiveNumber fn = five_number_summary(finals);
    write_boxplot_csv(report_dir + "/boxplot_psnr_eps_" + tag + ".csv", fn);

    // Median-run map, re-rendered from its stored CSV (no recompute).
    std::size_t med = 0;
    for (std::size_t i = 1; i < finals.size(); ++i)
      if (std::abs(finals[i] - fn.median) < std::abs(finals[med] - fn.median))
        med = i;
    const auto map_rows = read_csv(run_dirs[med] + "/final_eps.csv");
    const int n = canon.grid_n;
    if (map_rows.size() == static_cast<std::size_t>(n)) {
      std::vector<double> values;
      values.reserve(static_cast<std::size_t>(n) * n);
      for (const auto& row : map_rows) {
        if (row.size() != static_cast<std::size_t>(n))
          throw std::runtime_error("stored map width disagrees with config");
        values.insert(values.end(), row.begin(), row.end());
      }
      const ExportOptions opt = export_options(canon);
      RenderOptions ro;
      ro.vmin = opt.eps_vmin;
      ro.vmax = opt.eps_vmax;
      ro.upscale = opt.upscale;
      if (!opt.truth.shapes.empty()) {
        ro.contour = &opt.truth;
        ro.half_width = opt.half_width;
      }
      write_map_png(report_dir + "/median_eps_" + tag + ".png", values, n, ro);
    }
    std::printf("%s: %zu runs, median final eps_r PSNR %.3f dB\n", tag.c_str(),
                curves.size(), fn.median);
  }
  std::printf("report directory: %s\n", report_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-correlated contrast-source inversion toolkit"};
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand(
      "generate", "Synthesize a dataset or ingest measured records");
  CommonFlags gen_flags;
  gen_flags.attach(gen);
  std::string fresnel_path, band_text;
  gen->add_option("--fresnel", fresnel_path,
                  "Measured record file to ingest instead of synthesizing");
  gen->add_option("--band", band_text,
                  "Comma-separated GHz band to keep from --fresnel");

  CLI::App* inv =
      app.add_subcommand("invert", "Run a single inversion on a dataset");
  CommonFlags inv_flags;
  inv_flags.attach(inv);

  CLI::App* ens =
      app.add_subcommand("ensemble", "Run seeded inversions and aggregate");
  CommonFlags ens_flags;
  ens_flags.attach(ens);

  CLI::App* rep = app.add_subcommand(
      "report", "Regenerate statistics and figures from stored run outputs");
  std::vector<std::string> report_dirs;
  std::string report_out;
  bool report_force = false;
  rep->add_option("dirs", report_dirs, "Run or ensemble directories")
      ->required();
  rep->add_option("--out", report_out, "Report output directory");
  rep->add_flag("--force", report_force, "Replace an existing report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_flags, fresnel_path, band_text);
    if (inv->parsed()) return cmd_invert(inv_flags);
    if (ens->parsed()) return cmd_ensemble(ens_flags);
    if (rep->parsed()) return cmd_report(report_dirs, report_out, report_force);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
