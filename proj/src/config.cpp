#include "ccpinn/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ccpinn {

using json = nlohmann::ordered_json;

ExperimentConfig::ExperimentConfig()
    : snr_db(std::numeric_limits<double>::infinity()) {}

const char* strategy_name(Strategy s) {
  return s == Strategy::hopping ? "hopping" : "simultaneous";
}

const char* beta_mode_name(BetaMode m) {
  return m == BetaMode::cross_correlated ? "cross_correlated" : "classical";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "hopping") return Strategy::hopping;
  if (name == "simultaneous") return Strategy::simultaneous;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (hopping | simultaneous)");
}

BetaMode beta_mode_from_name(const std::string& name) {
  if (name == "cross_correlated") return BetaMode::cross_correlated;
  if (name == "classical") return BetaMode::classical;
  throw std::invalid_argument("unknown beta mode '" + name +
                              "' (cross_correlated | classical)");
}

namespace {

[[noreturn]] void bad_key(const std::string& path, const char* what) {
  throw std::invalid_argument("config key " + path + " " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("unknown config key " + path + it.key());
  }
}

void get_double(const json& obj, const std::string& path, const char* key,
                double* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) bad_key(path + key, "must be a number");
  *out = v.get<double>();
}

void get_int(const json& obj, const std::string& path, const char* key,
             int* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_key(path + key, "must be an integer");
  *out = v.get<int>();
}

void get_u64(const json& obj, const std::string& path, const char* key,
             std::uint64_t* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const bool ok = v.is_number_unsigned() ||
                  (v.is_number_integer() && v.get<long long>() >= 0);
  if (!ok) bad_key(path + key, "must be a non-negative integer");
  *out = v.get<std::uint64_t>();
}

void get_string(const json& obj, const std::string& path, const char* key,
                std::string* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_string()) bad_key(path + key, "must be a string");
  *out = v.get<std::string>();
}

void get_double_array(const json& obj, const std::string& path,
                      const char* key, std::vector<double>* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_array()) bad_key(path + key, "must be an array of numbers");
  std::vector<double> parsed;
  for (const json& e : v) {
    if (!e.is_number()) bad_key(path + key, "must be an array of numbers");
    parsed.push_back(e.get<double>());
  }
  *out = std::move(parsed);
}

void get_int_array(const json& obj, const std::string& path, const char* key,
                   std::vector<int>* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_array()) bad_key(path + key, "must be an array of integers");
  std::vector<int> parsed;
  for (const json& e : v) {
    if (!e.is_number_integer()) bad_key(path + key, "must be an array of integers");
    parsed.push_back(e.get<int>());
  }
  *out = std::move(parsed);
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!root.is_object())
    throw std::invalid_argument("config root must be a JSON object");
  expect_keys(root, "",
              {"scene", "dataset", "roi_half_width", "grid_n", "fine_factor",
               "frequencies_hz", "snr_db", "noise_seed", "array", "train",
               "pad_factor", "n_runs", "output_dir", "render"});

  ExperimentConfig cfg;
  get_string(root, "", "scene", &cfg.scene);
  get_string(root, "", "dataset", &cfg.dataset);
  get_double(root, "", "roi_half_width", &cfg.roi_half_width);
  get_int(root, "", "grid_n", &cfg.grid_n);
  get_int(root, "", "fine_factor", &cfg.fine_factor);
  get_double_array(root, "", "frequencies_hz", &cfg.frequencies_hz);
  if (root.contains("snr_db")) {
    const json& v = root.at("snr_db");
    if (v.is_null())
      cfg.snr_db = std::numeric_limits<double>::infinity();
    else if (v.is_number())
      cfg.snr_db = v.get<double>();
    else
      bad_key("snr_db", "must be a number or null (noiseless)");
  }
  get_u64(root, "", "noise_seed", &cfg.noise_seed);

  if (root.contains("array")) {
    const json& arr = root.at("array");
    if (!arr.is_object()) bad_key("array", "must be an object");
    expect_keys(arr, "array.",
                {"radius", "n_tx", "n_rx", "exclusion_halfangle_deg"});
    get_double(arr, "array.", "radius", &cfg.array_radius);
    get_int(arr, "array.", "n_tx", &cfg.n_tx);
    get_int(arr, "array.", "n_rx", &cfg.n_rx);
    get_double(arr, "array.", "exclusion_halfangle_deg",
               &cfg.exclusion_halfangle_deg);
  }

  if (root.contains("train")) {
    const json& tr = root.at("train");
    if (!tr.is_object()) bad_key("train", "must be an object");
    expect_keys(tr, "train.",
                {"epochs", "strategy", "beta_mode", "stage_fractions",
                 "lr_theta", "lr_j", "lr_floor", "seed", "psnr_every",
                 "network_dims", "feature_std"});
    get_int(tr, "train.", "epochs", &cfg.train.total_epochs);
    std::string name;
    get_string(tr, "train.", "strategy", &name);
    if (!name.empty()) cfg.train.strategy = strategy_from_name(name);
    name.clear();
    get_string(tr, "train.", "beta_mode", &name);
    if (!name.empty()) cfg.train.beta_mode = beta_mode_from_name(name);
    get_double_array(tr, "train.", "stage_fractions",
                     &cfg.train.stage_fractions);
    get_double(tr, "train.", "lr_theta", &cfg.train.lr_theta);
    get_double(tr, "train.", "lr_j", &cfg.train.lr_j);
    get_double(tr, "train.", "lr_floor", &cfg.train.lr_floor);
    get_u64(tr, "train.", "seed", &cfg.train.seed);
    get_int(tr, "train.", "psnr_every", &cfg.train.psnr_every);
    get_int_array(tr, "train.", "network_dims", &cfg.train.dims);
    get_double(tr, "train.", "feature_std", &cfg.train.feature_std);
  }

  get_int(root, "", "pad_factor", &cfg.pad_factor);
  get_int(root, "", "n_runs", &cfg.n_runs);
  get_string(root, "", "output_dir", &cfg.output_dir);

  if (root.contains("render")) {
    const json& rd = root.at("render");
    if (!rd.is_object()) bad_key("render", "must be an object");
    expect_keys(rd, "render.",
                {"eps_vmin", "eps_vmax", "sig_vmin", "sig_vmax", "upscale"});
    get_double(rd, "render.", "eps_vmin", &cfg.eps_vmin);
    get_double(rd, "render.", "eps_vmax", &cfg.eps_vmax);
    get_double(rd, "render.", "sig_vmin", &cfg.sig_vmin);
    get_double(rd, "render.", "sig_vmax", &cfg.sig_vmax);
    get_int(rd, "render.", "upscale", &cfg.render_upscale);
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json root;
  root["scene"] = cfg.scene;
  root["dataset"] = cfg.dataset;
  root["roi_half_width"] = cfg.roi_half_width;
  root["grid_n"] = cfg.grid_n;
  root["fine_factor"] = cfg.fine_factor;
  root["frequencies_hz"] = cfg.frequencies_hz;
  if (std::isinf(cfg.snr_db))
    root["snr_db"] = nullptr;  // noiseless
  else
    root["snr_db"] = cfg.snr_db;
  root["noise_seed"] = cfg.noise_seed;
  root["array"] = {{"radius", cfg.array_radius},
                   {"n_tx", cfg.n_tx},
                   {"n_rx", cfg.n_rx},
                   {"exclusion_halfangle_deg", cfg.exclusion_halfangle_deg}};
  root["train"] = {{"epochs", cfg.train.total_epochs},
                   {"strategy", strategy_name(cfg.train.strategy)},
                   {"beta_mode", beta_mode_name(cfg.train.beta_mode)},
                   {"stage_fractions", cfg.train.stage_fractions},
                   {"lr_theta", cfg.train.lr_theta},
                   {"lr_j", cfg.train.lr_j},
                   {"lr_floor", cfg.train.lr_floor},
                   {"seed", cfg.train.seed},
                   {"psnr_every", cfg.train.psnr_every},
                   {"network_dims", cfg.train.dims},
                   {"feature_std", cfg.train.feature_std}};
  root["pad_factor"] = cfg.pad_factor;
  root["n_runs"] = cfg.n_runs;
  root["output_dir"] = cfg.output_dir;
  root["render"] = {{"eps_vmin", cfg.eps_vmin},
                    {"eps_vmax", cfg.eps_vmax},
                    {"sig_vmin", cfg.sig_vmin},
                    {"sig_vmax", cfg.sig_vmax},
                    {"upscale", cfg.render_upscale}};
  return root.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << config_to_json(cfg);
  if (!os) throw std::runtime_error("write failed for " + path);
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("config: ") + what);
  };
  if (!(cfg.roi_half_width > 0.0)) fail("roi_half_width must be positive");
  if (cfg.grid_n < 2) fail("grid_n must be at least 2");
  if (cfg.fine_factor < 2) fail("fine_factor must be at least 2");
  if (cfg.frequencies_hz.empty()) fail("frequencies_hz must be non-empty");
  for (std::size_t i = 0; i < cfg.frequencies_hz.size(); ++i) {
    if (!(cfg.frequencies_hz[i] > 0.0)) fail("frequencies_hz must be positive");
    if (i > 0 && !(cfg.frequencies_hz[i] > cfg.frequencies_hz[i - 1]))
      fail("frequencies_hz must be strictly ascending");
  }
  if (std::isnan(cfg.snr_db)) fail("snr_db must not be NaN");
  if (!(cfg.array_radius > 0.0)) fail("array.radius must be positive");
  if (cfg.n_tx < 1) fail("array.n_tx must be positive");
  if (cfg.n_rx < 1) fail("array.n_rx must be positive");
  if (cfg.exclusion_halfangle_deg < 0.0 || cfg.exclusion_halfangle_deg >= 180.0)
    fail("array.exclusion_halfangle_deg must lie in [0, 180)");

  if (cfg.train.total_epochs < 0) fail("train.epochs must be non-negative");
  if (cfg.train.psnr_every < 1) fail("train.psnr_every must be positive");
  if (!(cfg.train.lr_theta > 0.0) || !std::isfinite(cfg.train.lr_theta))
    fail("train.lr_theta must be positive and finite");
  if (!(cfg.train.lr_j > 0.0) || !std::isfinite(cfg.train.lr_j))
    fail("train.lr_j must be positive and finite");
  if (cfg.train.lr_floor < 0.0 ||
      cfg.train.lr_floor > std::min(cfg.train.lr_theta, cfg.train.lr_j))
    fail("train.lr_floor must lie in [0, min(lr_theta, lr_j)]");
  if (!(cfg.train.feature_std > 0.0)) fail("train.feature_std must be positive");
  for (double f : cfg.train.stage_fractions)
    if (!(f > 0.0) || !(f <= 1.0))
      fail("train.stage_fractions entries must lie in (0, 1]");
  if (!cfg.train.dims.empty()) {
    if (cfg.train.dims.size() < 2) fail("train.network_dims needs >= 2 layers");
    for (int d : cfg.train.dims)
      if (d < 1) fail("train.network_dims entries must be positive");
    if (cfg.train.dims.back() != 2)
      fail("train.network_dims must end with the two medium heads");
  }

  if (cfg.pad_factor < 2) fail("pad_factor must be at least 2");
  if (cfg.n_runs < 1) fail("n_runs must be positive");
  if (!(cfg.eps_vmax > cfg.eps_vmin)) fail("render eps range is empty");
  if (!(cfg.sig_vmax > cfg.sig_vmin)) fail("render sig range is empty");
  if (cfg.render_upscale < 1) fail("render.upscale must be positive");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.scene == b.scene && a.dataset == b.dataset &&
         a.roi_half_width == b.roi_half_width && a.grid_n == b.grid_n &&
         a.fine_factor == b.fine_factor &&
         a.frequencies_hz == b.frequencies_hz && a.snr_db == b.snr_db &&
         a.noise_seed == b.noise_seed && a.array_radius == b.array_radius &&
         a.n_tx == b.n_tx && a.n_rx == b.n_rx &&
         a.exclusion_halfangle_deg == b.exclusion_halfangle_deg &&
         a.train.total_epochs == b.train.total_epochs &&
         a.train.strategy == b.train.strategy &&
         a.train.beta_mode == b.train.beta_mode &&
         a.train.stage_fractions == b.train.stage_fractions &&
         a.train.lr_theta == b.train.lr_theta &&
         a.train.lr_j == b.train.lr_j &&
         a.train.lr_floor == b.train.lr_floor &&
         a.train.seed == b.train.seed &&
         a.train.psnr_every == b.train.psnr_every &&
         a.train.dims == b.train.dims &&
         a.train.feature_std == b.train.feature_std &&
         a.pad_factor == b.pad_factor && a.n_runs == b.n_runs &&
         a.output_dir == b.output_dir && a.eps_vmin == b.eps_vmin &&
         a.eps_vmax == b.eps_vmax && a.sig_vmin == b.sig_vmin &&
         a.sig_vmax == b.sig_vmax && a.render_upscale == b.render_upscale;
}

}  // namespace ccpinn
