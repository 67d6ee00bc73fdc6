#include "ccpinn/export.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ccpinn/network.hpp"

namespace ccpinn {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto crc = crc32(0L, out.data() + crc_start,
                         static_cast<uInt>(out.size() - crc_start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<std::size_t>(width) * height * 3)
    throw std::invalid_argument("write_png_rgb: pixel buffer shape mismatch");

  // Filter byte 0 in front of every scanline, then one zlib stream.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
  for (int r = 0; r < height; ++r) {
    raw.push_back(0);
    const std::uint8_t* row = rgb.data() + static_cast<std::size_t>(r) * width * 3;
    raw.insert(raw.end(), row, row + 3 * width);
  }
  uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_size);
  if (compress2(comp.data(), &comp_size, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("write_png_rgb: deflate failed");
  comp.resize(comp_size);

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", comp);
  put_chunk(png, "IEND", {});

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(png.data()),
           static_cast<std::streamsize>(png.size()));
  if (!os) throw std::runtime_error("write failed for " + path);
}

std::array<std::uint8_t, 3> viridis(double t) {
  // 17 anchors of the matplotlib viridis table, linearly interpolated.
  static constexpr std::uint8_t anchors[17][3] = {
      {68, 1, 84},    {72, 26, 108},  {71, 47, 125},  {65, 68, 135},
      {59, 82, 139},  {52, 96, 141},  {47, 108, 142}, {42, 120, 142},
      {38, 130, 142}, {33, 145, 140}, {31, 158, 137}, {39, 173, 129},
      {53, 183, 121}, {92, 200, 99},  {144, 215, 67}, {216, 226, 25},
      {253, 231, 37}};
  if (!(t > 0.0)) t = 0.0;  // also catches NaN
  if (t > 1.0) t = 1.0;
  const double pos = t * 16.0;
  const int lo = std::min(15, static_cast<int>(pos));
  const double w = pos - lo;
  std::array<std::uint8_t, 3> rgb;
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<std::uint8_t>(std::lround(
        (1.0 - w) * anchors[lo][c] + w * anchors[lo + 1][c]));
  return rgb;
}

std::vector<std::uint8_t> contour_mask(const Phantom& phantom,
                                       double half_width, int n, int upscale) {
  if (!(half_width > 0.0) || n < 1 || upscale < 1)
    throw std::invalid_argument("contour_mask: bad raster parameters");
  const int N = n * upscale;
  const double px = 2.0 * half_width / N;

  // Membership id of the last (topmost) shape containing each pixel center.
  std::vector<int> member(static_cast<std::size_t>(N) * N, -1);
  for (int r = 0; r < N; ++r) {
    const double y = half_width - (r + 0.5) * px;  // image row 0 on top
    for (int c = 0; c < N; ++c) {
      const double x = -half_width + (c + 0.5) * px;
      for (int s = static_cast<int>(phantom.shapes.size()) - 1; s >= 0; --s)
        if (phantom.shapes[s].contains(x, y)) {
          member[static_cast<std::size_t>(r) * N + c] = s;
          break;
        }
    }
  }

  std::vector<std::uint8_t> mask(member.size(), 0);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * N + c;
      if (c + 1 < N && member[i] != member[i + 1]) mask[i] = mask[i + 1] = 1;
      if (r + 1 < N && member[i] != member[i + N]) mask[i] = mask[i + N] = 1;
    }
  return mask;
}

void write_map_png(const std::string& path, const std::vector<double>& values,
                   int n, const RenderOptions& opt) {
  if (n < 1 || values.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("write_map_png: value buffer shape mismatch");
  if (!(opt.vmax > opt.vmin))
    throw std::invalid_argument("write_map_png: empty color range");
  if (opt.upscale < 1)
    throw std::invalid_argument("write_map_png: upscale must be positive");

  const int N = n * opt.upscale;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(N) * N * 3);
  for (int r = 0; r < N; ++r) {
    const int iy = n - 1 - r / opt.upscale;  // grid row 0 is the bottom row
    for (int c = 0; c < N; ++c) {
      const int ix = c / opt.upscale;
      const double v = values[static_cast<std::size_t>(iy) * n + ix];
      const auto col = viridis((v - opt.vmin) / (opt.vmax - opt.vmin));
      std::uint8_t* px = &rgb[(static_cast<std::size_t>(r) * N + c) * 3];
      px[0] = col[0];
      px[1] = col[1];
      px[2] = col[2];
    }
  }

  if (opt.contour != nullptr) {
    const std::vector<std::uint8_t> mask =
        contour_mask(*opt.contour, opt.half_width, n, opt.upscale);
    const int dash = 3 * opt.upscale;  // on/off period along the outline
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < N; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * N + c;
        if (!mask[i] || ((r + c) / dash) % 2) continue;
        rgb[i * 3 + 0] = 255;
        rgb[i * 3 + 1] = 255;
        rgb[i * 3 + 2] = 255;
      }
  }
  write_png_rgb(path, N, N, rgb);
}

namespace {

std::ofstream open_text(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

void append_g17(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void write_loss_csv(const std::string& path,
                    const std::vector<LossRow>& trace) {
  std::ofstream os = open_text(path);
  const std::size_t nch = trace.empty() ? 0 : trace.front().data.size();
  os << "epoch,stage,beta,total";
  for (std::size_t c = 0; c < nch; ++c) os << ",data_" << c;
  for (std::size_t c = 0; c < nch; ++c) os << ",state_" << c;
  for (std::size_t c = 0; c < nch; ++c) os << ",cross_" << c;
  os << "\n";
  for (const LossRow& row : trace) {
    std::string line = std::to_string(row.epoch) + "," +
                       std::to_string(row.stage) + ",";
    append_g17(line, row.beta);
    line += ",";
    append_g17(line, row.total);
    for (const auto* terms : {&row.data, &row.state, &row.cross})
      for (double v : *terms) {
        line += ",";
        append_g17(line, v);
      }
    os << line << "\n";
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

void write_psnr_csv(const std::string& path, const RunRecord& rec) {
  std::ofstream os = open_text(path);
  const bool sig = !rec.psnr_sig.empty();
  os << (sig ? "epoch,psnr_eps,psnr_sig\n" : "epoch,psnr_eps\n");
  for (std::size_t i = 0; i < rec.psnr_epochs.size(); ++i) {
    std::string line = std::to_string(rec.psnr_epochs[i]) + ",";
    append_g17(line, rec.psnr_eps[i]);
    if (sig) {
      line += ",";
      append_g17(line, rec.psnr_sig[i]);
    }
    os << line << "\n";
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

void write_mean_curve_csv(const std::string& path,
                          const std::vector<int>& epochs,
                          const std::vector<double>& mean,
                          const std::vector<double>& std_dev) {
  if (epochs.size() != mean.size() || epochs.size() != std_dev.size())
    throw std::invalid_argument("mean curve arrays differ in length");
  std::ofstream os = open_text(path);
  os << "epoch,mean,std\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    std::string line = std::to_string(epochs[i]) + ",";
    append_g17(line, mean[i]);
    line += ",";
    append_g17(line, std_dev[i]);
    os << line << "\n";
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

void write_boxplot_csv(const std::string& path, const FiveNumber& fn) {
  std::ofstream os = open_text(path);
  os << "min,q1,median,q3,max\n";
  std::string line;
  for (double v : {fn.min, fn.q1, fn.median, fn.q3, fn.max}) {
    if (!line.empty()) line += ",";
    append_g17(line, v);
  }
  os << line << "\n";
  if (!os) throw std::runtime_error("write failed for " + path);
}

void write_map_csv(const std::string& path, const std::vector<double>& values,
                   int n) {
  if (n < 1 || values.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("write_map_csv: value buffer shape mismatch");
  std::ofstream os = open_text(path);
  os << "grid_" << n << "x" << n << "\n";
  for (int iy = 0; iy < n; ++iy) {
    std::string line;
    for (int ix = 0; ix < n; ++ix) {
      if (ix) line += ",";
      append_g17(line, values[static_cast<std::size_t>(iy) * n + ix]);
    }
    os << line << "\n";
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string field =
          line.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0')
        throw std::runtime_error(path + ": non-numeric CSV field '" + field +
                                 "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

RenderOptions map_render(const ExportOptions& opt, double vmin, double vmax) {
  RenderOptions ro;
  ro.vmin = vmin;
  ro.vmax = vmax;
  ro.upscale = opt.upscale;
  if (!opt.truth.shapes.empty()) {
    ro.contour = &opt.truth;
    ro.half_width = opt.half_width;
  }
  return ro;
}

}  // namespace

void export_run(const std::string& dir, const RunRecord& rec, int grid_n,
                const ExportOptions& opt) {
  std::filesystem::create_directories(dir);
  write_loss_csv(dir + "/loss.csv", rec.loss_trace);
  write_psnr_csv(dir + "/psnr.csv", rec);
  const std::size_t cells = static_cast<std::size_t>(grid_n) * grid_n;
  if (rec.final_eps.size() == cells) {
    write_map_csv(dir + "/final_eps.csv", rec.final_eps, grid_n);
    write_map_csv(dir + "/final_sig.csv", rec.final_sig, grid_n);
    write_map_png(dir + "/final_eps.png", rec.final_eps, grid_n,
                  map_render(opt, opt.eps_vmin, opt.eps_vmax));
    write_map_png(dir + "/final_sig.png", rec.final_sig, grid_n,
                  map_render(opt, opt.sig_vmin, opt.sig_vmax));
  }
  save_checkpoint(dir + "/checkpoint.bin", rec.checkpoint);
  if (rec.failed) {
    std::ofstream os = open_text(dir + "/FAILED.txt");
    os << rec.failure_reason << "\n";
  }
}

void export_ensemble(const std::string& dir, const EnsembleResult& ens,
                     int grid_n, const ExportOptions& opt) {
  std::filesystem::create_directories(dir);
  const EnsembleStats& st = ens.stats;
  write_mean_curve_csv(dir + "/psnr_eps_mean.csv", st.epochs, st.mean_eps,
                       st.std_eps);
  if (!st.mean_sig.empty())
    write_mean_curve_csv(dir + "/psnr_sig_mean.csv", st.epochs, st.mean_sig,
                         st.std_sig);
  write_boxplot_csv(dir + "/boxplot_psnr_eps.csv", st.final_eps);

  for (const RunRecord& rec : ens.records)
    export_run(dir + "/run_" + std::to_string(rec.seed), rec, grid_n, opt);

  // Exactly one median-flagged image per scored metric, per the convention
  // that an ensemble figure shows the run with the median final PSNR.
  const RunRecord& med = ens.records.at(static_cast<std::size_t>(st.median_run));
  write_map_png(dir + "/median_eps.png", med.final_eps, grid_n,
                map_render(opt, opt.eps_vmin, opt.eps_vmax));
  if (!st.mean_sig.empty())
    write_map_png(dir + "/median_sig.png", med.final_sig, grid_n,
                  map_render(opt, opt.sig_vmin, opt.sig_vmax));
}

}  // namespace ccpinn
