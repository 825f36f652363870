#include "core/descriptors.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace facekit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Per-face n * (center - centroid), computed as n*c - sum(c). Integral pixel
// inputs stay exact, and translating every face cancels bit-for-bit, which is
// what makes the descriptors exactly translation invariant.
struct RelativeGeometry {
  std::vector<double> ndx, ndy;
  double n = 0.0;
};

RelativeGeometry relative_geometry(const ImageRecord& rec) {
  RelativeGeometry g;
  g.n = static_cast<double>(rec.faces.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& f : rec.faces) {
    sx += f.cx;
    sy += f.cy;
  }
  g.ndx.reserve(rec.faces.size());
  g.ndy.reserve(rec.faces.size());
  for (const auto& f : rec.faces) {
    g.ndx.push_back(g.n * f.cx - sx);
    g.ndy.push_back(g.n * f.cy - sy);
  }
  return g;
}

void l1_normalize(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum > 0.0) {
    for (double& x : v) x /= sum;
  }
}

// Full-circle angle of (dx, dy) in [0, 360). Axis and diagonal directions are
// the only rational-slope inputs that can coincide with a sector boundary, so
// they are decided without trigonometry.
double full_angle_deg(double dx, double dy) {
  if (dy == 0.0) return dx >= 0.0 ? 0.0 : 180.0;
  if (dx == 0.0) return dy > 0.0 ? 90.0 : 270.0;
  if (std::abs(dx) == std::abs(dy)) {
    if (dx > 0.0) return dy > 0.0 ? 45.0 : 315.0;
    return dy > 0.0 ? 135.0 : 225.0;
  }
  double deg = std::atan2(dy, dx) * (180.0 / kPi);
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

// floor(numer / denom) for exactly-representable integral operands.
int floor_div(double numer, double denom) {
  return static_cast<int>(std::floor(numer / denom));
}

}  // namespace

void validate_config(const DescriptorConfig& cfg) {
  if (cfg.max_distance_bins < 1) {
    raise(ErrorCode::Usage, "max_distance_bins must be >= 1");
  }
  if (cfg.pie_angle_deg <= 0 || 360 % cfg.pie_angle_deg != 0) {
    raise(ErrorCode::Usage, "pie_angle_deg must divide 360");
  }
  if (cfg.grid_rows < 1 || cfg.grid_cols < 1) {
    raise(ErrorCode::Usage, "grid must have at least one cell");
  }
}

std::array<double, 2> face_center(const ImageRecord& rec) {
  if (rec.faces.empty()) {
    raise(ErrorCode::Validation,
          "record '" + rec.id + "': face center undefined without faces");
  }
  double sx = 0.0, sy = 0.0;
  for (const auto& f : rec.faces) {
    sx += f.cx;
    sy += f.cy;
  }
  const double n = static_cast<double>(rec.faces.size());
  return {sx / n, sy / n};
}

std::vector<double> hfo(const ImageRecord& rec) {
  std::vector<double> bins(kOrientationBins, 0.0);
  for (const auto& f : rec.faces) {
    if (!f.orientation) continue;
    const int b = orientation_bin(*f.orientation);
    bins[static_cast<std::size_t>(std::clamp(b, 0, kOrientationBins - 1))] +=
        1.0;
  }
  return bins;
}

const std::array<std::array<double, 13>, 3>& hfd_aggregation_matrix() {
  // left  [-90, -45], front [-30, 30], right [45, 90]
  static const std::array<std::array<double, 13>, 3> a = {{
      {{1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
      {{0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0}},
      {{0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1}},
  }};
  return a;
}

std::vector<double> hfd(const ImageRecord& rec) {
  const std::vector<double> h = hfo(rec);
  const auto& a = hfd_aggregation_matrix();
  std::vector<double> out(3, 0.0);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 13; ++c) out[r] += a[r][c] * h[c];
  }
  return out;
}

std::vector<double> df(const ImageRecord& rec, const DescriptorConfig& cfg) {
  validate_config(cfg);
  const int k = cfg.max_distance_bins;
  std::vector<double> bins(static_cast<std::size_t>(k), 0.0);
  if (rec.faces.empty()) return bins;

  double max_size = 0.0;
  for (const auto& f : rec.faces) max_size = std::max({max_size, f.w, f.h});
  const RelativeGeometry g = relative_geometry(rec);
  const double denom = g.n * max_size;
  for (std::size_t i = 0; i < rec.faces.size(); ++i) {
    const double dist = std::sqrt(g.ndx[i] * g.ndx[i] + g.ndy[i] * g.ndy[i]);
    int d = static_cast<int>(std::ceil(dist / denom));
    d = std::clamp(d, 1, k);
    bins[static_cast<std::size_t>(d - 1)] += 1.0;
  }
  return bins;
}

std::vector<double> chfl(const ImageRecord& rec, const DescriptorConfig& cfg) {
  validate_config(cfg);
  const int nbins = 360 / cfg.pie_angle_deg;
  std::vector<double> bins(static_cast<std::size_t>(nbins), 0.0);
  if (rec.faces.empty()) return bins;

  const RelativeGeometry g = relative_geometry(rec);
  for (std::size_t i = 0; i < rec.faces.size(); ++i) {
    int b = 0;
    if (g.ndx[i] != 0.0 || g.ndy[i] != 0.0) {
      const double deg = full_angle_deg(g.ndx[i], g.ndy[i]);
      b = std::min(static_cast<int>(deg / cfg.pie_angle_deg), nbins - 1);
    }
    bins[static_cast<std::size_t>(b)] += 1.0;
  }
  return bins;
}

std::vector<double> ghfl(const ImageRecord& rec, const DescriptorConfig& cfg) {
  validate_config(cfg);
  const int rows = cfg.grid_rows;
  const int cols = cfg.grid_cols;
  std::vector<double> bins(static_cast<std::size_t>(rows * cols), 0.0);
  if (rec.faces.empty()) return bins;

  // The grid spans one image size centered on the face centroid, so cell
  // index = floor(cols * (x - cx) / width + cols / 2); kept as a single
  // integral-valued ratio so boundary cases stay exact.
  const RelativeGeometry g = relative_geometry(rec);
  const double nw = g.n * static_cast<double>(rec.width);
  const double nh = g.n * static_cast<double>(rec.height);
  for (std::size_t i = 0; i < rec.faces.size(); ++i) {
    int col = floor_div(2.0 * cols * g.ndx[i] + cols * nw, 2.0 * nw);
    int row = floor_div(2.0 * rows * g.ndy[i] + rows * nh, 2.0 * nh);
    col = std::clamp(col, 0, cols - 1);
    row = std::clamp(row, 0, rows - 1);
    bins[static_cast<std::size_t>(row * cols + col)] += 1.0;
  }
  return bins;
}

double direction_count(const ImageRecord& rec) {
  const std::vector<double> d = hfd(rec);
  double count = 0.0;
  for (double v : d) {
    if (v > 0.0) count += 1.0;
  }
  return count;
}

std::vector<double> combined(const ImageRecord& rec,
                             const DescriptorConfig& cfg) {
  validate_config(cfg);
  std::vector<std::vector<double>> blocks = {
      hfo(rec), hfd(rec), df(rec, cfg), chfl(rec, cfg), ghfl(rec, cfg)};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(descriptor_dim("facedesc", cfg)));
  for (auto& b : blocks) {
    if (cfg.normalize) l1_normalize(b);
    out.insert(out.end(), b.begin(), b.end());
  }
  out.push_back(direction_count(rec));
  return out;
}

const std::vector<std::string>& descriptor_names() {
  static const std::vector<std::string> names = {"facedesc", "hfo", "hfd",
                                                 "df",       "chfl", "ghfl"};
  return names;
}

int descriptor_dim(const std::string& name, const DescriptorConfig& cfg) {
  validate_config(cfg);
  if (name == "hfo") return kOrientationBins;
  if (name == "hfd") return 3;
  if (name == "df") return cfg.max_distance_bins;
  if (name == "chfl") return 360 / cfg.pie_angle_deg;
  if (name == "ghfl") return cfg.grid_rows * cfg.grid_cols;
  if (name == "facedesc") {
    return kOrientationBins + 3 + cfg.max_distance_bins +
           360 / cfg.pie_angle_deg + cfg.grid_rows * cfg.grid_cols + 1;
  }
  raise(ErrorCode::Usage, "unknown descriptor '" + name + "'");
}

std::vector<double> compute_descriptor(const std::string& name,
                                       const ImageRecord& rec,
                                       const DescriptorConfig& cfg) {
  if (name == "facedesc") return combined(rec, cfg);
  std::vector<double> v;
  if (name == "hfo") {
    v = hfo(rec);
  } else if (name == "hfd") {
    v = hfd(rec);
  } else if (name == "df") {
    v = df(rec, cfg);
  } else if (name == "chfl") {
    v = chfl(rec, cfg);
  } else if (name == "ghfl") {
    v = ghfl(rec, cfg);
  } else {
    raise(ErrorCode::Usage, "unknown descriptor '" + name + "'");
  }
  if (cfg.normalize) l1_normalize(v);
  return v;
}

ChannelData extract_channel(const DatasetManifest& m, const std::string& name,
                            const DescriptorConfig& cfg) {
  ChannelData c;
  c.name = name;
  c.dim = descriptor_dim(name, cfg);
  c.rows.reserve(m.records.size());
  for (const auto& rec : m.records) {
    c.rows.push_back({rec.id, compute_descriptor(name, rec, cfg)});
  }
  return c;
}

}  // namespace facekit
