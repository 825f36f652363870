#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace facekit {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr double kTwoPi = 6.28318530717958647692;

int clamp_x(long long x) { return static_cast<int>(std::clamp<long long>(x, 4, kWidth - 4)); }
int clamp_y(long long y) { return static_cast<int>(std::clamp<long long>(y, 4, kHeight - 4)); }

FaceBox make_face(long long x, long long y, int size, int orientation) {
  FaceBox f;
  f.cx = static_cast<double>(clamp_x(x));
  f.cy = static_cast<double>(clamp_y(y));
  f.w = static_cast<double>(size);
  f.h = static_cast<double>(size);
  f.orientation = orientation;
  f.source = FaceSource::GroundTruth;
  return f;
}

int pick(std::mt19937_64& rng, std::initializer_list<int> values) {
  const auto idx = static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<long long>(values.size()) - 1));
  return *(values.begin() + idx);
}

// +1 means turned toward +x (image right)
int toward(double from_x, double to_x, int magnitude) {
  return to_x >= from_x ? magnitude : -magnitude;
}

std::vector<FaceBox> layout_converging(std::mt19937_64& rng, int faces) {
  std::vector<FaceBox> out;
  const bool speaker_right = (rng() & 1) != 0;
  const long long sx = speaker_right ? uniform_int(rng, 520, 600)
                                     : uniform_int(rng, 40, 120);
  const long long sy = uniform_int(rng, 180, 300);
  out.push_back(make_face(sx, sy, static_cast<int>(uniform_int(rng, 38, 56)), 0));
  for (int i = 1; i < faces; ++i) {
    const long long x = speaker_right ? uniform_int(rng, 60, 360)
                                      : uniform_int(rng, 280, 580);
    const long long y = uniform_int(rng, 140, 340);
    const int mag = pick(rng, {45, 60, 75, 90});
    out.push_back(make_face(x, y, static_cast<int>(uniform_int(rng, 24, 40)),
                            toward(static_cast<double>(x),
                                   static_cast<double>(sx), mag)));
  }
  return out;
}

std::vector<FaceBox> layout_circular(std::mt19937_64& rng, int faces) {
  std::vector<FaceBox> out;
  const double cx = 320.0 + static_cast<double>(uniform_int(rng, -40, 40));
  const double cy = 240.0 + static_cast<double>(uniform_int(rng, -30, 30));
  const double radius = static_cast<double>(uniform_int(rng, 120, 180));
  const double start = uniform01(rng) * kTwoPi;
  for (int i = 0; i < faces; ++i) {
    const double angle = start + kTwoPi * static_cast<double>(i) /
                                     static_cast<double>(faces) +
                         0.05 * gaussian(rng);
    const long long x = std::llround(cx + radius * std::cos(angle));
    // flattened vertically, like a table seen at an angle
    const long long y = std::llround(cy + 0.6 * radius * std::sin(angle));
    int orientation = 0;
    if (std::abs(static_cast<double>(x) - cx) >= 20.0) {
      orientation = toward(static_cast<double>(x), cx, pick(rng, {30, 45, 60}));
    }
    out.push_back(
        make_face(x, y, static_cast<int>(uniform_int(rng, 26, 40)), orientation));
  }
  return out;
}

std::vector<FaceBox> layout_pair(std::mt19937_64& rng, int faces, bool close) {
  std::vector<FaceBox> out;
  const int size = static_cast<int>(uniform_int(rng, 30, 46));
  const double gap_factor =
      close ? 0.55 + 0.35 * uniform01(rng) : 2.6 + 1.8 * uniform01(rng);
  const long long half_gap =
      std::llround(gap_factor * static_cast<double>(size) / 2.0);
  const long long mid_x = uniform_int(rng, 240, 400);
  const long long mid_y = uniform_int(rng, 170, 310);
  const int mag = close ? pick(rng, {60, 75, 90}) : pick(rng, {30, 45, 60});
  out.push_back(make_face(mid_x - half_gap, mid_y + uniform_int(rng, -6, 6),
                          size, mag));
  out.push_back(make_face(mid_x + half_gap, mid_y + uniform_int(rng, -6, 6),
                          size + static_cast<int>(uniform_int(rng, -4, 4)),
                          -mag));
  for (int i = 2; i < faces; ++i) {
    out.push_back(make_face(mid_x + uniform_int(rng, -30, 30),
                            mid_y - uniform_int(rng, 60, 120),
                            static_cast<int>(uniform_int(rng, 22, 34)),
                            pick(rng, {-15, 0, 15})));
  }
  return out;
}

std::vector<FaceBox> layout_scattered(std::mt19937_64& rng, int faces) {
  std::vector<FaceBox> out;
  for (int i = 0; i < faces; ++i) {
    out.push_back(make_face(uniform_int(rng, 40, 600), uniform_int(rng, 40, 440),
                            static_cast<int>(uniform_int(rng, 24, 52)),
                            static_cast<int>(uniform_int(rng, -6, 6)) * 15));
  }
  return out;
}

void apply_noise(std::vector<FaceBox>& faces, const NoiseSpec& noise,
                 std::mt19937_64& rng) {
  if (noise.pos_jitter > 0.0) {
    for (auto& f : faces) {
      f.cx = clamp_x(std::llround(f.cx + noise.pos_jitter * gaussian(rng)));
      f.cy = clamp_y(std::llround(f.cy + noise.pos_jitter * gaussian(rng)));
    }
  }
  if (noise.flip_prob > 0.0) {
    for (auto& f : faces) {
      if (f.orientation && uniform01(rng) < noise.flip_prob) {
        f.orientation = static_cast<int>(uniform_int(rng, -6, 6)) * 15;
      }
    }
  }
  if (noise.dropout > 0.0) {
    std::vector<FaceBox> kept;
    for (const auto& f : faces) {
      if (uniform01(rng) >= noise.dropout) kept.push_back(f);
    }
    if (kept.empty()) kept.push_back(faces.front());
    faces = std::move(kept);
  }
}

}  // namespace

std::vector<ArchetypeSpec> default_archetypes() {
  return {
      {"speech", 5, 8, Layout::ConvergingOrientations, {}},
      {"dining", 4, 8, Layout::Circular, {}},
      {"kissing", 2, 2, Layout::FacingPairClose, {}},
      {"talking", 2, 3, Layout::FacingPairApart, {}},
      {"boxing", 3, 4, Layout::ScatteredRandom, {}},
  };
}

DatasetManifest generate(const std::vector<ArchetypeSpec>& specs,
                         int per_class, std::uint64_t seed) {
  if (specs.empty()) raise(ErrorCode::Usage, "no archetype specs given");
  if (per_class < 5) {
    raise(ErrorCode::Usage, "per_class must be >= 5 so folds stay stratifiable");
  }
  for (const auto& s : specs) {
    if (s.name.empty()) raise(ErrorCode::Usage, "archetype without a name");
    if (s.min_faces < 1 || s.max_faces < s.min_faces) {
      raise(ErrorCode::Usage, "archetype '" + s.name + "': empty face-count range");
    }
    if (s.noise.pos_jitter < 0.0 || s.noise.flip_prob < 0.0 ||
        s.noise.dropout < 0.0) {
      raise(ErrorCode::Usage, "archetype '" + s.name + "': negative noise");
    }
  }

  DatasetManifest m;
  for (const auto& s : specs) m.class_names.push_back(s.name);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const ArchetypeSpec& spec = specs[c];
    for (int img = 0; img < per_class; ++img) {
      std::mt19937_64 rng(derive_seed(
          seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(img)}));
      const int faces = static_cast<int>(
          uniform_int(rng, spec.min_faces, spec.max_faces));
      ImageRecord rec;
      std::ostringstream id;
      id << spec.name << '_' << std::setfill('0') << std::setw(4) << img;
      rec.id = id.str();
      rec.width = kWidth;
      rec.height = kHeight;
      rec.label = spec.name;
      switch (spec.layout) {
        case Layout::ConvergingOrientations:
          rec.faces = layout_converging(rng, faces);
          break;
        case Layout::Circular:
          rec.faces = layout_circular(rng, faces);
          break;
        case Layout::FacingPairClose:
          rec.faces = layout_pair(rng, faces, true);
          break;
        case Layout::FacingPairApart:
          rec.faces = layout_pair(rng, faces, false);
          break;
        case Layout::ScatteredRandom:
          rec.faces = layout_scattered(rng, faces);
          break;
      }
      apply_noise(rec.faces, spec.noise, rng);
      m.records.push_back(std::move(rec));
    }
  }
  normalize_and_validate(m, true, nullptr);
  return m;
}

}  // namespace facekit
