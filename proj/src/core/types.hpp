#ifndef FACEKIT_CORE_TYPES_HPP_
#define FACEKIT_CORE_TYPES_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace facekit {

// Quantized face orientation grid: [-90, 90] degrees in 15 degree steps.
inline constexpr int kOrientationStep = 15;
inline constexpr int kOrientationBins = 13;

enum class FaceSource {
  OrientedDetector,
  VjFrontal,
  VjProfile,
  Merged,
  GroundTruth,
};

const char* face_source_name(FaceSource s);
std::optional<FaceSource> face_source_from_name(const std::string& name);

// Clamp to [-90, 90], then round to the nearest multiple of 15 (half away
// from zero). Idempotent on already-quantized values.
int snap_orientation(double degrees);

inline int orientation_bin(int degrees) {
  return (degrees + 90) / kOrientationStep;
}

struct FaceBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::optional<int> orientation;  // multiple of 15 in [-90, 90]
  FaceSource source = FaceSource::GroundTruth;
  bool mirrored = false;  // left-facing hint for profile detections

  bool operator==(const FaceBox&) const = default;
};

// Intersection over union of two axis-aligned boxes given as center + size.
double iou(const FaceBox& a, const FaceBox& b);

struct ImageRecord {
  std::string id;
  int width = 0;
  int height = 0;
  std::string label;
  std::vector<FaceBox> faces;

  bool operator==(const ImageRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ImageRecord> records;
  std::vector<std::string> class_names;
  std::map<std::string, int> channels;  // channel name -> dimensionality

  bool operator==(const DatasetManifest&) const = default;

  int class_index(const std::string& label) const;
  const ImageRecord* find(const std::string& id) const;
};

// The ten interaction classes used as the default label set.
const std::vector<std::string>& default_class_names();

// Normalizes a manifest in place (orientation snapping, face-center clamping)
// and validates all invariants. When `classes_fixed` the record labels must
// already be members of manifest.class_names; otherwise unseen labels are
// appended in order of first appearance. Silent fixups (center clamping) are
// reported through `warnings` when non-null.
void normalize_and_validate(DatasetManifest& m, bool classes_fixed,
                            std::vector<std::string>* warnings);

struct FeatureVector {
  std::string image_id;
  std::vector<double> values;

  bool operator==(const FeatureVector&) const = default;
};

struct ChannelData {
  std::string name;
  int dim = 0;
  std::vector<FeatureVector> rows;

  bool operator==(const ChannelData&) const = default;
};

// Uniform dimensionality and finite values; names the offending image id.
void validate_channel(const ChannelData& c);

// Every row id must resolve to a manifest record and every record must have
// a row; raised errors list the offending ids.
void check_channel_covers(const ChannelData& c, const DatasetManifest& m);

}  // namespace facekit

#endif  // FACEKIT_CORE_TYPES_HPP_
