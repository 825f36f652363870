#ifndef FACEKIT_CORE_DESCRIPTORS_HPP_
#define FACEKIT_CORE_DESCRIPTORS_HPP_

#include <array>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace facekit {

struct DescriptorConfig {
  int max_distance_bins = 5;  // distance histogram bins (values clamp to [1, K])
  int pie_angle_deg = 60;     // pie sector size; must divide 360
  int grid_rows = 1;
  int grid_cols = 3;
  bool normalize = false;  // L1-normalize each histogram block
};

void validate_config(const DescriptorConfig& cfg);

// Mean of the face centers. Undefined for a record without faces.
std::array<double, 2> face_center(const ImageRecord& rec);

// Histogram of face orientations: 13 bins over [-90, 90] in 15 degree steps.
// Faces without an orientation estimate are skipped.
std::vector<double> hfo(const ImageRecord& rec);

// Coarse direction histogram (left / front / right); exactly the fixed 3x13
// aggregation of hfo.
std::vector<double> hfd(const ImageRecord& rec);

// The 3x13 0/1 matrix mapping orientation bins to direction bins, row-major.
const std::array<std::array<double, 13>, 3>& hfd_aggregation_matrix();

// Histogram of face-to-centroid distances normalized by the largest face
// size, clamped to [1, K].
std::vector<double> df(const ImageRecord& rec, const DescriptorConfig& cfg);

// Pie-sector histogram of face positions around the centroid; a face
// coincident with the centroid counts in sector 0.
std::vector<double> chfl(const ImageRecord& rec, const DescriptorConfig& cfg);

// Grid histogram of face positions; the grid is centered on the face
// centroid with cells of size (width/cols) x (height/rows), and faces beyond
// the outer cells clamp into them.
std::vector<double> ghfl(const ImageRecord& rec, const DescriptorConfig& cfg);

// Number of distinct coarse directions present (0..3).
double direction_count(const ImageRecord& rec);

// Concatenation [hfo | hfd | df | chfl | ghfl | direction_count];
// 31 dimensions at the default configuration.
std::vector<double> combined(const ImageRecord& rec,
                             const DescriptorConfig& cfg);

// Named descriptor dispatch ("facedesc", "hfo", "hfd", "df", "chfl", "ghfl").
const std::vector<std::string>& descriptor_names();
int descriptor_dim(const std::string& name, const DescriptorConfig& cfg);
std::vector<double> compute_descriptor(const std::string& name,
                                       const ImageRecord& rec,
                                       const DescriptorConfig& cfg);

// One row per manifest record, in manifest order.
ChannelData extract_channel(const DatasetManifest& m, const std::string& name,
                            const DescriptorConfig& cfg);

}  // namespace facekit

#endif  // FACEKIT_CORE_DESCRIPTORS_HPP_
