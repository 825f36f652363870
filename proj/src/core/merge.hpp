#ifndef FACEKIT_CORE_MERGE_HPP_
#define FACEKIT_CORE_MERGE_HPP_

#include <vector>

#include "core/types.hpp"

namespace facekit {

struct MergeConfig {
  // Two boxes are "the same region" when IoU reaches this threshold.
  double same_region_iou = 0.3;
  // Orientation quantization step for collapsed frontal+profile pairs.
  int quantization_step = kOrientationStep;
};

// Combines the output of an orientation-estimating detector with
// frontal/profile cascade detections for one image:
//   - a cascade box overlapping any oriented box is dropped,
//   - an overlapping frontal+profile pair collapses to one box whose
//     orientation is the quantized (1 - IoU) * 90 degrees,
//   - a lone frontal box gets 0 degrees, a lone profile box +/-90,
//   - a final suppression pass guarantees no output pair still overlaps.
// Output order is canonical (area descending), so the result does not depend
// on input ordering.
std::vector<FaceBox> merge_detections(const std::vector<FaceBox>& oriented,
                                      const std::vector<FaceBox>& vj,
                                      const MergeConfig& cfg);

// Applies merge_detections per image across two detection manifests. Records
// are matched by id; ids present in only one input contribute their faces
// unmerged (after the single-detector rules).
DatasetManifest merge_manifests(const DatasetManifest& oriented,
                                const DatasetManifest& vj,
                                const MergeConfig& cfg);

}  // namespace facekit

#endif  // FACEKIT_CORE_MERGE_HPP_
