#ifndef FACEKIT_CORE_SYNTH_HPP_
#define FACEKIT_CORE_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace facekit {

// Layout families for generated face configurations. Each one is built to
// light up a different descriptor pathway: orientation patterns for the
// orientation histograms, spatial patterns for the distance/sector/grid ones.
enum class Layout {
  ConvergingOrientations,  // audience turned toward a speaker on one side
  Circular,                // faces around a table-like ring
  FacingPairClose,         // two adjacent faces turned toward each other
  FacingPairApart,         // a separated pair (plus optional bystander)
  ScatteredRandom,         // uniform positions and orientations
};

struct NoiseSpec {
  double pos_jitter = 0.0;  // gaussian sigma, pixels
  double flip_prob = 0.0;   // chance an orientation is resampled uniformly
  double dropout = 0.0;     // chance a face is dropped (at least one kept)
};

struct ArchetypeSpec {
  std::string name;
  int min_faces = 2;
  int max_faces = 2;
  Layout layout = Layout::ScatteredRandom;
  NoiseSpec noise;
};

// The five stock archetypes used by the CLI: speech, dining, kissing,
// talking, boxing.
std::vector<ArchetypeSpec> default_archetypes();

// per_class images per spec, deterministic in seed. Face coordinates are
// integral pixels of a 640x480 frame.
DatasetManifest generate(const std::vector<ArchetypeSpec>& specs,
                         int per_class, std::uint64_t seed);

}  // namespace facekit

#endif  // FACEKIT_CORE_SYNTH_HPP_
