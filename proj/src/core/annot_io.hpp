#ifndef FACEKIT_CORE_ANNOT_IO_HPP_
#define FACEKIT_CORE_ANNOT_IO_HPP_

#include <string>
#include <vector>

#include "core/types.hpp"

namespace facekit {

// File format identifiers, echoed by `facekit --version`.
inline constexpr const char* kAnnotFormat = "fk-annot/1";
inline constexpr const char* kChanFormat = "fk-chan/1";
inline constexpr const char* kModelFormat = "fk-model/1";
inline constexpr const char* kReportFormat = "fk-report/1";
inline constexpr const char* kScoresFormat = "fk-scores/1";

struct LoadedManifest {
  DatasetManifest manifest;
  std::vector<std::string> warnings;
};

// Annotation files are JSON lines: an optional header object carrying the
// class list and registered channels, then one image record per line.
LoadedManifest load_annotations(const std::string& path);
void save_annotations(const DatasetManifest& m, const std::string& path);

// Channel files are JSON lines: a header with the channel name and
// dimensionality, then one {image_id, values} row per line.
ChannelData load_channel(const std::string& path);
ChannelData load_channel(const std::string& path, const std::string& name);
void save_channel(const ChannelData& c, const std::string& path);

// Writes to path + ".tmp" then renames, so readers never observe a partial
// file.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace facekit

#endif  // FACEKIT_CORE_ANNOT_IO_HPP_
