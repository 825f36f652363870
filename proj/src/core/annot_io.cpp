#include "core/annot_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace facekit {

using nlohmann::json;

namespace {

json face_to_json(const FaceBox& f) {
  json j;
  j["cx"] = f.cx;
  j["cy"] = f.cy;
  j["w"] = f.w;
  j["h"] = f.h;
  if (f.orientation) {
    j["orientation"] = *f.orientation;
  } else {
    j["orientation"] = nullptr;
  }
  j["source"] = face_source_name(f.source);
  if (f.mirrored) j["mirrored"] = true;
  return j;
}

double require_number(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    raise(ErrorCode::Parse, where + ": missing or non-numeric '" + key + "'");
  }
  return it->get<double>();
}

std::string require_string(const json& j, const char* key,
                           const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    raise(ErrorCode::Parse, where + ": missing or non-string '" + key + "'");
  }
  return it->get<std::string>();
}

FaceBox face_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) raise(ErrorCode::Parse, where + ": face is not an object");
  FaceBox f;
  f.cx = require_number(j, "cx", where);
  f.cy = require_number(j, "cy", where);
  f.w = require_number(j, "w", where);
  f.h = require_number(j, "h", where);
  auto ori = j.find("orientation");
  if (ori != j.end() && !ori->is_null()) {
    if (!ori->is_number()) {
      raise(ErrorCode::Parse, where + ": orientation must be a number or null");
    }
    // raw value; snapped to the 15 degree grid during validation
    f.orientation = snap_orientation(ori->get<double>());
  }
  auto src = j.find("source");
  if (src != j.end() && !src->is_null()) {
    if (!src->is_string()) {
      raise(ErrorCode::Parse, where + ": source must be a string");
    }
    auto parsed = face_source_from_name(src->get<std::string>());
    if (!parsed) {
      raise(ErrorCode::Parse,
            where + ": unknown face source '" + src->get<std::string>() + "'");
    }
    f.source = *parsed;
  }
  auto mir = j.find("mirrored");
  if (mir != j.end() && mir->is_boolean()) f.mirrored = mir->get<bool>();
  return f;
}

ImageRecord record_from_json(const json& j, int line_no) {
  const std::string where = "line " + std::to_string(line_no);
  if (!j.is_object()) raise(ErrorCode::Parse, where + ": record is not an object");
  ImageRecord rec;
  rec.id = require_string(j, "id", where);
  const std::string ctx = "record '" + rec.id + "'";
  rec.width = static_cast<int>(require_number(j, "width", ctx));
  rec.height = static_cast<int>(require_number(j, "height", ctx));
  rec.label = require_string(j, "label", ctx);
  auto faces = j.find("faces");
  if (faces != j.end() && !faces->is_null()) {
    if (!faces->is_array()) raise(ErrorCode::Parse, ctx + ": faces must be an array");
    rec.faces.reserve(faces->size());
    for (const auto& fj : *faces) rec.faces.push_back(face_from_json(fj, ctx));
  }
  return rec;
}

json parse_line(const std::string& line, int line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    raise(ErrorCode::Parse,
          "line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) raise(ErrorCode::Io, "write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    raise(ErrorCode::Io, "cannot rename '" + tmp + "' to '" + path + "': " +
                             ec.message());
  }
}

LoadedManifest load_annotations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path + "' for reading");

  LoadedManifest out;
  bool classes_fixed = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(line, line_no);
    if (line_no == 1 && j.is_object() && j.contains("format")) {
      const std::string fmt = j["format"].get<std::string>();
      if (fmt != kAnnotFormat) {
        raise(ErrorCode::Parse, "unsupported annotation format '" + fmt + "'");
      }
      if (j.contains("classes")) {
        for (const auto& c : j["classes"]) {
          out.manifest.class_names.push_back(c.get<std::string>());
        }
        classes_fixed = true;
      }
      if (j.contains("channels")) {
        for (auto it = j["channels"].begin(); it != j["channels"].end(); ++it) {
          out.manifest.channels[it.key()] = it.value().get<int>();
        }
      }
      continue;
    }
    out.manifest.records.push_back(record_from_json(j, line_no));
  }
  normalize_and_validate(out.manifest, classes_fixed, &out.warnings);
  return out;
}

void save_annotations(const DatasetManifest& m, const std::string& path) {
  std::ostringstream out;
  json header;
  header["format"] = kAnnotFormat;
  header["classes"] = m.class_names;
  if (!m.channels.empty()) {
    json ch = json::object();
    for (const auto& [name, dim] : m.channels) ch[name] = dim;
    header["channels"] = ch;
  }
  out << header.dump() << '\n';
  for (const auto& rec : m.records) {
    json j;
    j["id"] = rec.id;
    j["width"] = rec.width;
    j["height"] = rec.height;
    j["label"] = rec.label;
    json faces = json::array();
    for (const auto& f : rec.faces) faces.push_back(face_to_json(f));
    j["faces"] = faces;
    out << j.dump() << '\n';
  }
  atomic_write_text(path, out.str());
}

ChannelData load_channel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path + "' for reading");

  ChannelData c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(line, line_no);
    if (line_no == 1 && j.is_object() && j.contains("format")) {
      const std::string fmt = j["format"].get<std::string>();
      if (fmt != kChanFormat) {
        raise(ErrorCode::Parse, "unsupported channel format '" + fmt + "'");
      }
      if (j.contains("channel")) c.name = j["channel"].get<std::string>();
      if (j.contains("dim")) c.dim = j["dim"].get<int>();
      continue;
    }
    if (!j.is_object()) {
      raise(ErrorCode::Parse,
            "line " + std::to_string(line_no) + ": row is not an object");
    }
    FeatureVector row;
    row.image_id =
        require_string(j, "image_id", "line " + std::to_string(line_no));
    auto vals = j.find("values");
    if (vals == j.end() || !vals->is_array()) {
      raise(ErrorCode::Parse, "row '" + row.image_id + "': missing values array");
    }
    row.values.reserve(vals->size());
    for (const auto& v : *vals) {
      if (!v.is_number()) {
        raise(ErrorCode::Parse,
              "row '" + row.image_id + "': non-numeric value");
      }
      row.values.push_back(v.get<double>());
    }
    c.rows.push_back(std::move(row));
  }
  if (c.dim == 0 && !c.rows.empty()) {
    c.dim = static_cast<int>(c.rows.front().values.size());
  }
  validate_channel(c);
  return c;
}

ChannelData load_channel(const std::string& path, const std::string& name) {
  ChannelData c = load_channel(path);
  c.name = name;
  return c;
}

void save_channel(const ChannelData& c, const std::string& path) {
  validate_channel(c);
  std::ostringstream out;
  json header;
  header["format"] = kChanFormat;
  header["channel"] = c.name;
  header["dim"] = c.dim;
  out << header.dump() << '\n';
  for (const auto& row : c.rows) {
    json j;
    j["image_id"] = row.image_id;
    j["values"] = row.values;
    out << j.dump() << '\n';
  }
  atomic_write_text(path, out.str());
}

}  // namespace facekit
