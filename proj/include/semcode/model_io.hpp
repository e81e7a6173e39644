#pragma once

#include <filesystem>
#include <string>

#include "semcode/kv.hpp"
#include "semcode/model.hpp"

namespace semcode {

inline constexpr int kModelFormatVersion = 1;

// Model file grammar: `key = value` lines (see KvDoc). Each CTU is one line
// `frame.<t>.ctu.<i> = complexity,rate_sensitivity,mask_ratio,
// degrade_midpoint,degrade_steepness`. ref_rate is never stored; it is
// recomputed from the fields.
inline KvDoc model_to_kv(const VideoModel& model) {
  model.validate();
  KvDoc doc;
  doc.set_i64("format_version", kModelFormatVersion);
  doc.set("kind", "video_model");
  doc.set_i64("gop_size", model.gop_size);
  doc.set_i64("rows", model.rows);
  doc.set_i64("cols", model.cols);
  doc.set_f64("intra_factor", model.intra_factor);
  doc.set_f64("prop_decay", model.prop_decay);
  doc.set_i64("frames", model.frame_count());
  for (int t = 0; t < model.frame_count(); ++t) {
    const FrameModel& frame = model.frames[t];
    std::string prefix = "frame." + std::to_string(t);
    doc.set_i64(prefix + ".intra", frame.is_intra ? 1 : 0);
    for (std::size_t i = 0; i < frame.ctus.size(); ++i) {
      const CtuModel& c = frame.ctus[i];
      doc.set(prefix + ".ctu." + std::to_string(i),
              fmt_double(c.complexity) + "," + fmt_double(c.rate_sensitivity) +
                  "," + fmt_double(c.mask_ratio) + "," +
                  fmt_double(c.degrade_midpoint) + "," +
                  fmt_double(c.degrade_steepness));
    }
  }
  return doc;
}

inline VideoModel model_from_kv(const KvDoc& doc) {
  long long version = doc.get_i64("format_version");
  if (version != kModelFormatVersion)
    fail(ErrorClass::parse, doc.origin() + ": unsupported model format_version " +
                                std::to_string(version));
  if (doc.get_str("kind") != "video_model")
    fail(ErrorClass::parse, doc.origin() + ": not a video_model file");

  VideoModel model;
  model.gop_size = static_cast<int>(doc.get_i64("gop_size"));
  model.rows = static_cast<int>(doc.get_i64("rows"));
  model.cols = static_cast<int>(doc.get_i64("cols"));
  model.intra_factor = doc.get_f64("intra_factor");
  model.prop_decay = doc.get_f64("prop_decay");
  int frames = static_cast<int>(doc.get_i64("frames"));
  if (frames <= 0) fail(ErrorClass::parse, doc.origin() + ": frames must be >= 1");

  model.frames.resize(frames);
  for (int t = 0; t < frames; ++t) {
    std::string prefix = "frame." + std::to_string(t);
    FrameModel& frame = model.frames[t];
    frame.is_intra = doc.get_i64(prefix + ".intra") != 0;
    int n = model.rows * model.cols;
    frame.ctus.resize(n);
    for (int i = 0; i < n; ++i) {
      std::string key = prefix + ".ctu." + std::to_string(i);
      auto parts = detail::split(doc.raw(key), ',');
      if (parts.size() != 5)
        fail(ErrorClass::parse,
             doc.origin() + ": key '" + key + "' needs 5 comma-separated values");
      CtuModel& c = frame.ctus[i];
      std::string where = doc.origin() + ": key '" + key + "'";
      c.complexity = detail::parse_double(parts[0], where);
      c.rate_sensitivity = detail::parse_double(parts[1], where);
      c.mask_ratio = detail::parse_double(parts[2], where);
      c.degrade_midpoint = detail::parse_double(parts[3], where);
      c.degrade_steepness = detail::parse_double(parts[4], where);
    }
  }
  model.validate();
  return model;
}

inline void save_model(const VideoModel& model,
                       const std::filesystem::path& path) {
  model_to_kv(model).save(path);
}

inline VideoModel load_model(const std::filesystem::path& path) {
  return model_from_kv(KvDoc::load(path));
}

}  // namespace semcode
