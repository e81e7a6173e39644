#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semcode/error.hpp"
#include "semcode/model.hpp"

namespace semcode {

// One simplified compression mode: base QPs for the two decided frames of a
// GOP plus one delta per region, shared by every frame of the GOP.
struct ModeSelection {
  int qp_frame1 = kQpRef;
  int qp_frame2 = kQpRef;
  int dqp_related = 0;
  int dqp_unrelated = 0;

  friend bool operator==(const ModeSelection&, const ModeSelection&) = default;
};

struct ModeSpace {
  std::vector<int> frame_qp_set = {22, 27, 32, 37};
  std::vector<int> delta_qp_set = {-3, -2, -1, 0, 1, 2, 3};
  // QP offsets, relative to qp_frame2, for GOP positions 3, 4, ...
  std::vector<int> gop_offsets = {2, 1};
  double region_threshold = 0.01;  // mask-ratio cutoff for "related"
  // When set, the child decides one delta pair per GOP position instead of a
  // single pair shared by the whole GOP.
  bool per_frame_deltas = false;

  int gop_size() const { return static_cast<int>(gop_offsets.size()) + 2; }

  void validate() const {
    auto check_alphabet = [](const std::vector<int>& a, const char* what) {
      if (a.empty()) fail(ErrorClass::contract, std::string(what) + " is empty");
      for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] <= a[i - 1])
          fail(ErrorClass::contract,
               std::string(what) + " must be strictly increasing");
    };
    check_alphabet(frame_qp_set, "frame_qp_set");
    check_alphabet(delta_qp_set, "delta_qp_set");
    require(region_threshold >= 0.0 && region_threshold <= 1.0,
            ErrorClass::contract, "region_threshold must be in [0,1]");
    for (int qp : frame_qp_set)
      require(qp >= kQpMin && qp <= kQpMax, ErrorClass::contract,
              "frame_qp_set entry outside [0,51]");
  }

  bool contains(const ModeSelection& m) const {
    auto in = [](const std::vector<int>& a, int v) {
      return std::find(a.begin(), a.end(), v) != a.end();
    };
    return in(frame_qp_set, m.qp_frame1) && in(frame_qp_set, m.qp_frame2) &&
           in(delta_qp_set, m.dqp_related) && in(delta_qp_set, m.dqp_unrelated);
  }
};

struct RegionPartition {
  std::vector<std::vector<bool>> related;  // per frame, per CTU
};

inline RegionPartition partition_regions(const VideoModel& model,
                                         const ModeSpace& space) {
  RegionPartition part;
  part.related.resize(model.frames.size());
  for (std::size_t t = 0; t < model.frames.size(); ++t) {
    part.related[t].resize(model.frames[t].ctus.size());
    for (std::size_t i = 0; i < model.frames[t].ctus.size(); ++i)
      part.related[t][i] =
          model.frames[t].ctus[i].mask_ratio >= space.region_threshold;
  }
  return part;
}

// Generalized mode: deltas holds {related, unrelated} pairs. Size 1 means one
// pair shared across the GOP (the ModeSelection case); size gop_size means
// one pair per GOP position.
struct FullMode {
  int qp_frame1 = kQpRef;
  int qp_frame2 = kQpRef;
  std::vector<std::pair<int, int>> deltas = {{0, 0}};

  bool per_frame() const { return deltas.size() > 1; }

  static FullMode from(const ModeSelection& m) {
    return FullMode{m.qp_frame1, m.qp_frame2, {{m.dqp_related, m.dqp_unrelated}}};
  }

  ModeSelection simple() const {
    require(deltas.size() == 1, ErrorClass::contract,
            "per-frame mode has no ModeSelection form");
    return ModeSelection{qp_frame1, qp_frame2, deltas[0].first, deltas[0].second};
  }

  friend bool operator==(const FullMode&, const FullMode&) = default;
};

inline int clamp_qp(int qp) { return std::clamp(qp, kQpMin, kQpMax); }

inline QpMap expand_full_mode(const FullMode& mode, const VideoModel& model,
                              const ModeSpace& space,
                              const RegionPartition& partition) {
  require(model.gop_size == space.gop_size(), ErrorClass::contract,
          "model gop_size does not match mode space");
  require(partition.related.size() == model.frames.size(), ErrorClass::contract,
          "partition shape does not match model");
  auto in = [](const std::vector<int>& a, int v) {
    return std::find(a.begin(), a.end(), v) != a.end();
  };
  require(in(space.frame_qp_set, mode.qp_frame1) &&
              in(space.frame_qp_set, mode.qp_frame2),
          ErrorClass::contract, "frame qp not in alphabet");
  require(mode.deltas.size() == 1 ||
              mode.deltas.size() == static_cast<std::size_t>(space.gop_size()),
          ErrorClass::contract, "delta pair count must be 1 or gop_size");
  for (const auto& [dr, du] : mode.deltas)
    require(in(space.delta_qp_set, dr) && in(space.delta_qp_set, du),
            ErrorClass::contract, "delta qp not in alphabet");

  QpMap map(model.frames.size());
  for (int t = 0; t < model.frame_count(); ++t) {
    int position = t % model.gop_size;
    int base;
    if (position == 0)
      base = mode.qp_frame1;
    else if (position == 1)
      base = mode.qp_frame2;
    else
      base = mode.qp_frame2 + space.gop_offsets[position - 2];

    const auto& pair = mode.deltas[mode.deltas.size() == 1 ? 0 : position];
    map[t].resize(model.frames[t].ctus.size());
    for (std::size_t i = 0; i < model.frames[t].ctus.size(); ++i) {
      int delta = partition.related[t][i] ? pair.first : pair.second;
      map[t][i] = clamp_qp(base + delta);
    }
  }
  return map;
}

inline QpMap expand_mode(const ModeSelection& mode, const VideoModel& model,
                         const ModeSpace& space,
                         const RegionPartition& partition) {
  return expand_full_mode(FullMode::from(mode), model, space, partition);
}

// Lexicographic over (qp_frame1, qp_frame2, dqp_related, dqp_unrelated).
inline std::vector<ModeSelection> enumerate_modes(const ModeSpace& space) {
  space.validate();
  std::vector<ModeSelection> out;
  out.reserve(space.frame_qp_set.size() * space.frame_qp_set.size() *
              space.delta_qp_set.size() * space.delta_qp_set.size());
  for (int q1 : space.frame_qp_set)
    for (int q2 : space.frame_qp_set)
      for (int dr : space.delta_qp_set)
        for (int du : space.delta_qp_set)
          out.push_back(ModeSelection{q1, q2, dr, du});
  return out;
}

inline std::string mode_key(const FullMode& mode) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "f%d-%d", mode.qp_frame1, mode.qp_frame2);
  std::string key = buf;
  for (const auto& [dr, du] : mode.deltas) {
    std::snprintf(buf, sizeof buf, "_r%+d_u%+d", dr, du);
    key += buf;
  }
  return key;
}

inline std::string mode_key(const ModeSelection& mode) {
  return mode_key(FullMode::from(mode));
}

inline ModeSelection parse_mode_key(std::string_view key) {
  ModeSelection m;
  int consumed = 0;
  std::string tmp(key);
  int got = std::sscanf(tmp.c_str(), "f%d-%d_r%d_u%d%n", &m.qp_frame1,
                        &m.qp_frame2, &m.dqp_related, &m.dqp_unrelated,
                        &consumed);
  if (got != 4 || consumed != static_cast<int>(tmp.size()))
    fail(ErrorClass::parse, "bad mode key '" + tmp + "'");
  return m;
}

}  // namespace semcode
