#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "semcode/error.hpp"
#include "semcode/rng.hpp"

namespace semcode {

inline constexpr int kQpMin = 0;
inline constexpr int kQpMax = 51;
// Reference QP for the rate model; mid-range of the 22..37 anchor sweep.
inline constexpr int kQpRef = 32;
// Guards the mask-weighted means when a frame (or the whole sequence) has no
// semantic content.
inline constexpr double kMaskEpsilon = 1e-9;

struct CtuModel {
  double complexity = 1000.0;      // bits produced at the reference QP
  double rate_sensitivity = 1.0;   // rate-halving steepness per +6 QP
  double mask_ratio = 0.0;         // fraction of semantic pixels, in [0,1]
  double degrade_midpoint = 32.0;  // QP where local degradation reaches 0.5
  double degrade_steepness = 3.0;  // logistic width, in QP units

  void validate() const {
    require(complexity > 0 && std::isfinite(complexity), ErrorClass::contract,
            "ctu complexity must be positive");
    require(rate_sensitivity > 0 && std::isfinite(rate_sensitivity),
            ErrorClass::contract, "ctu rate_sensitivity must be positive");
    require(mask_ratio >= 0.0 && mask_ratio <= 1.0, ErrorClass::contract,
            "ctu mask_ratio must be in [0,1]");
    require(std::isfinite(degrade_midpoint), ErrorClass::contract,
            "ctu degrade_midpoint must be finite");
    require(degrade_steepness > 0 && std::isfinite(degrade_steepness),
            ErrorClass::contract, "ctu degrade_steepness must be positive");
  }
};

struct FrameModel {
  std::vector<CtuModel> ctus;
  bool is_intra = false;
};

inline double ctu_rate(const CtuModel& ctu, int qp, bool is_intra,
                       double intra_factor) {
  require(qp >= kQpMin && qp <= kQpMax, ErrorClass::contract,
          "qp outside [0,51]");
  double bits = ctu.complexity *
                std::exp2(ctu.rate_sensitivity * double(kQpRef - qp) / 6.0);
  return is_intra ? bits * intra_factor : bits;
}

struct VideoModel {
  std::vector<FrameModel> frames;
  int gop_size = 4;
  int rows = 0;
  int cols = 0;
  double intra_factor = 1.5;  // rate multiplier for the intra frame
  double prop_decay = 0.3;    // temporal degradation carry-over, in [0,1)

  int ctus_per_frame() const { return rows * cols; }
  int frame_count() const { return static_cast<int>(frames.size()); }
  int gop_count() const {
    return (frame_count() + gop_size - 1) / gop_size;  // last GOP may be short
  }

  void validate() const {
    require(!frames.empty(), ErrorClass::contract, "model has no frames");
    require(rows > 0 && cols > 0, ErrorClass::contract,
            "ctu grid dimensions must be positive");
    require(gop_size >= 1, ErrorClass::contract, "gop_size must be positive");
    require(intra_factor >= 1.0 && std::isfinite(intra_factor),
            ErrorClass::contract, "intra_factor must be >= 1");
    require(prop_decay >= 0.0 && prop_decay < 1.0, ErrorClass::contract,
            "prop_decay must be in [0,1)");
    for (std::size_t t = 0; t < frames.size(); ++t) {
      require(static_cast<int>(frames[t].ctus.size()) == ctus_per_frame(),
              ErrorClass::contract, "frame ctu count does not match grid");
      require(frames[t].is_intra == (t == 0), ErrorClass::contract,
              "exactly the first frame must be intra");
      for (const auto& ctu : frames[t].ctus) ctu.validate();
    }
  }

  // Total bits at the reference QP. Recomputed so it can never go stale.
  double ref_rate() const {
    double total = 0.0;
    for (const auto& frame : frames)
      for (const auto& ctu : frame.ctus)
        total += ctu_rate(ctu, kQpRef, frame.is_intra, intra_factor);
    return total;
  }
};

using QpMap = std::vector<std::vector<int>>;

struct EncodeOutcome {
  // Empty when the producing environment has no per-CTU detail (trace lookups).
  std::vector<std::vector<double>> ctu_rates;
  std::vector<double> frame_rates;
  double total_rate = 0.0;
  double fidelity = 1.0;         // semantic measure, in [0,1]
  double normalized_rate = 0.0;  // total_rate / ref_rate of the producing model
};

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Pure analytic encode. Rates follow the per-CTU exponential model; fidelity
// is one minus the mask-weighted mean of effective degradations, where each
// inter frame inherits prop_decay times the mask-weighted mean degradation of
// its reference (previous) frame, clipped at 1.
inline EncodeOutcome encode(const VideoModel& model, const QpMap& qp_map,
                            double ref_rate) {
  require(qp_map.size() == model.frames.size(), ErrorClass::contract,
          "qp_map frame count does not match model");
  require(ref_rate > 0, ErrorClass::contract, "ref_rate must be positive");

  EncodeOutcome out;
  out.ctu_rates.resize(model.frames.size());
  out.frame_rates.resize(model.frames.size());

  double degraded_mass = 0.0;  // sum of S * e over all CTUs
  double mask_mass = 0.0;      // sum of S over all CTUs
  double prev_frame_mean = 0.0;

  for (std::size_t t = 0; t < model.frames.size(); ++t) {
    const FrameModel& frame = model.frames[t];
    require(qp_map[t].size() == frame.ctus.size(), ErrorClass::contract,
            "qp_map ctu count does not match model");
    auto& row = out.ctu_rates[t];
    row.resize(frame.ctus.size());

    double frame_rate = 0.0;
    double frame_degraded = 0.0;
    double frame_mask = 0.0;
    for (std::size_t i = 0; i < frame.ctus.size(); ++i) {
      const CtuModel& ctu = frame.ctus[i];
      int qp = qp_map[t][i];
      row[i] = ctu_rate(ctu, qp, frame.is_intra, model.intra_factor);
      frame_rate += row[i];

      double local = logistic((double(qp) - ctu.degrade_midpoint) /
                              ctu.degrade_steepness);
      double effective =
          frame.is_intra
              ? local
              : std::min(1.0, local + model.prop_decay * prev_frame_mean);
      frame_degraded += ctu.mask_ratio * effective;
      frame_mask += ctu.mask_ratio;
    }
    out.frame_rates[t] = frame_rate;
    out.total_rate += frame_rate;
    degraded_mass += frame_degraded;
    mask_mass += frame_mask;
    prev_frame_mean = frame_degraded / std::max(frame_mask, kMaskEpsilon);
  }

  out.fidelity = 1.0 - degraded_mass / std::max(mask_mass, kMaskEpsilon);
  out.normalized_rate = out.total_rate / ref_rate;
  return out;
}

inline EncodeOutcome encode(const VideoModel& model, const QpMap& qp_map) {
  return encode(model, qp_map, model.ref_rate());
}

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct GenSpec {
  int frame_count = 4;
  int rows = 4;
  int cols = 4;
  int gop_size = 4;
  double intra_factor = 1.5;
  double prop_decay = 0.3;
  // Fraction of CTUs that carry semantic content; the rest get mask_ratio 0.
  double semantic_fraction = 0.5;
  ValueRange complexity{500.0, 4000.0};
  ValueRange rate_sensitivity{0.8, 1.3};
  ValueRange mask_ratio{0.05, 1.0};
  ValueRange degrade_midpoint{26.0, 40.0};
  ValueRange degrade_steepness{2.0, 5.0};

  void validate() const {
    require(frame_count >= 1, ErrorClass::contract, "frame_count must be >= 1");
    require(rows >= 1 && cols >= 1, ErrorClass::contract,
            "grid dimensions must be >= 1");
    require(gop_size >= 1, ErrorClass::contract, "gop_size must be >= 1");
    require(intra_factor >= 1.0, ErrorClass::contract, "intra_factor must be >= 1");
    require(prop_decay >= 0.0 && prop_decay < 1.0, ErrorClass::contract,
            "prop_decay must be in [0,1)");
    require(semantic_fraction >= 0.0 && semantic_fraction <= 1.0,
            ErrorClass::contract, "semantic_fraction must be in [0,1]");
    auto check = [](const ValueRange& r, bool positive, const char* what) {
      if (r.lo > r.hi) fail(ErrorClass::contract, std::string(what) + " range is empty");
      if (positive && r.lo <= 0.0)
        fail(ErrorClass::contract, std::string(what) + " range must be positive");
    };
    check(complexity, true, "complexity");
    check(rate_sensitivity, true, "rate_sensitivity");
    check(mask_ratio, false, "mask_ratio");
    require(mask_ratio.lo >= 0.0 && mask_ratio.hi <= 1.0, ErrorClass::contract,
            "mask_ratio range must stay in [0,1]");
    check(degrade_midpoint, false, "degrade_midpoint");
    check(degrade_steepness, true, "degrade_steepness");
  }
};

// Deterministic synthetic content. The draw order per CTU is part of the
// contract: complexity, rate_sensitivity, semantic gate, mask_ratio (gated),
// degrade_midpoint, degrade_steepness.
inline VideoModel gen_model(std::uint64_t seed, const GenSpec& spec) {
  spec.validate();
  auto rng = make_rng(derive_seed(seed, {fnv1a64("gen_model")}));

  VideoModel model;
  model.gop_size = spec.gop_size;
  model.rows = spec.rows;
  model.cols = spec.cols;
  model.intra_factor = spec.intra_factor;
  model.prop_decay = spec.prop_decay;
  model.frames.resize(spec.frame_count);
  for (int t = 0; t < spec.frame_count; ++t) {
    FrameModel& frame = model.frames[t];
    frame.is_intra = (t == 0);
    frame.ctus.resize(spec.rows * spec.cols);
    for (CtuModel& ctu : frame.ctus) {
      ctu.complexity = uniform_real(rng, spec.complexity.lo, spec.complexity.hi);
      ctu.rate_sensitivity =
          uniform_real(rng, spec.rate_sensitivity.lo, spec.rate_sensitivity.hi);
      bool semantic = uniform_unit(rng) < spec.semantic_fraction;
      ctu.mask_ratio =
          semantic ? uniform_real(rng, spec.mask_ratio.lo, spec.mask_ratio.hi)
                   : 0.0;
      ctu.degrade_midpoint =
          uniform_real(rng, spec.degrade_midpoint.lo, spec.degrade_midpoint.hi);
      ctu.degrade_steepness = uniform_real(rng, spec.degrade_steepness.lo,
                                           spec.degrade_steepness.hi);
    }
  }
  model.validate();
  return model;
}

}  // namespace semcode
