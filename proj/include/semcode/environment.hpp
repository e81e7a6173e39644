#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semcode/error.hpp"
#include "semcode/kv.hpp"
#include "semcode/mode_space.hpp"
#include "semcode/model.hpp"

namespace semcode {

// Environment contract: mode in, rates and semantic fidelity out. Instances
// are immutable after construction and safe to share across rollouts.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual EncodeOutcome encode_full(const FullMode& mode) const = 0;
  virtual double ref_rate() const = 0;

  EncodeOutcome encode_mode(const ModeSelection& mode) const {
    return encode_full(FullMode::from(mode));
  }
};

class SyntheticEnv final : public Environment {
 public:
  SyntheticEnv(VideoModel model, ModeSpace space)
      : model_(std::move(model)), space_(std::move(space)) {
    model_.validate();
    space_.validate();
    require(model_.gop_size == space_.gop_size(), ErrorClass::contract,
            "model gop_size does not match mode space");
    partition_ = partition_regions(model_, space_);
    ref_rate_ = model_.ref_rate();
  }

  EncodeOutcome encode_full(const FullMode& mode) const override {
    return encode(model_, expand_full_mode(mode, model_, space_, partition_),
                  ref_rate_);
  }

  EncodeOutcome encode_map(const QpMap& qp_map) const {
    return encode(model_, qp_map, ref_rate_);
  }

  double ref_rate() const override { return ref_rate_; }
  const VideoModel& model() const { return model_; }
  const ModeSpace& space() const { return space_; }
  const RegionPartition& partition() const { return partition_; }

 private:
  VideoModel model_;
  ModeSpace space_;
  RegionPartition partition_;
  double ref_rate_ = 0.0;
};

struct TraceRecord {
  double total_rate = 0.0;
  double fidelity = 1.0;
  std::vector<double> frame_rates;
};

inline constexpr const char* kTraceHeader =
    "mode_key,total_rate,fidelity,frame_rates";

// Lookup environment over externally measured records. Unknown modes are an
// error, never an extrapolation.
class TraceEnv final : public Environment {
 public:
  TraceEnv(std::unordered_map<std::string, TraceRecord> records,
           double ref_rate)
      : records_(std::move(records)), ref_rate_(ref_rate) {
    require(ref_rate_ > 0, ErrorClass::contract, "ref_rate must be positive");
  }

  EncodeOutcome encode_full(const FullMode& mode) const override {
    auto it = records_.find(mode_key(mode));
    if (it == records_.end())
      fail(ErrorClass::lookup, "unknown mode '" + mode_key(mode) + "'");
    const TraceRecord& rec = it->second;
    EncodeOutcome out;
    out.frame_rates = rec.frame_rates;
    out.total_rate = rec.total_rate;
    out.fidelity = rec.fidelity;
    out.normalized_rate = rec.total_rate / ref_rate_;
    return out;
  }

  double ref_rate() const override { return ref_rate_; }
  std::size_t size() const { return records_.size(); }
  bool has(const std::string& key) const { return records_.count(key) != 0; }

 private:
  std::unordered_map<std::string, TraceRecord> records_;
  double ref_rate_ = 0.0;
};

// Trace format: UTF-8 CSV. Comment lines start with '#'. The directive line
// `# ref_rate = <value>` carries the normalization constant and must appear
// before the header `mode_key,total_rate,fidelity,frame_rates`. frame_rates
// is a ';'-separated list.
inline TraceEnv parse_trace(std::istream& in, const std::string& origin) {
  std::unordered_map<std::string, TraceRecord> records;
  double ref_rate = 0.0;
  bool have_ref = false;
  bool have_header = false;
  std::string line;
  int lineno = 0;

  auto where = [&](const char* what) {
    return origin + ":" + std::to_string(lineno) + ": " + what;
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = detail::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      std::string_view body = detail::trim(sv.substr(1));
      if (body.substr(0, 8) == "ref_rate") {
        std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
          fail(ErrorClass::parse, where("malformed ref_rate directive"));
        ref_rate = detail::parse_double(body.substr(eq + 1), where("ref_rate"));
        have_ref = true;
      }
      continue;
    }
    if (!have_header) {
      if (sv != kTraceHeader)
        fail(ErrorClass::parse, where("missing trace header"));
      have_header = true;
      continue;
    }
    auto fields = detail::split(sv, ',');
    if (fields.size() != 4)
      fail(ErrorClass::parse, where("expected 4 comma-separated fields"));
    std::string key(detail::trim(fields[0]));
    if (key.empty()) fail(ErrorClass::parse, where("empty mode key"));
    if (records.count(key))
      fail(ErrorClass::parse, where("duplicate mode key"));
    TraceRecord rec;
    rec.total_rate = detail::parse_double(fields[1], where("total_rate"));
    rec.fidelity = detail::parse_double(fields[2], where("fidelity"));
    if (!(rec.fidelity >= 0.0 && rec.fidelity <= 1.0))
      fail(ErrorClass::parse, where("fidelity outside [0,1]"));
    for (auto part : detail::split(fields[3], ';'))
      rec.frame_rates.push_back(detail::parse_double(part, where("frame_rates")));
    records.emplace(std::move(key), std::move(rec));
  }
  if (!have_header) fail(ErrorClass::parse, origin + ": missing trace header");
  if (!have_ref)
    fail(ErrorClass::parse, origin + ": missing ref_rate directive");
  return TraceEnv(std::move(records), ref_rate);
}

inline TraceEnv load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorClass::io, "cannot open '" + path.string() + "'");
  return parse_trace(in, path.string());
}

inline void write_trace(
    std::ostream& out, double ref_rate,
    const std::vector<std::pair<std::string, EncodeOutcome>>& rows) {
  out << "# ref_rate = " << fmt_double(ref_rate) << '\n';
  out << kTraceHeader << '\n';
  for (const auto& [key, outcome] : rows) {
    out << key << ',' << fmt_double(outcome.total_rate) << ','
        << fmt_double(outcome.fidelity) << ',';
    for (std::size_t i = 0; i < outcome.frame_rates.size(); ++i) {
      if (i) out << ';';
      out << fmt_double(outcome.frame_rates[i]);
    }
    out << '\n';
  }
}

// Dump every mode of the space through the environment, in enumeration order.
inline void dump_trace(std::ostream& out, const Environment& env,
                       const ModeSpace& space) {
  std::vector<std::pair<std::string, EncodeOutcome>> rows;
  for (const ModeSelection& mode : enumerate_modes(space))
    rows.emplace_back(mode_key(mode), env.encode_mode(mode));
  write_trace(out, env.ref_rate(), rows);
}

inline void dump_trace(const std::filesystem::path& path,
                       const Environment& env, const ModeSpace& space) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorClass::io, "cannot write '" + path.string() + "'");
  dump_trace(out, env, space);
  if (!out) fail(ErrorClass::io, "write failed for '" + path.string() + "'");
}

}  // namespace semcode
