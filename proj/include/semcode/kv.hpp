#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semcode/error.hpp"

namespace semcode {

// %.17g round-trips every finite double through strtod.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_double_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, const std::string& where) {
  std::string tmp(trim(s));
  if (tmp.empty()) fail(ErrorClass::parse, where + ": empty number");
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size())
    fail(ErrorClass::parse, where + ": bad number '" + tmp + "'");
  return v;
}

inline long long parse_int(std::string_view s, const std::string& where) {
  std::string tmp(trim(s));
  if (tmp.empty()) fail(ErrorClass::parse, where + ": empty integer");
  char* end = nullptr;
  long long v = std::strtoll(tmp.c_str(), &end, 10);
  if (end != tmp.c_str() + tmp.size())
    fail(ErrorClass::parse, where + ": bad integer '" + tmp + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace detail

// Line-oriented `key = value` document. Blank lines and lines whose first
// non-space character is '#' are ignored. Keys are unique; insertion order
// is preserved on serialization so output is canonical.
class KvDoc {
 public:
  void set(std::string key, std::string value) {
    auto it = index_.find(key);
    if (it != index_.end()) {
      entries_[it->second].second = std::move(value);
      return;
    }
    index_.emplace(key, entries_.size());
    entries_.emplace_back(std::move(key), std::move(value));
  }

  void set_i64(const std::string& key, long long v) { set(key, std::to_string(v)); }
  void set_u64(const std::string& key, unsigned long long v) { set(key, std::to_string(v)); }
  void set_f64(const std::string& key, double v) { set(key, fmt_double(v)); }

  template <typename T>
  void set_list(const std::string& key, const std::vector<T>& vals) {
    std::string s;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_floating_point_v<T>)
        s += fmt_double(vals[i]);
      else
        s += std::to_string(vals[i]);
    }
    set(key, s);
  }

  bool has(const std::string& key) const { return index_.count(key) != 0; }

  const std::string& raw(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end())
      fail(ErrorClass::parse, origin_ + ": missing key '" + key + "'");
    return entries_[it->second].second;
  }

  std::string get_str(const std::string& key) const { return raw(key); }
  std::string get_str(const std::string& key, const std::string& dflt) const {
    return has(key) ? raw(key) : dflt;
  }

  long long get_i64(const std::string& key) const {
    return detail::parse_int(raw(key), origin_ + ": key '" + key + "'");
  }
  long long get_i64(const std::string& key, long long dflt) const {
    return has(key) ? get_i64(key) : dflt;
  }

  unsigned long long get_u64(const std::string& key) const {
    std::string tmp(detail::trim(raw(key)));
    char* end = nullptr;
    unsigned long long v = std::strtoull(tmp.c_str(), &end, 10);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
      fail(ErrorClass::parse, origin_ + ": key '" + key + "': bad integer '" + tmp + "'");
    return v;
  }
  unsigned long long get_u64(const std::string& key, unsigned long long dflt) const {
    return has(key) ? get_u64(key) : dflt;
  }

  double get_f64(const std::string& key) const {
    return detail::parse_double(raw(key), origin_ + ": key '" + key + "'");
  }
  double get_f64(const std::string& key, double dflt) const {
    return has(key) ? get_f64(key) : dflt;
  }

  std::vector<double> get_f64_list(const std::string& key) const {
    std::vector<double> out;
    for (auto part : detail::split(raw(key), ','))
      out.push_back(detail::parse_double(part, origin_ + ": key '" + key + "'"));
    return out;
  }

  std::vector<int> get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (auto part : detail::split(raw(key), ','))
      out.push_back(static_cast<int>(detail::parse_int(part, origin_ + ": key '" + key + "'")));
    return out;
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  const std::string& origin() const { return origin_; }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
      out += k;
      out += " = ";
      out += v;
      out += '\n';
    }
    return out;
  }

  static KvDoc parse(std::istream& in, const std::string& origin) {
    KvDoc doc;
    doc.origin_ = origin;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv = detail::trim(line);
      if (sv.empty() || sv.front() == '#') continue;
      std::size_t eq = sv.find('=');
      if (eq == std::string_view::npos)
        fail(ErrorClass::parse,
             origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      std::string key(detail::trim(sv.substr(0, eq)));
      std::string value(detail::trim(sv.substr(eq + 1)));
      if (key.empty())
        fail(ErrorClass::parse, origin + ":" + std::to_string(lineno) + ": empty key");
      if (doc.has(key))
        fail(ErrorClass::parse,
             origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      doc.set(std::move(key), std::move(value));
    }
    return doc;
  }

  static KvDoc load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorClass::io, "cannot open '" + path.string() + "'");
    return parse(in, path.string());
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorClass::io, "cannot write '" + path.string() + "'");
    out << serialize();
    if (!out) fail(ErrorClass::io, "write failed for '" + path.string() + "'");
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
  std::string origin_ = "<kv>";
};

}  // namespace semcode
