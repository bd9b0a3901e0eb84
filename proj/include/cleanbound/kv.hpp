#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cleanbound {

// Formats a double with 17 significant digits, enough to round-trip any
// IEEE-754 binary64 value exactly. All text artifacts use this formatter.
std::string format_double(double v);

std::string format_double_list(const std::vector<double>& v);

// Flat key-value document with dotted keys, one `key = value` pair per line.
// Used for run configs, noise model files, dataset metadata, checkpoints and
// structured reports. Lines starting with '#' are comments. Keys are unique.
class KvDoc {
 public:
  static KvDoc parse(const std::string& text, const std::string& origin = "<string>");
  static KvDoc load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void set_u64(const std::string& key, std::uint64_t value);
  void set_double(const std::string& key, double value);
  void set_double_list(const std::string& key, const std::vector<double>& values);

  bool has(const std::string& key) const;
  void erase(const std::string& key);

  // Typed getters throw ValidationError naming the key on absence/parse
  // failure; the *_or variants substitute a default when the key is absent.
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& dflt) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t dflt) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double dflt) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::vector<std::string> keys() const;

  // Keys are emitted in sorted order so serialization is deterministic.
  std::string serialize() const;
  void save(const std::string& path) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace cleanbound
