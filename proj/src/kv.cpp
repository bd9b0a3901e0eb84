#include "cleanbound/kv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cleanbound/errors.hpp"

namespace cleanbound {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_double_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double_token(const std::string& tok, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE) {
    throw ValidationError("key '" + key + "': cannot parse '" + tok + "' as a number");
  }
  return v;
}

std::uint64_t parse_u64_token(const std::string& tok, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || tok.find('-') != std::string::npos) {
    throw ValidationError("key '" + key + "': cannot parse '" + tok + "' as an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

KvDoc KvDoc::parse(const std::string& text, const std::string& origin) {
  KvDoc doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (doc.entries_.count(key)) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    doc.entries_[key] = value;
  }
  return doc;
}

KvDoc KvDoc::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void KvDoc::set(const std::string& key, const std::string& value) { entries_[key] = value; }
void KvDoc::set_u64(const std::string& key, std::uint64_t value) { entries_[key] = std::to_string(value); }
void KvDoc::set_double(const std::string& key, double value) { entries_[key] = format_double(value); }
void KvDoc::set_double_list(const std::string& key, const std::vector<double>& values) {
  entries_[key] = format_double_list(values);
}

bool KvDoc::has(const std::string& key) const { return entries_.count(key) != 0; }
void KvDoc::erase(const std::string& key) { entries_.erase(key); }

std::string KvDoc::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ValidationError("missing required key '" + key + "'");
  return it->second;
}

std::string KvDoc::get_string_or(const std::string& key, const std::string& dflt) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? dflt : it->second;
}

std::uint64_t KvDoc::get_u64(const std::string& key) const {
  return parse_u64_token(get_string(key), key);
}

std::uint64_t KvDoc::get_u64_or(const std::string& key, std::uint64_t dflt) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? dflt : parse_u64_token(it->second, key);
}

double KvDoc::get_double(const std::string& key) const {
  return parse_double_token(get_string(key), key);
}

double KvDoc::get_double_or(const std::string& key, double dflt) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? dflt : parse_double_token(it->second, key);
}

std::vector<double> KvDoc::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_ws(get_string(key))) out.push_back(parse_double_token(tok, key));
  return out;
}

std::vector<std::uint64_t> KvDoc::get_u64_list(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& tok : split_ws(get_string(key))) out.push_back(parse_u64_token(tok, key));
  return out;
}

std::vector<std::string> KvDoc::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

std::string KvDoc::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void KvDoc::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << serialize();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cleanbound
