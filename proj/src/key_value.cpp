#include "cin/key_value.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace cin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
  KeyValueDoc doc;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw KeyValueError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw KeyValueError(fmt::format("line {}: empty key", line_no));
    if (!doc.values_.emplace(key, value).second) {
      throw KeyValueError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
  }
  return doc;
}

bool KeyValueDoc::has(const std::string& key) const { return values_.contains(key); }

std::optional<std::string> KeyValueDoc::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueDoc::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw KeyValueError(fmt::format("missing key '{}'", key));
  return *v;
}

std::string KeyValueDoc::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueDoc::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_double(*v) : fallback;
}

double KeyValueDoc::require_double(const std::string& key) const { return parse_double(require(key)); }

long long KeyValueDoc::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  return v ? parse_int(*v) : fallback;
}

std::vector<double> KeyValueDoc::get_doubles(const std::string& key) const { return parse_double_list(require(key)); }

std::vector<std::string> KeyValueDoc::keys() const {
  std::vector<std::string> out;
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw KeyValueError(fmt::format("'{}' is not a finite number", text));
  }
  return v;
}

long long parse_int(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw KeyValueError(fmt::format("'{}' is not an integer", text));
  }
  return v;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) out.push_back(parse_double(item));
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return parse_double_list(text);
  if (parts.size() != 3) throw KeyValueError(fmt::format("grid '{}' must be start:stop:count or a list", text));
  const double start = parse_double(parts[0]);
  const double stop = parse_double(parts[1]);
  const long long count = parse_int(parts[2]);
  if (count < 1) throw KeyValueError("grid count must be positive");
  if (count == 1) return {start};
  std::vector<double> out;
  for (long long i = 0; i < count; ++i) out.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace cin
