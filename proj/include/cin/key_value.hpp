// Flat `key = value` documents. Blank lines and lines starting with '#'
// are ignored; keys are unique.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cin {

class KeyValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueDoc {
 public:
  static KeyValueDoc parse(std::string_view text);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  /// Comma-separated numbers.
  std::vector<double> get_doubles(const std::string& key) const;

  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(std::string_view text);
long long parse_int(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
/// Either `start:stop:count` (inclusive, evenly spaced) or a comma list.
std::vector<double> parse_grid(std::string_view text);

}  // namespace cin
