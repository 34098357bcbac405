#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace relaxctl::io {

/// Flat key-value config: one `key = value` (or `key value`) per line,
/// '#' comments. Unknown keys are preserved for the caller to reject.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_config(const std::filesystem::path& path);
KeyValues parse_config(const std::string& text);

double get_double(const KeyValues& kv, const std::string& key, double fallback);
int get_int(const KeyValues& kv, const std::string& key, int fallback);
std::string get_string(const KeyValues& kv, const std::string& key,
                       const std::string& fallback);
std::vector<double> get_double_list(const KeyValues& kv, const std::string& key,
                                    const std::vector<double>& fallback);

/// Shortest round-trip decimal representation; keeps CSV output byte-stable.
std::string format_double(double x);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void write(const std::filesystem::path& path) const;
  static Csv read(const std::filesystem::path& path);
};

}  // namespace relaxctl::io
