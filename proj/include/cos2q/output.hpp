#pragma once

// Byte-reproducible CSV / JSON writers. Every file opens with the resolved
// configuration so a data file is self-describing.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace cos2q {

/// Shortest decimal that round-trips the double ("nan"/"inf" rejected).
std::string format_number(double value);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& text);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // extra '#' lines after the config header

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
};

class OutputDirectory {
 public:
  /// Creates `root` if needed.
  OutputDirectory(std::filesystem::path root, std::string command, nlohmann::json resolved_config);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

  /// '#'-prefixed header lines: tool, command, config JSON on one line.
  std::vector<std::string> header_lines() const;

  void write_csv(const std::string& name, const CsvTable& table);

  /// Dense grid: first row "theta\\phi,<phi axis>", then "<theta>,<values>".
  void write_grid(const std::string& name, const std::vector<double>& theta_axis, const std::vector<double>& phi_axis,
                  const std::vector<double>& values, const std::string& quantity);

  /// Adds "command" and "config" keys to `payload`.
  void write_json(const std::string& name, nlohmann::json payload);

  /// Free-form text; `body` receives a stream that already holds the header lines.
  void write_text(const std::string& name, const std::function<void(std::ostream&)>& body, bool with_header = true);

 private:
  void commit(const std::string& name, const std::string& contents);

  std::filesystem::path root_;
  std::string command_;
  nlohmann::json config_;
  std::vector<std::string> files_;
};

}  // namespace cos2q
