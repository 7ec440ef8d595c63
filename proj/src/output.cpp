#include "cos2q/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cos2q/error.hpp"

namespace cos2q {

std::string format_number(double value) {
  if (!std::isfinite(value)) throw NumericalError("non-finite value in output");
  if (value == 0.0) return "0";  // also folds -0
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw InvalidArgument("csv row width does not match the header");
  rows.push_back(std::move(cells));
}

OutputDirectory::OutputDirectory(std::filesystem::path root, std::string command, nlohmann::json resolved_config)
    : root_(std::move(root)), command_(std::move(command)), config_(std::move(resolved_config)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw InvalidArgument("cannot create output directory '" + root_.string() + "'");
  }
}

std::vector<std::string> OutputDirectory::header_lines() const {
  return {"# cos2q " + command_, "# config=" + config_.dump()};
}

void OutputDirectory::write_csv(const std::string& name, const CsvTable& table) {
  std::string text;
  for (const std::string& line : header_lines()) text += line + "\n";
  for (const std::string& note : table.notes) text += "# " + note + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) text += (i ? "," : "") + csv_field(table.columns[i]);
  text += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_field(row[i]);
    text += "\n";
  }
  commit(name, text);
}

void OutputDirectory::write_grid(const std::string& name, const std::vector<double>& theta_axis,
                                 const std::vector<double>& phi_axis, const std::vector<double>& values,
                                 const std::string& quantity) {
  if (values.size() != theta_axis.size() * phi_axis.size()) throw InvalidArgument("grid size does not match its axes");
  std::string text;
  for (const std::string& line : header_lines()) text += line + "\n";
  text += "# grid quantity=" + quantity + " rows=theta columns=phi row-major\n";
  text += "theta\\phi";
  for (double p : phi_axis) text += "," + format_number(p);
  text += "\n";
  for (std::size_t i = 0; i < theta_axis.size(); ++i) {
    text += format_number(theta_axis[i]);
    for (std::size_t j = 0; j < phi_axis.size(); ++j) text += "," + format_number(values[i * phi_axis.size() + j]);
    text += "\n";
  }
  commit(name, text);
}

void OutputDirectory::write_json(const std::string& name, nlohmann::json payload) {
  payload["command"] = command_;
  payload["config"] = config_;
  commit(name, payload.dump(2) + "\n");
}

void OutputDirectory::write_text(const std::string& name, const std::function<void(std::ostream&)>& body,
                                 bool with_header) {
  std::ostringstream out;
  if (with_header) {
    for (const std::string& line : header_lines()) out << line << '\n';
  }
  body(out);
  commit(name, out.str());
}

void OutputDirectory::commit(const std::string& name, const std::string& contents) {
  const std::filesystem::path path = root_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  out.close();
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  files_.push_back(name);
}

}  // namespace cos2q
