#include "maxseq/panel_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace maxseq {
namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

PanelData parse_panel_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> labels;
  std::size_t row = 0;
  while (labels.empty() && std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    for (const auto& c : split_row(line)) labels.push_back(trim(c));
  }
  if (labels.empty()) throw ValidationError("empty input");
  const std::size_t k = labels.size();

  std::vector<std::vector<double>> columns(k);
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != k) throw ValidationError("malformed CSV row " + std::to_string(row));
    for (std::size_t c = 0; c < k; ++c) {
      const std::string cell = trim(cells[c]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ValidationError("parse error at (" + std::to_string(row) + "," + std::to_string(c + 1) + ")");
      }
      columns[c].push_back(v);
    }
  }
  if (columns[0].empty()) throw ValidationError("empty input");

  std::vector<double> values;
  values.reserve(columns[0].size() * k);
  for (const auto& col : columns) values.insert(values.end(), col.begin(), col.end());
  return PanelData(columns[0].size(), k, std::move(values), std::move(labels));
}

PanelData load_panel_csv(const std::string& path) { return parse_panel_csv(read_text_file(path)); }

std::string format_panel_csv(const PanelData& panel) {
  std::string out;
  for (std::size_t i = 0; i < panel.k(); ++i) {
    if (i) out += ',';
    out += panel.labels()[i];
  }
  out += '\n';
  char buf[64];
  for (std::size_t t = 0; t < panel.n(); ++t) {
    for (std::size_t i = 0; i < panel.k(); ++i) {
      if (i) out += ',';
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), panel.at(t, i), std::chars_format::general, 17);
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void save_panel_csv(const PanelData& panel, const std::string& path) {
  write_text_file(path, format_panel_csv(panel));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace maxseq
