#include "csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace lsn {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<double> Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return data[i];
  }
  throw SchemaError("table has no column '" + name + "'");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table read_table(const std::filesystem::path& path, const std::vector<std::string>& required) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file");
  Table t;
  t.columns = split(line);
  t.data.resize(t.columns.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.columns.size()) + " fields");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || end != cells[i].c_str() + cells[i].size()) {
        throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cells[i] + "'");
      }
      t.data[i].push_back(v);
    }
  }
  for (const auto& name : required) t.column(name);
  return t;
}

TimeSeries read_series(const std::filesystem::path& path) {
  const Table t = read_table(path, {"t"});
  if (t.columns.front() != "t") throw SchemaError(path.string() + ": first column must be t");
  TimeSeries s(t.columns);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::vector<double> row(t.columns.size());
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = t.data[c][r];
    s.append(std::move(row));
  }
  return s;
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<const std::vector<double>*>& columns) {
  if (header.size() != columns.size()) throw IoError("write_columns: header and column count differ");
  const std::size_t n = columns.empty() ? 0 : columns.front()->size();
  for (const auto* c : columns) {
    if (c->size() != n) throw IoError("write_columns: columns differ in length");
  }
  auto out = open_out(path);
  std::string buf;
  for (std::size_t i = 0; i < header.size(); ++i) buf += (i ? "," : "") + header[i];
  buf += '\n';
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) buf += ',';
      buf += format_number((*columns[c])[r]);
    }
    buf += '\n';
  }
  out << buf;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_series(const std::filesystem::path& path, const TimeSeries& series) {
  auto out = open_out(path);
  std::string buf;
  const auto& cols = series.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) buf += (i ? "," : "") + cols[i];
  buf += '\n';
  for (std::size_t r = 0; r < series.size(); ++r) {
    const auto& row = series.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) buf += ',';
      buf += format_number(row[c]);
    }
    buf += '\n';
  }
  out << buf;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lsn
