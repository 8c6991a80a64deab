#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "series.hpp"

namespace lsn {

/// Column-major numeric table read from a headed CSV file.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  std::vector<double> column(const std::string& name) const;
};

/// %.17g: lossless for doubles and stable across runs.
std::string format_number(double v);

Table read_table(const std::filesystem::path& path, const std::vector<std::string>& required = {});
TimeSeries read_series(const std::filesystem::path& path);

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<const std::vector<double>*>& columns);
void write_series(const std::filesystem::path& path, const TimeSeries& series);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lsn
