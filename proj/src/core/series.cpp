#include "series.hpp"

#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace lsn {

TimeSeries::TimeSeries(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty() || columns_.front() != "t") throw SchemaError("time series must start with column 't'");
}

void TimeSeries::append(std::vector<double> row) {
  if (row.size() != columns_.size()) throw SchemaError("row width does not match the series schema");
  if (!rows_.empty() && !(row.front() > rows_.back().front())) {
    throw SchemaError("time series rows must have strictly increasing t");
  }
  rows_.push_back(std::move(row));
}

bool TimeSeries::has(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c == name) return true;
  }
  return false;
}

std::size_t TimeSeries::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw SchemaError("time series has no column '" + name + "'");
}

std::vector<double> TimeSeries::column(const std::string& name) const {
  const std::size_t j = index_of(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[j]);
  return out;
}

double TimeSeries::at(std::size_t row, const std::string& name) const { return rows_.at(row)[index_of(name)]; }

bool TimeSeries::all_finite() const {
  for (const auto& r : rows_) {
    for (double v : r) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::string moment_column_name(double theta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "M_%.10g", theta);
  return buf;
}

std::vector<double> moment_column(const TimeSeries& series, double theta) {
  if (theta == 0.0) return series.column("M0");
  if (theta == 1.0) return series.column("M1");
  if (theta == 2.0) return series.column("M2");
  const std::string name = moment_column_name(theta);
  if (!series.has(name)) {
    throw SchemaError("time series is missing fractional moment column '" + name +
                      "' (add it to diagnostics.fractional_moments)");
  }
  return series.column(name);
}

}  // namespace lsn
