#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lsn {

/// Append-only table of sampled scalar diagnostics. Column 0 is always "t"
/// and must be strictly increasing.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  void append(std::vector<double> row);

  bool has(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  double at(std::size_t row, const std::string& name) const;

  bool all_finite() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Column name of the fractional moment M_theta ("M_0.5", "M_0.3333333333").
std::string moment_column_name(double theta);

/// Looks up M_theta, accepting the fixed M0/M1/M2 columns as well.
std::vector<double> moment_column(const TimeSeries& series, double theta);

}  // namespace lsn
