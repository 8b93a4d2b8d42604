#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rlab {

struct CheckPoint {
  double input;  // grid coordinate (t, p or x)
  double lhs;
  double rhs;
  bool holds;
};

/// Outcome of verifying one inequality over a grid. all_hold and
/// worst_margin (min of rhs − lhs) are maintained by add().
class CheckReport {
 public:
  explicit CheckReport(std::string name) : name_(std::move(name)) {}

  void add(double input, double lhs, double rhs, bool holds);
  void add_metric(std::string key, double value) { metrics_.emplace_back(std::move(key), value); }

  const std::string& name() const noexcept { return name_; }
  const std::vector<CheckPoint>& points() const noexcept { return points_; }
  bool all_hold() const noexcept { return all_hold_; }
  double worst_margin() const noexcept { return worst_margin_; }
  const std::vector<std::pair<std::string, double>>& metrics() const noexcept { return metrics_; }
  std::optional<double> metric(const std::string& key) const;

 private:
  std::string name_;
  std::vector<CheckPoint> points_;
  bool all_hold_ = true;
  double worst_margin_ = 0.0;
  std::vector<std::pair<std::string, double>> metrics_;
};

}  // namespace rlab
