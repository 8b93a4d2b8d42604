#include "rlab/report.hpp"

#include <algorithm>

namespace rlab {

void CheckReport::add(double input, double lhs, double rhs, bool holds) {
  const double margin = rhs - lhs;
  worst_margin_ = points_.empty() ? margin : std::min(worst_margin_, margin);
  points_.push_back({input, lhs, rhs, holds});
  all_hold_ = all_hold_ && holds;
}

std::optional<double> CheckReport::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

}  // namespace rlab
