#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace stabletree::lab {

struct PdCheckConfig {
  double alpha = 1.5;
  std::size_t samples = 100000;
  std::vector<double> xs{1.0, 1.5, 2.0, 3.0};
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  /// Sticks drawn per sample before the tail is completed by a size-biased pick.
  std::size_t max_sticks = 256;
};

struct PdMomentRow {
  double x = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double psi = 0.0;
  double rel_error = 0.0;
};

struct PdCheckReport {
  double alpha = 0.0;
  std::size_t samples = 0;
  double mean_sticks = 0.0;
  std::vector<PdMomentRow> rows;
};

/// Monte-Carlo sum_i Delta_i^x over PD(1/alpha, 1 - 1/alpha) samples against psi(x).
PdCheckReport pd_moment_check(const PdCheckConfig& config);

struct TwoPickReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  double exponent = 0.0;  // f(x) = g(x) = x^exponent
  double quadrature = 0.0;
  double mc_mean = 0.0;
  double mc_std_error = 0.0;
  /// |mc_mean - quadrature| / mc_std_error
  double z = 0.0;
};

/// sum_{i != j} f(Delta_i) f(Delta_j) with f(x) = x^(1/alpha + epsilon/gamma):
/// two-pick quadrature against the Monte-Carlo double sum.
TwoPickReport two_pick_check(double alpha, double epsilon, const PdCheckConfig& config);

nlohmann::json to_json(const PdCheckReport& r);
nlohmann::json to_json(const TwoPickReport& r);

}  // namespace stabletree::lab
