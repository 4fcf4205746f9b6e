#include "stabletree/lab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "stabletree/errors.hpp"
#include "stabletree/lab/csv.hpp"

namespace stabletree::lab {

std::vector<double> LogGrid::points() const {
  if (automatic()) throw PreconditionError("automatic grid has not been resolved");
  if (points_per_decade < 1) throw ParameterError("points per decade must be positive");
  const auto steps = static_cast<int>(std::lround(decades * points_per_decade));
  std::vector<double> out;
  for (int k = 0; k <= steps; ++k) {
    out.push_back(lo * std::pow(10.0, static_cast<double>(k) / points_per_decade));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (1, 2]");
  if (tree_sizes.empty()) throw ParameterError("tree_sizes must not be empty");
  for (std::size_t n : tree_sizes) {
    if (n < 2) throw ParameterError("tree sizes must be at least 2");
  }
  if (ensemble_size < 1) throw ParameterError("ensemble_size must be at least 1");
  if (workers < 1) throw ParameterError("workers must be at least 1");
  if (lambda_grid.points_per_decade < 1 || t_grid.points_per_decade < 1) {
    throw ParameterError("points per decade must be positive");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParameterError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used, 0);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParameterError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  bool have_output = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + " lacks '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "alpha") {
      c.alpha = to_double(key, value);
    } else if (key == "tree_sizes") {
      c.tree_sizes.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) c.tree_sizes.push_back(to_uint(key, trim(item)));
    } else if (key == "ensemble_size") {
      c.ensemble_size = to_uint(key, value);
    } else if (key == "lambda_min") {
      c.lambda_grid.lo = value == "auto" ? 0.0 : to_double(key, value);
    } else if (key == "lambda_decades") {
      c.lambda_grid.decades = value == "auto" ? 0.0 : to_double(key, value);
    } else if (key == "points_per_decade") {
      c.lambda_grid.points_per_decade = static_cast<int>(to_uint(key, value));
    } else if (key == "t_min") {
      c.t_grid.lo = value == "auto" ? 0.0 : to_double(key, value);
    } else if (key == "t_decades") {
      c.t_grid.decades = value == "auto" ? 0.0 : to_double(key, value);
    } else if (key == "t_points_per_decade") {
      c.t_grid.points_per_decade = static_cast<int>(to_uint(key, value));
    } else if (key == "eigen_count") {
      c.eigen_count = to_uint(key, value);
    } else if (key == "master_seed") {
      c.master_seed = to_uint(key, value);
    } else if (key == "workers") {
      c.workers = to_uint(key, value);
    } else if (key == "output_dir") {
      c.output_dir = value;
      have_output = true;
    } else if (key == "fit_lambda_lo") {
      c.fit_lambda_lo = to_double(key, value);
    } else if (key == "fit_lambda_hi") {
      c.fit_lambda_hi = to_double(key, value);
    } else if (key == "fit_t_lo") {
      c.fit_t_lo = to_double(key, value);
    } else if (key == "fit_t_hi") {
      c.fit_t_hi = to_double(key, value);
    } else {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
  if (!have_output) {
    if (const char* env = std::getenv("STABLETREE_OUTPUT_DIR")) c.output_dir = env;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path);
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "tree_sizes = ";
  for (std::size_t i = 0; i < c.tree_sizes.size(); ++i) out << (i ? "," : "") << c.tree_sizes[i];
  out << "\nensemble_size = " << c.ensemble_size << "\n";
  out << "lambda_min = " << format_double(c.lambda_grid.lo) << "\n";
  out << "lambda_decades = " << format_double(c.lambda_grid.decades) << "\n";
  out << "points_per_decade = " << c.lambda_grid.points_per_decade << "\n";
  out << "t_min = " << format_double(c.t_grid.lo) << "\n";
  out << "t_decades = " << format_double(c.t_grid.decades) << "\n";
  out << "t_points_per_decade = " << c.t_grid.points_per_decade << "\n";
  out << "eigen_count = " << c.eigen_count << "\n";
  out << "master_seed = " << c.master_seed << "\n";
  out << "workers = " << c.workers << "\n";
  if (!c.output_dir.empty()) out << "output_dir = " << c.output_dir << "\n";
  if (c.fit_lambda_lo > 0) out << "fit_lambda_lo = " << format_double(c.fit_lambda_lo) << "\n";
  if (c.fit_lambda_hi > 0) out << "fit_lambda_hi = " << format_double(c.fit_lambda_hi) << "\n";
  if (c.fit_t_lo > 0) out << "fit_t_lo = " << format_double(c.fit_t_lo) << "\n";
  if (c.fit_t_hi > 0) out << "fit_t_hi = " << format_double(c.fit_t_hi) << "\n";
}

}  // namespace stabletree::lab
