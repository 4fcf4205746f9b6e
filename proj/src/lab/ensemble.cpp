#include "stabletree/lab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "stabletree/errors.hpp"
#include "stabletree/lab/csv.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/treegen.hpp"

namespace stabletree::lab {

std::size_t feasible_size(double alpha, std::size_t n) {
  if (alpha == 2.0 && n % 2 == 0) return n + 1;
  return n;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t size_index, std::size_t replicate) {
  return derive_seed(master, size_index + 1, replicate + 1);
}

namespace {

struct SampledTree {
  MetricTree tree;
  SpectralOperator neumann;
  SpectralOperator dirichlet;
};

SampledTree make_tree(const OffspringLaw& law, double alpha, std::size_t n, std::uint64_t seed) {
  SampledTree s;
  s.tree = rescale_to_metric(sample_conditioned_tree(law, n, derive_seed(seed, 0)), alpha);
  pick_mass_vertex(s.tree, derive_seed(seed, 1));
  s.neumann = SpectralOperator::assemble(s.tree);
  const Vertex b[2] = {s.tree.root, *s.tree.marked};
  s.dirichlet = SpectralOperator::assemble(s.tree, b);
  return s;
}

double round_up_decades(double ratio, int per_decade) {
  const double d = std::log10(ratio);
  return std::ceil(d * per_decade - 1e-9) / per_decade;
}

void resolve_grids(const ExperimentConfig& config, const OffspringLaw& law, std::size_t size_index,
                   SizeBlock& block) {
  LogGrid lg = config.lambda_grid;
  LogGrid tg = config.t_grid;
  const bool need_t = config.eigen_count > 0 && tg.automatic();
  if (lg.automatic() || need_t) {
    const SampledTree pilot =
        make_tree(law, config.alpha, block.n, derive_seed(config.master_seed, size_index + 1, 0));
    if (lg.automatic()) {
      const double lo = 0.1 / (diameter(pilot.tree) * pilot.tree.total_mass());
      const auto target = static_cast<std::int64_t>(0.5 * static_cast<double>(pilot.dirichlet.finite_dimension()));
      double hi = lo;
      while (count_below_many(pilot.dirichlet, std::span<const double>(&hi, 1))[0] < std::max<std::int64_t>(target, 1)) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw DivergenceError("no lambda reaches half the Dirichlet spectrum");
      }
      lg.lo = lo;
      lg.decades = round_up_decades(hi / lo, lg.points_per_decade);
    }
    if (need_t) {
      const std::size_t k = std::min(config.eigen_count, pilot.neumann.finite_dimension());
      const std::vector<double> eigs = eigen_extract(pilot.neumann, k);
      const std::size_t first = std::min(pilot.neumann.kernel_dimension(), k - 1);
      const double n = static_cast<double>(pilot.neumann.finite_dimension());
      const double t_lo = eigs.back() > 0.0 ? 1.5 * std::log(100.0 * n) / eigs.back() : 1.0;
      const double t_hi = eigs[first] > 0.0 ? 3.0 / eigs[first] : 10.0 * t_lo;
      tg.lo = t_lo;
      tg.decades = round_up_decades(std::max(t_hi / t_lo, 10.0), tg.points_per_decade);
    }
  }
  block.lambdas = lg.points();
  if (config.eigen_count > 0) block.ts = tg.points();
}

ReplicateResult run_replicate(const ExperimentConfig& config, const OffspringLaw& law, const SizeBlock& block,
                              std::size_t replicate, std::uint64_t seed) {
  ReplicateResult r;
  r.replicate = replicate;
  r.seed = seed;
  const SampledTree s = make_tree(law, config.alpha, block.n, seed);
  r.curve = counting_curve(s.neumann, s.dirichlet, block.lambdas);
  r.first = first_eig_bound_check(s.neumann, s.dirichlet, s.tree);
  r.diameter = r.first.diameter;
  const std::vector<double> dist = distances_from(s.tree, s.tree.root);
  r.height = *std::max_element(dist.begin(), dist.end());
  if (config.eigen_count > 0) {
    const std::size_t k = std::min(config.eigen_count, s.neumann.finite_dimension());
    const std::vector<double> eigs = eigen_extract(s.neumann, k);
    for (double t : block.ts) {
      const HeatTrace h =
          heat_trace(eigs, t, s.neumann.finite_dimension(), std::numeric_limits<double>::infinity());
      r.heat.push_back(h.value);
      r.heat_bound.push_back(h.truncation_bound);
    }
  }
  return r;
}

}  // namespace

Dataset run_ensemble(const ExperimentConfig& config) {
  config.validate();
  const OffspringLaw law(config.alpha);
  Dataset data;
  data.config = config;

  struct Task {
    std::size_t block;
    std::size_t replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < config.tree_sizes.size(); ++s) {
    SizeBlock block;
    block.requested_n = config.tree_sizes[s];
    block.n = feasible_size(config.alpha, block.requested_n);
    resolve_grids(config, law, s, block);
    block.replicates.resize(config.ensemble_size);
    data.blocks.push_back(std::move(block));
    for (std::size_t r = 0; r < config.ensemble_size; ++r) tasks.push_back({s, r});
  }

  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      SizeBlock& block = data.blocks[t.block];
      const std::uint64_t seed = replicate_seed(config.master_seed, t.block, t.replicate);
      try {
        block.replicates[t.replicate] = run_replicate(config, law, block, t.replicate, seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(config.workers, tasks.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    const SizeBlock& block = data.blocks[tasks[i].block];
    const std::string where = "alpha=" + format_double(config.alpha) + " n=" + std::to_string(block.n) +
                              " seed=" + std::to_string(replicate_seed(config.master_seed, tasks[i].block,
                                                                       tasks[i].replicate));
    try {
      std::rethrow_exception(errors[i]);
    } catch (const StructuralFailure& e) {
      throw StructuralFailure(where + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return data;
}

void write_curves_csv(std::ostream& os, const Dataset& data) {
  CsvRow(os) << "alpha" << "n" << "replicate" << "seed" << "lambda" << "N" << "N_shifted" << "N_dirichlet";
  for (const SizeBlock& b : data.blocks) {
    for (const ReplicateResult& r : b.replicates) {
      for (std::size_t j = 0; j < r.curve.lambdas.size(); ++j) {
        CsvRow(os) << data.config.alpha << b.n << r.replicate << r.seed << r.curve.lambdas[j]
                   << r.curve.neumann[j] << r.curve.shifted[j] << r.curve.dirichlet[j];
      }
    }
  }
}

void write_heat_csv(std::ostream& os, const Dataset& data) {
  CsvRow(os) << "alpha" << "n" << "replicate" << "seed" << "t" << "trace" << "truncation_bound";
  for (const SizeBlock& b : data.blocks) {
    for (const ReplicateResult& r : b.replicates) {
      for (std::size_t j = 0; j < r.heat.size(); ++j) {
        CsvRow(os) << data.config.alpha << b.n << r.replicate << r.seed << b.ts[j] << r.heat[j] << r.heat_bound[j];
      }
    }
  }
}

void write_checks_csv(std::ostream& os, const Dataset& data) {
  CsvRow(os) << "alpha" << "n" << "replicate" << "seed" << "diameter" << "height" << "total_mass"
             << "lambda1_dirichlet" << "lambda1_neumann_nonzero" << "dirichlet_ratio" << "neumann_ratio"
             << "bracketing";
  for (const SizeBlock& b : data.blocks) {
    for (const ReplicateResult& r : b.replicates) {
      CsvRow(os) << data.config.alpha << b.n << r.replicate << r.seed << r.diameter << r.height
                 << r.first.total_mass << r.first.dirichlet_first << r.first.neumann_first_nonzero
                 << r.first.dirichlet_ratio << r.first.neumann_ratio << "ok";
    }
  }
}

void write_dataset(const Dataset& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p(dir);
  {
    std::ofstream os(p / "curves.csv");
    write_curves_csv(os, data);
  }
  {
    std::ofstream os(p / "heat.csv");
    write_heat_csv(os, data);
  }
  {
    std::ofstream os(p / "checks.csv");
    write_checks_csv(os, data);
  }
  {
    std::ofstream os(p / "config.txt");
    write_config(os, data.config);
  }
}

std::vector<double> mean_dirichlet(const SizeBlock& block) {
  std::vector<double> m(block.lambdas.size(), 0.0);
  for (const ReplicateResult& r : block.replicates) {
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += static_cast<double>(r.curve.dirichlet[j]);
  }
  for (double& x : m) x /= static_cast<double>(std::max<std::size_t>(1, block.replicates.size()));
  return m;
}

std::vector<double> mean_heat(const SizeBlock& block) {
  std::vector<double> m(block.ts.size(), 0.0);
  for (const ReplicateResult& r : block.replicates) {
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += r.heat[j];
  }
  for (double& x : m) x /= static_cast<double>(std::max<std::size_t>(1, block.replicates.size()));
  return m;
}

}  // namespace stabletree::lab
