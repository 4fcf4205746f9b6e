#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stabletree/decomp.hpp"
#include "stabletree/errors.hpp"
#include "stabletree/lab/config.hpp"
#include "stabletree/lab/csv.hpp"
#include "stabletree/lab/experiment.hpp"
#include "stabletree/lab/pd_checks.hpp"
#include "stabletree/metric_tree.hpp"
#include "stabletree/renewal.hpp"
#include "stabletree/simd/inertia.hpp"
#include "stabletree/spectra.hpp"
#include "stabletree/treegen.hpp"

using namespace stabletree;

namespace {

constexpr int kExitError = 1;
constexpr int kExitStructural = 2;

// Output goes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ParameterError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

MetricTree load_tree(const std::string& path) {
  if (path == "-") return read_tree(std::cin);
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open tree file " + path);
  return read_tree(in);
}

std::vector<double> resolve_lambdas(const std::vector<double>& explicit_lambdas, double lo, double decades, int ppd) {
  if (!explicit_lambdas.empty()) return explicit_lambdas;
  return lab::LogGrid{lo, decades, ppd}.points();
}

struct SampleArgs {
  double alpha = 1.5;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  bool unit = false;
  bool mark = false;
  std::string out;
};

struct CountArgs {
  std::string tree;
  std::vector<double> lambdas;
  double lo = 0.1;
  double decades = 3.0;
  int ppd = 16;
  std::uint64_t seed = 1;
  std::string out;
};

struct SpectrumArgs {
  std::string tree;
  std::size_t k = 10;
  bool dirichlet = false;
  double rel_tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out;
};

struct DecomposeArgs {
  std::string tree;
  double alpha = 1.5;
  int depth = 1;
  std::uint64_t seed = 1;
  bool rescale = true;
  std::string out;
};

struct PdArgs {
  lab::PdCheckConfig config;
  std::optional<double> epsilon;
  std::string out;
};

struct RenewalArgs {
  double alpha = 1.5;
  std::string out;
};

struct ExperimentArgs {
  std::string config;
  std::string output_dir;
  std::optional<std::size_t> workers;
};

void ensure_mark(MetricTree& tree, std::uint64_t seed) {
  if (!tree.marked) pick_mass_vertex(tree, seed);
}

int run_sample(const SampleArgs& a) {
  const OffspringLaw law(a.alpha);
  MetricTree tree = sample_conditioned_tree(law, a.n, derive_seed(a.seed, 0));
  if (!a.unit) tree = rescale_to_metric(std::move(tree), a.alpha);
  if (a.mark) pick_mass_vertex(tree, derive_seed(a.seed, 1));
  Output out(a.out);
  write_tree(out.stream(), tree);
  return 0;
}

int run_count(const CountArgs& a) {
  MetricTree tree = load_tree(a.tree);
  ensure_mark(tree, a.seed);
  const SpectralOperator neumann = SpectralOperator::assemble(tree);
  const Vertex b[2] = {tree.root, *tree.marked};
  const SpectralOperator dirichlet = SpectralOperator::assemble(tree, b);
  const CountingCurve c = counting_curve(neumann, dirichlet, resolve_lambdas(a.lambdas, a.lo, a.decades, a.ppd));
  Output out(a.out);
  lab::CsvRow(out.stream()) << "lambda" << "N" << "N_shifted" << "N_dirichlet";
  for (std::size_t j = 0; j < c.lambdas.size(); ++j) {
    lab::CsvRow(out.stream()) << c.lambdas[j] << c.neumann[j] << c.shifted[j] << c.dirichlet[j];
  }
  return 0;
}

int run_spectrum(const SpectrumArgs& a) {
  MetricTree tree = load_tree(a.tree);
  SpectralOperator op;
  if (a.dirichlet) {
    ensure_mark(tree, a.seed);
    const Vertex b[2] = {tree.root, *tree.marked};
    op = SpectralOperator::assemble(tree, b);
  } else {
    op = SpectralOperator::assemble(tree);
  }
  const std::vector<double> eigs = eigen_extract(op, std::min(a.k, op.finite_dimension()), a.rel_tol);
  Output out(a.out);
  lab::CsvRow(out.stream()) << "index" << "eigenvalue";
  for (std::size_t i = 0; i < eigs.size(); ++i) lab::CsvRow(out.stream()) << i + 1 << eigs[i];
  return 0;
}

int run_decompose(const DecomposeArgs& a) {
  MetricTree tree = load_tree(a.tree);
  ensure_mark(tree, derive_seed(a.seed, 0));
  Output out(a.out);
  if (a.depth <= 1) {
    write_records_jsonl(out.stream(), decompose(tree, a.alpha, a.seed, DecomposeOptions{.rescale = a.rescale}));
  } else {
    write_records_jsonl(out.stream(), recurse(tree, a.alpha, a.depth, a.seed));
  }
  return 0;
}

int run_pd_check(const PdArgs& a) {
  nlohmann::json report = to_json(lab::pd_moment_check(a.config));
  if (a.epsilon) report["two_pick"] = to_json(lab::two_pick_check(a.config.alpha, *a.epsilon, a.config));
  Output out(a.out);
  out.stream() << report.dump(2) << '\n';
  return 0;
}

int run_renewal(const RenewalArgs& a) {
  Output out(a.out);
  out.stream() << renewal_report(StableParams::from_alpha(a.alpha)).dump(2) << '\n';
  return 0;
}

int run_experiment_cmd(const ExperimentArgs& a) {
  lab::ExperimentConfig config = lab::load_config(a.config);
  if (!a.output_dir.empty()) config.output_dir = a.output_dir;
  if (a.workers) config.workers = *a.workers;
  const nlohmann::json report = lab::run_experiment(config);
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral experiments on stable Galton-Watson trees"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--simd", isa, "Force the inertia kernel: scalar or avx2")->check(CLI::IsMember({"scalar", "avx2"}));

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sample a conditioned tree and write it as a tree file");
  sample->add_option("--alpha", sa.alpha, "Stability index in (1, 2]")->required();
  sample->add_option("-n,--size", sa.n, "Number of vertices")->required();
  sample->add_option("--seed", sa.seed);
  sample->add_flag("--unit", sa.unit, "Keep unit edge lengths and masses");
  sample->add_flag("--mark", sa.mark, "Pick a mass-distributed marked vertex");
  sample->add_option("-o,--output", sa.out);

  CountArgs ca;
  auto* count = app.add_subcommand("count", "Eigenvalue counting curves of a tree file as CSV");
  count->add_option("tree", ca.tree, "Tree file ('-' for stdin)")->required();
  count->add_option("--lambda", ca.lambdas, "Explicit lambda values");
  count->add_option("--lambda-min", ca.lo);
  count->add_option("--decades", ca.decades);
  count->add_option("--points-per-decade", ca.ppd);
  count->add_option("--seed", ca.seed, "Seed for the mark when the file has none");
  count->add_option("-o,--output", ca.out);

  SpectrumArgs pa;
  auto* spectrum = app.add_subcommand("spectrum", "Smallest k eigenvalues of a tree file as CSV");
  spectrum->add_option("tree", pa.tree)->required();
  spectrum->add_option("-k,--count", pa.k);
  spectrum->add_flag("--dirichlet", pa.dirichlet, "Clamp at the root and the mark");
  spectrum->add_option("--rel-tol", pa.rel_tol);
  spectrum->add_option("--seed", pa.seed);
  spectrum->add_option("-o,--output", pa.out);

  DecomposeArgs da;
  auto* dec = app.add_subcommand("decompose", "Spinal decomposition records as JSON lines");
  dec->add_option("tree", da.tree)->required();
  dec->add_option("--alpha", da.alpha)->required();
  dec->add_option("--depth", da.depth);
  dec->add_option("--seed", da.seed);
  dec->add_flag("!--no-rescale", da.rescale, "Keep components in the parent's units");
  dec->add_option("-o,--output", da.out);

  PdArgs pd;
  auto* pdc = app.add_subcommand("pd-check", "Monte-Carlo moments of Poisson-Dirichlet samples");
  pdc->add_option("--alpha", pd.config.alpha)->required();
  pdc->add_option("--samples", pd.config.samples);
  pdc->add_option("--x", pd.config.xs, "Moment exponents");
  pdc->add_option("--seed", pd.config.seed);
  pdc->add_option("--workers", pd.config.workers);
  pdc->add_option("--max-sticks", pd.config.max_sticks);
  pdc->add_option("--two-pick-epsilon", pd.epsilon, "Also run the two-pick check at this epsilon");
  pdc->add_option("-o,--output", pd.out);

  RenewalArgs ra;
  auto* ren = app.add_subcommand("renewal", "Renewal constants and their validation");
  ren->add_option("--alpha", ra.alpha)->required();
  ren->add_option("-o,--output", ra.out);

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "Run an ensemble from a config file");
  exp->add_option("config", ea.config)->required()->check(CLI::ExistingFile);
  exp->add_option("--output-dir", ea.output_dir);
  exp->add_option("--workers", ea.workers);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) simd::set_isa_override(isa == "avx2" ? simd::Isa::Avx2 : simd::Isa::Scalar);
    if (*sample) return run_sample(sa);
    if (*count) return run_count(ca);
    if (*spectrum) return run_spectrum(pa);
    if (*dec) return run_decompose(da);
    if (*pdc) return run_pd_check(pd);
    if (*ren) return run_renewal(ra);
    if (*exp) return run_experiment_cmd(ea);
  } catch (const StructuralFailure& e) {
    std::cerr << "structural failure: " << e.what() << '\n';
    return kExitStructural;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
