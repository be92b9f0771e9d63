// gaussnet command-line front end.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaussnet/gaussnet.hpp"

using namespace gaussnet;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> width;
  std::string metrics; // empty: every metric the setting supports
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_metrics = true) {
  cmd->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("-n,--width", c.width, "hidden width (overrides the configuration)");
  if (with_metrics) {
    cmd->add_option("--metrics", c.metrics,
                    "comma-separated subset of ks,tv,w1 (default: all; w1 for several inputs)");
  }
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

ConfigDocument load(const Common& c) {
  ConfigDocument doc =
      c.config.empty() ? ConfigDocument{ActivationSpec::tanh(), NetworkConfig{}, std::nullopt}
                       : load_config(c.config);
  if (c.width) doc.network.width = *c.width;
  validate_config(doc.network, doc.activation);
  return doc;
}

std::uint64_t seed_of(const Common& c, const ConfigDocument& doc) {
  if (c.seed) return *c.seed;
  if (doc.experiment && doc.experiment->contains("seed")) {
    return doc.experiment->at("seed").get<std::uint64_t>();
  }
  return 0;
}

std::vector<Metric> metrics_of(const Common& c, const NetworkConfig& cfg) {
  if (!c.metrics.empty()) return parse_metrics(c.metrics);
  if (cfg.input_count() > 1) return {Metric::W1};
  return {Metric::KS, Metric::TV, Metric::W1};
}

json report_json(const BoundReport& r) {
  json b{{"metric_constant", r.breakdown.metric_constant},
         {"envelope_term", r.breakdown.envelope_term},
         {"geometry_term", r.breakdown.geometry_term}};
  if (r.breakdown.k_tilde) b["k_tilde"] = *r.breakdown.k_tilde;
  if (r.breakdown.spectrum_ratio) b["spectrum_ratio"] = *r.breakdown.spectrum_ratio;
  json j{{"metric", std::string(to_string(r.metric))},
         {"width", r.width},
         {"value", r.value},
         {"sigma_sq", r.sigma_sq},
         {"constant", r.constant},
         {"theorem", r.theorem},
         {"breakdown", b}};
  if (r.spectrum) j["spectrum"] = {{"lambda_max", r.spectrum->first}, {"lambda_min", r.spectrum->second}};
  return j;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

void write_or_print(const std::string& path, const std::function<void(std::FILE*)>& fn) {
  if (path.empty() || path == "-") {
    fn(stdout);
    return;
  }
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  fn(f.get());
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw IoError("non-numeric token '" + tok + "' in " + path);
    }
  }
  return v;
}

json estimate_json(const DistanceEstimate& e) {
  json j{{"metric", std::string(to_string(e.metric))},
         {"value", e.value},
         {"sample_size", e.sample_size},
         {"method", std::string(to_string(e.method))}};
  if (e.bin_count) j["bin_count"] = *e.bin_count;
  return j;
}

int cmd_bound(const Common& c) {
  const auto doc = load(c);
  json out = json::array();
  if (doc.network.input_count() > 1) {
    for (Metric m : metrics_of(c, doc.network)) {
      if (m != Metric::W1) {
        throw UnsupportedMetricError(
            "the multi-input bound is available for W1 only; pass --metrics w1");
      }
      out.push_back(report_json(bound_theorem_3(doc.network, doc.activation, m)));
    }
  } else {
    for (Metric m : metrics_of(c, doc.network)) {
      out.push_back(report_json(single_output_bound(doc.network, doc.activation, m)));
    }
  }
  print(out);
  return 0;
}

int cmd_simulate(const Common& c, std::size_t points, bool reference, const std::string& out) {
  const auto doc = load(c);
  const SeedSpec seed{seed_of(c, doc), 0};
  SampleBatch batch;
  if (reference) {
    batch = doc.network.input_count() == 1
                ? sample_reference(network_variance(doc.network, doc.activation), points, seed)
                : sample_reference(covariance_matrix(doc.network, doc.activation), points, seed);
  } else {
    batch = sample_network(doc.network, doc.activation, points, seed);
  }
  write_or_print(out, [&](std::FILE* f) { write_samples(batch, f); });
  return 0;
}

int cmd_distances(const Common& c, std::size_t points, const std::string& samples_path,
                  std::optional<double> sigma_sq) {
  const auto doc = load(c);
  if (doc.network.input_count() != 1) {
    throw ConfigError("distances compares a single output; the configuration has " +
                      std::to_string(doc.network.input_count()) + " inputs");
  }
  const double s2 = sigma_sq ? *sigma_sq : network_variance(doc.network, doc.activation);
  std::vector<double> sample;
  if (!samples_path.empty()) {
    sample = read_samples(samples_path);
  } else {
    sample = sample_network(doc.network, doc.activation, points, {seed_of(c, doc), 0}).values;
  }
  json est = json::array();
  for (Metric m : metrics_of(c, doc.network)) est.push_back(estimate_json(distance_to_gaussian(m, sample, s2)));
  json j{{"sigma_sq", s2}, {"estimates", est}};
  if (samples_path.empty()) j["width"] = doc.network.width;
  print(j);
  return 0;
}

struct SweepFlags {
  std::string widths;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> points;
  std::string out = ".";
  bool fast = false;
  bool svg = false;
};

int cmd_sweep(const Common& c, const SweepFlags& s) {
  const auto doc = load(c);
  ExperimentConfig ec = experiment_from_document(doc);
  if (s.fast) ec = ec.fast();
  if (!s.widths.empty()) ec.widths = parse_widths(s.widths);
  if (s.reps) ec.replications = *s.reps;
  if (s.points) ec.points = *s.points;
  if (!c.metrics.empty()) ec.metrics = parse_metrics(c.metrics);
  if (c.seed) ec.master_seed = *c.seed;
  ec.threads = c.threads;
  const auto table = run_sweep(ec);

  const std::filesystem::path dir(s.out);
  std::filesystem::create_directories(dir);
  const auto csv = dir / "sweep.csv";
  emit_csv(table, csv, experiment_to_json(ec));
  std::cerr << "wrote " << csv.string() << " and " << meta_path(csv).string() << "\n";
  if (s.svg) {
    for (Metric m : ec.metrics) {
      const auto path = dir / ("sweep_" + std::string(to_string(m)) + ".svg");
      emit_svg(table, m, path);
      std::cerr << "wrote " << path.string() << "\n";
    }
  }
  std::cout << table_to_csv(table);
  for (Metric m : ec.metrics) {
    if (table.rows_for(m).size() < 4) continue;
    try {
      const auto fit = fit_rate(table, m);
      std::printf("# %s log-log slope %.4f (se %.4f)\n", std::string(to_string(m)).c_str(),
                  fit.slope, fit.std_error);
    } catch (const DomainError& e) {
      std::printf("# %s slope unavailable: %s\n", std::string(to_string(m)).c_str(), e.what());
    }
  }
  return 0;
}

int cmd_poincare(const Common& c, std::size_t samples) {
  const auto doc = load(c);
  McOptions opt;
  opt.samples = samples;
  opt.seed = {seed_of(c, doc), 0};
  opt.threads = c.threads;
  json out = json::array();
  auto entry = [](const PoincareEstimate& est, const BoundReport& closed) {
    return json{{"estimate", report_json(est.report)},
                {"std_error", est.std_error},
                {"poincare_sum", est.poincare_sum},
                {"poincare_sum_std_error", est.poincare_sum_std_error},
                {"prefactor", est.prefactor},
                {"samples", est.samples},
                {"closed_form", closed.value}};
  };
  if (doc.network.input_count() > 1) {
    const auto est = poincare_bound_multi_mc(doc.network, doc.activation, opt);
    out.push_back(entry(est, bound_theorem_3(doc.network, doc.activation)));
  } else {
    for (Metric m : metrics_of(c, doc.network)) {
      const auto est = poincare_bound_mc(doc.network, doc.activation, m, opt);
      out.push_back(entry(est, single_output_bound(doc.network, doc.activation, m)));
    }
  }
  print(out);
  return 0;
}

int cmd_relu_growth(const Common& c, const std::string& family, const std::vector<double>& ms) {
  const auto kind = parse_activation_kind(family);
  const std::size_t n = c.width.value_or(100);
  json out = json::array();
  for (Metric m : metrics_of(c, NetworkConfig{})) {
    for (const auto& pt : relu_growth(kind, ms, n, m)) {
      out.push_back({{"m", pt.m},
                     {"envelope", {pt.activation.envelope_a, pt.activation.envelope_b,
                                   pt.activation.envelope_gamma}},
                     {"bound", report_json(pt.report)}});
    }
  }
  print(out);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-approximation bounds and simulations for shallow Gaussian networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kLibraryVersion));

  Common common;

  auto* bound = app.add_subcommand("bound", "closed-form bound as JSON");
  add_common(bound, common);

  auto* simulate = app.add_subcommand("simulate", "dump network (or reference) samples");
  add_common(simulate, common, false);
  std::size_t sim_points = 5000;
  bool reference = false;
  std::string sim_out;
  simulate->add_option("--points", sim_points, "number of draws")->check(CLI::PositiveNumber);
  simulate->add_flag("--reference", reference, "draw from the limiting Gaussian instead");
  simulate->add_option("--out", sim_out, "output file (default stdout)");

  auto* distances = app.add_subcommand("distances", "distance estimates to the limiting Gaussian");
  add_common(distances, common);
  std::size_t dist_points = 5000;
  std::string samples_path;
  std::optional<double> sigma_sq;
  distances->add_option("--points", dist_points, "network draws")->check(CLI::PositiveNumber);
  distances->add_option("--samples", samples_path, "read the sample from a file instead")
      ->check(CLI::ExistingFile);
  distances->add_option("--sigma-sq", sigma_sq, "reference variance (default: computed)");

  auto* sweep = app.add_subcommand("sweep", "width sweep of empirical distances vs bounds");
  add_common(sweep, common);
  SweepFlags sf;
  sweep->add_option("--widths", sf.widths, "k^3:LO..HI or a comma-separated list");
  sweep->add_option("--reps", sf.reps, "replications per width");
  sweep->add_option("--points", sf.points, "points per replication");
  sweep->add_option("--out", sf.out, "output directory");
  sweep->add_flag("--fast", sf.fast, "16 widths x 50 replications x 1000 points");
  sweep->add_flag("--svg", sf.svg, "also write one SVG chart per metric");

  auto* poincare = app.add_subcommand("poincare", "Monte-Carlo second-order Poincare estimate");
  add_common(poincare, common);
  std::size_t mc_samples = 100000;
  poincare->add_option("--samples", mc_samples, "Monte-Carlo draws")->check(CLI::PositiveNumber);

  auto* growth = app.add_subcommand("relu-growth", "bound of the ReLU approximants against m");
  add_common(growth, common);
  std::string family = "softplus-approx";
  std::vector<double> ms{1, 2, 4, 8, 16};
  growth->add_option("--family", family, "softplus-approx or sau-approx");
  growth->add_option("--m", ms, "sharpness values")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bound) return cmd_bound(common);
    if (*simulate) return cmd_simulate(common, sim_points, reference, sim_out);
    if (*distances) return cmd_distances(common, dist_points, samples_path, sigma_sq);
    if (*sweep) return cmd_sweep(common, sf);
    if (*poincare) return cmd_poincare(common, mc_samples);
    if (*growth) return cmd_relu_growth(common, family, ms);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
