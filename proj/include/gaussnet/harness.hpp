#ifndef GAUSSNET_HARNESS_HPP_
#define GAUSSNET_HARNESS_HPP_

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/version.hpp>

#include "gaussnet/bounds.hpp"
#include "gaussnet/config_io.hpp"
#include "gaussnet/distances.hpp"
#include "gaussnet/errors.hpp"
#include "gaussnet/gauss_moments.hpp"
#include "gaussnet/model.hpp"
#include "gaussnet/parallel.hpp"
#include "gaussnet/rng.hpp"
#include "gaussnet/sampler.hpp"

namespace gaussnet {

inline constexpr std::string_view kLibraryVersion = "1.0.0";
inline constexpr std::string_view kNormalMethod = "philox4x32-10/boost-ziggurat";

/// {k^3 : k = lo..hi}.
inline std::vector<std::size_t> cube_widths(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> w;
  for (std::size_t k = lo; k <= hi; ++k) w.push_back(k * k * k);
  return w;
}

/// Parses "k^3:1..16" or an explicit comma-separated list such as "1,8,27".
inline std::vector<std::size_t> parse_widths(std::string_view text) {
  auto to_size = [&](std::string_view s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(std::string(s), &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
      throw ConfigError("bad width specification '" + std::string(text) + "'");
    }
    return static_cast<std::size_t>(v);
  };
  constexpr std::string_view prefix = "k^3:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto range = text.substr(prefix.size());
    const auto dots = range.find("..");
    if (dots == std::string_view::npos) {
      throw ConfigError("bad width range '" + std::string(text) + "', expected k^3:LO..HI");
    }
    return cube_widths(to_size(range.substr(0, dots)), to_size(range.substr(dots + 2)));
  }
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(to_size(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<Metric> parse_metrics(std::string_view text) {
  std::vector<Metric> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_metric(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct ExperimentConfig {
  std::vector<std::size_t> widths = cube_widths(1, 16);
  std::size_t replications = 500;
  std::size_t points = 5000;
  std::vector<Metric> metrics{Metric::KS, Metric::TV, Metric::W1};
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  ActivationSpec activation = ActivationSpec::tanh();
  /// Everything but the width, which the sweep sets.
  NetworkConfig network;

  /// 16 widths x 50 replications x 1000 points.
  [[nodiscard]] ExperimentConfig fast() const {
    ExperimentConfig c = *this;
    c.widths = cube_widths(1, 16);
    c.replications = 50;
    c.points = 1000;
    return c;
  }
};

inline void validate_experiment(const ExperimentConfig& ec) {
  if (ec.widths.empty()) throw ConfigError("at least one width is required");
  for (std::size_t i = 0; i < ec.widths.size(); ++i) {
    if (ec.widths[i] == 0) throw ConfigError("width must be >= 1");
    if (i > 0 && ec.widths[i] <= ec.widths[i - 1]) {
      throw ConfigError("widths must be strictly increasing");
    }
  }
  if (ec.replications < 2) throw ConfigError("replications must be >= 2");
  if (ec.points < 1) throw ConfigError("points per replication must be >= 1");
  if (ec.metrics.empty()) throw ConfigError("at least one metric is required");
  for (std::size_t i = 0; i < ec.metrics.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (ec.metrics[i] == ec.metrics[k]) throw ConfigError("metrics must be distinct");
    }
    if (ec.metrics[i] == Metric::TV && ec.points < 100) {
      throw ConfigError("the TV estimator needs at least 100 points per replication");
    }
  }
  if (ec.network.input_count() != 1) throw ConfigError("the sweep needs a single-input network");
  validate_config(ec.network, ec.activation);
}

/// Applies an "experiment" JSON fragment on top of ec.
inline ExperimentConfig apply_experiment_json(ExperimentConfig ec, const json& j) {
  detail::reject_unknown_keys(j, "experiment",
                              {"widths", "replications", "points", "metrics", "seed", "threads"});
  try {
    if (j.contains("widths")) {
      const auto& w = j.at("widths");
      ec.widths = w.is_string() ? parse_widths(w.get<std::string>())
                                : w.get<std::vector<std::size_t>>();
    }
    if (j.contains("replications")) ec.replications = j.at("replications").get<std::size_t>();
    if (j.contains("points")) ec.points = j.at("points").get<std::size_t>();
    if (j.contains("metrics")) {
      ec.metrics.clear();
      for (const auto& m : j.at("metrics")) ec.metrics.push_back(parse_metric(m.get<std::string>()));
    }
    if (j.contains("seed")) ec.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) ec.threads = j.at("threads").get<unsigned>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
  return ec;
}

inline ExperimentConfig experiment_from_document(const ConfigDocument& doc) {
  ExperimentConfig ec;
  ec.activation = doc.activation;
  ec.network = doc.network;
  if (doc.experiment) ec = apply_experiment_json(std::move(ec), *doc.experiment);
  return ec;
}

inline json experiment_to_json(const ExperimentConfig& ec) {
  std::vector<std::string> metrics;
  for (auto m : ec.metrics) metrics.emplace_back(to_string(m));
  return json{{"widths", ec.widths},
              {"replications", ec.replications},
              {"points", ec.points},
              {"metrics", metrics},
              {"seed", ec.master_seed}};
}

/// Stream of replication r at width n. The width occupies the upper 32 bits so
/// different widths never share random numbers.
inline SeedSpec replication_seed(std::uint64_t master, std::size_t width, std::size_t r) {
  return {master, (static_cast<std::uint64_t>(width) << 32) | static_cast<std::uint64_t>(r)};
}

struct SweepRow {
  std::size_t width = 0;
  Metric metric = Metric::KS;
  double mean = 0.0;
  double p025 = 0.0;
  double p975 = 0.0;
  double bound = 0.0;
  /// Standard error of the mean over replications (kept in the .meta.json).
  double std_error = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version{kLibraryVersion};

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  Provenance provenance;

  [[nodiscard]] std::vector<SweepRow> rows_for(Metric m) const {
    std::vector<SweepRow> out;
    for (const auto& r : rows)
      if (r.metric == m) out.push_back(r);
    return out;
  }
  [[nodiscard]] const SweepRow& row(std::size_t width, Metric m) const {
    for (const auto& r : rows)
      if (r.width == width && r.metric == m) return r;
    throw DomainError("no row for width " + std::to_string(width) + " and metric " +
                      std::string(to_string(m)));
  }

  friend bool operator==(const SweepTable&, const SweepTable&) = default;
};

/// Nearest-rank percentile of sorted data: the ceil(P/100 * N)-th smallest.
inline double nearest_rank(const std::vector<double>& sorted, double percent) {
  if (sorted.empty()) throw DomainError("percentile of an empty sample");
  const double rank = std::ceil(percent / 100.0 * static_cast<double>(sorted.size()));
  const auto k = static_cast<std::size_t>(std::clamp(rank, 1.0, double(sorted.size())));
  return sorted[k - 1];
}

/// For every width and replication r, draws `points` network outputs on the
/// stream replication_seed(seed, width, r), measures each metric against
/// N(0, sigma^2), and aggregates mean and 2.5 / 97.5 nearest-rank percentiles
/// per width. Output does not depend on the thread count.
inline SweepTable run_sweep(const ExperimentConfig& ec) {
  validate_experiment(ec);
  const double sigma_sq = network_variance(ec.network, ec.activation);
  if (!(sigma_sq > 0.0)) throw DomainError("network output variance is zero");
  const double sigma = std::sqrt(sigma_sq);
  const std::size_t reps = ec.replications;
  const std::size_t nm = ec.metrics.size();
  const bool need_w1 = std::find(ec.metrics.begin(), ec.metrics.end(), Metric::W1) !=
                       ec.metrics.end();
  const std::vector<double> quantiles =
      need_w1 ? plugin_quantiles(ec.points) : std::vector<double>{};

  const std::size_t tasks = ec.widths.size() * reps;
  std::vector<double> results(tasks * nm);
  parallel_for(tasks, ec.threads, [&](std::size_t t) {
    const std::size_t width = ec.widths[t / reps];
    const std::size_t r = t % reps;
    try {
      auto batch = sample_network(ec.network.with_width(width), ec.activation, ec.points,
                                  replication_seed(ec.master_seed, width, r));
      std::vector<double>& s = batch.values;
      std::sort(s.begin(), s.end());
      for (std::size_t k = 0; k < nm; ++k) {
        double v = 0.0;
        switch (ec.metrics[k]) {
        case Metric::KS: v = ks_sorted(s, sigma); break;
        case Metric::W1: v = w1_sorted(s, sigma, quantiles); break;
        case Metric::TV: v = tv_sorted(s, sigma).value; break;
        }
        results[t * nm + k] = v;
      }
    } catch (const Error& e) {
      throw NumericalError("replication failed at width " + std::to_string(width) +
                           ", r = " + std::to_string(r) + ": " + e.what());
    }
  });

  SweepTable table;
  table.provenance.config_hash = config_hash(ec.network, ec.activation);
  table.provenance.seed = ec.master_seed;
  for (std::size_t wi = 0; wi < ec.widths.size(); ++wi) {
    const std::size_t width = ec.widths[wi];
    for (std::size_t k = 0; k < nm; ++k) {
      std::vector<double> vals(reps);
      double sum = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        vals[r] = results[(wi * reps + r) * nm + k];
        sum += vals[r];
      }
      const double mean = sum / static_cast<double>(reps);
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      std::sort(vals.begin(), vals.end());
      SweepRow row;
      row.width = width;
      row.metric = ec.metrics[k];
      row.mean = mean;
      row.p025 = nearest_rank(vals, 2.5);
      row.p975 = nearest_rank(vals, 97.5);
      row.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
      row.bound =
          single_output_bound(ec.network.with_width(width), ec.activation, row.metric).value;
      table.rows.push_back(row);
    }
  }
  return table;
}

struct RateFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::vector<std::size_t> used_widths;
  std::vector<std::size_t> excluded_widths; // nonpositive means
};

/// Least-squares slope of log(mean) against log(width) for one metric.
inline RateFit fit_rate(const SweepTable& table, Metric metric) {
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : table.rows_for(metric)) {
    if (r.mean > 0.0) {
      xs.push_back(std::log(static_cast<double>(r.width)));
      ys.push_back(std::log(r.mean));
      fit.used_widths.push_back(r.width);
    } else {
      fit.excluded_widths.push_back(r.width);
    }
  }
  if (xs.size() < 4) {
    throw DomainError("fit_rate needs at least 4 widths with positive means, got " +
                      std::to_string(xs.size()));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate needs at least two distinct widths");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += e * e;
  }
  fit.std_error = std::sqrt(ssr / (k - 2.0) / sxx);
  return fit;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "width,metric,mean,p2.5,p97.5,bound";

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

inline std::filesystem::path meta_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace detail

inline std::string table_to_csv(const SweepTable& table) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : table.rows) {
    out += std::to_string(r.width) + ',' + std::string(to_string(r.metric)) + ',' +
           format_double(r.mean) + ',' + format_double(r.p025) + ',' + format_double(r.p975) +
           ',' + format_double(r.bound) + '\n';
  }
  return out;
}

inline json table_meta(const SweepTable& table, const std::optional<json>& extra = std::nullopt) {
  std::vector<double> se;
  for (const auto& r : table.rows) se.push_back(r.std_error);
  json j{{"config_hash", hex64(table.provenance.config_hash)},
         {"seed", table.provenance.seed},
         {"library_version", table.provenance.version},
         {"normal_method", std::string(kNormalMethod)},
         {"boost_version", BOOST_LIB_VERSION},
         {"percentiles", "nearest-rank"},
         {"std_errors", se}};
  if (extra) j["experiment"] = *extra;
  return j;
}

/// Writes the CSV and a sibling .meta.json with provenance.
inline void emit_csv(const SweepTable& table, const std::filesystem::path& path,
                     const std::optional<json>& experiment = std::nullopt) {
  detail::write_text(path, table_to_csv(table));
  detail::write_text(meta_path(path), table_meta(table, experiment).dump(2) + "\n");
}

inline std::vector<SweepRow> parse_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError("CSV header does not match '" + std::string(kCsvHeader) + "'");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw IoError("malformed CSV row '" + line + "'");
    SweepRow r;
    try {
      r.width = static_cast<std::size_t>(std::stoull(f[0]));
      r.metric = parse_metric(f[1]);
      r.mean = std::strtod(f[2].c_str(), nullptr);
      r.p025 = std::strtod(f[3].c_str(), nullptr);
      r.p975 = std::strtod(f[4].c_str(), nullptr);
      r.bound = std::strtod(f[5].c_str(), nullptr);
    } catch (const std::exception& e) {
      throw IoError("malformed CSV row '" + line + "': " + e.what());
    }
    rows.push_back(r);
  }
  return rows;
}

/// Reads a CSV written by emit_csv, plus its .meta.json when present.
inline SweepTable load_table(const std::filesystem::path& path) {
  SweepTable table;
  table.rows = parse_csv_text(detail::read_text(path));
  const auto meta = meta_path(path);
  if (std::filesystem::exists(meta)) {
    try {
      const json j = json::parse(detail::read_text(meta));
      table.provenance.config_hash =
          std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
      table.provenance.seed = j.at("seed").get<std::uint64_t>();
      table.provenance.version = j.at("library_version").get<std::string>();
      const auto se = j.at("std_errors").get<std::vector<double>>();
      if (se.size() == table.rows.size()) {
        for (std::size_t i = 0; i < se.size(); ++i) table.rows[i].std_error = se[i];
      }
    } catch (const std::exception& e) {
      throw IoError("malformed metadata '" + meta.string() + "': " + e.what());
    }
  }
  return table;
}

/// Log-log line chart of mean, percentile band and bound for one metric.
inline std::string table_to_svg(const SweepTable& table, Metric metric) {
  const auto rows = table.rows_for(metric);
  constexpr double w = 640.0;
  constexpr double h = 420.0;
  constexpr double pad = 56.0;
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  auto lg = [](double v) { return std::log10(std::max(v, 1e-300)); };
  for (const auto& r : rows) {
    x0 = std::min(x0, lg(double(r.width)));
    x1 = std::max(x1, lg(double(r.width)));
    for (double v : {r.p025, r.p975, r.bound, r.mean}) {
      if (v > 0.0) {
        y0 = std::min(y0, lg(v));
        y1 = std::max(y1, lg(v));
      }
    }
  }
  if (rows.empty() || !(y1 >= y0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  auto px = [&](double width) { return pad + (lg(width) - x0) / (x1 - x0) * (w - 2 * pad); };
  auto py = [&](double v) { return h - pad - (lg(v) - y0) / (y1 - y0) * (h - 2 * pad); };
  auto polyline = [&](auto value, const char* style) {
    std::string s = "<polyline fill=\"none\" " + std::string(style) + " points=\"";
    for (const auto& r : rows) {
      if (value(r) <= 0.0) continue;
      s += format_double(px(double(r.width))) + "," + format_double(py(value(r))) + " ";
    }
    return s + "\"/>\n";
  };
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!rows.empty()) {
    std::string band = "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" points=\"";
    for (const auto& r : rows)
      if (r.p975 > 0.0) band += format_double(px(double(r.width))) + "," + format_double(py(r.p975)) + " ";
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      if (it->p025 > 0.0)
        band += format_double(px(double(it->width))) + "," + format_double(py(it->p025)) + " ";
    svg += band + "\"/>\n";
    svg += polyline([](const SweepRow& r) { return r.mean; }, "stroke=\"black\" stroke-width=\"2\"");
    svg += polyline([](const SweepRow& r) { return r.bound; },
                    "stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"");
  }
  svg += "<text x=\"" + format_double(w / 2) + "\" y=\"" + format_double(h - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\">width n (log scale)</text>\n";
  svg += "<text x=\"16\" y=\"24\" font-size=\"13\">" + std::string(to_string(metric)) +
         ": mean (black), 2.5-97.5% band (blue), bound (red)</text>\n";
  svg += "</svg>\n";
  return svg;
}

inline void emit_svg(const SweepTable& table, Metric metric, const std::filesystem::path& path) {
  detail::write_text(path, table_to_svg(table, metric));
}

} // namespace gaussnet

#endif // GAUSSNET_HARNESS_HPP_
