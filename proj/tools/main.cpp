// Command-line front end: entropy scans, Pauli-spectrum histograms, magic-gap
// tables, thermodynamic-limit curves, and the brute-force oracle report.
// Identical flags and seed always produce byte-identical output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "tfim/entropy.hpp"
#include "tfim/errors.hpp"
#include "tfim/format.hpp"
#include "tfim/model.hpp"
#include "tfim/oracle.hpp"
#include "tfim/reference.hpp"
#include "tfim/spectrum.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;

using ordered_json = nlohmann::ordered_json;

std::vector<double> parse_g_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto colon = spec.find(':', pos);
    parts.push_back(spec.substr(pos, colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  auto to_double = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
  };
  if (parts.size() == 1) {
    return {to_double(parts[0])};
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("g spec must be a value or min:max:step");
  }
  const double lo = to_double(parts[0]);
  const double hi = to_double(parts[1]);
  const double step = to_double(parts[2]);
  if (!(step > 0.0) || hi < lo) {
    throw std::invalid_argument("g grid needs step > 0 and max >= min");
  }
  std::vector<double> values;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + step / 2.0) break;
    values.push_back(v);
    if (values.size() > 10'000'000) {
      throw std::invalid_argument("g grid is unreasonably large");
    }
  }
  return values;
}

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw std::invalid_argument("cannot open " + path);
      stream = file.get();
    }
  }
  std::ostream& out() { return *stream; }
};

void write_table(std::ostream& out, const std::string& format,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  if (format == "json") {
    ordered_json doc = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json obj;
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      doc.push_back(obj);
    }
    out << doc.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? ',' : '\n');
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
  }
}

struct CommonOptions {
  int n_sites = 2;
  std::string g_spec = "0";
  std::vector<double> renyi = {2.0};
  std::string method = "conv";
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  double l_max = 0.0;  // 0 means the default cap for n_sites
  double delta = 1e-3;
  std::string out_path;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_method) {
  cmd->add_option("--n-sites", opt.n_sites, "number of spins (even)");
  cmd->add_option("--g", opt.g_spec, "transverse field: value or min:max:step");
  cmd->add_option("--seed", opt.seed, "seed for all stochastic paths");
  cmd->add_option("--out", opt.out_path, "output file (default stdout)");
  cmd->add_option("--format", opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_method) {
    cmd->add_option("--method", opt.method, "exact, conv, or sample")
        ->check(CLI::IsMember({"exact", "conv", "sample"}));
    cmd->add_option("--samples", opt.n_samples, "Monte Carlo sample count");
    cmd->add_option("--l-max", opt.l_max,
                    "log-magnitude cap (default 40*sqrt(N))");
    cmd->add_option("--delta", opt.delta, "log-magnitude bin width");
  }
}

int cmd_entropy(const CommonOptions& opt) {
  const auto grid = parse_g_spec(opt.g_spec);
  std::vector<std::vector<std::string>> rows;
  for (const double g : grid) {
    for (const double n : opt.renyi) {
      const tfim::ModelParams params{opt.n_sites, g, 1.0};
      const auto rec = tfim::stabilizer_renyi(params, n);
      rows.push_back({tfim::format_int(rec.n_sites), tfim::format_double(rec.g),
                      tfim::format_double(rec.renyi_n),
                      tfim::format_double(rec.value),
                      tfim::format_double(rec.per_site)});
    }
  }
  Output output(opt.out_path);
  write_table(output.out(), opt.format, {"N", "g", "n", "M_n", "M_n_per_site"},
              rows);
  return 0;
}

int cmd_hist(const CommonOptions& opt, int exact_cap,
             const std::string& normalization) {
  const auto grid = parse_g_spec(opt.g_spec);
  if (grid.size() != 1) {
    throw std::invalid_argument("hist expects a single --g value");
  }
  const tfim::ModelParams params{opt.n_sites, grid[0], 1.0};
  const double l_max =
      opt.l_max > 0.0 ? opt.l_max : tfim::default_l_max(opt.n_sites);

  tfim::PauliHistogram hist;
  if (opt.method == "exact") {
    const auto mags = tfim::enumerate_spectrum(params, exact_cap);
    hist = tfim::histogram_from_magnitudes(mags, opt.n_sites, l_max, opt.delta);
  } else if (opt.method == "sample") {
    hist = tfim::sample_histogram(params, opt.n_samples, opt.seed, l_max,
                                  opt.delta);
  } else {
    hist = tfim::histogram_convolution(params, l_max, opt.delta);
  }
  if (normalization == "full-4^N") {
    hist = tfim::with_normalization(
        std::move(hist), tfim::PauliHistogram::Normalization::full_strings);
  }

  Output output(opt.out_path);
  if (opt.format == "json") {
    ordered_json doc;
    doc["zero_weight"] = hist.zero_weight;
    doc["unit_weight"] = hist.unit_weight;
    doc["normalization"] =
        hist.normalization ==
                tfim::PauliHistogram::Normalization::counts_of_nonzero
            ? "counts-of-nonzero"
            : "full-4^N";
    doc["bin_width"] = hist.bin_width;
    doc["overflow"] = hist.overflow;
    doc["weights"] = hist.weights;
    output.out() << doc.dump(2) << "\n";
  } else {
    tfim::write_histogram_csv(hist, output.out());
  }
  return 0;
}

int cmd_gap(const CommonOptions& opt, int double_to) {
  const auto grid = parse_g_spec(opt.g_spec);
  tfim::validate({opt.n_sites, 0.0, 1.0});
  std::vector<int> sizes{opt.n_sites};
  while (double_to > 0 && sizes.back() * 2 <= double_to) {
    sizes.push_back(sizes.back() * 2);
  }
  std::vector<std::vector<std::string>> rows;
  for (const int n : sizes) {
    for (const double g : grid) {
      const double gap = tfim::magic_gap(tfim::ModelParams{n, g, 1.0});
      rows.push_back({tfim::format_int(n), tfim::format_double(g),
                      tfim::format_double(gap)});
    }
  }
  Output output(opt.out_path);
  write_table(output.out(), opt.format, {"N", "g", "magic_gap"}, rows);
  return 0;
}

int cmd_oracle(const CommonOptions& opt) {
  const auto grid = parse_g_spec(opt.g_spec);
  if (grid.size() != 1) {
    throw std::invalid_argument("oracle expects a single --g value");
  }
  const tfim::ModelParams params{opt.n_sites, grid[0], 1.0};
  const auto report = tfim::verification_report(params);

  ordered_json doc;
  doc["params"] = {{"n_sites", report.params.n_sites},
                   {"g", report.params.g},
                   {"coupling", report.params.coupling}};
  doc["max_abs_deviation"] = report.max_abs_deviation;
  doc["m2_closed_form"] = report.m2_closed_form;
  doc["m2_bruteforce"] = report.m2_bruteforce;
  doc["channel_residuals"] = report.channel_residuals;
  doc["channel_energy_max_err"] = report.channel_energy_max_err;
  doc["ground_energy_check"] = {
      {"exact_diagonalization", report.ground_energy_ed},
      {"free_fermion_sum", report.ground_energy_free_fermion}};
  doc["probability_norm_err"] = report.probability_norm_err;
  doc["counts_ok"] = report.counts_ok;
  doc["momentum_m2_per_site"] = report.momentum_m2_per_site;
  if (report.realspace_m2_available) {
    doc["realspace_m2_per_site"] = report.realspace_m2_per_site;
  }
  doc["passed"] = report.failures.empty();
  doc["failures"] = report.failures;

  Output output(opt.out_path);
  output.out() << doc.dump(2) << "\n";
  if (!report.failures.empty()) {
    for (const auto& f : report.failures) {
      std::cerr << "verification failed: " << f << "\n";
    }
    return kExitVerification;
  }
  return 0;
}

int cmd_thermo(const CommonOptions& opt, bool derivative_mode, double h,
               int deriv_sites) {
  const auto grid = parse_g_spec(opt.g_spec);
  std::vector<std::vector<std::string>> rows;
  if (derivative_mode) {
    for (const double g : grid) {
      const auto scan = tfim::derivative_scan(deriv_sites, g, h);
      double hh = h;
      for (int level = 0; level < 3; ++level, hh /= 2.0) {
        rows.push_back({tfim::format_double(g), tfim::format_double(hh),
                        tfim::format_double(scan.left[level]),
                        tfim::format_double(scan.right[level]),
                        tfim::format_double(scan.left_extrap),
                        tfim::format_double(scan.right_extrap)});
      }
    }
    Output output(opt.out_path);
    write_table(output.out(), opt.format,
                {"g", "h", "left", "right", "left_extrap", "right_extrap"},
                rows);
    return 0;
  }
  for (const double g : grid) {
    for (const double n : opt.renyi) {
      const auto quad = tfim::thermo_density(g, n);
      rows.push_back({tfim::format_double(g), tfim::format_double(n),
                      tfim::format_double(quad.value),
                      tfim::format_double(quad.error)});
      if (!quad.converged) {
        std::cerr << "thermo: quadrature at g=" << tfim::format_double(g)
                  << " n=" << tfim::format_double(n)
                  << " reached error " << tfim::format_double(quad.error)
                  << " only\n";
      }
    }
  }
  Output output(opt.out_path);
  write_table(output.out(), opt.format, {"g", "n", "per_site", "quadrature_error"},
              rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"momentum-space magic of the transverse-field Ising chain"};
  app.require_subcommand(1);

  CommonOptions entropy_opt;
  auto* entropy = app.add_subcommand("entropy", "stabilizer Renyi entropy scan");
  add_common(entropy, entropy_opt, false);
  entropy->add_option("--renyi", entropy_opt.renyi, "Renyi indices (n != 1)")
      ->expected(-1);

  CommonOptions hist_opt;
  int exact_cap = 30;
  std::string normalization = "counts-of-nonzero";
  auto* hist = app.add_subcommand("hist", "Pauli magnitude histogram");
  add_common(hist, hist_opt, true);
  hist->add_option("--exact-cap", exact_cap,
                   "largest n_sites allowed for --method exact");
  hist->add_option("--normalization", normalization,
                   "counts-of-nonzero or full-4^N")
      ->check(CLI::IsMember({"counts-of-nonzero", "full-4^N"}));

  CommonOptions gap_opt;
  int double_to = 0;
  auto* gap = app.add_subcommand("gap", "magic gap across the field grid");
  add_common(gap, gap_opt, false);
  gap->add_option("--double-to", double_to,
                  "also emit rows for 2N, 4N, ... up to this size");

  CommonOptions oracle_opt;
  auto* oracle = app.add_subcommand("oracle", "brute-force verification report");
  add_common(oracle, oracle_opt, false);

  CommonOptions thermo_opt;
  bool derivative_mode = false;
  double h = 0.02;
  int deriv_sites = 100000;
  auto* thermo = app.add_subcommand("thermo", "thermodynamic-limit curves");
  add_common(thermo, thermo_opt, false);
  thermo->add_option("--renyi", thermo_opt.renyi, "Renyi indices (n != 1)")
      ->expected(-1);
  thermo->add_flag("--derivative", derivative_mode,
                   "emit one-sided derivatives of M_2/N instead");
  thermo->add_option("--step", h, "base finite-difference step");
  thermo->add_option("--deriv-sites", deriv_sites,
                     "chain length for the derivative mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (entropy->parsed()) return cmd_entropy(entropy_opt);
    if (hist->parsed()) return cmd_hist(hist_opt, exact_cap, normalization);
    if (gap->parsed()) return cmd_gap(gap_opt, double_to);
    if (oracle->parsed()) return cmd_oracle(oracle_opt);
    if (thermo->parsed()) return cmd_thermo(thermo_opt, derivative_mode, h,
                                            deriv_sites);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
