// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface for the NBRIG toolkit: fit / compare / pmf /
// aggregate / simulate. All diagnostics go to stderr; the artifact goes to
// stdout or --output. Exit code 0 iff the artifact was produced.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nbrig/baselines.hpp"
#include "nbrig/compound.hpp"
#include "nbrig/csv.hpp"
#include "nbrig/distribution.hpp"
#include "nbrig/fit.hpp"
#include "nbrig/rig.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
  std::string input;
  std::string output;
  std::string format = "text";
  std::string model;  // per-command default filled in main
  double r = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double m = std::numeric_limits<double>::quiet_NaN();
  std::int64_t x_max = -1;  // -1: not set
  std::uint64_t seed = 1;
  std::int64_t n = 100;
  std::string severity;
  std::string config;
  double tol = 1e-8;
};

std::string fmt6(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

std::string fmt17(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string join_params(const nbrig::FitReport& rep, bool lossless) {
  std::string s;
  for (std::size_t i = 0; i < rep.params.size(); ++i) {
    if (i) s += ' ';
    s += rep.param_names[i] + '=' + (lossless ? fmt17(rep.params[i]) : fmt6(rep.params[i]));
  }
  return s;
}

// ---- report rendering -----------------------------------------------------

json report_json(const nbrig::FitReport& rep) {
  json params = json::object();
  for (std::size_t i = 0; i < rep.params.size(); ++i)
    params[rep.param_names[i]] = rep.params[i];
  json j;
  j["model"] = rep.model;
  j["params"] = params;
  j["log_likelihood"] = rep.log_l;
  j["chi2"] = rep.chi2;
  j["df"] = rep.df;
  j["p_value"] = rep.p_valid ? json(rep.p_value) : json(nullptr);
  j["aic"] = rep.aic;
  j["expected"] = rep.expected;
  return j;
}

std::string report_csv_header() {
  return "model,params,log_likelihood,chi2,df,p_value,aic,expected\n";
}

std::string report_csv_row(const nbrig::FitReport& rep) {
  std::string expected;
  for (std::size_t i = 0; i < rep.expected.size(); ++i) {
    if (i) expected += ' ';
    expected += fmt17(rep.expected[i]);
  }
  std::string row = rep.model;
  row += ",\"" + join_params(rep, true) + "\"";
  row += ',' + fmt17(rep.log_l);
  row += ',' + fmt17(rep.chi2);
  row += ',' + std::to_string(rep.df);
  row += ',' + fmt17(rep.p_value);
  row += ',' + fmt17(rep.aic);
  row += ",\"" + expected + "\"\n";
  return row;
}

std::string report_text(const nbrig::FitReport& rep, const nbrig::CountData& data) {
  std::ostringstream os;
  os << "model            " << rep.model << '\n';
  os << "params           " << join_params(rep, false) << '\n';
  os << "log_likelihood   " << fmt6(rep.log_l) << '\n';
  os << "aic              " << fmt6(rep.aic) << '\n';
  os << "chi2             " << fmt6(rep.chi2) << "  df=" << rep.df
     << "  p_value=" << (rep.p_valid ? fmt6(rep.p_value) : std::string("n/a")) << '\n';
  os << "chi2_ungrouped   " << fmt6(rep.chi2_ungrouped) << '\n';
  os << "converged        " << (rep.converged ? "yes" : "no") << '\n';
  os << '\n';
  os << std::setw(6) << "x" << std::setw(12) << "observed" << std::setw(14) << "expected"
     << '\n';
  for (std::size_t i = 0; i < data.cells.size(); ++i)
    os << std::setw(6) << data.cells[i].x << std::setw(12) << data.cells[i].n
       << std::setw(14) << fmt6(rep.expected[i]) << '\n';
  return os.str();
}

std::string compare_text(const std::vector<nbrig::FitReport>& reps,
                         const nbrig::CountData& data) {
  std::ostringstream os;
  os << std::setw(6) << "x" << std::setw(12) << "observed";
  for (const auto& rep : reps) os << std::setw(14) << rep.model;
  os << '\n';
  for (std::size_t i = 0; i < data.cells.size(); ++i) {
    os << std::setw(6) << data.cells[i].x << std::setw(12) << data.cells[i].n;
    for (const auto& rep : reps) os << std::setw(14) << fmt6(rep.expected[i]);
    os << '\n';
  }
  os << '\n' << std::setw(18) << "stat";
  for (const auto& rep : reps) os << std::setw(14) << rep.model;
  os << '\n';
  auto row = [&](const char* name, auto get) {
    os << std::setw(18) << name;
    for (const auto& rep : reps) os << std::setw(14) << get(rep);
    os << '\n';
  };
  row("log_likelihood", [](const auto& r) { return fmt6(r.log_l); });
  row("aic", [](const auto& r) { return fmt6(r.aic); });
  row("chi2", [](const auto& r) { return fmt6(r.chi2); });
  row("df", [](const auto& r) { return std::to_string(r.df); });
  row("p_value",
      [](const auto& r) { return r.p_valid ? fmt6(r.p_value) : std::string("n/a"); });
  os << '\n';
  for (const auto& rep : reps)
    os << "params[" << rep.model << "]  " << join_params(rep, false) << '\n';
  return os.str();
}

void report_diagnostics(const nbrig::FitReport& rep) {
  std::cerr << "[" << rep.model << "] converged=" << (rep.converged ? "yes" : "no")
            << " evals=" << rep.n_evals << '\n';
  for (const auto& w : rep.warnings) std::cerr << "[" << rep.model << "] warning: " << w << '\n';
}

// ---- command handlers -----------------------------------------------------

nbrig::NbrigParams require_params(const RunConfig& cfg) {
  if (std::isnan(cfg.r) || std::isnan(cfg.alpha) || std::isnan(cfg.m))
    throw std::runtime_error("this command needs --r, --alpha and --m (flags or --config)");
  return nbrig::NbrigParams(cfg.r, cfg.alpha, cfg.m);
}

std::string require_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw std::runtime_error("no input file given (--input or positional)");
  return cfg.input;
}

std::string run_fit(const RunConfig& cfg) {
  const nbrig::CountData data = nbrig::ingest_counts(require_input(cfg));
  nbrig::FitReport rep;
  if (cfg.model == "poisson") {
    rep = nbrig::fit_poisson(data);
  } else if (cfg.model == "nb") {
    rep = nbrig::fit_nb(data);
  } else if (cfg.model == "nbrig") {
    nbrig::FitOptions opts;
    opts.tol = cfg.tol;
    rep = nbrig::fit_nbrig_mle(data, opts);
  } else {
    throw std::runtime_error("fit needs --model poisson|nb|nbrig (use compare for all)");
  }
  report_diagnostics(rep);
  if (cfg.format == "json") return report_json(rep).dump(2) + "\n";
  if (cfg.format == "csv") return report_csv_header() + report_csv_row(rep);
  return report_text(rep, data);
}

std::string run_compare(const RunConfig& cfg) {
  const nbrig::CountData data = nbrig::ingest_counts(require_input(cfg));
  std::vector<nbrig::FitReport> reps = nbrig::compare_models(data);
  if (cfg.model != "all") {
    std::vector<nbrig::FitReport> kept;
    for (auto& rep : reps)
      if (rep.model == cfg.model) kept.push_back(std::move(rep));
    reps = std::move(kept);
  }
  for (const auto& rep : reps) report_diagnostics(rep);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& rep : reps) arr.push_back(report_json(rep));
    return arr.dump(2) + "\n";
  }
  if (cfg.format == "csv") {
    std::string out = report_csv_header();
    for (const auto& rep : reps) out += report_csv_row(rep);
    return out;
  }
  return compare_text(reps, data);
}

nbrig::PmfTable table_for(const RunConfig& cfg, const nbrig::NbrigParams& p) {
  if (cfg.x_max >= 0) return nbrig::make_pmf_table(p, cfg.x_max);
  return nbrig::make_pmf_table(p);  // auto truncation; needs alpha > 2
}

std::string run_pmf(const RunConfig& cfg) {
  const nbrig::NbrigParams p = require_params(cfg);
  const nbrig::PmfTable table = table_for(cfg, p);
  if (cfg.format == "json") {
    json j;
    j["model"] = "nbrig";
    j["params"] = {{"r", p.r}, {"alpha", p.mix.alpha}, {"m", p.mix.m}};
    j["pmf"] = table.probs;
    j["tail_mass"] = table.tail_mass;
    return j.dump(2) + "\n";
  }
  std::string out;
  if (cfg.format == "csv") {
    out = "x,pmf\n";
    for (std::size_t x = 0; x < table.probs.size(); ++x)
      out += std::to_string(x) + ',' + fmt17(table.probs[x]) + '\n';
    return out;
  }
  std::ostringstream os;
  os << std::setw(6) << "x" << std::setw(16) << "pmf" << '\n';
  for (std::size_t x = 0; x < table.probs.size(); ++x)
    os << std::setw(6) << x << std::setw(16) << fmt6(table.probs[x]) << '\n';
  return os.str();
}

std::string run_aggregate(const RunConfig& cfg) {
  const nbrig::NbrigParams p = require_params(cfg);
  if (cfg.severity.empty()) throw std::runtime_error("aggregate needs --severity CSV");
  const nbrig::SeverityPmf f = nbrig::load_severity_csv(cfg.severity);
  std::int64_t x_max = cfg.x_max;
  if (x_max < 0) x_max = nbrig::make_pmf_table(p).x_max() * f.max_y();
  const nbrig::AggregateDist dist = nbrig::aggregate_pmf(p, f, x_max);
  std::cerr << "[aggregate] method=" << dist.method << " tail_mass=" << fmt6(dist.tail_mass)
            << '\n';
  if (cfg.format == "json") {
    json j;
    j["model"] = "nbrig";
    j["params"] = {{"r", p.r}, {"alpha", p.mix.alpha}, {"m", p.mix.m}};
    j["method"] = dist.method;
    std::vector<double> mass{dist.atom0};
    mass.insert(mass.end(), dist.probs.begin(), dist.probs.end());
    j["mass"] = mass;
    j["tail_mass"] = dist.tail_mass;
    return j.dump(2) + "\n";
  }
  if (cfg.format == "csv") {
    std::string out = "x,mass\n";
    out += "0," + fmt17(dist.atom0) + '\n';
    for (std::size_t i = 0; i < dist.probs.size(); ++i)
      out += std::to_string(i + 1) + ',' + fmt17(dist.probs[i]) + '\n';
    return out;
  }
  std::ostringstream os;
  os << std::setw(6) << "x" << std::setw(16) << "mass" << '\n';
  os << std::setw(6) << 0 << std::setw(16) << fmt6(dist.atom0) << '\n';
  for (std::size_t i = 0; i < dist.probs.size(); ++i)
    os << std::setw(6) << (i + 1) << std::setw(16) << fmt6(dist.probs[i]) << '\n';
  return os.str();
}

std::string run_simulate(const RunConfig& cfg) {
  const nbrig::NbrigParams p = require_params(cfg);
  if (cfg.n < 0) throw std::runtime_error("--n must be >= 0");
  const std::vector<std::int64_t> counts =
      nbrig::sample(static_cast<std::size_t>(cfg.n), p, cfg.seed);
  std::vector<std::int64_t> draws;
  if (!cfg.severity.empty()) {
    const nbrig::SeverityPmf f = nbrig::load_severity_csv(cfg.severity);
    std::mt19937_64 eng(cfg.seed * 0x9E3779B97F4A7C15ULL + 1);
    std::discrete_distribution<int> sev(f.probs.begin(), f.probs.end());
    draws.reserve(counts.size());
    for (std::int64_t c : counts) {
      std::int64_t s = 0;
      for (std::int64_t k = 0; k < c; ++k) s += sev(eng);
      draws.push_back(s);
    }
  } else {
    draws = counts;
  }
  if (cfg.format == "json") {
    json j;
    j["model"] = "nbrig";
    j["params"] = {{"r", p.r}, {"alpha", p.mix.alpha}, {"m", p.mix.m}};
    j["seed"] = cfg.seed;
    j["n"] = cfg.n;
    j["draws"] = draws;
    return j.dump(2) + "\n";
  }
  std::string out;
  if (cfg.format == "csv") out = "draw\n";
  for (std::int64_t v : draws) out += std::to_string(v) + '\n';
  return out;
}

// ---- config file ----------------------------------------------------------

// flags > config file > defaults: a config value is applied only when the
// matching flag was not given on the command line.
void apply_config(CLI::App* sub, RunConfig& cfg) {
  if (cfg.config.empty()) return;
  std::ifstream in(cfg.config);
  if (!in) throw std::runtime_error(cfg.config + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(cfg.config + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error(cfg.config + ": config must be a JSON object");

  auto flag_given = [&](const char* flag) {
    const CLI::Option* o = sub->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  auto key_of = [](std::string name) {
    for (char& c : name)
      if (c == '-') c = '_';
    return name;
  };

  struct Entry {
    const char* flag;
    const char* key;
  };
  const Entry entries[] = {
      {"--input", "input"},   {"--output", "output"}, {"--format", "format"},
      {"--model", "model"},   {"--r", "r"},           {"--alpha", "alpha"},
      {"--m", "m"},           {"--x-max", "x_max"},   {"--seed", "seed"},
      {"--n", "n"},           {"--severity", "severity"}, {"--tol", "tol"},
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = key_of(it.key());
    bool known = false;
    for (const Entry& e : entries) known = known || key == e.key;
    if (!known)
      throw std::runtime_error(cfg.config + ": unknown config key '" + it.key() + "'");
  }

  for (const Entry& e : entries) {
    std::string key = e.key;
    if (!j.contains(key)) {
      // allow dash spelling in the file too
      std::string dashed = key;
      for (char& c : dashed)
        if (c == '_') c = '-';
      if (!j.contains(dashed)) continue;
      key = dashed;
    }
    if (flag_given(e.flag) || sub->get_option_no_throw(e.flag) == nullptr) continue;
    const json& v = j.at(key);
    const std::string k = e.key;
    try {
      if (k == "input") cfg.input = v.get<std::string>();
      else if (k == "output") cfg.output = v.get<std::string>();
      else if (k == "format") cfg.format = v.get<std::string>();
      else if (k == "model") cfg.model = v.get<std::string>();
      else if (k == "r") cfg.r = v.get<double>();
      else if (k == "alpha") cfg.alpha = v.get<double>();
      else if (k == "m") cfg.m = v.get<double>();
      else if (k == "x_max") cfg.x_max = v.get<std::int64_t>();
      else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (k == "n") cfg.n = v.get<std::int64_t>();
      else if (k == "severity") cfg.severity = v.get<std::string>();
      else if (k == "tol") cfg.tol = v.get<double>();
    } catch (const json::exception& e2) {
      throw std::runtime_error(cfg.config + ": bad value for '" + k + "': " + e2.what());
    }
  }

  if (cfg.format != "text" && cfg.format != "csv" && cfg.format != "json")
    throw std::runtime_error(cfg.config + ": format must be text, csv or json");
  if (cfg.x_max < -1) throw std::runtime_error(cfg.config + ": x_max must be >= 0");
  if (!(cfg.tol > 0)) throw std::runtime_error(cfg.config + ": tol must be > 0");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NBRIG count-distribution toolkit: fitting, comparison, PMF and "
               "aggregate-loss tables, simulation"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_io = [&](CLI::App* sub, bool with_input) {
    if (with_input)
      sub->add_option("input,-i,--input", cfg.input, "count CSV (count,frequency)");
    sub->add_option("-o,--output", cfg.output, "write the artifact here instead of stdout");
    sub->add_option("--format", cfg.format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("--config", cfg.config, "JSON file mirroring the flags");
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--r", cfg.r, "shape r");
    sub->add_option("--alpha", cfg.alpha, "mixing shape alpha");
    sub->add_option("--m", cfg.m, "mixing scale m");
  };

  CLI::App* cfit = app.add_subcommand("fit", "fit one model to count data");
  add_io(cfit, true);
  cfit->add_option("--model", cfg.model, "poisson, nb or nbrig")
      ->check(CLI::IsMember({"poisson", "nb", "nbrig"}));
  cfit->add_option("--tol", cfg.tol, "optimizer tolerance")->check(CLI::PositiveNumber);

  CLI::App* ccmp = app.add_subcommand("compare", "fit and tabulate all models");
  add_io(ccmp, true);
  ccmp->add_option("--model", cfg.model, "restrict the table to one model")
      ->check(CLI::IsMember({"poisson", "nb", "nbrig", "all"}));
  ccmp->add_option("--tol", cfg.tol, "optimizer tolerance")->check(CLI::PositiveNumber);

  CLI::App* cpmf = app.add_subcommand("pmf", "tabulate pmf(x) for x = 0..x_max");
  add_io(cpmf, false);
  add_params(cpmf);
  cpmf->add_option("--x-max", cfg.x_max, "last x to tabulate (default: auto)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* cagg = app.add_subcommand("aggregate", "aggregate-loss table for a severity law");
  add_io(cagg, false);
  add_params(cagg);
  cagg->add_option("--severity", cfg.severity, "severity CSV (severity,mass)");
  cagg->add_option("--x-max", cfg.x_max, "last aggregate value (default: auto)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* csim = app.add_subcommand("simulate", "draw counts (or aggregate losses)");
  add_io(csim, false);
  add_params(csim);
  csim->add_option("--n", cfg.n, "number of draws")->check(CLI::NonNegativeNumber);
  csim->add_option("--seed", cfg.seed, "RNG seed");
  csim->add_option("--severity", cfg.severity, "severity CSV; draws become losses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (cfg.model.empty()) cfg.model = (command == "compare") ? "all" : "nbrig";

  std::string artifact;
  try {
    apply_config(sub, cfg);
    if (command == "fit") artifact = run_fit(cfg);
    else if (command == "compare") artifact = run_compare(cfg);
    else if (command == "pmf") artifact = run_pmf(cfg);
    else if (command == "aggregate") artifact = run_aggregate(cfg);
    else artifact = run_simulate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (cfg.output.empty()) {
    std::cout << artifact;
    if (!std::cout) {
      std::cerr << "error: failed writing to stdout\n";
      return 1;
    }
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output file " << cfg.output << '\n';
      return 1;
    }
    out << artifact;
    out.close();
    if (!out) {
      std::cerr << "error: failed writing " << cfg.output << '\n';
      return 1;
    }
  }
  return 0;
}
