#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinsure/qinsure.hpp"
#include "qinsure/scenario.hpp"

namespace qinsure::cli {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string scenario;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 1;
  std::size_t m = 4;
  EncoderMode mode = EncoderMode::Exact;
  double c_approx = default_c_approx;
  std::string format = "json";
  std::string out;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"dynlapse", "wholelife", "ae", "convergence", "transpile-report"};
  return names;
}

inline void check_config(const RunConfig& cfg) {
  require(std::find(commands().begin(), commands().end(), cfg.command) != commands().end(),
          ErrorCode::InvalidArgument, "unknown command \"" + cfg.command + "\"");
  require(cfg.format == "json" || cfg.format == "csv", ErrorCode::InvalidArgument, "format must be json or csv");
  require(!cfg.shots || *cfg.shots >= 1, ErrorCode::InvalidArgument, "shots must be at least 1");
  require(cfg.m >= 1, ErrorCode::InvalidArgument, "m must be at least 1");
  require(cfg.c_approx > 0.0 && cfg.c_approx <= 0.5, ErrorCode::InvalidArgument, "c_approx must be in (0, 0.5]");
}

inline Scenario require_scenario(const RunConfig& cfg) {
  require(!cfg.scenario.empty(), ErrorCode::InvalidScenario, "--scenario is required for " + cfg.command);
  return load_scenario(cfg.scenario);
}

/// Empirical law of `shots` draws from p.
inline std::vector<double> sampled_law(const std::vector<double>& p, std::uint64_t shots, std::mt19937_64& rng) {
  std::discrete_distribution<std::size_t> draw(p.begin(), p.end());
  std::vector<double> counts(p.size(), 0.0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    counts[draw(rng)] += 1.0;
  }
  for (auto& c : counts) {
    c /= static_cast<double>(shots);
  }
  return counts;
}

inline std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// dynlapse

inline ordered_json dynlapse_json(const RunConfig& cfg, const Scenario& sc) {
  const auto proc = sc.process();
  const auto dl = dynamic_lapse_circuit(proc, sc.lapse_model());
  auto rep = payoff_report(dl, proc);
  if (cfg.shots) {
    std::mt19937_64 rng(cfg.seed);
    for (auto& d : rep.lapse) {
      d.probabilities = sampled_law(d.probabilities, *cfg.shots, rng);
    }
    for (auto& d : rep.result) {
      d.probabilities = sampled_law(d.probabilities, *cfg.shots, rng);
    }
    rep.pv = 0.0;
    const auto& law = rep.result.back().probabilities;
    for (std::size_t k = 0; k < law.size(); ++k) {
      rep.pv += law[k] * grid_value(k, proc.steps.front());
    }
  }
  ordered_json j;
  j["steps"] = sc.steps;
  j["resolution"] = sc.resolution;
  j["width"] = dl.layout.width();
  j["evaluation"] = cfg.shots ? "shots" : "analytic";
  if (cfg.shots) {
    j["shots"] = *cfg.shots;
    j["seed"] = cfg.seed;
  }
  j["lapse"] = ordered_json::array();
  for (std::size_t t = 0; t < rep.lapse.size(); ++t) {
    j["lapse"].push_back({{"marker", rep.lapse[t].marker}, {"t", t}, {"probabilities", rep.lapse[t].probabilities}});
  }
  j["result"] = ordered_json::array();
  for (const auto& d : rep.result) {
    j["result"].push_back({{"marker", d.marker}, {"probabilities", d.probabilities}});
  }
  j["pv"] = rep.pv;
  return j;
}

inline std::string dynlapse_csv(const ordered_json& j) {
  std::ostringstream os;
  os << "register,marker,value,probability\n";
  for (const char* reg : {"lapse", "result"}) {
    for (const auto& d : j[reg]) {
      const auto& p = d["probabilities"];
      for (std::size_t k = 0; k < p.size(); ++k) {
        os << reg << ',' << d["marker"].get<std::string>() << ',' << k << ',' << csv_number(p[k].get<double>())
           << '\n';
      }
    }
  }
  os << "pv,,," << csv_number(j["pv"].get<double>()) << '\n';
  return os.str();
}

// wholelife

inline ordered_json wholelife_json(const Scenario& sc) {
  const auto proc = sc.process();
  const auto weights = sc.mortality_weights();
  const auto wl = whole_life_circuit(proc, weights, sc.scale);
  const auto rep = whole_life_report(proc, weights, sc.scale);
  ordered_json j;
  j["steps"] = sc.steps;
  j["width"] = wl.circuit.num_qubits();
  j["scale"] = sc.scale;
  j["weights"] = weights;
  j["integer_weights"] = wl.integer_weights;
  j["sum_distribution"] = rep.sum_distribution;
  j["quantum_pv"] = rep.quantum_pv;
  j["classical_pv"] = rep.classical_pv;
  j["quantization_bound"] = rep.quantization_bound;
  j["abs_difference"] = std::abs(rep.quantum_pv - rep.classical_pv);
  return j;
}

inline std::string wholelife_csv(const ordered_json& j) {
  std::ostringstream os;
  os << "key,value\n";
  for (const char* key : {"quantum_pv", "classical_pv", "quantization_bound", "abs_difference"}) {
    os << key << ',' << csv_number(j[key].get<double>()) << '\n';
  }
  const auto& p = j["sum_distribution"];
  for (std::size_t k = 0; k < p.size(); ++k) {
    os << "sum_" << k << ',' << csv_number(p[k].get<double>()) << '\n';
  }
  return os.str();
}

// ae

/// A scenario file contributes its first step law; a distribution file its law.
inline DiscreteDistribution ae_input(const RunConfig& cfg) {
  require(!cfg.scenario.empty(), ErrorCode::InvalidScenario, "--scenario is required for ae");
  const auto j = detail::read_json_file(cfg.scenario);
  if (j.is_object() && j.contains("probabilities")) {
    return parse_distribution(j);
  }
  return parse_scenario(j).process().steps.front();
}

inline ordered_json ae_json(const RunConfig& cfg) {
  const auto dist = ae_input(cfg);
  const auto enc = encode_expectation(dist, cfg.mode, cfg.c_approx);
  check_budget(enc.width() + cfg.m);
  const auto outcomes =
      cfg.shots ? ae_sampled_outcomes(enc, cfg.m, *cfg.shots, cfg.seed) : ae_outcomes(enc, cfg.m);
  const auto res = estimate(outcomes, enc);
  ordered_json j;
  j["m"] = res.m;
  ordered_json out = ordered_json::object();
  for (std::size_t l = 0; l < res.outcomes.size(); ++l) {
    out[std::to_string(l)] = res.outcomes[l];
  }
  j["outcomes"] = out;
  j["l_hat"] = res.l_hat;
  j["x_hat"] = res.x_hat;
  j["mu_hat"] = res.mu_hat;
  j["expected_value"] = res.expected_value;
  j["mode"] = to_string(res.mode);
  j["c_approx"] = res.c_approx;
  j["classical_expected_value"] = expected_value(dist);
  j["abs_error"] = std::abs(res.expected_value - expected_value(dist));
  return j;
}

inline std::string ae_csv(const ordered_json& j) {
  std::ostringstream os;
  os << "l,probability\n";
  for (const auto& [l, p] : j["outcomes"].items()) {
    os << l << ',' << csv_number(p.get<double>()) << '\n';
  }
  return os.str();
}

// convergence

struct ConvergenceRow {
  std::string method;
  double effort = 0.0;
  double abs_error = 0.0;
};

struct ConvergenceOptions {
  std::size_t m_min = 3;
  std::size_t m_max = 8;
  std::size_t ae_samples = 50;
  std::uint64_t shots_min = 16;
  std::uint64_t shots_max = 16384;
  std::size_t mc_seeds = 100;
};

/// AE rows: mean |mu_hat - p| per query count m over random p (or |E_hat - E|
/// for a given law). MC rows: mean |estimate - truth| per shot count over seeds.
inline std::vector<ConvergenceRow> convergence_rows(const std::optional<DiscreteDistribution>& dist,
                                                    std::uint64_t seed, const ConvergenceOptions& opt = {}) {
  std::vector<ConvergenceRow> rows;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<DiscreteDistribution> ae_laws;
  if (dist) {
    ae_laws.push_back(*dist);
  } else {
    for (std::size_t s = 0; s < opt.ae_samples; ++s) {
      const double p = unit(rng);
      ae_laws.push_back(make_distribution({1.0 - p, p}));
    }
  }
  for (std::size_t m = opt.m_min; m <= opt.m_max; ++m) {
    double err = 0.0;
    for (const auto& d : ae_laws) {
      const auto enc = encode_expectation(d, EncoderMode::Exact);
      err += std::abs(run_ae(enc, m).expected_value - expected_value(d));
    }
    rows.push_back({"ae", static_cast<double>(m), err / static_cast<double>(ae_laws.size())});
  }
  std::vector<DiscreteDistribution> mc_laws;
  std::vector<std::uint64_t> mc_seeds;
  for (std::size_t s = 0; s < opt.mc_seeds; ++s) {
    if (dist) {
      mc_laws.push_back(*dist);
    } else {
      const double p = unit(rng);
      mc_laws.push_back(make_distribution({1.0 - p, p}));
    }
    mc_seeds.push_back(rng());
  }
  for (std::uint64_t shots = opt.shots_min; shots <= opt.shots_max; shots *= 2) {
    double err = 0.0;
    for (std::size_t s = 0; s < mc_laws.size(); ++s) {
      err += std::abs(mc_baseline(mc_laws[s], shots, mc_seeds[s]) - expected_value(mc_laws[s]));
    }
    rows.push_back({"mc", static_cast<double>(shots), err / static_cast<double>(mc_laws.size())});
  }
  return rows;
}

/// Least-squares slope of log2(abs_error) against x(effort) for one method.
inline double log_slope(const std::vector<ConvergenceRow>& rows, const std::string& method, bool log_effort) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (r.method == method && r.abs_error > 0.0) {
      xs.push_back(log_effort ? std::log2(r.effort) : r.effort);
      ys.push_back(std::log2(r.abs_error));
    }
  }
  require(xs.size() >= 2, ErrorCode::InvalidArgument, "need two positive errors for a slope");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "method,effort,abs_error\n";
  for (const auto& r : rows) {
    os << r.method << ',' << csv_number(r.effort) << ',' << csv_number(r.abs_error) << '\n';
  }
  return os.str();
}

inline ordered_json convergence_json(const std::vector<ConvergenceRow>& rows) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"method", r.method}, {"effort", r.effort}, {"abs_error", r.abs_error}});
  }
  const bool zero = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.abs_error == 0.0; });
  j["ae_slope"] = zero ? 0.0 : log_slope(rows, "ae", false);
  j["mc_slope"] = zero ? 0.0 : log_slope(rows, "mc", true);
  return j;
}

// transpile-report

/// The dynamic-lapse circuit when the scenario has a lapse table, otherwise
/// the whole-life circuit when it has a mortality table, otherwise the loader.
inline Circuit report_circuit(const Scenario& sc) {
  const auto proc = sc.process();
  if (sc.lapse) {
    return dynamic_lapse_circuit(proc, sc.lapse_model()).circuit;
  }
  if (sc.mortality) {
    return whole_life_circuit(proc, sc.mortality_weights(), sc.scale).circuit;
  }
  Circuit c = process_loader(proc);
  c.mark("load");
  return c;
}

inline ordered_json cost_json(const CostReport& rep) {
  ordered_json j;
  j["width"] = rep.width;
  j["extra_ancillas"] = rep.extra_ancillas;
  j["rows"] = ordered_json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back({{"step", r.step},
                         {"cnot", r.counts.cnot},
                         {"rz", r.counts.rz},
                         {"sx", r.counts.sx},
                         {"x", r.counts.x},
                         {"id", r.counts.id},
                         {"depth", r.depth},
                         {"cost", r.cost}});
  }
  j["depth"] = rep.depth;
  j["cost"] = rep.cost;
  return j;
}

inline std::string cost_csv(const CostReport& rep) {
  std::ostringstream os;
  os << "step,cnot,rz,sx,x,id,depth,cost\n";
  for (const auto& r : rep.rows) {
    os << r.step << ',' << r.counts.cnot << ',' << r.counts.rz << ',' << r.counts.sx << ',' << r.counts.x << ','
       << r.counts.id << ',' << r.depth << ',' << r.cost << '\n';
  }
  return os.str();
}

// dispatch

inline std::string run(const RunConfig& cfg) {
  check_config(cfg);
  const bool csv = cfg.format == "csv";
  if (cfg.command == "dynlapse") {
    const auto j = dynlapse_json(cfg, require_scenario(cfg));
    return csv ? dynlapse_csv(j) : j.dump(2) + "\n";
  }
  if (cfg.command == "wholelife") {
    const auto j = wholelife_json(require_scenario(cfg));
    return csv ? wholelife_csv(j) : j.dump(2) + "\n";
  }
  if (cfg.command == "ae") {
    const auto j = ae_json(cfg);
    return csv ? ae_csv(j) : j.dump(2) + "\n";
  }
  if (cfg.command == "convergence") {
    std::optional<DiscreteDistribution> dist;
    if (!cfg.scenario.empty()) {
      dist = ae_input(cfg);
    }
    const auto rows = convergence_rows(dist, cfg.seed);
    return csv ? convergence_csv(rows) : convergence_json(rows).dump(2) + "\n";
  }
  const auto rep = cumulative_report(report_circuit(require_scenario(cfg)));
  return csv ? cost_csv(rep) : cost_json(rep).dump(2) + "\n";
}

inline std::string error_json(const std::string& code, const std::string& message) {
  ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  return j.dump() + "\n";
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << text;
    out.close();
    require(!out.fail(), ErrorCode::InvalidArgument, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::InvalidArgument, "cannot write " + path + ": " + ec.message());
  }
}

} // namespace qinsure::cli
