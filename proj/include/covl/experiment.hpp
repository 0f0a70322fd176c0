#ifndef COVL_EXPERIMENT_HPP
#define COVL_EXPERIMENT_HPP

// Experiment files and the batch runner behind the covl-bench tool.
//
// Config files are INI-style text:
//
//   # comment
//   [scenario]
//   kind = gaussian-ssr        # or ula-doa
//   N = 32
//   M = 256                    # ula-doa: optional, implied by grid_step_deg
//   L = 32
//   K = 4
//   snr_db = 1:1:7             # list "a, b, c" or range "start:step:stop"
//   source_offsets_db = 0, -1, -2, -4
//   snr_mode = first-source    # or mean
//   rho = 0
//   sigma2 = 1
//   doas_deg = -20.02, 3.02    # ula-doa only
//   grid_step_deg = 0.1        # ula-doa only
//   seed = 1
//   trials = 200
//
//   [method.cl-omp]            # one section per method, keys optional
//   [method.cl-bcd]
//   max_iter = 500
//   tol = 0.5e-4
//   peak = false
//
//   [output]
//   dir = results
//   emit = csv, json
//   record_timing = false
//
// Keys are case-insensitive. Unknown sections and keys are rejected with the
// offending line number.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covl/scenario.hpp"
#include "covl/version.hpp"

namespace covl {

struct ExperimentSpec {
  ScenarioConfig scenario;
  std::vector<MethodSpec> methods;
  std::filesystem::path output_dir = "results";
  bool emit_csv = true;
  bool emit_json = true;
  bool record_timing = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class LineError {
 public:
  LineError(std::string file, int line) : file_(std::move(file)), line_(line) {}
  [[noreturn]] void fail(ErrorKind kind, const std::string& msg) const {
    throw Error(kind, file_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  std::string file_;
  int line_;
};

inline double parse_double(const std::string& v, const std::string& key, const LineError& at) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || p != last) at.fail(ErrorKind::Parse, "key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& v, const std::string& key, const LineError& at) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    at.fail(ErrorKind::Parse, "key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key, const LineError& at) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    at.fail(ErrorKind::Parse, "key '" + key + "': expected an unsigned integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key, const LineError& at) {
  const std::string l = lower(v);
  if (l == "true" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "no" || l == "0") return false;
  at.fail(ErrorKind::Parse, "key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

// "a, b, c" or "start:step:stop" (inclusive, tolerant to rounding).
inline std::vector<double> parse_doubles(const std::string& v, const std::string& key, const LineError& at) {
  if (v.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) at.fail(ErrorKind::Parse, "key '" + key + "': range must be start:step:stop");
    const double a = parse_double(parts[0], key, at);
    const double step = parse_double(parts[1], key, at);
    const double b = parse_double(parts[2], key, at);
    if (step == 0.0 || (b - a) / step < 0.0) at.fail(ErrorKind::Parse, "key '" + key + "': empty or endless range");
    const auto count = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (long long i = 0; i < count; ++i) out.push_back(std::round((a + static_cast<double>(i) * step) * 1e9) / 1e9);
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(s, key, at));
  if (out.empty()) at.fail(ErrorKind::Parse, "key '" + key + "': empty list");
  return out;
}

inline std::string supported_methods() {
  std::string s;
  for (const auto& m : method_table()) {
    if (!s.empty()) s += ", ";
    s += m.tag;
  }
  return s;
}

}  // namespace detail

/// Parses experiment text. `origin` names the source in diagnostics.
inline ExperimentSpec parse_spec_text(const std::string& text, const std::string& origin = "<config>") {
  using namespace detail;
  ExperimentSpec spec;
  ScenarioConfig& sc = spec.scenario;
  std::set<std::string> seen_scenario;
  std::set<std::string> seen_methods;
  bool have_m = false;
  std::string section;
  MethodSpec* current = nullptr;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const LineError at(origin, lineno);
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail(ErrorKind::Parse, "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      current = nullptr;
      if (section.rfind("method.", 0) == 0) {
        const std::string tag = section.substr(7);
        const auto kind = method_from_tag(tag);
        if (!kind) at.fail(ErrorKind::Validation, "unknown method '" + tag + "'; supported: " + supported_methods());
        if (!seen_methods.insert(tag).second) at.fail(ErrorKind::Validation, "method '" + tag + "' listed twice");
        spec.methods.push_back(MethodSpec{});
        spec.methods.back().kind = *kind;
        current = &spec.methods.back();
      } else if (section != "scenario" && section != "output") {
        at.fail(ErrorKind::Parse, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail(ErrorKind::Parse, "expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) at.fail(ErrorKind::Parse, "missing key");
    if (val.empty()) at.fail(ErrorKind::Parse, "key '" + key + "' has no value");
    if (section.empty()) at.fail(ErrorKind::Parse, "key '" + key + "' appears before any section");

    if (section == "scenario") {
      if (!seen_scenario.insert(key).second) at.fail(ErrorKind::Parse, "duplicate key '" + key + "'");
      if (key == "kind") {
        if (val == "gaussian-ssr") sc.kind = ScenarioKind::GaussianSsr;
        else if (val == "ula-doa") sc.kind = ScenarioKind::UlaDoa;
        else at.fail(ErrorKind::Validation, "key 'kind': expected gaussian-ssr or ula-doa, got '" + val + "'");
      } else if (key == "n") {
        sc.n = parse_int(val, key, at);
      } else if (key == "m") {
        sc.m = parse_int(val, key, at);
        have_m = true;
      } else if (key == "l") {
        sc.l = parse_int(val, key, at);
      } else if (key == "k") {
        sc.k = parse_int(val, key, at);
      } else if (key == "snr_db") {
        sc.snr_db = parse_doubles(val, key, at);
      } else if (key == "source_offsets_db") {
        sc.source_offsets_db = parse_doubles(val, key, at);
      } else if (key == "snr_mode") {
        if (val == "first-source") sc.snr_mode = SnrMode::FirstSource;
        else if (val == "mean") sc.snr_mode = SnrMode::Mean;
        else at.fail(ErrorKind::Validation, "key 'snr_mode': expected first-source or mean, got '" + val + "'");
      } else if (key == "rho") {
        sc.rho = parse_double(val, key, at);
      } else if (key == "sigma2") {
        sc.sigma2 = parse_double(val, key, at);
      } else if (key == "doas_deg") {
        sc.true_doas_deg = parse_doubles(val, key, at);
      } else if (key == "grid_step_deg") {
        sc.grid_step_deg = parse_double(val, key, at);
      } else if (key == "seed") {
        sc.seed = parse_u64(val, key, at);
      } else if (key == "trials") {
        sc.trials = static_cast<int>(parse_int(val, key, at));
      } else {
        at.fail(ErrorKind::Parse, "unknown key '" + key + "' in [scenario]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        spec.output_dir = val;
      } else if (key == "emit") {
        spec.emit_csv = spec.emit_json = false;
        for (const auto& e : split_list(val)) {
          if (e == "csv") spec.emit_csv = true;
          else if (e == "json") spec.emit_json = true;
          else at.fail(ErrorKind::Validation, "key 'emit': unknown format '" + e + "' (csv, json)");
        }
      } else if (key == "record_timing") {
        spec.record_timing = parse_bool(val, key, at);
      } else {
        at.fail(ErrorKind::Parse, "unknown key '" + key + "' in [output]");
      }
    } else {
      MethodSpec& m = *current;
      if (key == "max_iter") {
        m.max_iter = static_cast<int>(parse_int(val, key, at));
        if (m.max_iter < 1) at.fail(ErrorKind::Validation, "key 'max_iter' must be >= 1");
      } else if (key == "tol") {
        m.tol = parse_double(val, key, at);
        if (!(m.tol > 0.0)) at.fail(ErrorKind::Validation, "key 'tol' must be positive");
      } else if (key == "peak") {
        m.peak = parse_bool(val, key, at);
      } else if (key == "prune_threshold" && m.kind == MethodKind::ClBcd) {
        m.prune_threshold = parse_double(val, key, at);
        if (m.prune_threshold < 0.0) at.fail(ErrorKind::Validation, "key 'prune_threshold' must be >= 0");
      } else if (key == "sigma2_floor" && m.kind == MethodKind::ClOmp) {
        m.sigma2_floor = parse_double(val, key, at);
      } else if (key == "known_sigma2" && m.kind == MethodKind::Msbl) {
        m.known_sigma2 = parse_double(val, key, at);
        if (!(*m.known_sigma2 > 0.0)) at.fail(ErrorKind::Validation, "key 'known_sigma2' must be positive");
      } else {
        at.fail(ErrorKind::Parse, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  auto need = [&](const char* key) {
    if (!seen_scenario.count(key))
      throw Error(ErrorKind::Validation, origin + ": missing required key '" + key + "' in [scenario]");
  };
  need("kind");
  need("n");
  need("l");
  need("k");
  need("snr_db");
  if (sc.kind == ScenarioKind::GaussianSsr) need("m");
  if (sc.kind == ScenarioKind::UlaDoa) {
    need("doas_deg");
    const auto implied = static_cast<Index>(angle_grid(sc.grid_step_deg).size());
    if (!have_m) sc.m = implied;
  }
  if (spec.methods.empty())
    throw Error(ErrorKind::Validation, origin + ": no [method.<tag>] section; supported: " + supported_methods());
  if (sc.k >= sc.n)
    throw Error(ErrorKind::Validation, origin + ": key 'K' must satisfy K < N (K=" + std::to_string(sc.k) +
                                           ", N=" + std::to_string(sc.n) + ")");
  if (sc.trials < 1) throw Error(ErrorKind::Validation, origin + ": key 'trials' must be >= 1");
  try {
    sc.validate();
  } catch (const Error& e) {
    const std::string w = e.what();
    throw Error(ErrorKind::Validation, origin + ": " + w.substr(w.find(": ") + 2));
  }
  return spec;
}

inline ExperimentSpec parse_spec(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spec_text(ss.str(), path.string());
}

/// JSON echo of a spec, written into meta.json.
inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  const ScenarioConfig& s = spec.scenario;
  nlohmann::json j;
  j["scenario"] = {{"kind", s.kind == ScenarioKind::UlaDoa ? "ula-doa" : "gaussian-ssr"},
                   {"N", s.n},
                   {"M", s.m},
                   {"L", s.l},
                   {"K", s.k},
                   {"snr_db", s.snr_db},
                   {"source_offsets_db", s.source_offsets_db},
                   {"snr_mode", s.snr_mode == SnrMode::Mean ? "mean" : "first-source"},
                   {"rho", s.rho},
                   {"sigma2", s.sigma2},
                   {"seed", s.seed},
                   {"trials", s.trials}};
  if (s.kind == ScenarioKind::UlaDoa) {
    j["scenario"]["doas_deg"] = s.true_doas_deg;
    j["scenario"]["grid_step_deg"] = s.grid_step_deg;
  }
  j["methods"] = nlohmann::json::array();
  for (const auto& m : spec.methods) {
    nlohmann::json mj = {{"tag", m.tag()}, {"max_iter", m.max_iter}, {"tol", m.tol}};
    if (m.peak) mj["peak"] = *m.peak;
    if (m.prune_threshold > 0.0) mj["prune_threshold"] = m.prune_threshold;
    if (m.sigma2_floor) mj["sigma2_floor"] = *m.sigma2_floor;
    if (m.known_sigma2) mj["known_sigma2"] = *m.known_sigma2;
    j["methods"].push_back(mj);
  }
  j["output"] = {{"dir", spec.output_dir.string()}, {"csv", spec.emit_csv}, {"json", spec.emit_json},
                 {"record_timing", spec.record_timing}};
  return j;
}

namespace detail {

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

/// CSV with header; rmse_theta_deg is left empty for gaussian-ssr scenarios.
inline std::string results_csv(const std::vector<MetricsRecord>& records) {
  std::string out = "method,snr_db,trials,per,rmse_theta_deg,nmse_gamma,mean_iters,mean_runtime_s\n";
  for (const auto& r : records) {
    out += r.method + "," + detail::fmt_num(r.snr_db) + "," + std::to_string(r.trials) + "," +
           detail::fmt_num(r.per) + "," + (r.rmse_theta_deg ? detail::fmt_num(*r.rmse_theta_deg) : "") + "," +
           detail::fmt_num(r.nmse_gamma) + "," + detail::fmt_num(r.mean_iters) + "," +
           detail::fmt_num(r.mean_runtime_s) + "\n";
  }
  return out;
}

struct RunOptions {
  unsigned threads = 1;
  std::function<void(int, int)> progress;
};

/// Runs the campaign and writes results.csv / meta.json into the output
/// directory. Returns 0 on success, 1 when any trial failed.
inline int run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  MonteCarloOptions mc;
  mc.threads = opt.threads;
  mc.record_timing = spec.record_timing;
  mc.progress = opt.progress;
  const auto records = run_monte_carlo(spec.scenario, spec.methods, mc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + spec.output_dir.string());

  int failures = 0;
  for (const auto& r : records) failures += r.failures;

  if (spec.emit_csv) {
    std::ofstream f(spec.output_dir / "results.csv", std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write results.csv");
    f << results_csv(records);
    if (!f) throw Error(ErrorKind::Io, "write to results.csv failed");
  }
  if (spec.emit_json) {
    nlohmann::json meta;
    meta["spec"] = spec_to_json(spec);
    meta["seed"] = spec.scenario.seed;
    meta["version"] = COVL_VERSION;
    meta["wall_time_s"] = wall;
    meta["threads"] = opt.threads;
    meta["failed_trials"] = failures;
    meta["rows"] = nlohmann::json::array();
    for (const auto& r : records) {
      meta["rows"].push_back({{"method", r.method},
                              {"snr_db", r.snr_db},
                              {"trials", r.trials},
                              {"failures", r.failures},
                              {"nonneg_powers", r.nonneg_powers},
                              {"positive_noise", r.positive_noise},
                              {"distinct_growth", r.distinct_growth}});
    }
    std::ofstream f(spec.output_dir / "meta.json", std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write meta.json");
    f << meta.dump(2) << "\n";
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace covl

#endif  // COVL_EXPERIMENT_HPP
