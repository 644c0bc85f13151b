#include "bextra/experiment.hpp"

#include <cctype>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bextra {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line,
                            const char* expected) {
  throw std::invalid_argument("config key '" + key + "' (line " + std::to_string(line) +
                              "): expected " + expected + ", got '" + value + "'");
}

long long parse_ll(const std::string& key, const std::string& value, int line) {
  long long out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(key, value, line, "an integer");
  return out;
}

int parse_int(const std::string& key, const std::string& value, int line) {
  const long long v = parse_ll(key, value, line);
  if (v < INT_MIN || v > INT_MAX) bad_value(key, value, line, "an integer in range");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value, int line) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(key, value, line, "a nonnegative integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value, int line) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || value.empty())
    bad_value(key, value, line, "a number");
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

ArmSpec parse_arm(const std::string& value, int line) {
  const std::vector<std::string> tokens = split_ws(value);
  if (tokens.empty()) bad_value("arm", value, line, "an algorithm name");
  ArmSpec arm;
  try {
    arm.algorithm = algorithm_kind_from_name(tokens.front());
  } catch (const std::invalid_argument&) {
    bad_value("arm", tokens.front(), line, "'extra' or 'bundle_extra'");
  }
  for (size_t t = 1; t < tokens.size(); ++t) {
    const auto eq = tokens[t].find('=');
    if (eq == std::string::npos)
      bad_value("arm", tokens[t], line, "key=value options after the algorithm");
    const std::string key = tokens[t].substr(0, eq);
    const std::string val = tokens[t].substr(eq + 1);
    if (key == "model") {
      try {
        arm.model = model_kind_from_name(val);
      } catch (const std::invalid_argument&) {
        bad_value("arm model", val, line, "a model kind");
      }
    } else if (key == "window") {
      arm.window = parse_int("arm window", val, line);
    } else if (key == "alpha") {
      arm.alpha = parse_double("arm alpha", val, line);
      arm.has_alpha = true;
    } else if (key == "name") {
      arm.name = val;
    } else {
      bad_value("arm", key, line, "one of model/window/alpha/name");
    }
  }
  return arm;
}

std::string default_arm_name(const ArmSpec& arm) {
  if (arm.algorithm == AlgorithmKind::extra) return "extra";
  std::string name = std::string("bundle_extra_") + model_kind_name(arm.model);
  if (arm.model == ModelKind::cutting_plane || arm.model == ModelKind::polyak_cutting_plane)
    name += "_m" + std::to_string(arm.window);
  return name;
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  return true;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void fnv_bytes(std::uint64_t& h, const void* data, size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void fnv_u64(std::uint64_t& h, std::uint64_t v) { fnv_bytes(h, &v, sizeof v); }

void fnv_doubles(std::uint64_t& h, const double* data, size_t count) {
  fnv_bytes(h, data, count * sizeof(double));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  return out;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunConfig arm_run_config(const ExperimentSpec& spec, const PreparedExperiment& prep,
                         const ArmSpec& arm, double alpha) {
  RunConfig rc;
  rc.algorithm = arm.algorithm;
  rc.model = arm.model;
  rc.window = arm.window;
  rc.alpha = alpha;
  rc.max_iters = spec.max_iters;
  rc.inner_tol = spec.inner_tol;
  rc.inner_max_iters = spec.inner_max_iters;
  rc.threads = spec.threads;
  rc.graph = &prep.graph;
  rc.mixing = &prep.mixing;
  rc.problem = &prep.problem;
  rc.x0 = prep.x0;
  return rc;
}

void write_snapshot(const ExperimentSpec& spec, const PreparedExperiment& prep,
                    const std::string& out_dir) {
  std::ofstream out = open_output(out_dir + "/snapshot.txt");
  out << "# snapshot generated at " << timestamp_utc() << "\n";
  out << "# derived graph_seed = " << prep.graph_seed << "\n";
  out << "# derived instance_seed = " << prep.instance_seed << "\n";
  out << "# derived x0_seed = " << prep.x0_seed << "\n";
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(prep.instance_hash));
  out << "# instance_hash = " << hash << "\n";
  out << spec_to_text(spec);
}

}  // namespace

ExperimentSpec parse_spec_text(const std::string& text) {
  ExperimentSpec spec;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line) +
                                  ": expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key != "arm" && !seen.insert(key).second)
      throw std::invalid_argument("config key '" + key + "' (line " + std::to_string(line) +
                                  "): duplicate assignment");
    if (key == "n") {
      spec.n = parse_int(key, value, line);
    } else if (key == "d") {
      spec.d = parse_int(key, value, line);
    } else if (key == "eta") {
      spec.eta = parse_int(key, value, line);
    } else if (key == "edges") {
      spec.edges = parse_int(key, value, line);
    } else if (key == "seed") {
      spec.seed = parse_u64(key, value, line);
    } else if (key == "weights") {
      spec.weights = value;
    } else if (key == "tau") {
      spec.tau = parse_double(key, value, line);
    } else if (key == "x0") {
      spec.x0_mode = value;
    } else if (key == "max_iters") {
      spec.max_iters = parse_int(key, value, line);
    } else if (key == "conv_tol") {
      spec.conv_tol = parse_double(key, value, line);
    } else if (key == "inner_tol") {
      spec.inner_tol = parse_double(key, value, line);
    } else if (key == "inner_max_iters") {
      spec.inner_max_iters = parse_int(key, value, line);
    } else if (key == "threads") {
      spec.threads = parse_int(key, value, line);
    } else if (key == "arm") {
      spec.arms.push_back(parse_arm(value, line));
    } else if (key == "sweep_alphas") {
      std::string list = value;
      for (char& c : list)
        if (c == ',') c = ' ';
      for (const std::string& tok : split_ws(list))
        spec.sweep_alphas.push_back(parse_double("sweep_alphas", tok, line));
      if (spec.sweep_alphas.empty()) bad_value(key, value, line, "a list of step sizes");
    } else {
      throw std::invalid_argument("unknown config key '" + key + "' (line " +
                                  std::to_string(line) + ")");
    }
  }
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

void validate_spec(const ExperimentSpec& spec, bool for_sweep) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("config field '" + field + "': " + why);
  };
  if (spec.n < 1) fail("n", "must be >= 1");
  if (spec.d < 1) fail("d", "must be >= 1");
  if (spec.eta < 1) fail("eta", "must be >= 1");
  const long long max_edges = static_cast<long long>(spec.n) * (spec.n - 1) / 2;
  if (spec.edges < spec.n - 1 || spec.edges > max_edges)
    fail("edges", "must lie in [n-1, n(n-1)/2] = [" + std::to_string(spec.n - 1) + ", " +
                      std::to_string(max_edges) + "]");
  if (spec.weights != "metropolis" && spec.weights != "laplacian")
    fail("weights", "must be 'metropolis' or 'laplacian'");
  if (spec.weights == "laplacian" && !(spec.tau > 0.0))
    fail("tau", "must be positive for laplacian weights");
  if (spec.x0_mode != "zeros" && spec.x0_mode != "gaussian")
    fail("x0", "must be 'zeros' or 'gaussian'");
  if (spec.max_iters < 0) fail("max_iters", "must be >= 0");
  if (!(spec.conv_tol > 0.0)) fail("conv_tol", "must be positive");
  if (!(spec.inner_tol > 0.0)) fail("inner_tol", "must be positive");
  if (spec.inner_max_iters < 1) fail("inner_max_iters", "must be >= 1");
  if (spec.threads < 1) fail("threads", "must be >= 1");
  if (spec.arms.empty()) fail("arm", "at least one arm is required");
  std::set<std::string> names;
  for (const ArmSpec& arm : spec.arms) {
    const std::string name = arm.name.empty() ? default_arm_name(arm) : arm.name;
    if (!valid_name(name))
      fail("arm name", "'" + name + "' must be nonempty alphanumeric/underscore/dash");
    if (!names.insert(name).second)
      fail("arm name", "'" + name + "' appears twice; set name= to disambiguate");
    if (arm.window < 0) fail("arm window", "must be >= 0");
    if (!for_sweep) {
      if (!arm.has_alpha) fail("arm alpha", "required for the run command (arm '" + name + "')");
      if (!(arm.alpha > 0.0)) fail("arm alpha", "must be positive (arm '" + name + "')");
    }
  }
  if (for_sweep) {
    if (spec.sweep_alphas.empty()) fail("sweep_alphas", "required for the sweep command");
    for (double a : spec.sweep_alphas)
      if (!(a > 0.0)) fail("sweep_alphas", "all step sizes must be positive");
  }
}

PreparedExperiment prepare(const ExperimentSpec& spec) {
  std::mt19937_64 master(spec.seed);
  const std::uint64_t graph_seed = master();
  const std::uint64_t instance_seed = master();
  const std::uint64_t x0_seed = master();

  Graph graph = random_connected_graph(spec.n, spec.edges, graph_seed);
  const Eigen::MatrixXd W = spec.weights == "metropolis" ? metropolis_weights(graph)
                                                         : laplacian_weights(graph, spec.tau);
  MixingPair mixing = make_mixing_pair(W, graph);
  Problem problem = least_squares_instance(spec.n, spec.d, spec.eta, instance_seed);
  problem.reference_optimum = global_optimum_least_squares(problem);

  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(spec.n, spec.d);
  if (spec.x0_mode == "gaussian") {
    std::mt19937_64 rng(x0_seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < spec.n; ++i)
      for (int c = 0; c < spec.d; ++c) x0(i, c) = unit(rng);
  }

  std::uint64_t h = 14695981039346656037ULL;
  fnv_u64(h, static_cast<std::uint64_t>(spec.n));
  fnv_u64(h, static_cast<std::uint64_t>(spec.d));
  fnv_u64(h, static_cast<std::uint64_t>(spec.eta));
  for (const auto& [a, b] : graph.edges()) {
    fnv_u64(h, static_cast<std::uint64_t>(a));
    fnv_u64(h, static_cast<std::uint64_t>(b));
  }
  const LeastSquaresData& ls = *problem.least_squares;
  for (int i = 0; i < spec.n; ++i) {
    fnv_doubles(h, ls.P[static_cast<size_t>(i)].data(),
                static_cast<size_t>(ls.P[static_cast<size_t>(i)].size()));
    fnv_doubles(h, ls.q[static_cast<size_t>(i)].data(),
                static_cast<size_t>(ls.q[static_cast<size_t>(i)].size()));
  }
  fnv_doubles(h, x0.data(), static_cast<size_t>(x0.size()));

  return PreparedExperiment{std::move(graph), std::move(mixing), std::move(problem),
                            std::move(x0),    graph_seed,        instance_seed,
                            x0_seed,          h};
}

std::string spec_to_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "n = " << spec.n << "\n";
  out << "d = " << spec.d << "\n";
  out << "eta = " << spec.eta << "\n";
  out << "edges = " << spec.edges << "\n";
  out << "seed = " << spec.seed << "\n";
  out << "weights = " << spec.weights << "\n";
  if (spec.weights == "laplacian") out << "tau = " << format_g(spec.tau) << "\n";
  out << "x0 = " << spec.x0_mode << "\n";
  out << "max_iters = " << spec.max_iters << "\n";
  out << "conv_tol = " << format_g(spec.conv_tol) << "\n";
  out << "inner_tol = " << format_g(spec.inner_tol) << "\n";
  out << "inner_max_iters = " << spec.inner_max_iters << "\n";
  out << "threads = " << spec.threads << "\n";
  for (const ArmSpec& arm : spec.arms) {
    out << "arm = " << algorithm_kind_name(arm.algorithm);
    if (arm.algorithm == AlgorithmKind::bundle_extra)
      out << " model=" << model_kind_name(arm.model) << " window=" << arm.window;
    if (arm.has_alpha) out << " alpha=" << format_g(arm.alpha);
    out << " name=" << (arm.name.empty() ? default_arm_name(arm) : arm.name);
    out << "\n";
  }
  if (!spec.sweep_alphas.empty()) {
    out << "sweep_alphas =";
    for (double a : spec.sweep_alphas) out << " " << format_g(a);
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> cmd_run(const ExperimentSpec& spec, const std::string& out_dir) {
  validate_spec(spec, false);
  PreparedExperiment prep = prepare(spec);
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> paths;
  for (const ArmSpec& arm : spec.arms) {
    const RunConfig rc = arm_run_config(spec, prep, arm, arm.alpha);
    const RunResult rr = run(rc);
    const std::string name = arm.name.empty() ? default_arm_name(arm) : arm.name;
    const std::string path = out_dir + "/" + name + ".csv";
    std::ofstream out = open_output(path);
    out << "k,consensus_residual,grad_residual,rel_error,cumulative_kkt_sum,inner_iters_total\n";
    for (const IterationMetrics& m : rr.trajectory) {
      out << m.k << ',' << format_g(m.consensus_residual) << ',' << format_g(m.grad_residual)
          << ',' << format_g(m.rel_error) << ',' << format_g(m.cumulative_kkt_sum) << ','
          << m.inner_iters_total << "\n";
    }
    paths.push_back(path);
  }
  write_snapshot(spec, prep, out_dir);
  paths.push_back(out_dir + "/snapshot.txt");
  return paths;
}

std::string cmd_sweep(const ExperimentSpec& spec, const std::string& out_dir) {
  validate_spec(spec, true);
  PreparedExperiment prep = prepare(spec);
  std::filesystem::create_directories(out_dir);

  const std::string path = out_dir + "/sweep.csv";
  std::ofstream out = open_output(path);
  out << "arm,alpha,final_rel_error,iters_to_tol,diverged\n";
  for (const ArmSpec& arm : spec.arms) {
    const std::string name = arm.name.empty() ? default_arm_name(arm) : arm.name;
    for (double alpha : spec.sweep_alphas) {
      RunConfig rc = arm_run_config(spec, prep, arm, alpha);
      rc.stop_rel_error = spec.conv_tol;
      const RunResult rr = run(rc);
      std::string iters_to_tol = "not reached";
      for (const IterationMetrics& m : rr.trajectory)
        if (m.rel_error <= spec.conv_tol) {
          iters_to_tol = std::to_string(m.k);
          break;
        }
      const double final_rel = rr.trajectory.empty()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : rr.trajectory.back().rel_error;
      out << name << ',' << format_g(alpha) << ',' << format_g(final_rel) << ',' << iters_to_tol
          << ',' << (rr.diverged ? 1 : 0) << "\n";
    }
  }
  write_snapshot(spec, prep, out_dir);
  return path;
}

}  // namespace bextra
