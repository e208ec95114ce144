#include "attrition/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace attrition {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for '" + key +
                                "': " + v);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer value for '" + key +
                                "': " + v);
  }
}

RunMode parse_mode(const std::string& v) {
  if (v == "stochastic") return RunMode::Stochastic;
  if (v == "deterministic") return RunMode::Deterministic;
  if (v == "calibrate-only") return RunMode::CalibrateOnly;
  if (v == "value-only") return RunMode::ValueOnly;
  throw std::invalid_argument("config: unknown mode '" + v + "'");
}

void parse_boundary(const std::string& v, BoundaryChoice& out) {
  if (v == "calibrate") {
    out.kind = BoundaryChoice::Kind::Calibrate;
  } else if (v == "auto") {
    out.kind = BoundaryChoice::Kind::Auto;
  } else if (v.rfind("gamma=", 0) == 0) {
    out.kind = BoundaryChoice::Kind::FixedGamma;
    out.gamma = parse_double("boundary", v.substr(6));
  } else {
    throw std::invalid_argument(
        "config: boundary must be 'calibrate', 'auto' or 'gamma=<float>', "
        "got '" +
        v + "'");
  }
}

std::vector<double> parse_grid(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double("x_grid", item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty x_grid");
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ExperimentConfig parse_flat(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value': " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "mu_x") c.params.mu_x = parse_double(key, val);
    else if (key == "mu_y") c.params.mu_y = parse_double(key, val);
    else if (key == "sigma_x") c.params.sigma_x = parse_double(key, val);
    else if (key == "sigma_y") c.params.sigma_y = parse_double(key, val);
    else if (key == "rho") c.params.rho = parse_double(key, val);
    else if (key == "r") c.params.r = parse_double(key, val);
    else if (key == "c0") c.params.c0 = parse_double(key, val);
    else if (key == "cA") c.params.cA = parse_double(key, val);
    else if (key == "cB") c.params.cB = parse_double(key, val);
    else if (key == "I") c.params.inv = parse_double(key, val);
    else if (key == "x0") c.s0.x = parse_double(key, val);
    else if (key == "y0") c.s0.y = parse_double(key, val);
    else if (key == "n_paths") c.n_paths = parse_u64(key, val);
    else if (key == "dt") c.dt = parse_double(key, val);
    else if (key == "horizon") c.horizon = parse_double(key, val);
    else if (key == "seed") c.seed = parse_u64(key, val);
    else if (key == "mode") c.mode = parse_mode(val);
    else if (key == "boundary") parse_boundary(val, c.boundary);
    else if (key == "x_grid") c.boundary.x_grid = parse_grid(val);
    else if (key == "calib_paths") c.calib_paths = parse_u64(key, val);
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return c;
}

}  // namespace

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::Stochastic: return "stochastic";
    case RunMode::Deterministic: return "deterministic";
    case RunMode::CalibrateOnly: return "calibrate-only";
    case RunMode::ValueOnly: return "value-only";
  }
  return "?";
}

bool operator==(const BoundaryChoice& a, const BoundaryChoice& b) {
  return a.kind == b.kind && a.gamma == b.gamma && a.x_grid == b.x_grid;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& p = a.params;
  const auto& q = b.params;
  return p.mu_x == q.mu_x && p.mu_y == q.mu_y && p.sigma_x == q.sigma_x &&
         p.sigma_y == q.sigma_y && p.rho == q.rho && p.r == q.r &&
         p.c0 == q.c0 && p.cA == q.cA && p.cB == q.cB && p.inv == q.inv &&
         a.s0.x == b.s0.x && a.s0.y == b.s0.y && a.n_paths == b.n_paths &&
         a.dt == b.dt && a.horizon == b.horizon && a.seed == b.seed &&
         a.mode == b.mode && a.boundary == b.boundary &&
         a.calib_paths == b.calib_paths;
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  if (c.n_paths < 1) out.push_back("n_paths >= 1 violated");
  if (!(c.dt > 0.0)) out.push_back("dt > 0 violated");
  if (!(c.horizon > c.dt)) out.push_back("horizon > dt violated");
  if (c.boundary.kind == BoundaryChoice::Kind::FixedGamma &&
      !(c.boundary.gamma > 0.0)) {
    out.push_back("boundary gamma > 0 violated");
  }
  const auto dyn = c.mode == RunMode::Deterministic ? Dynamics::Deterministic
                                                    : Dynamics::Stochastic;
  for (auto& v : validate_params(c.params, dyn)) out.push_back(v);
  if (c.mode != RunMode::CalibrateOnly) {
    if (!(c.s0.x > 0.0) || !(c.s0.y > 0.0)) {
      out.push_back(
          "start state on an axis (x0 = 0 or y0 = 0) is a degenerate game "
          "and is not simulated");
    }
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '{') return config_from_json(nlohmann::json::parse(text));
    break;
  }
  return parse_flat(text);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "mu_x = " << fmt_double(c.params.mu_x) << "\n";
  os << "mu_y = " << fmt_double(c.params.mu_y) << "\n";
  os << "sigma_x = " << fmt_double(c.params.sigma_x) << "\n";
  os << "sigma_y = " << fmt_double(c.params.sigma_y) << "\n";
  os << "rho = " << fmt_double(c.params.rho) << "\n";
  os << "r = " << fmt_double(c.params.r) << "\n";
  os << "c0 = " << fmt_double(c.params.c0) << "\n";
  os << "cA = " << fmt_double(c.params.cA) << "\n";
  os << "cB = " << fmt_double(c.params.cB) << "\n";
  os << "I = " << fmt_double(c.params.inv) << "\n";
  os << "x0 = " << fmt_double(c.s0.x) << "\n";
  os << "y0 = " << fmt_double(c.s0.y) << "\n";
  os << "n_paths = " << c.n_paths << "\n";
  os << "dt = " << fmt_double(c.dt) << "\n";
  os << "horizon = " << fmt_double(c.horizon) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "mode = " << run_mode_name(c.mode) << "\n";
  switch (c.boundary.kind) {
    case BoundaryChoice::Kind::Calibrate: os << "boundary = calibrate\n"; break;
    case BoundaryChoice::Kind::Auto: os << "boundary = auto\n"; break;
    case BoundaryChoice::Kind::FixedGamma:
      os << "boundary = gamma=" << fmt_double(c.boundary.gamma) << "\n";
      break;
  }
  os << "x_grid = ";
  for (std::size_t i = 0; i < c.boundary.x_grid.size(); ++i) {
    if (i) os << ",";
    os << fmt_double(c.boundary.x_grid[i]);
  }
  os << "\n";
  os << "calib_paths = " << c.calib_paths << "\n";
  return os.str();
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["mu_x"] = c.params.mu_x;
  j["mu_y"] = c.params.mu_y;
  j["sigma_x"] = c.params.sigma_x;
  j["sigma_y"] = c.params.sigma_y;
  j["rho"] = c.params.rho;
  j["r"] = c.params.r;
  j["c0"] = c.params.c0;
  j["cA"] = c.params.cA;
  j["cB"] = c.params.cB;
  j["I"] = c.params.inv;
  j["x0"] = c.s0.x;
  j["y0"] = c.s0.y;
  j["n_paths"] = c.n_paths;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["mode"] = run_mode_name(c.mode);
  switch (c.boundary.kind) {
    case BoundaryChoice::Kind::Calibrate: j["boundary"] = "calibrate"; break;
    case BoundaryChoice::Kind::Auto: j["boundary"] = "auto"; break;
    case BoundaryChoice::Kind::FixedGamma:
      j["boundary"] = "gamma=" + fmt_double(c.boundary.gamma);
      break;
  }
  j["x_grid"] = c.boundary.x_grid;
  j["calib_paths"] = c.calib_paths;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  const auto get_d = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = j.at(key).get<double>();
  };
  get_d("mu_x", c.params.mu_x);
  get_d("mu_y", c.params.mu_y);
  get_d("sigma_x", c.params.sigma_x);
  get_d("sigma_y", c.params.sigma_y);
  get_d("rho", c.params.rho);
  get_d("r", c.params.r);
  get_d("c0", c.params.c0);
  get_d("cA", c.params.cA);
  get_d("cB", c.params.cB);
  get_d("I", c.params.inv);
  get_d("x0", c.s0.x);
  get_d("y0", c.s0.y);
  get_d("dt", c.dt);
  get_d("horizon", c.horizon);
  if (j.contains("n_paths")) c.n_paths = j.at("n_paths").get<std::uint64_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("boundary")) {
    parse_boundary(j.at("boundary").get<std::string>(), c.boundary);
  }
  if (j.contains("x_grid")) {
    c.boundary.x_grid = j.at("x_grid").get<std::vector<double>>();
    if (c.boundary.x_grid.empty()) {
      throw std::invalid_argument("config: empty x_grid");
    }
  }
  if (j.contains("calib_paths")) {
    c.calib_paths = j.at("calib_paths").get<std::uint64_t>();
  }
  return c;
}

}  // namespace attrition
