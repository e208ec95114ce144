#include "attrition/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "attrition/deterministic.hpp"
#include "attrition/stats.hpp"

namespace attrition {

namespace {

namespace fs = std::filesystem;

nlohmann::json optional_to_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

// 1st-99th percentile box; a display hint, the CSV keeps every point
nlohmann::json scatter_range_hint(const SimulationReport& rep) {
  std::vector<double> xs, ys;
  xs.reserve(rep.scatter.size());
  ys.reserve(rep.scatter.size());
  for (const auto& s : rep.scatter) {
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  nlohmann::json j;
  j["x_lo"] = percentile(xs, 0.01);
  j["x_hi"] = percentile(xs, 0.99);
  j["y_lo"] = percentile(ys, 0.01);
  j["y_hi"] = percentile(ys, 0.99);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << content;
}

double boundary_x_max(const ExperimentConfig& c) {
  double m = c.s0.x;
  for (double x : c.boundary.x_grid) m = std::max(m, x);
  return 1.5 * std::max(m, 10.0);
}

int fail(const std::string& category, const std::string& message) {
  std::string one_line = message;
  std::replace(one_line.begin(), one_line.end(), '\n', ' ');
  std::cerr << "error: " << category << ": " << one_line << "\n";
  return 1;
}

}  // namespace

nlohmann::json report_to_json(const SimulationReport& rep) {
  nlohmann::json j;
  j["n_paths"] = rep.n_paths;
  j["share_preemption"] = rep.share_preemption;
  j["share_preemption_simultaneous"] = rep.share_preemption_simultaneous;
  j["share_attrition"] = rep.share_attrition;
  j["share_nostop"] = rep.share_nostop;
  j["mean_time_in_attrition_fraction"] = rep.mean_time_in_attrition_fraction;
  j["mean_equilibrium_value"] = rep.mean_equilibrium_value;
  j["value_stderr"] = rep.value_stderr;
  j["immediate_investment_value"] = rep.immediate_investment_value;
  j["mean_residual_mass"] = rep.mean_residual_mass;
  j["hazard_cap_hits"] = rep.hazard_cap_hits;
  j["scatter_range_hint"] = scatter_range_hint(rep);
  return j;
}

nlohmann::json calibration_to_json(const CalibrationResult& cal) {
  nlohmann::json j;
  j["applicable"] = cal.applicable;
  j["feasible"] = cal.feasible;
  j["gamma"] = cal.gamma;
  j["objective"] = cal.objective;
  j["bounds_ok"] = cal.bounds_ok;
  j["message"] = cal.message;
  auto anchors = nlohmann::json::array();
  for (const auto& a : cal.anchors) {
    nlohmann::json ja;
    ja["x0"] = a.x0;
    ja["y0"] = a.y0;
    ja["active"] = a.active;
    ja["residual"] = a.residual;
    ja["stderr"] = a.stderr_;
    anchors.push_back(ja);
  }
  j["anchors"] = anchors;
  return j;
}

nlohmann::json constants_to_json(const DerivedConstants& k) {
  nlohmann::json j;
  j["beta1"] = k.beta1;
  j["y_star"] = k.y_star;
  j["y_p"] = k.y_p;
  j["y_bar"] = k.y_bar;
  j["x_bar"] = optional_to_json(k.x_bar);
  return j;
}

void write_scatter_csv(const SimulationReport& rep, const std::string& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + file);
  std::fprintf(f, "x_stop,y_stop,mode\n");
  for (std::size_t i = 0; i < rep.scatter.size(); ++i) {
    std::fprintf(f, "%.10g,%.10g,%s\n", rep.scatter[i].x, rep.scatter[i].y,
                 outcome_mode_name(rep.scatter_modes[i]));
  }
  std::fclose(f);
}

void write_boundary_csv(const BoundarySpec& b, double x_max, double dx,
                        const std::string& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + file);
  std::fprintf(f, "x,b_x\n");
  for (double x = 0.0; x <= x_max + 1e-12; x += dx) {
    std::fprintf(f, "%.10g,%.10g\n", x, eval_boundary(b, x));
  }
  std::fclose(f);
}

void write_regions_csv(const BoundarySpec& b, const ModelParams& p,
                       const DerivedConstants& k, double x_max, double dx,
                       const std::string& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + file);
  std::fprintf(f, "x,preemption_line,boundary\n");
  for (double x = 0.0; x <= x_max + 1e-12; x += dx) {
    std::fprintf(f, "%.10g,%.10g,%.10g\n", x, preemption_line(x, p, k),
                 eval_boundary(b, x));
  }
  std::fclose(f);
}

void write_trace_csv(const std::vector<StepRecord>& trace,
                     const std::string& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + file);
  std::fprintf(f, "t,x,y,rate,cum_hazard,region\n");
  for (const auto& r : trace) {
    std::fprintf(f, "%.10g,%.10g,%.10g,%.10g,%.10g,%s\n", r.t, r.x, r.y,
                 r.rate, r.cum_hazard, region_name(r.region));
  }
  std::fclose(f);
}

int run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                   const RunOptions& opts) {
  const auto violations = validate_config(config);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) {
      if (!msg.empty()) msg += "; ";
      msg += v;
    }
    return fail("config", msg);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return fail("io", "cannot create output dir " + out_dir);

  const auto dyn = config.mode == RunMode::Deterministic
                       ? Dynamics::Deterministic
                       : Dynamics::Stochastic;
  DerivedConstants k;
  try {
    k = derive_constants(config.params, dyn);
  } catch (const std::exception& e) {
    return fail("config", e.what());
  }

  nlohmann::json out;
  out["mode"] = run_mode_name(config.mode);
  out["config"] = config_to_json(config);
  out["constants"] = constants_to_json(k);

  try {
    switch (config.mode) {
      case RunMode::CalibrateOnly: {
        CalibrationSettings cs;
        cs.n_paths = config.calib_paths;
        cs.dt = config.dt;
        cs.horizon = config.horizon;
        cs.seed = config.seed;
        const auto cal =
            calibrate_gamma(config.boundary.x_grid, config.params, k, cs);
        out["calibration"] = calibration_to_json(cal);
        if (cal.applicable && cal.feasible) {
          const auto b = make_boundary(k, cal.gamma);
          write_boundary_csv(b, boundary_x_max(config), 0.25,
                             out_dir + "/boundary.csv");
          write_regions_csv(b, config.params, k, boundary_x_max(config), 0.25,
                            out_dir + "/regions.csv");
        }
        write_file(out_dir + "/report.json", out.dump(2) + "\n");
        if (!cal.applicable) {
          // still a successful run: the report says which boundary to use
          return 0;
        }
        if (!cal.feasible) return fail("calibration", cal.message);
        return 0;
      }

      case RunMode::Stochastic: {
        BoundarySpec b;
        if (config.boundary.kind == BoundaryChoice::Kind::FixedGamma) {
          b = make_boundary(k, config.boundary.gamma);
        } else if (config.boundary.kind == BoundaryChoice::Kind::Auto) {
          b = make_boundary(k, std::nullopt);  // degenerate regimes only
        } else {
          CalibrationSettings cs;
          cs.n_paths = config.calib_paths;
          cs.dt = config.dt;
          cs.horizon = config.horizon;
          cs.seed = config.seed;
          const auto cal =
              calibrate_gamma(config.boundary.x_grid, config.params, k, cs);
          out["calibration"] = calibration_to_json(cal);
          if (!cal.applicable) {
            b = make_boundary(k, std::nullopt);
          } else if (cal.feasible) {
            b = make_boundary(k, cal.gamma);
          } else {
            write_file(out_dir + "/report.json", out.dump(2) + "\n");
            return fail("calibration", cal.message);
          }
        }
        out["boundary"]["kind"] =
            b.kind == BoundarySpec::Kind::Exponential ? "exponential"
            : b.kind == BoundarySpec::Kind::ConstantYStar ? "constant_y_star"
                                                          : "empty";
        out["boundary"]["gamma"] = b.gamma;

        CampaignSettings cs;
        cs.n_paths = config.n_paths;
        cs.dt = config.dt;
        cs.horizon = config.horizon;
        cs.seed = config.seed;
        cs.workers = opts.workers;
        const auto outcomes = run_campaign(config.s0, b, config.params, k, cs);
        const auto rep = aggregate(outcomes, config.params, k, config.s0);
        out["report"] = report_to_json(rep);
        write_file(out_dir + "/report.json", out.dump(2) + "\n");
        write_scatter_csv(rep, out_dir + "/scatter.csv");
        write_boundary_csv(b, boundary_x_max(config), 0.25,
                           out_dir + "/boundary.csv");
        write_regions_csv(b, config.params, k, boundary_x_max(config), 0.25,
                          out_dir + "/regions.csv");
        if (opts.dump_paths > 0) {
          fs::create_directories(out_dir + "/paths");
          GameSettings gs;
          gs.dt = cs.dt;
          gs.horizon = cs.horizon;
          gs.hazard_cap = cs.hazard_cap;
          const std::size_t n_dump =
              std::min<std::size_t>(opts.dump_paths, config.n_paths);
          for (std::size_t i = 0; i < n_dump; ++i) {
            std::vector<StepRecord> trace;
            simulate_game(config.s0, b, config.params, k, gs,
                          RngStream{config.seed, 2 * i},
                          RngStream{config.seed, 2 * i + 1}, &trace);
            char name[64];
            std::snprintf(name, sizeof(name), "/paths/%03zu.csv", i);
            write_trace_csv(trace, out_dir + name);
          }
        }
        return 0;
      }

      case RunMode::Deterministic: {
        std::vector<GameOutcome> outcomes;
        outcomes.reserve(config.n_paths);
        DetTimeline timeline;
        for (std::size_t i = 0; i < config.n_paths; ++i) {
          auto res = det_playout(config.s0, config.params, k, config.dt,
                                 RngStream{config.seed, 2 * i + 1});
          if (i == 0) timeline = std::move(res.timeline);
          outcomes.push_back(res.outcome);
        }
        const auto rep = aggregate(outcomes, config.params, k, config.s0);
        out["report"] = report_to_json(rep);
        out["timeline"]["t_bar"] = timeline.t_bar;
        out["timeline"]["t_p"] = std::isfinite(timeline.t_p)
                                     ? nlohmann::json(timeline.t_p)
                                     : nlohmann::json(nullptr);
        out["timeline"]["attrition_occurs"] = timeline.attrition_occurs;
        write_file(out_dir + "/report.json", out.dump(2) + "\n");
        write_timeline_csv(timeline, (out_dir + "/timeline.csv").c_str());
        write_scatter_csv(rep, out_dir + "/scatter.csv");
        return 0;
      }

      case RunMode::ValueOnly: {
        BoundarySpec b;
        if (config.boundary.kind == BoundaryChoice::Kind::FixedGamma) {
          b = make_boundary(k, config.boundary.gamma);
        } else if (config.boundary.kind == BoundaryChoice::Kind::Auto) {
          b = make_boundary(k, std::nullopt);
        } else {
          CalibrationSettings cs;
          cs.n_paths = config.calib_paths;
          cs.dt = config.dt;
          cs.horizon = config.horizon;
          cs.seed = config.seed;
          const auto cal =
              calibrate_gamma(config.boundary.x_grid, config.params, k, cs);
          out["calibration"] = calibration_to_json(cal);
          if (!cal.applicable) {
            b = make_boundary(k, std::nullopt);
          } else if (cal.feasible) {
            b = make_boundary(k, cal.gamma);
          } else {
            write_file(out_dir + "/report.json", out.dump(2) + "\n");
            return fail("calibration", cal.message);
          }
        }
        const auto est = constrained_value_mc(
            config.s0, b, config.n_paths, config.dt, config.horizon,
            RngStream{config.seed, 0}, config.params, k);
        out["value"]["mean"] = est.mean;
        out["value"]["stderr"] = est.stderr_;
        out["value"]["n_paths"] = est.n;
        out["value"]["immediate_leader_value"] =
            leader_value(0.0, config.s0.y, config.params);
        write_file(out_dir + "/report.json", out.dump(2) + "\n");
        return 0;
      }
    }
  } catch (const std::domain_error& e) {
    return fail("regime", e.what());
  } catch (const std::exception& e) {
    return fail("run", e.what());
  }
  return fail("run", "unknown mode");
}

}  // namespace attrition
