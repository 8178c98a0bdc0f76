#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "wbr/control.hpp"
#include "wbr/lqr.hpp"
#include "wbr/params.hpp"
#include "wbr/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCriteriaFailed = 3;
constexpr int kExitFell = 4;

struct Options {
  std::string config;
  std::string schedule;
  std::string scenario;
  std::string out = ".";
  uint64_t seed = 0;
  bool seed_set = false;
  double duration = 0.0;
  bool duration_set = false;
  std::string noise;  // "on" / "off" / ""
  std::string summary = "trailing";
  double pitch = 0.0;
  bool list_only = false;
  bool sequential = false;
};

std::pair<wbr::RobotParams, wbr::ControllerGains> load_or_default(const std::string& path) {
  if (path.empty()) return {wbr::RobotParams{}, wbr::ControllerGains{}};
  return wbr::load_params(path);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << text;
  }
  std::filesystem::rename(tmp, path);
}

int cmd_synthesize(const Options& opt) {
  auto [params, gains] = load_or_default(opt.config);
  const wbr::GainSchedule s =
      wbr::build_gain_schedule(params, gains, gains.schedule_points, opt.pitch);
  wbr::save_schedule(opt.out, s);
  std::printf("schedule: %zu points over [%.3f, %.3f] m, dt %.4f s -> %s\n", s.grid.size(),
              s.grid.front(), s.grid.back(), s.dt, opt.out.c_str());
  return kExitOk;
}

int cmd_simulate(const Options& opt) {
  auto [params, gains] = load_or_default(opt.config);

  auto sc_opt = wbr::find_scenario(opt.scenario);
  if (!sc_opt) {
    std::fprintf(stderr, "unknown scenario '%s'; valid names:\n", opt.scenario.c_str());
    for (const auto& s : wbr::builtin_scenarios()) std::fprintf(stderr, "  %s\n", s.name.c_str());
    return kExitUsage;
  }
  wbr::Scenario sc = *sc_opt;
  if (opt.seed_set) sc.seed = opt.seed;
  if (opt.duration_set) {
    if (!(opt.duration > 0.0)) {
      std::fprintf(stderr, "--duration must be positive\n");
      return kExitUsage;
    }
    if (opt.duration > sc.segments.back().t1) sc.segments.back().t1 = opt.duration;
    sc.duration = opt.duration;
  }
  if (opt.noise == "on") sc.noise.enabled = true;
  if (opt.noise == "off") sc.noise.enabled = false;

  wbr::GainSchedule schedule;
  if (!opt.schedule.empty()) {
    schedule = wbr::load_schedule(opt.schedule);
    if (std::abs(schedule.gamma_op - sc.relinearize_pitch) > 1e-9)
      std::fprintf(stderr, "note: schedule operating pitch %.3f differs from scenario's %.3f\n",
                   schedule.gamma_op, sc.relinearize_pitch);
  } else {
    schedule = wbr::build_gain_schedule(params, gains, gains.schedule_points,
                                        sc.relinearize_pitch);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const wbr::TrajectoryLog log = wbr::run_scenario(sc, params, gains, schedule);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(opt.out);
  const std::string csv_path = opt.out + "/" + sc.name + "_seed" + std::to_string(sc.seed) + ".csv";
  const auto mode =
      opt.summary == "sidecar" ? wbr::SummaryMode::sidecar : wbr::SummaryMode::trailing_comments;
  wbr::write_csv(csv_path, log, mode);

  const auto verdict = wbr::acceptance::judge_scenario(sc.name, log);
  char buf[600];
  std::snprintf(buf, sizeof buf,
                "scenario = %s\nresult = %s\n%s\nrows = %zu\nend_time_s = %.3f\n"
                "wall_clock_s = %.3f\ncsv = %s\n",
                sc.name.c_str(), verdict.fell ? "FELL" : (verdict.pass ? "PASS" : "FAIL"),
                verdict.detail.c_str(), log.rows.size(), log.end_time, wall, csv_path.c_str());
  write_text_atomic(opt.out + "/" + sc.name + "_report.txt", buf);
  std::fputs(buf, stdout);

  if (verdict.fell) return kExitFell;
  return verdict.pass ? kExitOk : kExitCriteriaFailed;
}

int cmd_verify(const Options& opt) {
  if (opt.list_only) {
    for (const auto& n : wbr::acceptance::criterion_names()) std::printf("%s\n", n.c_str());
    return kExitOk;
  }
  auto [params, gains] = load_or_default(opt.config);
  const auto report = wbr::acceptance::run_acceptance(params, gains, !opt.sequential);
  std::fputs(wbr::acceptance::format_report(report).c_str(), stdout);
  return report.all_pass() ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar wheeled-biped balance control sandbox"};
  app.require_subcommand(1);
  Options opt;

  auto* syn = app.add_subcommand("synthesize", "build and save a gain schedule");
  syn->add_option("--config", opt.config, "parameter file");
  syn->add_option("--out", opt.out, "output schedule path")->required();
  syn->add_option("--pitch", opt.pitch, "operating head pitch for the linearization (rad)");

  auto* sim = app.add_subcommand("simulate", "run a stock scenario and write CSV + report");
  sim->add_option("--scenario", opt.scenario, "scenario name")->required();
  sim->add_option("--config", opt.config, "parameter file");
  sim->add_option("--schedule", opt.schedule, "pre-built gain schedule file");
  sim->add_option("--seed", opt.seed, "noise seed")->each([&](const std::string&) {
    opt.seed_set = true;
  });
  sim->add_option("--out", opt.out, "output directory");
  sim->add_option("--duration", opt.duration, "override run length (s)")
      ->each([&](const std::string&) { opt.duration_set = true; });
  sim->add_option("--noise", opt.noise, "on|off override")
      ->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--summary", opt.summary, "trailing|sidecar metrics placement")
      ->check(CLI::IsMember({"trailing", "sidecar"}));

  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  ver->add_option("--config", opt.config, "parameter file");
  ver->add_flag("--list", opt.list_only, "print criteria without running");
  ver->add_flag("--sequential", opt.sequential, "disable concurrent scenario runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (syn->parsed()) return cmd_synthesize(opt);
    if (sim->parsed()) return cmd_simulate(opt);
    if (ver->parsed()) return cmd_verify(opt);
  } catch (const wbr::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const wbr::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const wbr::SynthesisError& e) {
    std::fprintf(stderr, "synthesis error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
