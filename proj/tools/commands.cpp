#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <unistd.h>

#include "mvoe/io.hpp"
#include "mvoe/mvoe.hpp"

namespace mvoe::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Parse: return kParseError;
    case ErrorCode::SingularMap: return kSingularMap;
    case ErrorCode::UnsupportedDimension: return kUnsupportedDimension;
    default: return kNumericError;
  }
}

io::ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return io::parse_problem(buf.str());
}

SolverOptions merge_options(SolverOptions opts, const SolverFlags& flags) {
  if (flags.method) {
    const auto m = parse_method(*flags.method);
    if (!m) throw ParseError("unknown method \"" + *flags.method + "\"");
    opts.method = *m;
  }
  if (flags.tolerance) opts.tolerance = *flags.tolerance;
  if (flags.max_iterations) opts.max_iterations = *flags.max_iterations;
  try {
    opts.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return opts;
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed command never leaves a partial file behind.
void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place: " + path.string());
  }
}

template <class F>
auto timed(bool enabled, const char* label, std::ostream& err, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  if (enabled) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    err << label << ": " << dt.count() << " s\n";
  }
  return result;
}

template <class F>
int guarded(const char* command, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "mvoe " << command << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "mvoe " << command << ": " << e.what() << '\n';
    return kNumericError;
  }
}

Json result_header(const char* command, std::size_t dim) {
  return Json{{"version", io::kFormatVersion}, {"command", command}, {"dimension", dim}};
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_rows(const std::vector<Vector>& points, std::optional<std::size_t> index) {
  std::string out;
  for (const Vector& p : points) {
    if (index) out += std::to_string(*index) + ",";
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) out += ',';
      out += format_fixed(p[i]);
    }
    out += '\n';
  }
  return out;
}

std::string csv_header(std::size_t dim, bool indexed) {
  std::string h = indexed ? "index," : "";
  for (std::size_t i = 0; i < dim; ++i) h += (i ? ",x" : "x") + std::to_string(i + 1);
  return h + '\n';
}

}  // namespace

int cmd_sum(const SumArgs& args, std::ostream& err) {
  return guarded("sum", err, [&] {
    const io::ProblemFile problem = load_problem(args.input);
    if (problem.ellipsoids.empty()) throw ParseError("sum needs at least one ellipsoid");
    const SolverOptions opts = merge_options(problem.options, args.solver);

    const SumResult sum = timed(args.solver.time, "solve", err,
                                [&] { return mvoe_sum(problem.ellipsoids, opts); });

    Json out = result_header("sum", problem.dimension);
    out["result"] = io::to_json(sum.ellipsoid);
    out["ellipsoids"] = Json::array({io::to_json(sum.ellipsoid)});
    out["volume"] = sum.volume;
    out["method"] = sum.steps.empty() ? std::string("none")
                                      : std::string(to_string(sum.steps.front().method));
    Json betas = Json::array();
    Json iterations = Json::array();
    Json residuals = Json::array();
    Json volumes = Json::array();
    for (const MvoeResult& s : sum.steps) {
      betas.push_back(s.beta);
      iterations.push_back(s.iterations);
      residuals.push_back(s.residual);
      volumes.push_back(s.volume);
    }
    out["betas"] = betas;
    out["iterations"] = iterations;
    out["residuals"] = residuals;
    out["volumes"] = volumes;

    bool passed = true;
    if (args.check) {
      const auto report =
          oracle::containment_check(sum.ellipsoid, problem.ellipsoids, args.directions, args.seed);
      passed = report.passed;
      out["checks"] = Json::array({io::to_json(report)});
    }
    write_atomically(args.output, out.dump(2) + "\n");
    return passed ? kOk : kCheckFailed;
  });
}

int cmd_reach(const ReachArgs& args, std::ostream& err) {
  return guarded("reach", err, [&] {
    const io::ProblemFile problem = load_problem(args.input);
    if (!problem.scenario) throw ParseError("reach needs a \"scenario\"");
    const io::ReachScenario& sc = *problem.scenario;
    const SolverOptions opts = merge_options(problem.options, args.solver);

    const reach::ReachTube tube = timed(args.solver.time, "solve", err, [&] {
      return sc.mode == io::ReachMode::Forward
                 ? reach::propagate_forward(sc.start(), sc.stages, sc.eps, opts)
                 : reach::propagate_backward(sc.start(), sc.stages, sc.eps, opts);
    });

    Json out = result_header("reach", problem.dimension);
    out["mode"] = sc.mode == io::ReachMode::Forward ? "forward" : "backward";
    Json stages = Json::array();
    Json volumes = Json::array();
    for (const Ellipsoid& e : tube.stages) {
      stages.push_back(io::to_json(e));
      volumes.push_back(volume(e));
    }
    out["tube"] = stages;
    out["volumes"] = volumes;
    write_atomically(args.output, out.dump(2) + "\n");
    return kOk;
  });
}

int cmd_boundary(const BoundaryArgs& args, std::ostream& err) {
  return guarded("boundary", err, [&] {
    const io::ProblemFile problem = load_problem(args.input);
    if (problem.ellipsoids.empty()) throw ParseError("boundary needs at least one ellipsoid");
    if (problem.dimension != 2 && problem.dimension != 3)
      throw UnsupportedDimension(problem.dimension);
    if (args.samples == 0) throw ParseError("--samples must be positive");

    const fs::path target(args.output);
    const auto& es = problem.ellipsoids;
    if (args.indexed || es.size() == 1) {
      std::string csv = csv_header(problem.dimension, args.indexed);
      for (std::size_t k = 0; k < es.size(); ++k)
        csv += csv_rows(boundary_points(es[k], args.samples),
                        args.indexed ? std::optional<std::size_t>(k) : std::nullopt);
      write_atomically(target, csv);
      return kOk;
    }
    // One file per ellipsoid: <stem>_<k><ext>.
    std::vector<std::pair<fs::path, std::string>> files;
    for (std::size_t k = 0; k < es.size(); ++k) {
      fs::path p = target.parent_path() /
                   (target.stem().string() + "_" + std::to_string(k) + target.extension().string());
      files.emplace_back(p, csv_header(problem.dimension, false) +
                                csv_rows(boundary_points(es[k], args.samples), std::nullopt));
    }
    for (const auto& [p, content] : files) write_atomically(p, content);
    return kOk;
  });
}

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("check", err, [&] {
    const io::ProblemFile problem = load_problem(args.input);
    if (problem.ellipsoids.empty()) throw ParseError("check needs at least one ellipsoid");
    const SolverOptions opts = merge_options(problem.options, args.solver);
    const auto& parts = problem.ellipsoids;

    std::vector<oracle::CheckReport> reports;
    if (problem.outer) {
      reports.push_back(
          oracle::containment_check(*problem.outer, parts, args.directions, args.seed));
    } else {
      const SumResult sum =
          timed(args.solver.time, "solve", err, [&] { return mvoe_sum(parts, opts); });
      const Ellipsoid* acc = &parts.front();
      for (std::size_t k = 0; k < sum.steps.size(); ++k) {
        const MvoeResult& step = sum.steps[k];
        const SymMatrix& q1 = acc->shape();
        const SymMatrix& q2 = parts[k + 1].shape();
        if (step.method != Method::Trace) {
          reports.push_back(oracle::stationarity_check(q1, q2, step.beta));
          reports.push_back(
              oracle::consistency_checks(generalized_spectrum(q1, q2), step.beta));

          const auto golden = oracle::golden_section_beta(q1, q2, 1e-9);
          const double rel = std::abs(step.volume - golden.volume) / golden.volume;
          oracle::CheckReport g;
          g.name = "golden_section";
          g.samples = 1;
          g.worst_violation = rel - 1e-8;
          g.passed = rel <= 1e-8;
          char buf[200];
          std::snprintf(buf, sizeof buf,
                        "step %zu: solver volume %.17g, oracle volume %.17g (beta %.17g), "
                        "relative difference %.3e",
                        k, step.volume, golden.volume, golden.beta_star, rel);
          g.details = buf;
          reports.push_back(std::move(g));
        }
        acc = &step.ellipsoid;
      }
      reports.push_back(
          oracle::containment_check(sum.ellipsoid, parts, args.directions, args.seed));
    }

    bool all = true;
    Json checks = Json::array();
    for (const auto& r : reports) {
      all = all && r.passed;
      checks.push_back(io::to_json(r));
    }
    Json report{{"version", io::kFormatVersion}, {"command", "check"}, {"passed", all},
                {"seed", args.seed}, {"directions", args.directions}, {"checks", checks}};
    out << report.dump(2) << '\n';
    return all ? kOk : kCheckFailed;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Outer ellipsoidal approximation of Minkowski sums of ellipsoids"};
  app.require_subcommand(1);

  auto add_solver_flags = [](CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--method", f.method, "auto | bisection | fixed-point | trace");
    cmd->add_option("--tol", f.tolerance, "solver tolerance (default 1e-12)");
    cmd->add_option("--max-iter", f.max_iterations, "iteration cap (default 200)");
    cmd->add_flag("--time", f.time, "print wall-clock time per solve on stderr");
  };

  SumArgs sum;
  auto* sum_cmd = app.add_subcommand("sum", "outer ellipsoid of the Minkowski sum of all inputs");
  sum_cmd->add_option("input", sum.input, "problem file")->required();
  sum_cmd->add_option("output", sum.output, "result file")->required();
  add_solver_flags(sum_cmd, sum.solver);
  sum_cmd->add_flag("--check", sum.check, "append a support-function containment check");
  sum_cmd->add_option("--seed", sum.seed, "direction sampling seed");
  sum_cmd->add_option("--directions", sum.directions, "number of sampled directions");

  ReachArgs reach;
  auto* reach_cmd = app.add_subcommand("reach", "propagate a reach tube");
  reach_cmd->add_option("input", reach.input, "problem file with a scenario")->required();
  reach_cmd->add_option("output", reach.output, "result file")->required();
  add_solver_flags(reach_cmd, reach.solver);

  BoundaryArgs boundary;
  auto* boundary_cmd = app.add_subcommand("boundary", "sample ellipsoid boundaries as CSV");
  boundary_cmd->add_option("input", boundary.input, "problem or result file")->required();
  boundary_cmd->add_option("output", boundary.output, "CSV file")->required();
  boundary_cmd->add_option("--samples", boundary.samples, "points per ellipse (default 64)");
  boundary_cmd->add_flag("--indexed", boundary.indexed, "single file with an index column");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "run the verification oracles");
  check_cmd->add_option("input", check.input, "problem file")->required();
  add_solver_flags(check_cmd, check.solver);
  check_cmd->add_option("--seed", check.seed, "direction sampling seed");
  check_cmd->add_option("--directions", check.directions, "number of sampled directions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseError;
  }

  if (sum.directions < 1 || check.directions < 1) {
    std::cerr << "--directions must be positive\n";
    return kParseError;
  }
  if (*sum_cmd) return cmd_sum(sum, std::cerr);
  if (*reach_cmd) return cmd_reach(reach, std::cerr);
  if (*boundary_cmd) return cmd_boundary(boundary, std::cerr);
  return cmd_check(check, std::cout, std::cerr);
}

}  // namespace mvoe::cli
