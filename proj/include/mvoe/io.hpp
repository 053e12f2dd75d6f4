#ifndef MVOE_IO_HPP
#define MVOE_IO_HPP

// JSON interchange for ellipsoids, solver options, reach scenarios and check
// reports.
//
//   ellipsoid:  {"center": [..d..], "shape": [[..], ..]}       (row-major)
//   problem:    {"version": "1", "dimension": d,
//                "ellipsoids": [ellipsoid, ..],
//                "options": {"method": .., "tolerance": .., "max_iterations": ..},
//                "outer": ellipsoid,                            (check only)
//                "scenario": {"mode": "forward" | "backward",
//                             "initial": ellipsoid, "terminal": ellipsoid,
//                             "eps": 1e-9,
//                             "stages": [{"F": [[..]], "G": [[..]],
//                                         "input": ellipsoid}, ..]}}

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mvoe/ellipsoid.hpp"
#include "mvoe/error.hpp"
#include "mvoe/minkowski.hpp"
#include "mvoe/oracle.hpp"
#include "mvoe/reach.hpp"

namespace mvoe::io {

using Json = nlohmann::json;

inline constexpr std::string_view kFormatVersion = "1";

inline Json to_json(const Vector& v) { return Json(v); }

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

inline Json to_json(const Ellipsoid& e) {
  return Json{{"center", to_json(e.center())}, {"shape", to_json(e.shape().matrix())}};
}

inline Json to_json(const oracle::CheckReport& r) {
  return Json{{"name", r.name},
              {"passed", r.passed},
              {"worst_violation", r.worst_violation},
              {"samples", r.samples},
              {"details", r.details}};
}

namespace detail {
inline const Json& require(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return j.get<double>();
}
}  // namespace detail

inline Vector vector_from_json(const Json& j, const char* what = "vector") {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Vector v;
  v.reserve(j.size());
  for (const Json& x : j) v.push_back(detail::number(x, what));
  return v;
}

inline Matrix matrix_from_json(const Json& j, const char* what = "matrix") {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector r = vector_from_json(j[i], what);
    if (i == 0) {
      cols = r.size();
      if (cols == 0) throw ParseError(std::string(what) + ": empty row");
      m = Matrix(rows, cols);
    } else if (r.size() != cols) {
      throw ParseError(std::string(what) + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = r[c];
  }
  return m;
}

inline Ellipsoid ellipsoid_from_json(const Json& j) {
  Vector center = vector_from_json(detail::require(j, "center"), "center");
  Matrix shape = matrix_from_json(detail::require(j, "shape"), "shape");
  try {
    return Ellipsoid(std::move(center), SymMatrix(shape));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid ellipsoid: ") + e.what());
  }
}

inline SolverOptions options_from_json(const Json& j) {
  SolverOptions o;
  if (!j.is_object()) throw ParseError("options: expected an object");
  if (j.contains("method")) {
    if (!j["method"].is_string()) throw ParseError("options.method: expected a string");
    const auto m = parse_method(j["method"].get<std::string>());
    if (!m) throw ParseError("options.method: unknown method");
    o.method = *m;
  }
  if (j.contains("tolerance")) o.tolerance = detail::number(j["tolerance"], "options.tolerance");
  if (j.contains("max_iterations")) {
    if (!j["max_iterations"].is_number_integer())
      throw ParseError("options.max_iterations: expected an integer");
    o.max_iterations = j["max_iterations"].get<int>();
  }
  try {
    o.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return o;
}

enum class ReachMode { Forward, Backward };

struct ReachScenario {
  ReachMode mode = ReachMode::Forward;
  /// Initial set in forward mode, terminal set in backward mode.
  std::optional<Ellipsoid> initial;
  std::optional<Ellipsoid> terminal;
  std::vector<reach::LtiStage> stages;
  double eps = reach::kDefaultEps;

  const Ellipsoid& start() const { return mode == ReachMode::Forward ? *initial : *terminal; }
};

inline ReachScenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("scenario: expected an object");
  ReachScenario s;
  const std::string mode = j.value("mode", std::string("forward"));
  if (mode == "forward")
    s.mode = ReachMode::Forward;
  else if (mode == "backward")
    s.mode = ReachMode::Backward;
  else
    throw ParseError("scenario.mode: expected \"forward\" or \"backward\"");
  if (j.contains("initial")) s.initial = ellipsoid_from_json(j["initial"]);
  if (j.contains("terminal")) s.terminal = ellipsoid_from_json(j["terminal"]);
  if (s.mode == ReachMode::Forward && !s.initial) throw ParseError("scenario: missing \"initial\"");
  if (s.mode == ReachMode::Backward && !s.terminal)
    throw ParseError("scenario: missing \"terminal\"");
  if (j.contains("eps")) {
    s.eps = detail::number(j["eps"], "scenario.eps");
    if (!(s.eps >= 0.0)) throw ParseError("scenario.eps must be nonnegative");
  }
  if (j.contains("stages")) {
    if (!j["stages"].is_array()) throw ParseError("scenario.stages: expected an array");
    for (const Json& st : j["stages"]) {
      Matrix f = matrix_from_json(detail::require(st, "F"), "F");
      Matrix g = matrix_from_json(detail::require(st, "G"), "G");
      Ellipsoid u = ellipsoid_from_json(detail::require(st, "input"));
      try {
        s.stages.emplace_back(std::move(f), std::move(g), std::move(u));
      } catch (const Error& e) {
        throw ParseError(std::string("invalid stage: ") + e.what());
      }
    }
  }
  const std::size_t n = s.start().dim();
  for (const auto& st : s.stages)
    if (st.state_dim() != n) throw ParseError("scenario: stage dimension differs from the state");
  return s;
}

struct ProblemFile {
  std::string version{kFormatVersion};
  std::size_t dimension = 0;
  std::vector<Ellipsoid> ellipsoids;
  SolverOptions options;
  std::optional<ReachScenario> scenario;
  std::optional<Ellipsoid> outer;
};

inline ProblemFile problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem file: expected a JSON object");
  ProblemFile p;
  if (j.contains("version")) {
    if (!j["version"].is_string()) throw ParseError("version: expected a string");
    p.version = j["version"].get<std::string>();
  }
  if (j.contains("ellipsoids")) {
    if (!j["ellipsoids"].is_array()) throw ParseError("ellipsoids: expected an array");
    for (const Json& e : j["ellipsoids"]) p.ellipsoids.push_back(ellipsoid_from_json(e));
  }
  if (j.contains("options")) p.options = options_from_json(j["options"]);
  if (j.contains("scenario")) p.scenario = scenario_from_json(j["scenario"]);
  if (j.contains("outer")) p.outer = ellipsoid_from_json(j["outer"]);
  if (p.ellipsoids.empty() && !p.scenario)
    throw ParseError("problem file needs at least one ellipsoid or a scenario");

  std::size_t dim = p.ellipsoids.empty() ? p.scenario->start().dim() : p.ellipsoids.front().dim();
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer() || j["dimension"].get<long long>() < 1)
      throw ParseError("dimension: expected a positive integer");
    dim = j["dimension"].get<std::size_t>();
  }
  for (const auto& e : p.ellipsoids)
    if (e.dim() != dim) throw ParseError("ellipsoid dimension differs from the problem dimension");
  if (p.outer && p.outer->dim() != dim) throw ParseError("outer ellipsoid dimension differs");
  if (p.scenario && p.scenario->start().dim() != dim)
    throw ParseError("scenario dimension differs from the problem dimension");
  p.dimension = dim;
  return p;
}

inline ProblemFile parse_problem(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace mvoe::io

#endif  // MVOE_IO_HPP
