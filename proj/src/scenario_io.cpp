#include "ellctl/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ellctl {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("scenario: missing key '") + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw std::invalid_argument("scenario: '" + where + "' must be numeric");
  return j.get<double>();
}

Vector to_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument("scenario: '" + where + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

Matrix to_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::invalid_argument("scenario: '" + where + "' must be a nested array");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("scenario: '" + where + "' rows differ in length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

std::vector<Matrix> to_matrices(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument("scenario: '" + where + "' must be an array");
  std::vector<Matrix> out;
  for (const auto& item : j) out.push_back(to_matrix(item, where));
  return out;
}

// null -> the given infinity.
Vector to_bound(const json& j, double missing, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument("scenario: '" + where + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j[i].is_null() ? missing : number(j[i], where);
  }
  return v;
}

Reference to_reference(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "triangle") {
    TriangleReference r;
    if (j.contains("peak")) r.peak = number(j["peak"], "reference.peak");
    if (j.contains("half")) r.half = j["half"].get<int>();
    return r;
  }
  if (kind == "steps") {
    StepsReference r;
    r.starts = field(j, "starts").get<std::vector<int>>();
    r.values = field(j, "values").get<std::vector<double>>();
    return r;
  }
  if (kind == "aircraft") {
    SinusoidReference r;
    if (j.contains("level")) r.level = number(j["level"], "reference.level");
    if (j.contains("amplitude")) r.amplitude = number(j["amplitude"], "reference.amplitude");
    if (j.contains("period")) r.period = number(j["period"], "reference.period");
    return r;
  }
  throw std::invalid_argument("scenario: unknown reference kind '" + kind + "'");
}

json from_vector(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i))) {
      out.push_back(v(i));
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

json from_matrix(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(from_vector(m.row(r).transpose()));
  return out;
}

}  // namespace

ScenarioSpec scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
  }
  ScenarioSpec s;
  try {
    s.name = j.value("name", std::string("custom"));
    s.model.a0 = to_matrix(field(j, "a0"), "a0");
    s.model.a_perturbations =
        j.contains("a_perturbations") ? to_matrices(j["a_perturbations"], "a_perturbations")
                                      : std::vector<Matrix>{};
    s.model.b0 = to_matrix(field(j, "b0"), "b0");
    s.model.b_perturbations =
        j.contains("b_perturbations") ? to_matrices(j["b_perturbations"], "b_perturbations")
                                      : std::vector<Matrix>{};
    s.model.c = to_matrix(field(j, "c"), "c");
    s.model.disturbance_shape = to_matrix(field(j, "disturbance_shape"), "disturbance_shape");
    s.theta_true = to_vector(field(j, "theta_true"), "theta_true");
    s.x0 = to_vector(field(j, "x0"), "x0");
    const json& belief = field(j, "belief0");
    s.belief0 = Ellipsoid(to_vector(field(belief, "center"), "belief0.center"),
                          to_matrix(field(belief, "shape"), "belief0.shape"));
    s.reference = to_reference(field(j, "reference"));
    s.horizon = field(j, "horizon").get<int>();
    const double inf = std::numeric_limits<double>::infinity();
    const json& bounds = field(j, "bounds");
    s.bounds = {to_bound(field(bounds, "u_min"), -inf, "bounds.u_min"),
                to_bound(field(bounds, "u_max"), inf, "bounds.u_max")};
    s.ma = to_matrix(field(j, "ma"), "ma");
    if (j.contains("windows")) s.windows = j["windows"].get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  if (s.windows.empty()) s.windows = {s.horizon};
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["a0"] = from_matrix(spec.model.a0);
  j["a_perturbations"] = json::array();
  for (const auto& m : spec.model.a_perturbations) j["a_perturbations"].push_back(from_matrix(m));
  j["b0"] = from_matrix(spec.model.b0);
  j["b_perturbations"] = json::array();
  for (const auto& m : spec.model.b_perturbations) j["b_perturbations"].push_back(from_matrix(m));
  j["c"] = from_matrix(spec.model.c);
  j["disturbance_shape"] = from_matrix(spec.model.disturbance_shape);
  j["theta_true"] = from_vector(spec.theta_true);
  j["x0"] = from_vector(spec.x0);
  j["belief0"] = {{"center", from_vector(spec.belief0.center())},
                  {"shape", from_matrix(spec.belief0.shape())}};
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TriangleReference>) {
          j["reference"] = {{"kind", "triangle"}, {"peak", r.peak}, {"half", r.half}};
        } else if constexpr (std::is_same_v<T, StepsReference>) {
          j["reference"] = {{"kind", "steps"}, {"starts", r.starts}, {"values", r.values}};
        } else {
          j["reference"] = {{"kind", "aircraft"},
                            {"level", r.level},
                            {"amplitude", r.amplitude},
                            {"period", r.period}};
        }
      },
      spec.reference);
  j["horizon"] = spec.horizon;
  j["bounds"] = {{"u_min", from_vector(spec.bounds.u_min)},
                 {"u_max", from_vector(spec.bounds.u_max)}};
  j["ma"] = from_matrix(spec.ma);
  j["windows"] = spec.windows;
  return j.dump(2);
}

}  // namespace ellctl
