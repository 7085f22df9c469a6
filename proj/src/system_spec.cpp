#include "dlcert/system_spec.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace dlcert {

using nlohmann::json;

namespace {

std::string line_col(const std::string &text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void fail(const std::string &field, const std::string &what) {
  throw SpecError("field '" + field + "': " + what);
}

const json &require(const json &obj, const char *key, const std::string &path) {
  const auto it = obj.find(key);
  if (it == obj.end())
    fail(path + key, "missing");
  return *it;
}

double number(const json &v, const std::string &field) {
  if (!v.is_number())
    fail(field, "expected a number, got " + std::string(v.type_name()));
  const double d = v.get<double>();
  if (!std::isfinite(d))
    fail(field, "not finite");
  return d;
}

int integer(const json &v, const std::string &field) {
  if (!v.is_number_integer())
    fail(field, "expected an integer, got " + v.dump());
  return v.get<int>();
}

Matrix matrix(const json &v, const std::string &field) {
  if (!v.is_array() || v.empty())
    fail(field, "expected a non-empty array of rows");
  const auto rows = v.size();
  const auto dim = Eigen::Index(rows);
  Matrix M(dim, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array())
      fail(rf, "expected an array");
    if (v[i].size() != rows)
      fail(rf, "has " + std::to_string(v[i].size()) + " entries, expected " +
                   std::to_string(rows) + " (matrix must be square)");
    for (std::size_t j = 0; j < rows; ++j)
      M(Eigen::Index(i), Eigen::Index(j)) = number(v[i][j], rf + "[" + std::to_string(j) + "]");
  }
  return M;
}

json to_rows(const Matrix &M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      r.push_back(M(i, j));
    rows.push_back(r);
  }
  return rows;
}

} // namespace

SystemSpec parse_system_spec(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw SpecError("JSON syntax error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) +
                    ": " + e.what());
  }
  if (!doc.is_object())
    throw SpecError("top level must be a JSON object");

  SystemSpec spec;
  if (auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string())
      fail("label", "expected a string");
    spec.label = it->get<std::string>();
  }
  const Matrix A = matrix(require(doc, "A", ""), "A");
  const Matrix A1 = matrix(require(doc, "A1", ""), "A1");
  if (A.rows() != A1.rows())
    fail("A1", "dimension " + std::to_string(A1.rows()) + " differs from A (" +
                   std::to_string(A.rows()) + ")");

  const json &dist = require(doc, "distribution", "");
  if (!dist.is_object())
    fail("distribution", "expected an object");
  const json &type = require(dist, "type", "distribution.");
  if (!type.is_string())
    fail("distribution.type", "expected a string");
  const std::string t = type.get<std::string>();

  try {
    if (t == "gamma") {
      GammaDelaySystem g;
      g.A = A;
      g.A1 = A1;
      g.N = integer(require(dist, "N", "distribution."), "distribution.N");
      g.T = number(require(dist, "T", "distribution."), "distribution.T");
      g.h = dist.contains("h") ? number(dist["h"], "distribution.h") : 0.0;
      g.validate();
      spec.system = g;
    } else if (t == "poisson") {
      PoissonDelaySystem p;
      p.A = A;
      p.A1 = A1;
      p.lambda = number(require(dist, "lambda", "distribution."), "distribution.lambda");
      p.h = dist.contains("h") ? integer(dist["h"], "distribution.h") : 0;
      p.validate();
      spec.system = p;
    } else {
      fail("distribution.type", "unknown type '" + t + "' (expected gamma or poisson)");
    }
  } catch (const SpecError &) {
    throw;
  } catch (const Error &e) {
    throw SpecError(std::string("field 'distribution': ") + e.what());
  }
  return spec;
}

SystemSpec load_system_spec(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw SpecError("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_system_spec(ss.str());
  } catch (const SpecError &e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string dump_system_spec(const SystemSpec &spec) {
  json doc;
  if (!spec.label.empty())
    doc["label"] = spec.label;
  if (const auto *g = std::get_if<GammaDelaySystem>(&spec.system)) {
    doc["A"] = to_rows(g->A);
    doc["A1"] = to_rows(g->A1);
    doc["distribution"] = {{"type", "gamma"}, {"N", g->N}, {"T", g->T}, {"h", g->h}};
  } else {
    const auto &p = std::get<PoissonDelaySystem>(spec.system);
    doc["A"] = to_rows(p.A);
    doc["A1"] = to_rows(p.A1);
    doc["distribution"] = {{"type", "poisson"}, {"lambda", p.lambda}, {"h", p.h}};
  }
  return doc.dump(2) + "\n";
}

} // namespace dlcert
