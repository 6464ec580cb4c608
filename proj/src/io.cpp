#include "rmf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rmf/errors.hpp"
#include "rmf/expression.hpp"

namespace rmf::io {
namespace {

using nlohmann::json;

double number_or_expression(const json& value, const char* key) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return Expression::parse(value.get<std::string>(), {}).evaluate(std::span<const double>{});
  throw ValidationError(std::string("curve field '") + key + "' must be a number or an expression");
}

Vec to_vec(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty()) throw ValidationError(std::string(what) + " must be a non-empty array");
  Vec v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ValidationError(std::string(what) + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

std::vector<std::string> variable_names(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

json vec_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_number(values[i]);
  out << '\n';
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(what + " file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(what + " file " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::shared_ptr<const CurveSpec> parse_curve(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("curve document must be a JSON object");
  const std::string kind = doc.value("kind", "");
  const bool closed = doc.value("closed", false);
  if (kind == "analytic") {
    if (!doc.contains("expr") || !doc["expr"].is_array())
      throw ValidationError("analytic curve needs an 'expr' array");
    std::vector<std::string> exprs;
    for (const auto& e : doc["expr"]) {
      if (!e.is_string()) throw ValidationError("curve 'expr' entries must be strings");
      exprs.push_back(e.get<std::string>());
    }
    if (!doc.contains("t0") || !doc.contains("t1")) throw ValidationError("analytic curve needs 't0' and 't1'");
    return std::make_shared<const CurveSpec>(CurveSpec::from_expressions(
        exprs, number_or_expression(doc["t0"], "t0"), number_or_expression(doc["t1"], "t1"), closed));
  }
  if (kind == "polyline") {
    if (!doc.contains("points") || !doc["points"].is_array())
      throw ValidationError("polyline curve needs a 'points' array");
    std::vector<Vec> points;
    for (const auto& p : doc["points"]) points.push_back(to_vec(p, "polyline point"));
    return std::make_shared<const CurveSpec>(CurveSpec::polyline(std::move(points), closed));
  }
  throw ValidationError("curve 'kind' must be \"analytic\" or \"polyline\"");
}

std::shared_ptr<const CurveSpec> load_curve(const std::filesystem::path& path) {
  return parse_curve(read_json_file(path, "curve"));
}

manifolds::ChartCatalogEntry parse_chart(const nlohmann::json& doc) {
  if (doc.is_string()) return manifolds::get_chart(doc.get<std::string>());
  if (!doc.is_object()) throw ValidationError("chart document must be a JSON object or a name");
  if (doc.contains("builtin")) return manifolds::get_chart(doc["builtin"].get<std::string>());

  const int n = doc.value("dimension", 0);
  if (n < 2) throw ValidationError("chart 'dimension' must be at least 2");
  const auto names = variable_names(n);
  if (!doc.contains("metric") || !doc["metric"].is_array() || doc["metric"].size() != static_cast<std::size_t>(n))
    throw ValidationError("chart 'metric' must be an n x n array of expressions");

  auto metric_exprs = std::make_shared<std::vector<Expression>>();
  for (const auto& row : doc["metric"]) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
      throw ValidationError("chart 'metric' must be an n x n array of expressions");
    for (const auto& e : row) metric_exprs->push_back(Expression::parse(e.get<std::string>(), names));
  }
  auto metric = [metric_exprs, n](const Vec& x) {
    Mat g(n, n);
    const std::span<const double> values(x.data(), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = (*metric_exprs)[static_cast<std::size_t>(i * n + j)].evaluate(values);
    return g;
  };

  std::optional<MetricChart::ChristoffelFn> christoffel;
  if (doc.contains("christoffel")) {
    auto exprs = std::make_shared<std::vector<Expression>>();
    const auto& c = doc["christoffel"];
    if (!c.is_array() || c.size() != static_cast<std::size_t>(n))
      throw ValidationError("chart 'christoffel' must be an n x n x n array");
    for (const auto& plane : c) {
      if (!plane.is_array() || plane.size() != static_cast<std::size_t>(n))
        throw ValidationError("chart 'christoffel' must be an n x n x n array");
      for (const auto& row : plane) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
          throw ValidationError("chart 'christoffel' must be an n x n x n array");
        for (const auto& e : row) exprs->push_back(Expression::parse(e.get<std::string>(), names));
      }
    }
    christoffel = [exprs, n](const Vec& x) {
      const std::span<const double> values(x.data(), static_cast<std::size_t>(n));
      Christoffel out;
      for (int k = 0; k < n; ++k) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m(i, j) = (*exprs)[static_cast<std::size_t>((k * n + i) * n + j)].evaluate(values);
        out.upper.push_back(std::move(m));
      }
      return out;
    };
  }

  MetricChart::DomainFn domain = nullptr;
  if (doc.contains("domain")) {
    auto exprs = std::make_shared<std::vector<Expression>>();
    for (const auto& e : doc["domain"]) exprs->push_back(Expression::parse(e.get<std::string>(), names));
    domain = [exprs, n](const Vec& x) {
      const std::span<const double> values(x.data(), static_cast<std::size_t>(n));
      for (const auto& e : *exprs)
        if (!(e.evaluate(values) > 0.0)) return false;
      return true;
    };
  }

  MetricChart::Options opts;
  opts.flat = doc.value("flat", false);
  const std::string name = doc.value("name", "custom");
  return {name, MetricChart(name, n, metric, christoffel, domain, opts), nullptr, {}, doc.value("doc", "")};
}

manifolds::ChartCatalogEntry resolve_chart(const std::string& name_or_path) {
  for (const auto& name : manifolds::chart_names())
    if (name == name_or_path) return manifolds::get_chart(name);
  if (std::filesystem::exists(name_or_path)) return parse_chart(read_json_file(name_or_path, "chart"));
  if (name_or_path.ends_with(".json")) throw ValidationError("chart file not found: " + name_or_path);
  return manifolds::get_chart(name_or_path);  // raises CatalogError with the list
}

std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw ConsistencyError("number formatting failed");
  return std::string(buffer, ptr);
}

void write_frames_csv(std::ostream& out, const FramedCurve& frames) {
  const CurveSamples& c = frames.base;
  if (c.dimension() != 3) throw UnsupportedDimensionError("frame CSV output requires dimension 3");
  out << frames_csv_header << '\n';
  std::vector<double> row;
  for (std::size_t i = 0; i < c.size(); ++i) {
    row.assign(1, c.params[i]);
    for (int k = 0; k < 3; ++k) row.push_back(c.positions[i][k]);
    for (int col = 0; col < 3; ++col)
      for (int k = 0; k < 3; ++k) row.push_back(frames.frames[i](k, col));
    write_row(out, row);
  }
}

nlohmann::json frames_json(const FramedCurve& frames, const std::string& chart) {
  json samples = json::array();
  const CurveSamples& c = frames.base;
  for (std::size_t i = 0; i < c.size(); ++i) {
    json frame = json::array();
    for (Eigen::Index col = 0; col < frames.frames[i].cols(); ++col) frame.push_back(vec_json(frames.frames[i].col(col)));
    samples.push_back({{"s", c.params[i]}, {"position", vec_json(c.positions[i])}, {"frame", frame}});
  }
  return {{"chart", chart}, {"samples", samples}};
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV input");
  std::stringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, value);
      if (ec != std::errc() || ptr != line.data() + end) throw ValidationError("malformed CSV number: " + line);
      row.push_back(value);
      start = end + 1;
    }
    if (row.size() != table.header.size()) throw ValidationError("CSV row has wrong column count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_field_csv(std::ostream& out, const CurveSamples& c, const NormalField& f) {
  const int n = c.dimension();
  out << "s";
  for (int k = 1; k <= n; ++k) out << ",x" << k;
  for (int k = 1; k <= n; ++k) out << ",v" << k;
  out << ",lambda\n";
  std::vector<double> row;
  for (std::size_t i = 0; i < c.size(); ++i) {
    row.assign(1, c.params[i]);
    for (int k = 0; k < n; ++k) row.push_back(c.positions[i][k]);
    for (int k = 0; k < n; ++k) row.push_back(f.vectors[i][k]);
    row.push_back(f.proportionality[i]);
    write_row(out, row);
  }
}

nlohmann::json field_json(const CurveSamples& c, const NormalField& f, const std::string& chart) {
  json samples = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    samples.push_back({{"s", c.params[i]},
                       {"position", vec_json(c.positions[i])},
                       {"vector", vec_json(f.vectors[i])},
                       {"lambda", f.proportionality[i]}});
  }
  return {{"chart", chart}, {"max_step_drift", f.max_drift()}, {"samples", samples}};
}

void write_obj(std::ostream& out, const RuledSurfaceMesh& mesh) {
  for (const Vec& p : mesh.points) {
    out << "v " << format_number(p[0]) << ' ' << format_number(p[1]) << ' ' << format_number(p.size() > 2 ? p[2] : 0.0)
        << '\n';
  }
  for (const auto& q : mesh.quads) out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

}  // namespace rmf::io
