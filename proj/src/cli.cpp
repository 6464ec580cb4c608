#include "rmf/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

#include "rmf/errors.hpp"
#include "rmf/euclidean_rm.hpp"
#include "rmf/io.hpp"
#include "rmf/report.hpp"
#include "rmf/riemannian.hpp"

namespace rmf::cli {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  json curve;  // path string or inline object
  json chart = "euclidean3";
  int n = 2000;
  std::optional<double> tol;
  std::string out;
  std::string format;
  std::optional<std::vector<double>> seed;
  std::string field = "rm";
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  int rulings = 8;

  json echo() const {
    json j = {{"command", command}, {"curve", curve}, {"chart", chart}, {"n", n},
              {"out", out},         {"format", format}, {"field", field}};
    if (tol) j["tol"] = *tol;
    if (seed) j["seed"] = *seed;
    if (command == "surface") {
      j["lambda_min"] = lambda_min;
      j["lambda_max"] = lambda_max;
      j["rulings"] = rulings;
    }
    return j;
  }
};

std::vector<double> parse_seed(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size() && cell.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError("malformed --seed component '" + cell + "'");
    }
  }
  if (values.empty()) throw ValidationError("--seed needs comma-separated numbers");
  return values;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

void validate(const RunConfig& cfg) {
  if (cfg.curve.is_null()) throw ValidationError("no curve given (--curve or config 'curve')");
  if (cfg.n < 4) throw ValidationError("--n must be at least 4");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ValidationError("--tol must be positive");
  if (cfg.field != "rm" && cfg.field != "frenet-normal")
    throw ValidationError("--field must be 'rm' or 'frenet-normal'");
}

std::shared_ptr<const CurveSpec> load_curve(const RunConfig& cfg) {
  if (cfg.curve.is_string()) return io::load_curve(cfg.curve.get<std::string>());
  return io::parse_curve(cfg.curve);
}

manifolds::ChartCatalogEntry load_chart(const RunConfig& cfg) {
  if (cfg.chart.is_string()) return io::resolve_chart(cfg.chart.get<std::string>());
  return io::parse_chart(cfg.chart);
}

std::string chart_label(const manifolds::ChartCatalogEntry& e) { return e.name; }

// Writes to --out when given, otherwise to `out`.
template <class Writer>
void emit(const RunConfig& cfg, std::ostream& out, Writer&& writer) {
  if (cfg.out.empty()) {
    writer(out);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw ValidationError("cannot open output file: " + cfg.out);
  writer(file);
}

NormalField subject_field(const RunConfig& cfg, const CurveSamples& c, const MetricChart& chart) {
  if (cfg.field == "frenet-normal") {
    if (!chart.flat()) throw ValidationError("--field frenet-normal requires a flat chart");
    return frenet_normal_field(c);
  }
  const Vec seed = cfg.seed ? to_vec(*cfg.seed) : normal_basis(c.positions.front(), c.velocities.front(), chart).front();
  if (chart.flat()) return rm_transport(c, seed);
  return normal_parallel_transport(c, chart, seed);
}

int cmd_frames(const RunConfig& cfg, std::ostream& out) {
  const auto entry = load_chart(cfg);
  const MetricChart& chart = entry.chart;
  if (chart.dimension() != 3) throw UnsupportedDimensionError("frames output requires a three-dimensional chart");
  const CurveSamples c = report::prepare_curve(load_curve(cfg), chart, cfg.n);
  const Vec& x0 = c.positions.front();
  const Vec& t0 = c.velocities.front();
  const Mat g = chart.metric(x0);

  std::vector<Vec> basis = normal_basis(x0, t0, chart);
  if (cfg.seed) {
    Vec s = to_vec(*cfg.seed);
    if (s.size() != 3) throw ValidationError("--seed must have 3 components");
    s -= s.dot(g * t0) * t0;
    const double len = std::sqrt(s.dot(g * s));
    if (len == 0.0) throw ValidationError("seed vector is tangent to the curve");
    s /= len;
    // Complete to a positively oriented g-orthonormal frame.
    Vec other = basis[1].dot(g * s) * basis[0] - basis[0].dot(g * s) * basis[1];
    other /= std::sqrt(other.dot(g * other));
    Mat m(3, 3);
    m << t0, s, other;
    if (m.determinant() < 0) other = -other;
    basis = {s, other};
  }
  const FramedCurve frames = chart.flat() ? rm_frame(c, basis.front()) : rm_frame_manifold(c, chart, basis);
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format != "csv" && format != "json") throw ValidationError("frames supports --format csv or json");
  emit(cfg, out, [&](std::ostream& os) {
    if (format == "csv") io::write_frames_csv(os, frames);
    else os << io::frames_json(frames, chart_label(entry)).dump(2) << '\n';
  });
  return ok;
}

int cmd_transport(const RunConfig& cfg, std::ostream& out) {
  const auto entry = load_chart(cfg);
  const CurveSamples c = report::prepare_curve(load_curve(cfg), entry.chart, cfg.n);
  const NormalField f = subject_field(cfg, c, entry.chart);
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format != "csv" && format != "json") throw ValidationError("transport supports --format csv or json");
  emit(cfg, out, [&](std::ostream& os) {
    if (format == "csv") io::write_field_csv(os, c, f);
    else os << io::field_json(c, f, chart_label(entry)).dump(2) << '\n';
  });
  return ok;
}

int cmd_surface(const RunConfig& cfg, std::ostream& out) {
  const auto entry = load_chart(cfg);
  if (!entry.chart.flat() || entry.chart.dimension() != 3)
    throw ValidationError("surface output requires a flat three-dimensional chart");
  if (!cfg.format.empty() && cfg.format != "obj") throw ValidationError("surface supports --format obj only");
  if (!(cfg.lambda_min < cfg.lambda_max)) throw ValidationError("--lambda-min must be below --lambda-max");
  const CurveSamples c = report::prepare_curve(load_curve(cfg), entry.chart, cfg.n);
  const NormalField f = subject_field(cfg, c, entry.chart);
  const RuledSurfaceMesh mesh = ruled_surface(c, f, cfg.lambda_min, cfg.lambda_max, cfg.rulings);
  emit(cfg, out, [&](std::ostream& os) { io::write_obj(os, mesh); });
  return ok;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  report::Inputs in{.curve = load_curve(cfg), .chart = load_chart(cfg)};
  in.n_samples = cfg.n;
  if (cfg.seed) in.seed = to_vec(*cfg.seed);
  in.field = cfg.field == "frenet-normal" ? report::FieldKind::frenet_normal : report::FieldKind::rm;
  if (cfg.tol) in.tolerances.field_residual = *cfg.tol;
  in.config_echo = cfg.echo();
  const report::Report r = report::run(in);
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw ValidationError("cannot open output file: " + cfg.out);
    file << r.to_json().dump(2) << '\n';
  }
  r.write_text(out);
  return r.passed() ? ok : checks_failed;
}

int cmd_holonomy(const RunConfig& cfg, std::ostream& out) {
  const auto entry = load_chart(cfg);
  const CurveSamples c = report::prepare_curve(load_curve(cfg), entry.chart, cfg.n);
  const Holonomy h = normal_holonomy(c, entry.chart);
  json matrix = json::array();
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < h.matrix.cols(); ++j) row.push_back(h.matrix(i, j));
    matrix.push_back(row);
  }
  json doc = {{"chart", chart_label(entry)}, {"matrix", matrix}, {"orthogonality_residual", h.orthogonality_residual}};
  doc["angle"] = std::isnan(h.angle) ? json(nullptr) : json(h.angle);
  emit(cfg, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return ok;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  const json doc = io::read_json_file(path, "config");
  if (!doc.is_object()) throw ValidationError("config file must contain a JSON object");
  // Relative file references resolve against the config file's directory.
  const auto relocate = [&](const json& value) -> json {
    if (!value.is_string()) return value;
    const std::filesystem::path p = value.get<std::string>();
    const std::filesystem::path beside = std::filesystem::path(path).parent_path() / p;
    if (p.is_relative() && std::filesystem::exists(beside)) return beside.string();
    return value;
  };
  if (doc.contains("curve")) cfg.curve = relocate(doc["curve"]);
  if (doc.contains("chart")) cfg.chart = relocate(doc["chart"]);
  if (doc.contains("n")) cfg.n = doc["n"].get<int>();
  if (doc.contains("tol")) cfg.tol = doc["tol"].get<double>();
  if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
  if (doc.contains("format")) cfg.format = doc["format"].get<std::string>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::vector<double>>();
  if (doc.contains("field")) cfg.field = doc["field"].get<std::string>();
  if (doc.contains("lambda_min")) cfg.lambda_min = doc["lambda_min"].get<double>();
  if (doc.contains("lambda_max")) cfg.lambda_max = doc["lambda_max"].get<double>();
  if (doc.contains("rulings")) cfg.rulings = doc["rulings"].get<int>();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotation-minimizing frames and normal-connection transport along curves", "rmframe"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, curve, chart, out, format, seed, field;
    int n = 0, rulings = 0;
    double tol = 0.0, lambda_min = 0.0, lambda_max = 0.0;
  } flags;
  struct Handles {
    CLI::Option *config, *curve, *chart, *n, *tol, *out, *format, *seed, *field, *lmin, *lmax, *rulings;
  };
  std::map<std::string, Handles> handles;

  const std::pair<const char*, const char*> subcommands[] = {
      {"frames", "write a rotation-minimizing frame per sample"},
      {"transport", "transport one normal vector along the curve"},
      {"surface", "write the ruled surface of a transported field as OBJ"},
      {"report", "run the invariant checks and write a report"},
      {"holonomy", "loop transport matrix of a closed curve"},
  };
  for (const auto& [name, description] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    Handles h{};
    h.config = sub->add_option("--config", flags.config, "JSON config file; flags override its values");
    h.curve = sub->add_option("--curve", flags.curve, "curve JSON file");
    h.chart = sub->add_option("--chart", flags.chart, "chart name or chart JSON file");
    h.n = sub->add_option("--n", flags.n, "number of samples");
    h.tol = sub->add_option("--tol", flags.tol, "field residual tolerance");
    h.out = sub->add_option("--out", flags.out, "output path (default: standard output)");
    h.format = sub->add_option("--format", flags.format, "csv, json or obj");
    h.seed = sub->add_option("--seed", flags.seed, "initial normal vector, comma separated");
    h.field = sub->add_option("--field", flags.field, "rm or frenet-normal");
    h.lmin = sub->add_option("--lambda-min", flags.lambda_min, "ruling parameter lower bound");
    h.lmax = sub->add_option("--lambda-max", flags.lambda_max, "ruling parameter upper bound");
    h.rulings = sub->add_option("--rulings", flags.rulings, "number of ruling samples");
    handles[name] = h;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return ok;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help();
      return ok;
    } catch (const CLI::ParseError& e) {
      err << "rmframe: " << e.what() << '\n';
      return validation_error;
    }

    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    const Handles& h = handles[cfg.command];
    if (h.config->count()) apply_config_file(cfg, flags.config);
    if (h.curve->count()) cfg.curve = flags.curve;
    if (h.chart->count()) cfg.chart = flags.chart;
    if (h.n->count()) cfg.n = flags.n;
    if (h.tol->count()) cfg.tol = flags.tol;
    if (h.out->count()) cfg.out = flags.out;
    if (h.format->count()) cfg.format = flags.format;
    if (h.seed->count()) cfg.seed = parse_seed(flags.seed);
    if (h.field->count()) cfg.field = flags.field;
    if (h.lmin->count()) cfg.lambda_min = flags.lambda_min;
    if (h.lmax->count()) cfg.lambda_max = flags.lambda_max;
    if (h.rulings->count()) cfg.rulings = flags.rulings;
    validate(cfg);

    if (cfg.command == "frames") return cmd_frames(cfg, out);
    if (cfg.command == "transport") return cmd_transport(cfg, out);
    if (cfg.command == "surface") return cmd_surface(cfg, out);
    if (cfg.command == "report") return cmd_report(cfg, out);
    return cmd_holonomy(cfg, out);
  } catch (const ValidationError& e) {
    err << "rmframe: " << e.what() << '\n';
    return validation_error;
  } catch (const NumericalError& e) {
    err << "rmframe: " << e.what() << '\n';
    return numerical_error;
  } catch (const nlohmann::json::exception& e) {
    err << "rmframe: invalid configuration: " << e.what() << '\n';
    return validation_error;
  }
}

}  // namespace rmf::cli
