#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmf/curve.hpp"
#include "rmf/euclidean_rm.hpp"
#include "rmf/model_manifolds.hpp"

namespace rmf::io {

/// {"kind": "analytic", "expr": [...], "t0": .., "t1": .., "closed": ..} or
/// {"kind": "polyline", "points": [[x, y, z], ...], "closed": ..}.
/// t0 and t1 may be numbers or constant expressions such as "2*pi".
std::shared_ptr<const CurveSpec> parse_curve(const nlohmann::json& doc);
std::shared_ptr<const CurveSpec> load_curve(const std::filesystem::path& path);

/// {"builtin": "<name>"} or
/// {"name": .., "dimension": n, "metric": [[expr, ...], ...],
///  "christoffel": [k][i][j] expressions (optional),
///  "domain": [expr, ...] (optional; every expression must be > 0),
///  "flat": bool (optional)} with variables x1..xn.
manifolds::ChartCatalogEntry parse_chart(const nlohmann::json& doc);
/// A catalog name or the path of a chart JSON document.
manifolds::ChartCatalogEntry resolve_chart(const std::string& name_or_path);

nlohmann::json read_json_file(const std::filesystem::path& path, const std::string& what);

/// Shortest decimal that reads back to the same double.
std::string format_number(double value);

inline constexpr const char* frames_csv_header = "s,x,y,z,t1,t2,t3,v1_1,v1_2,v1_3,v2_1,v2_2,v2_3";

/// Dimension-3 frames, one row per sample.
void write_frames_csv(std::ostream& out, const FramedCurve& frames);
nlohmann::json frames_json(const FramedCurve& frames, const std::string& chart);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(std::istream& in);

/// Columns s, x1..xn, v1..vn, lambda.
void write_field_csv(std::ostream& out, const CurveSamples& c, const NormalField& f);
nlohmann::json field_json(const CurveSamples& c, const NormalField& f, const std::string& chart);

/// `v x y z` records in row-major grid order followed by 1-based quad `f` records.
void write_obj(std::ostream& out, const RuledSurfaceMesh& mesh);

}  // namespace rmf::io
