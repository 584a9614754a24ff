#include "wvlab/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wvlab/error.hpp"

namespace wvlab {

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) parse_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_error(where, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where, "expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, where + "." + key);
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

BasePoint point(const Json& j, const std::string& where) {
  auto xs = numbers(j, where);
  if (xs.empty()) parse_error(where, "point has no coordinates");
  return BasePoint(std::move(xs));
}

std::vector<BasePoint> points(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where, "expected an array of points");
  std::vector<BasePoint> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string type_tag(const Json& j, const std::string& where) {
  const Json& t = member(j, "type", where);
  if (!t.is_string()) parse_error(where + ".type", "expected a string");
  return t.get<std::string>();
}

Json witness_or_null(const std::optional<Witness>& w) { return w ? to_json(*w) : Json(nullptr); }

}  // namespace

Json to_json(const BasePoint& x) {
  Json a = Json::array();
  for (double c : x.coords()) a.push_back(c);
  return a;
}

Json to_json(const DiscreteMeasure& m) {
  Json support = Json::array();
  for (const auto& x : m.support()) support.push_back(to_json(x));
  return Json{{"dim", m.dim()}, {"support", std::move(support)}, {"weights", m.weights()}};
}

Json to_json(const TransportResult& r) {
  Json plan = Json::array();
  for (const auto& e : r.plan.entries) plan.push_back(Json::array({e.row, e.col, e.mass}));
  return Json{{"value", r.value},
              {"p", r.p},
              {"solver", std::string(to_string(r.solver))},
              {"plan", std::move(plan)}};
}

Json to_json(const Witness& w) {
  return Json{{"measure", to_json(w.measure)},
              {"distance", w.distance},
              {"value_at_omega", w.value_at_omega},
              {"value_at_witness", w.value_at_witness},
              {"drop", w.drop()},
              {"source", w.source}};
}

Json to_json(const CsReport& r) {
  return Json{{"verdict", to_string(r.verdict)},
              {"params",
               {{"sigma", r.params.sigma},
                {"first_index", r.params.first_index},
                {"count", r.params.count},
                {"eps", r.params.eps},
                {"cluster", r.params.cluster},
                {"p", r.params.p}}},
              {"indices", r.indices},
              {"matrix", r.matrix},
              {"min_offdiagonal", r.min_offdiagonal},
              {"best_neighbours", r.best_neighbours},
              {"best_center", r.best_center}};
}

Json to_json(const DlcResult& r) {
  Json trace = Json::array();
  for (const auto& s : r.samples) trace.push_back(Json{{"n", s.n}, {"value", s.value}});
  return Json{{"verdict", r.converged ? "PASS" : "INCONCLUSIVE"},
              {"params", Json::object()},
              {"value", r.value},
              {"trace", std::move(trace)}};
}

Json to_json(const BusemannEstimate& e) {
  Json trace = Json::array();
  for (const auto& s : e.samples) trace.push_back(Json{{"t", s.t}, {"g", s.g}});
  return Json{{"value", e.value},
              {"truncation", e.truncation},
              {"tail_gap", e.tail_gap},
              {"converged", e.converged},
              {"trace", std::move(trace)}};
}

Json verdict_json(const SlopeEstimate& s, const std::string& op, bool analytically_complete) {
  const Verdict v = s.value >= 1.0 - 1e-3 ? Verdict::Pass
                    : analytically_complete ? Verdict::Fail
                                            : Verdict::Inconclusive;
  return Json{{"op", op},
              {"verdict", to_string(v)},
              {"value", s.value},
              {"witness", witness_or_null(s.witness)},
              {"params", {{"radii", s.radii}, {"skipped_radii", s.skipped_radii}}}};
}

Json verdict_json(const SphereTestReport& r) {
  Json radii = Json::array();
  for (const auto& rr : r.radii) {
    radii.push_back(Json{{"radius", rr.radius},
                         {"verdict", to_string(rr.verdict)},
                         {"candidates", rr.candidates},
                         {"best_gap", rr.best_gap},
                         {"witness", witness_or_null(rr.witness)}});
  }
  std::vector<double> rs;
  for (const auto& rr : r.radii) rs.push_back(rr.radius);
  return Json{{"op", "check-viscosity"},
              {"verdict", to_string(r.verdict)},
              {"witness", std::move(radii)},
              {"params", {{"eps", r.eps}, {"radii", rs}}}};
}

Json verdict_json(const DlgReport& r) {
  Json levels = Json::array();
  std::vector<double> cs;
  for (const auto& l : r.levels) {
    cs.push_back(l.level);
    levels.push_back(Json{{"level", l.level},
                          {"verdict", to_string(l.verdict)},
                          {"witness", witness_or_null(l.witness)}});
  }
  return Json{{"op", "dlg"},
              {"verdict", to_string(r.verdict)},
              {"witness", std::move(levels)},
              {"params", {{"eps", r.eps}, {"levels", cs}}}};
}

Json verdict_json(const DescentPolyline& d) {
  Json vertices = Json::array();
  for (const auto& v : d.vertices) vertices.push_back(to_json(v));
  Json stall = nullptr;
  if (d.stall) stall = Json{{"step", d.stall->step}, {"best_gap", d.stall->best_gap}};
  return Json{{"op", "descend"},
              {"verdict", d.stall ? "FAIL" : "PASS"},
              {"witness",
               {{"vertices", std::move(vertices)},
                {"times", d.times},
                {"values", d.values},
                {"drops", d.drops},
                {"distance_from_start", d.distance_from_start},
                {"max_slack", d.max_slack()},
                {"stall", std::move(stall)}}},
              {"params", {{"epsilon", d.epsilon}}}};
}

Json verdict_json(const RepresentationReport& r) {
  Json rays = Json::array();
  for (const auto& rc : r.rays) {
    rays.push_back(Json{{"start_value", rc.start_value},
                        {"busemann", to_json(rc.busemann)},
                        {"bound", rc.bound},
                        {"holds", rc.holds}});
  }
  return Json{{"op", "representation"},
              {"verdict", to_string(r.verdict)},
              {"witness",
               {{"value", r.value},
                {"rays", std::move(rays)},
                {"own_ray", r.own_ray ? to_json(*r.own_ray) : Json(nullptr)}}},
              {"params", Json::object()}};
}

DiscreteMeasure measure_from_json(const Json& j, ValidationNotes* notes) {
  const std::string where = "measure";
  const Json& dim = member(j, "dim", where);
  if (!dim.is_number_integer() || dim.get<long long>() < 1) {
    parse_error(where + ".dim", "expected a positive integer");
  }
  const std::size_t d = dim.get<std::size_t>();
  auto support = points(member(j, "support", where), where + ".support");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i].dim() != d) {
      parse_error(where + ".support[" + std::to_string(i) + "]",
                  "has " + std::to_string(support[i].dim()) + " coordinates, dim is " +
                      std::to_string(d));
    }
  }
  auto weights = numbers(member(j, "weights", where), where + ".weights");
  return validate_measure(std::move(support), std::move(weights), notes);
}

std::vector<DiscreteMeasure> parse_measures(const Json& j, std::vector<std::string>* warnings) {
  const Json* list = &j;
  Json single;
  if (j.is_object() && j.contains("measures")) {
    list = &j["measures"];
  } else if (j.is_object()) {
    single = Json::array({j});
    list = &single;
  }
  if (!list->is_array()) parse_error("measures", "expected an array");
  std::vector<DiscreteMeasure> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    ValidationNotes notes;
    try {
      out.push_back(measure_from_json((*list)[i], &notes));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) {
        throw Error(ErrorCode::ParseError, "measure #" + std::to_string(i) + ": " + e.what());
      }
      throw Error(ErrorCode::InvalidMeasure, "measure #" + std::to_string(i) + ": " + e.what());
    }
    if (warnings != nullptr && notes.renormalized) {
      warnings->push_back("measure #" + std::to_string(i) + ": weights renormalized");
    }
  }
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    // byte offset in the message; report the line as well
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

std::vector<DiscreteMeasure> load_measures(const std::filesystem::path& path,
                                           std::vector<std::string>* warnings) {
  return parse_measures(read_json_file(path), warnings);
}

BaseScalarField base_field_from_json(const Json& j) {
  const std::string where = "base";
  const std::string type = type_tag(j, where);
  if (type == "busemann") {
    return BaseScalarField::busemann(
        UnitVector(point(member(j, "direction", where), where + ".direction")),
        number_or(j, "offset", 0.0, where));
  }
  if (type == "min") {
    const Json& ms = member(j, "members", where);
    if (!ms.is_array()) parse_error(where + ".members", "expected an array");
    std::vector<BaseScalarField> members;
    for (const auto& m : ms) members.push_back(base_field_from_json(m));
    return min_combine(std::move(members));
  }
  if (type == "distance_to_points") {
    return BaseScalarField::distance_to(points(member(j, "points", where), where + ".points"),
                                        number_or(j, "sign", 1.0, where));
  }
  parse_error(where + ".type", "unknown base field \"" + type + "\"");
}

MeasureField field_from_json(const Json& j, double default_p) {
  const std::string where = "field";
  const std::string type = type_tag(j, where);
  const double p = number_or(j, "p", default_p, where);
  if (type == "lifted") return lift(base_field_from_json(member(j, "base", where)), p);
  if (type == "distance_to") {
    return distance_field(measure_from_json(member(j, "target", where)),
                          number_or(j, "offset", 0.0, where), p);
  }
  if (type == "constant") return constant_field(number(member(j, "value", where), where), p);
  if (type == "inf") {
    const Json& ms = member(j, "members", where);
    if (!ms.is_array()) parse_error(where + ".members", "expected an array");
    std::vector<MeasureField> members;
    for (const auto& m : ms) members.push_back(field_from_json(m, p));
    return inf_of_fields(std::move(members));
  }
  parse_error(where + ".type", "unknown field \"" + type + "\"");
}

}  // namespace wvlab
