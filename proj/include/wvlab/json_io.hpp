#pragma once

// JSON encodings for measures, transport results, field configs and verdict
// reports.
//
// Measure format: {"dim": d, "support": [[x1, ...], ...], "weights": [...]}.
// Doubles are written in shortest round-trip form, so any decimal with at
// most 17 significant digits reads back to the same bits.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "wvlab/discrete_measure.hpp"
#include "wvlab/ot_exact.hpp"
#include "wvlab/viscosity.hpp"
#include "wvlab/wgeom.hpp"

namespace wvlab {

using Json = nlohmann::json;

Json to_json(const BasePoint& x);
Json to_json(const DiscreteMeasure& m);
Json to_json(const TransportResult& r);
Json to_json(const Witness& w);
Json to_json(const CsReport& r);
Json to_json(const DlcResult& r);
Json to_json(const BusemannEstimate& e);

/// {"op", "verdict", "witness", "params"} envelopes. A slope estimate is PASS
/// when it certifies slope >= 1 - 1e-3; below that it is FAIL for
/// analytically complete fields and INCONCLUSIVE otherwise.
Json verdict_json(const SlopeEstimate& s, const std::string& op, bool analytically_complete);
Json verdict_json(const SphereTestReport& r);
Json verdict_json(const DlgReport& r);
Json verdict_json(const DescentPolyline& d);
Json verdict_json(const RepresentationReport& r);

/// Throws ParseError on schema violations. Validation failures keep their
/// own codes; `notes` receives what validate_measure changed.
DiscreteMeasure measure_from_json(const Json& j, ValidationNotes* notes = nullptr);

/// Accepts a single measure object, an array of them, or {"measures": [...]}.
/// Invariant failures are rethrown as InvalidMeasure naming the index.
/// Renormalized measures add a line to `warnings`.
std::vector<DiscreteMeasure> load_measures(const std::filesystem::path& path,
                                           std::vector<std::string>* warnings = nullptr);

std::vector<DiscreteMeasure> parse_measures(const Json& j, std::vector<std::string>* warnings = nullptr);

/// Field configs:
///   {"type": "lifted", "base": <base>}
///   {"type": "distance_to", "target": <measure>, "offset": c}
///   {"type": "constant", "value": c}
///   {"type": "inf", "members": [<field>, ...]}
/// with base fields
///   {"type": "busemann", "direction": [...], "offset": c}
///   {"type": "min", "members": [<base>, ...]}
///   {"type": "distance_to_points", "points": [[...], ...], "sign": 1}
/// A "p" member overrides `default_p`.
MeasureField field_from_json(const Json& j, double default_p = 2.0);
BaseScalarField base_field_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

}  // namespace wvlab
