#pragma once

// JSON and CSV serialization of reports, profiles and branch runs. Key order
// is fixed and floats use shortest round-trip decimal, so identical inputs
// give byte-identical output.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bhc/families.hpp"
#include "bhc/residuals.hpp"
#include "bhc/solver.hpp"

namespace bhc {

using Json = nlohmann::ordered_json;

/// "%.2e": three significant digits for human scanning.
std::string sci(double v);

Json grid_json(const GridSpec& g);
Json to_json(const ResidualReport& r, double tolerance);
void write_per_point_csv(std::ostream& os, const ResidualReport& r);

Json to_json(const MobiusTransform& T);
Json to_json(const Verdict& v);

/// Metadata and arrays of a profile.
Json to_json(const RadialProfile& p);
/// coordinate,value
void write_profile_csv(std::ostream& os, const RadialProfile& p);

/// One branch point without its profile arrays (a JSON-lines record).
Json summary_json(const BranchPoint& b);
Json to_json(const RadialSolution& s);
Json to_json(const TorusResult& t);

/// Compact single-line dump used for JSON lines.
std::string dump_line(const Json& j);
/// Indented dump with a trailing newline.
std::string dump_pretty(const Json& j);

}  // namespace bhc
