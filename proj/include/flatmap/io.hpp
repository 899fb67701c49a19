#pragma once

// JSON and CSV serialization for the production scalar. Numbers that carry
// extended precision are written as decimal strings.

#include "flatmap/dynamics.hpp"
#include "flatmap/spectral.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace flatmap::io {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts a decimal string or a JSON number.
Real real_from_json(const json& j, const char* what);
std::string format(const Real& x, int digits);

Diffeo<Real> diffeo_from_json(const json& j);
json diffeo_to_json(const Diffeo<Real>& d, int digits);

MapX<Real> map_from_json(const json& j);
json map_to_json(const MapX<Real>& f, int digits);

void write_trace_csv(std::ostream& os, const RenormTrace<Real>& trace, int digits);
json trace_summary(const RenormTrace<Real>& trace, int digits);

json spectrum_to_json(const SpectralData<Real>& d, int digits);
json geometry_to_json(const GeometryReport<Real>& r, int digits);

struct DimensionRun {
  std::string name;
  std::vector<DimensionEstimate> estimates;  // one per depth
};

/// Columns depth, scale, box_count, local_slope; a leading `map` column is
/// added when more than one run is written.
void write_dimension_csv(std::ostream& os, const std::vector<DimensionRun>& runs, int digits);

}  // namespace flatmap::io
