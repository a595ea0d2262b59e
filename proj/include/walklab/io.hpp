#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "walklab/boundary.hpp"
#include "walklab/model.hpp"
#include "walklab/montecarlo.hpp"
#include "walklab/oracle.hpp"
#include "walklab/pmf.hpp"
#include "walklab/stats.hpp"

namespace walklab {

using Json = nlohmann::ordered_json;

inline constexpr int kOutputDigits = 12;

/// x rounded to 12 significant digits; non-finite values pass through.
double round_sig(double x);
/// x printed with 12 significant digits.
std::string format_sig(double x);

Json to_json(const WalkParams& params);
Json to_json(const Constants& c);
Json to_json(const BoundaryPoint& b);
Json to_json(const ExtremalPoints& e);
Json to_json(const WeightLimit& w);
Json to_json(const PmfTable& t);
Json to_json(const JointLaw& law);
Json to_json(const HeavyProfile& h);
Json to_json(const PathReport& r);
Json to_json(const EnsembleResult& e);
Json to_json(const ReversedWalkReport& r);
Json to_json(const FitResult& f);

/// Columns: k,mass. The tail certificate is written as a trailing comment.
void write_pmf_csv(std::ostream& os, const PmfTable& t);
/// Columns: x,y,branch,marker.
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& pts,
                        const ExtremalPoints& extremal);
/// Columns: site,count.
void write_field_csv(std::ostream& os, const LocalTimeField& f);

/// Everything needed to replay a command.
struct RunManifest {
  std::string tool = "walklab";
  std::string version;
  std::string command;
  Json params = Json::object();
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0;
  std::string started_at;  // UTC, ISO 8601
  std::vector<std::string> outputs;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

/// UTC timestamp in ISO 8601 form.
std::string utc_timestamp();

}  // namespace walklab
