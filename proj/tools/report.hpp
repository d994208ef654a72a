#pragma once

#include "lipnet/emd.hpp"
#include "lipnet/factorization.hpp"
#include "lipnet/finite_metric.hpp"
#include "lipnet/params.hpp"
#include "lipnet/pipeline.hpp"

#include <json.hpp>

#include <string>

namespace lipnet::cli {

using json = nlohmann::ordered_json;

/// Input problems (unreadable or malformed files) map to exit code 2.
class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error("input", message) {}
};

json read_json(const std::string& path);
/// Writes to `path`, or stdout when it is empty or "-".
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

json to_json(const Vec& v);
json to_json(const Mat& m);
Mat matrix_from_json(const json& j);
Vec vector_from_json(const json& j);

json to_json(const Check& c);
json to_json(const std::vector<Check>& checks);

json to_json(const LogValue& v);
json to_json(const BoundReport& r);

json net_to_json(const Net& net, Scaling scaling);
/// Inverse of net_to_json; the space is rebuilt from norm, dim and scaling.
Net net_from_json(const json& j);

/// A map file: {"target": "l2"|"linf", and one of
///   "values": one row per net point,
///   "linear": matrix L (x -> L x),
///   "named": "identity" | "sine-graph" (with "amplitude")}.
struct MapSpec {
  TargetNorm target = TargetNorm::l2;
  std::optional<Mat> values;
  MapFn fn;
  std::string description;
};
MapSpec map_from_json(const json& j, int dim);

json to_json(const BulletReport& b);
json to_json(const ScaleLog& log);
json to_json(const GoodPointResult& g);
json to_json(const AveragedHypotheses& h);
json to_json(const EmbeddingReport& e);
json to_json(const PipelineReport& r);
json to_json(const FactorizationReport& r);
json to_json(const DistortionCertificate& c);
json to_json(const SnowflakeEmbedding& s);
json to_json(const FamilyMetric& f);
json family_to_json(const std::vector<PointSet>& family);
std::vector<PointSet> family_from_json(const json& j);

}  // namespace lipnet::cli
