#pragma once

#include "lipnet/embedding.hpp"
#include "lipnet/params.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lipnet {

/// One numeric claim of a report. `anchor` names the check; `enforced`
/// checks decide the outcome, the others are informational (desk-mode
/// hypotheses).
struct Check {
  std::string anchor;
  std::string stage;
  double value = 0.0;
  double bound = 0.0;
  std::string relation = "<=";  ///< value relation bound
  bool ok = false;
  bool enforced = true;
};

Check make_check(std::string anchor, std::string stage, double value, std::string relation, double bound,
                 bool enforced = true);
bool all_enforced_pass(const std::vector<Check>& checks);

/// Error raised inside a pipeline stage; the code is the underlying one.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

enum class PipelineMode { paper, desk };
PipelineMode parse_mode(const std::string& text);
std::string to_string(PipelineMode m);

struct PipelineConfig {
  int dim = 2;
  NormSpec norm = NormSpec::lp_norm(2.0);
  Scaling scaling = Scaling::john;
  double delta = 0.05;
  double eps = 0.3;
  TargetNorm target = TargetNorm::l2;
  PipelineMode mode = PipelineMode::desk;

  /// Either a map sampled on the generated net, or a given net with values.
  MapFn map;
  std::optional<Net> net;
  std::optional<Mat> values;

  // Desk parameters. A <= 0 selects A = t; the scan visits A (R+1)^(k-m-1).
  double t = 0.1;
  double R = 3.0;
  double A = 0.0;
  int m = 5;
  double D = 0.0;  ///< claimed distortion; required in paper mode, checked against the net map otherwise

  std::uint64_t seed = 1;
  double spacing = 1.0 / 64;      ///< lattice spacing of F
  double eta = 1e-2;              ///< sphere-net resolution of the certificate
  std::size_t pairs = 2000;       ///< sampled pairs for the extension bullets
  int approximation_samples = 200;
};

struct PipelineReport {
  PipelineMode mode = PipelineMode::desk;
  std::optional<BoundReport> params;  ///< paper mode
  std::vector<std::string> warnings;
  std::vector<Check> checks;

  std::size_t net_size = 0;
  double D = 0.0;
  BulletReport bullets;
  ScaleResult scale;
  GoodPointResult point;
  AveragedHypotheses hypotheses;
  EmbeddingReport embedding;

  bool ok() const { return all_enforced_pass(checks); }
};

/// net -> extension -> field -> scale search -> point search -> extraction,
/// recording every intermediate bound. Paper mode only evaluates the
/// parameters. Stage failures are rethrown as StageError.
PipelineReport run_pipeline(const PipelineConfig& config);

}  // namespace lipnet
