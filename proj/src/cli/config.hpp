#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "germrec/germ.hpp"
#include "germrec/reconstruct.hpp"
#include "germrec/signals.hpp"
#include "germrec/young.hpp"

namespace germrec::cli {

using Json = nlohmann::ordered_json;

struct GridSpec {
  double L = 8.0;
  int J = 12;
};

struct MollifierSpec {
  int r = 2;
  std::vector<double> scales;  // empty: default tweak scales
};

enum class GermKind { Constant, Taylor, Monomial, Zero };

struct GermSpec {
  GermKind kind = GermKind::Constant;
  SignalSpec signal;
  double beta = 2.5;   // Taylor order
  double scale = 1.0;  // multiplies the germ
};

struct ExperimentConfig {
  std::string command;
  GridSpec grid;
  NormConfig norm;
  ReconstructionConfig reconstruction;
  MollifierSpec mollifier;
  GermSpec germ;

  // young
  YoungConfig young;
  SignalSpec young_g;
  SignalSpec young_f;

  // besov
  SignalSpec besov_signal;
  double besov_alpha = -1.0;
  int besov_n0 = 0;
  std::optional<double> taylor_alpha;
  double taylor_h0 = 1.0;

  int panel_size = 10;
  double tolerance = 1e-3;

  Grid make_grid() const { return Grid(grid.L, grid.J); }
  Json to_json() const;
};

// Parses and validates; throws Error(ParameterViolation) on schema problems.
ExperimentConfig parse_config(const Json& j, const std::string& command);
ExperimentConfig load_config(const std::string& path, const std::string& command);
// Command-line overrides; propagated into the nested reconstruction settings.
void apply_overrides(ExperimentConfig& c, std::optional<std::uint64_t> seed, int jobs);

Json signal_to_json(const SignalSpec& s);
SignalSpec signal_from_json(const Json& j);
Json param_to_json(IntegrabilityParam p);

}  // namespace germrec::cli
