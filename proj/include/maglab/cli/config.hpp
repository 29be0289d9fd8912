#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "maglab/eigensolve.hpp"
#include "maglab/grid.hpp"
#include "maglab/weights.hpp"

namespace maglab::cli {

struct DomainConfig {
  enum class Type { rectangle, disc, annulus };
  Type type = Type::disc;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;  ///< rectangle
  Point center{};                         ///< disc, annulus
  double radius = 1;                      ///< disc
  double r_inner = 0.5, r_outer = 2;      ///< annulus
  friend bool operator==(const DomainConfig&, const DomainConfig&) = default;

  DomainSpec build() const;
};

struct WeightConfig {
  WeightTag tag = WeightTag::zero;
  WeightParams params;
  friend bool operator==(const WeightConfig&, const WeightConfig&) = default;

  Weight build() const { return make_weight(tag, params); }
};

struct SetConfig {
  enum class Type { point, segment, closed_disc, finite_union };
  Type type = Type::point;
  Point p{}, q{};  ///< point uses p; segment p -> q
  Point center{};
  double radius = 0;
  std::vector<SetConfig> parts;
  friend bool operator==(const SetConfig&, const SetConfig&) = default;

  CompactSetSpec build() const;
};

enum class EigOperator { magnetic, nonmagnetic, weighted };

struct EigCommand {
  double n = 1;
  EigOperator op = EigOperator::magnetic;
  friend bool operator==(const EigCommand&, const EigCommand&) = default;
};

struct SweepCommand {
  std::vector<double> n_list{1, 2, 4, 8, 16, 32, 64, 128, 256};
  double ratio = 5.0;
  double tail_ratio = 1.05;
  friend bool operator==(const SweepCommand&, const SweepCommand&) = default;
};

struct KatoCommand {
  double n = 1;
  friend bool operator==(const KatoCommand&, const KatoCommand&) = default;
};

struct FluxCommand {
  double beta = 1;
  std::vector<double> t_list;
  friend bool operator==(const FluxCommand&, const FluxCommand&) = default;
};

struct PcheckCommand {
  SetConfig set;
  std::vector<double> radii;
  double cells_per_radius = 8;
  double ratio = 5.0;
  double tail_ratio = 1.05;
  friend bool operator==(const PcheckCommand&, const PcheckCommand&) = default;
};

struct VerifyCommand {
  friend bool operator==(const VerifyCommand&, const VerifyCommand&) = default;
};

using Command = std::variant<EigCommand, SweepCommand, KatoCommand, FluxCommand, PcheckCommand, VerifyCommand>;

std::string_view command_name(const Command& c) noexcept;

struct OutputConfig {
  std::string csv, json, svg, matrix;  ///< empty means "not requested"
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  std::optional<DomainConfig> domain;
  std::optional<WeightConfig> weight;
  std::optional<double> h;
  SolverOpts solver;
  Command command = VerifyCommand{};
  OutputConfig output;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// The weight a run actually uses (zero when absent; the flux command
  /// builds its harmonic_log weight from the flux section).
  Weight effective_weight() const;
};

/// Syntax error in the config document.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_, column_;
};

/// Semantically invalid config; key() is the dotted path of the offending entry.
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& what);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Parses and validates a JSON config document. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);

/// Canonical JSON form; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& c);

}  // namespace maglab::cli
