#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncs/core.hpp"

namespace ncs {

// The two mixed-integer formulations: the optimizing one maximizes the
// margin between sufficient and insufficient coalition weights under
// normalized weights; the decision one drops the objective and the
// normalization and instead requires a full vote of slack on either side.
enum class MipVariant { optimizing, decision };

std::string to_string(MipVariant v);  // "mip-o" / "mip-d"

struct MipConfig {
  // Big-M constant and the epsilon realizing strict threshold comparisons.
  Value big_m = Value::from_units(2 * Value::kScale);
  Value epsilon = Value::from_units(1'000);  // 1e-6
};

enum class VarKind { continuous, binary };
enum class Sense { le, ge, eq };

struct LinTerm {
  uint32_t var;
  Value coef;
};

struct MipVar {
  std::string name;
  VarKind kind = VarKind::continuous;  // continuous vars are bounded below by 0
};

struct LinRow {
  std::string name;
  std::vector<LinTerm> terms;
  Sense sense = Sense::le;
  Value rhs;
};

class MipModel {
 public:
  MipModel(MipVariant variant, MipConfig config, LearningSet data);

  MipVariant variant() const { return variant_; }
  const MipConfig& config() const { return config_; }
  const LearningSet& data() const { return data_; }

  const std::vector<MipVar>& vars() const { return vars_; }
  const std::vector<LinRow>& rows() const { return rows_; }
  // Objective terms, always to be minimized; empty means the zero objective.
  const std::vector<LinTerm>& objective() const { return objective_; }

  uint32_t add_var(const std::string& name, VarKind kind);
  void add_row(LinRow row);
  void set_objective(std::vector<LinTerm> terms);

  std::optional<uint32_t> find_var(const std::string& name) const;
  uint32_t var_index(const std::string& name) const;  // throws when absent
  size_t binary_count() const;
  size_t continuous_count() const { return vars_.size() - binary_count(); }

  // Sanitized LP identifier of an alternative, unique within the model.
  const std::string& alt_name(size_t alt_index) const { return alt_names_[alt_index]; }

 private:
  MipVariant variant_;
  MipConfig config_;
  LearningSet data_;
  std::vector<MipVar> vars_;
  std::vector<LinRow> rows_;
  std::vector<LinTerm> objective_;
  std::map<std::string, uint32_t> index_;
  std::vector<std::string> alt_names_;

  friend MipModel encode_mip(const LearningSet&, MipVariant, const MipConfig&);
};

// Both encoders require every value in [0,1]; rescale first when needed.
MipModel encode_mip_o(const LearningSet& data, const MipConfig& config = {});
MipModel encode_mip_d(const LearningSet& data, const MipConfig& config = {});

// LP-format text: Minimize / Subject To / Bounds / Binaries / End, with the
// Bounds and Binaries sections present only when non-empty.
std::string write_lp(const MipModel& model);

struct ParsedLp {
  std::vector<std::pair<std::string, Value>> objective;
  struct Row {
    std::string name;
    std::vector<std::pair<std::string, Value>> terms;
    Sense sense = Sense::le;
    Value rhs;
  };
  std::vector<Row> rows;
  std::vector<std::string> binaries;
};

ParsedLp read_lp(std::string_view text);
bool structurally_equal(const MipModel& model, const ParsedLp& parsed);

struct MipSolution {
  bool feasible = false;
  std::map<std::string, double> values;
};

// Solution text: either a line `INFEASIBLE`, or `name value` lines (missing
// variables default to 0). Lines starting with `#` are ignored.
MipSolution parse_solution_text(std::string_view text);

// Reads the voting parameters and frontiers off a feasible point and checks
// that the resulting model reproduces every recorded class; throws
// FaithfulnessError when it does not (an epsilon/big-M calibration issue).
MrSortModel decode_mrsort(const MipModel& model, const std::map<std::string, double>& values);

// Evaluates every row and variable-kind constraint at the given point.
bool satisfies_point(const MipModel& model, const std::map<std::string, double>& values,
                     double tolerance = 1e-9);

struct RescaleMap {
  struct Column {
    Value min, max;
    std::vector<Value> values;  // sorted distinct raw values (internal orientation)
  };
  std::vector<Column> columns;
};

// Affine per-criterion rescale onto [0,1] (a constant column maps to 0).
LearningSet unit_rescale(const LearningSet& data, RescaleMap* map = nullptr);

// Maps a unit-space model back onto the raw scales by snapping each frontier
// entry to the smallest raw reference value whose image reaches it.
MrSortModel to_raw_units(const MrSortModel& unit_model, const RescaleMap& map,
                         const CriteriaSpec& criteria);

enum class MipRunStatus { ok, infeasible, budget_exceeded };

struct MipRunResult {
  MipRunStatus status;
  std::optional<MrSortModel> model;
  double solve_ms = 0.0;
};

// External-solver bridge: writes the LP to a temporary file, runs
// `command <path>`, and parses/decodes the produced solution text.
MipRunResult solve_mip_external(const MipModel& model, const std::string& command,
                                double timeout_seconds = 0.0);

}  // namespace ncs
