#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ncs/core.hpp"

namespace ncs {

// Learning-set CSV: header `id,<criterion names...>,class`, one row per
// alternative, class as a 1-based integer. Values are raw display units;
// columns named in `minimize` are negated on read and restored on write.
//
// The class count is taken from `classes` when given, otherwise inferred as
// the largest label present (at least 2).
LearningSet read_learning_csv(std::istream& in, const std::vector<std::string>& minimize = {},
                              std::optional<int> classes = std::nullopt);
LearningSet read_learning_csv_file(const std::string& path,
                                   const std::vector<std::string>& minimize = {},
                                   std::optional<int> classes = std::nullopt);
void write_learning_csv(const LearningSet& data, std::ostream& out);

using AnyModel = std::variant<UncsModel, MrSortModel>;

// Model JSON: criteria (names + directions), classes, frontiers (null for a
// frontier entry above every scale value), and either `sufficient` (minimal
// coalition masks) or `weights` + `lambda`. Values are raw display units.
AnyModel read_model_json(std::istream& in);
AnyModel read_model_json_file(const std::string& path);
std::string write_model_json(const UncsModel& model);
std::string write_model_json(const MrSortModel& model);
std::string write_model_json(const AnyModel& model);

UncsModel as_uncs(const AnyModel& model);
const CriteriaSpec& criteria_of(const AnyModel& model);

std::vector<std::string> minimized_names(const CriteriaSpec& spec);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ncs
