#include "ncs/sat.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "ncs/errors.hpp"

namespace ncs {

Vocabulary::Vocabulary(CriteriaSpec criteria, int classes, std::vector<std::vector<Value>> values)
    : criteria_(std::move(criteria)), classes_(classes), values_(std::move(values)) {
  uint32_t next = 1;
  for (const auto& column : values_) {
    x_base_.push_back(next);
    next += static_cast<uint32_t>(column.size()) * static_cast<uint32_t>(classes_ - 1);
  }
  y_base_ = next;
}

Vocabulary Vocabulary::build(const LearningSet& data) {
  std::vector<std::vector<Value>> values(static_cast<size_t>(data.criteria().count()));
  for (const auto& alt : data.alternatives()) {
    for (size_t i = 0; i < values.size(); ++i) values[i].push_back(alt.profile[i]);
  }
  for (auto& column : values) {
    std::sort(column.begin(), column.end());
    column.erase(std::unique(column.begin(), column.end()), column.end());
  }
  return Vocabulary(data.criteria(), data.classes(), std::move(values));
}

int Vocabulary::rank_of(int i, Value v) const {
  const auto& column = values_[static_cast<size_t>(i)];
  auto it = std::lower_bound(column.begin(), column.end(), v);
  if (it == column.end() || *it != v) {
    throw InputError("value " + v.str() + " is not a reference value of criterion " +
                     criteria_.at(i).name);
  }
  return static_cast<int>(it - column.begin());
}

uint32_t Vocabulary::x_var(int criterion, int frontier, int rank) const {
  const auto& column = values_[static_cast<size_t>(criterion)];
  return x_base_[static_cast<size_t>(criterion)] +
         static_cast<uint32_t>(frontier - 1) * static_cast<uint32_t>(column.size()) +
         static_cast<uint32_t>(rank);
}

uint32_t Vocabulary::y_var(uint32_t mask) const { return y_base_ + mask; }

Vocabulary::ThresholdMeta Vocabulary::x_meta(uint32_t id) const {
  if (!is_x_var(id)) throw InputError("not a threshold variable: " + std::to_string(id));
  int criterion = criteria_.count() - 1;
  while (x_base_[static_cast<size_t>(criterion)] > id) --criterion;
  const uint32_t offset = id - x_base_[static_cast<size_t>(criterion)];
  const auto width = static_cast<uint32_t>(values_[static_cast<size_t>(criterion)].size());
  return {criterion, static_cast<int>(offset / width) + 1, static_cast<int>(offset % width)};
}

uint32_t Vocabulary::y_mask(uint32_t id) const {
  if (id < y_base_ || id > var_count()) {
    throw InputError("not a coalition variable: " + std::to_string(id));
  }
  return id - y_base_;
}

Vocabulary build_vocabulary(const LearningSet& data) { return Vocabulary::build(data); }

void CnfInstance::validate_clause(std::span<const int32_t> lits) const {
  if (lits.empty()) throw InputError("empty clause");
  for (size_t a = 0; a < lits.size(); ++a) {
    const int32_t lit = lits[a];
    const uint32_t var = static_cast<uint32_t>(lit < 0 ? -lit : lit);
    if (lit == 0 || var > var_count_) {
      throw InputError("literal " + std::to_string(lit) + " out of range");
    }
    for (size_t b = a + 1; b < lits.size(); ++b) {
      if (lits[b] == -lit) throw InputError("clause contains a complementary literal pair");
    }
  }
}

void CnfInstance::add_clause(std::span<const int32_t> lits) {
  validate_clause(lits);
  lits_.insert(lits_.end(), lits.begin(), lits.end());
  starts_.push_back(lits_.size());
}

namespace {

struct UniqueAlternative {
  const Alternative* alt;
  std::vector<int> ranks;  // per criterion, rank of the alternative's value
};

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CnfInstance encode(const LearningSet& data, bool parallel) {
  if (data.classes() < 2) throw InputError("encoding needs at least two classes");
  Vocabulary vocab = Vocabulary::build(data);
  const int n = data.criteria().count();
  const int p = data.classes();
  const uint32_t n_masks = uint32_t{1} << n;
  const uint32_t full_mask = n_masks - 1;

  // Collapse exact duplicates; flag shared profiles with different classes.
  std::vector<UniqueAlternative> alts;
  std::vector<std::pair<std::string, std::string>> conflicts;
  {
    std::map<Profile, std::map<int, const Alternative*>> seen;
    for (const auto& alt : data.alternatives()) {
      auto& labels = seen[alt.profile];
      if (labels.count(alt.label)) continue;  // exact duplicate
      for (const auto& [other_label, other] : labels) {
        (void)other_label;
        conflicts.emplace_back(other->id, alt.id);
      }
      labels.emplace(alt.label, &alt);
      UniqueAlternative ua;
      ua.alt = &alt;
      ua.ranks.reserve(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        ua.ranks.push_back(vocab.rank_of(i, alt.profile[static_cast<size_t>(i)]));
      }
      alts.push_back(std::move(ua));
    }
  }

  // Emission tasks for the two per-alternative families: every alternative
  // below the top class is vetoed at the frontier just above it, every one
  // above the bottom class is supported at the frontier just below it.
  std::vector<std::pair<int, size_t>> veto_tasks;     // (frontier, alternative index)
  std::vector<std::pair<int, size_t>> support_tasks;  // (frontier, alternative index)
  for (int h = 1; h <= p - 1; ++h) {
    for (size_t a = 0; a < alts.size(); ++a) {
      if (alts[a].alt->label == h) veto_tasks.emplace_back(h, a);
    }
  }
  for (int h = 1; h <= p - 1; ++h) {
    for (size_t a = 0; a < alts.size(); ++a) {
      if (alts[a].alt->label == h + 1) support_tasks.emplace_back(h, a);
    }
  }

  FamilyCounts counts;
  for (int i = 0; i < n; ++i) {
    const auto vals = static_cast<uint64_t>(vocab.values(i).size());
    if (vals > 0) counts.scale_order += static_cast<uint64_t>(p - 1) * (vals - 1);
    counts.frontier_order += static_cast<uint64_t>(p - 2) * vals;
  }
  counts.coalition_order = static_cast<uint64_t>(n) * (uint64_t{1} << (n - 1));
  counts.upper_frontier_veto = veto_tasks.size() * n_masks;
  counts.lower_frontier_support = support_tasks.size() * n_masks;

  // Literal offsets of each coalition's clause within one task block.
  std::vector<size_t> mask_lit_offset(n_masks + 1, 0);
  for (uint32_t m = 0; m < n_masks; ++m) {
    mask_lit_offset[m + 1] = mask_lit_offset[m] + static_cast<size_t>(std::popcount(m)) + 1;
  }
  const size_t task_lits = mask_lit_offset[n_masks];

  const uint64_t total_clauses = counts.total();
  const size_t monotone_lits =
      2 * static_cast<size_t>(counts.scale_order + counts.frontier_order + counts.coalition_order);
  const size_t total_lits = monotone_lits + (veto_tasks.size() + support_tasks.size()) * task_lits;

  CnfInstance cnf(vocab.var_count());
  cnf.families_ = counts;
  cnf.conflicts_ = std::move(conflicts);
  cnf.lits_.resize(total_lits);
  cnf.starts_.resize(static_cast<size_t>(total_clauses) + 1);
  cnf.starts_[0] = 0;

  auto* lits = cnf.lits_.data();
  auto* starts = cnf.starts_.data();
  size_t lit_pos = 0;
  size_t clause_pos = 0;
  auto push = [&](int32_t lit) { lits[lit_pos++] = lit; };
  auto close_clause = [&]() { starts[++clause_pos] = lit_pos; };

  // Higher values pass whenever lower ones do (consecutive value pairs).
  for (int i = 0; i < n; ++i) {
    const int vals = static_cast<int>(vocab.values(i).size());
    for (int h = 1; h <= p - 1; ++h) {
      for (int r = 0; r + 1 < vals; ++r) {
        push(static_cast<int32_t>(vocab.x_var(i, h, r + 1)));
        push(-static_cast<int32_t>(vocab.x_var(i, h, r)));
        close_clause();
      }
    }
  }
  // Passing a frontier implies passing the one below it (adjacent pairs).
  for (int i = 0; i < n; ++i) {
    const int vals = static_cast<int>(vocab.values(i).size());
    for (int h = 1; h <= p - 2; ++h) {
      for (int r = 0; r < vals; ++r) {
        push(static_cast<int32_t>(vocab.x_var(i, h, r)));
        push(-static_cast<int32_t>(vocab.x_var(i, h + 1, r)));
        close_clause();
      }
    }
  }
  // Sufficiency propagates to covering coalitions.
  for (uint32_t mask = 0; mask < n_masks; ++mask) {
    for (int i = 0; i < n; ++i) {
      const uint32_t bit = 1u << i;
      if (mask & bit) continue;
      push(static_cast<int32_t>(vocab.y_var(mask | bit)));
      push(-static_cast<int32_t>(vocab.y_var(mask)));
      close_clause();
    }
  }

  const size_t veto_lit_base = lit_pos;
  const size_t veto_clause_base = clause_pos;
  const size_t support_lit_base = veto_lit_base + veto_tasks.size() * task_lits;
  const size_t support_clause_base = veto_clause_base + veto_tasks.size() * n_masks;

  const auto n_veto = static_cast<int64_t>(veto_tasks.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (int64_t t = 0; t < n_veto; ++t) {
    const auto [h, a] = veto_tasks[static_cast<size_t>(t)];
    const auto& ranks = alts[a].ranks;
    size_t pos = veto_lit_base + static_cast<size_t>(t) * task_lits;
    size_t clause = veto_clause_base + static_cast<size_t>(t) * n_masks;
    for (uint32_t mask = 0; mask < n_masks; ++mask) {
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          lits[pos++] = -static_cast<int32_t>(vocab.x_var(i, h, ranks[static_cast<size_t>(i)]));
        }
      }
      lits[pos++] = -static_cast<int32_t>(vocab.y_var(mask));
      starts[++clause] = pos;
    }
  }

  const auto n_support = static_cast<int64_t>(support_tasks.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (int64_t t = 0; t < n_support; ++t) {
    const auto [h, a] = support_tasks[static_cast<size_t>(t)];
    const auto& ranks = alts[a].ranks;
    size_t pos = support_lit_base + static_cast<size_t>(t) * task_lits;
    size_t clause = support_clause_base + static_cast<size_t>(t) * n_masks;
    for (uint32_t mask = 0; mask < n_masks; ++mask) {
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          lits[pos++] = static_cast<int32_t>(vocab.x_var(i, h, ranks[static_cast<size_t>(i)]));
        }
      }
      lits[pos++] = static_cast<int32_t>(vocab.y_var(full_mask ^ mask));
      starts[++clause] = pos;
    }
  }

  cnf.vocabulary_ = std::move(vocab);
  for (size_t c = 0; c < cnf.clause_count(); ++c) cnf.validate_clause(cnf.clause(c));
  return cnf;
}

UncsModel decode(const Vocabulary& vocab, const TruthAssignment& assignment) {
  if (assignment.var_count() != vocab.var_count()) {
    throw InputError("assignment covers " + std::to_string(assignment.var_count()) +
                     " variables, expected " + std::to_string(vocab.var_count()));
  }
  const int n = vocab.criteria_count();
  std::vector<Profile> frontiers;
  for (int h = 1; h <= vocab.frontier_count(); ++h) {
    Profile f(static_cast<size_t>(n), Value::above_all());
    for (int i = 0; i < n; ++i) {
      const int vals = static_cast<int>(vocab.values(i).size());
      for (int r = 0; r < vals; ++r) {
        if (assignment.value(vocab.x_var(i, h, r))) {
          f[static_cast<size_t>(i)] = vocab.values(i)[static_cast<size_t>(r)];
          break;
        }
      }
    }
    frontiers.push_back(std::move(f));
  }
  std::vector<uint8_t> table(vocab.y_var_count());
  for (uint32_t mask = 0; mask < vocab.y_var_count(); ++mask) {
    table[mask] = assignment.value(vocab.y_var(mask)) ? 1 : 0;
  }
  return UncsModel(vocab.criteria(), vocab.classes(), std::move(frontiers),
                   UpSet(n, std::move(table)));
}

TruthAssignment model_image(const UncsModel& model, const Vocabulary& vocab) {
  if (model.criteria() != vocab.criteria() || model.classes() != vocab.classes()) {
    throw InputError("model does not match the vocabulary's criteria or classes");
  }
  TruthAssignment out(vocab.var_count());
  for (int i = 0; i < vocab.criteria_count(); ++i) {
    const auto& column = vocab.values(i);
    for (int h = 1; h <= vocab.frontier_count(); ++h) {
      const Value threshold = model.frontier(h)[static_cast<size_t>(i)];
      for (int r = 0; r < static_cast<int>(column.size()); ++r) {
        if (!threshold.is_above_all() && column[static_cast<size_t>(r)] >= threshold) {
          out.set(vocab.x_var(i, h, r), true);
        }
      }
    }
  }
  for (uint32_t mask = 0; mask < vocab.y_var_count(); ++mask) {
    if (model.sufficient().contains({mask})) out.set(vocab.y_var(mask), true);
  }
  return out;
}

std::string write_dimacs(const CnfInstance& cnf) {
  std::string out;
  out += "p cnf " + std::to_string(cnf.var_count()) + ' ' + std::to_string(cnf.clause_count()) + '\n';
  if (cnf.vocabulary()) {
    const Vocabulary& vocab = *cnf.vocabulary();
    for (uint32_t id = 1; id <= vocab.var_count(); ++id) {
      if (vocab.is_x_var(id)) {
        const auto meta = vocab.x_meta(id);
        Value shown = vocab.values(meta.criterion)[static_cast<size_t>(meta.rank)];
        if (vocab.criteria().at(meta.criterion).direction == Direction::minimize) {
          shown = shown.negated();
        }
        out += "c var " + std::to_string(id) + " threshold criterion=" +
               vocab.criteria().at(meta.criterion).name + " frontier=" +
               std::to_string(meta.frontier) + " value=" + shown.str() + '\n';
      } else {
        out += "c var " + std::to_string(id) + " coalition mask=" +
               std::to_string(vocab.y_mask(id)) + '\n';
      }
    }
  }
  for (size_t c = 0; c < cnf.clause_count(); ++c) {
    for (int32_t lit : cnf.clause(c)) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfInstance read_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  uint32_t vars = 0;
  size_t clauses = 0;
  bool have_header = false;
  std::vector<int32_t> pending;
  std::optional<CnfInstance> cnf;
  size_t read_clauses = 0;

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream fields(line);
    if (!have_header) {
      std::string p, kind;
      if (!(fields >> p >> kind >> vars >> clauses) || p != "p" || kind != "cnf") {
        throw ParseError("bad DIMACS header: " + line);
      }
      have_header = true;
      cnf.emplace(vars);
      continue;
    }
    int64_t lit = 0;
    while (fields >> lit) {
      if (lit == 0) {
        if (!cnf) throw ParseError("clause before header");
        cnf->add_clause(pending);
        pending.clear();
        ++read_clauses;
      } else {
        pending.push_back(static_cast<int32_t>(lit));
      }
    }
  }
  if (!have_header) throw ParseError("missing DIMACS header");
  if (!pending.empty()) throw ParseError("unterminated clause at end of file");
  if (read_clauses != clauses) {
    throw ParseError("header declares " + std::to_string(clauses) + " clauses, found " +
                     std::to_string(read_clauses));
  }
  return std::move(*cnf);
}

std::string vocabulary_json(const Vocabulary& vocab) {
  std::string out = "{\n";
  for (uint32_t id = 1; id <= vocab.var_count(); ++id) {
    out += "  \"" + std::to_string(id) + "\": ";
    if (vocab.is_x_var(id)) {
      const auto meta = vocab.x_meta(id);
      Value shown = vocab.values(meta.criterion)[static_cast<size_t>(meta.rank)];
      const auto& crit = vocab.criteria().at(meta.criterion);
      if (crit.direction == Direction::minimize) shown = shown.negated();
      out += "{\"kind\": \"threshold\", \"criterion\": \"" + crit.name +
             "\", \"frontier\": " + std::to_string(meta.frontier) +
             ", \"rank\": " + std::to_string(meta.rank) + ", \"value\": " + shown.str() + "}";
    } else {
      out += "{\"kind\": \"coalition\", \"mask\": " + std::to_string(vocab.y_mask(id)) + "}";
    }
    if (id < vocab.var_count()) out += ',';
    out += '\n';
  }
  out += "}\n";
  return out;
}

ParsedSolverOutput parse_solver_output(std::string_view text, uint32_t var_count) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<ExternalStatus> status;
  std::vector<int64_t> lits;
  bool terminated = false;

  while (std::getline(in, line)) {
    if (line.size() >= 2 && line[0] == 's' && (line[1] == ' ' || line[1] == '\t')) {
      const std::string word = trim_copy(line.substr(2));
      if (word == "SATISFIABLE") {
        status = ExternalStatus::sat;
      } else if (word == "UNSATISFIABLE") {
        status = ExternalStatus::unsat;
      } else if (word == "UNKNOWN" || word == "INDETERMINATE") {
        status = ExternalStatus::unknown;
      } else {
        throw ParseError("unrecognized solver status: " + word);
      }
    } else if (line.size() >= 1 && line[0] == 'v' && !terminated) {
      std::istringstream fields(line.substr(1));
      int64_t lit = 0;
      while (fields >> lit) {
        if (lit == 0) {
          terminated = true;
          break;
        }
        lits.push_back(lit);
      }
    }
  }

  if (!status) throw ParseError("solver output has no status line");
  ParsedSolverOutput out{*status, TruthAssignment{}};
  if (*status != ExternalStatus::sat) return out;

  if (!terminated) throw ParseError("satisfiable output lacks a 0-terminated value section");
  out.assignment = TruthAssignment(var_count);
  for (int64_t lit : lits) {
    const int64_t var = lit < 0 ? -lit : lit;
    if (var < 1 || var > static_cast<int64_t>(var_count)) {
      throw ParseError("literal " + std::to_string(lit) + " out of range");
    }
    out.assignment.set(static_cast<uint32_t>(var), lit > 0);
  }
  return out;
}

}  // namespace ncs
