#include "ncs/mip.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "ncs/errors.hpp"
#include "ncs/io.hpp"

namespace ncs {

std::string to_string(MipVariant v) {
  return v == MipVariant::optimizing ? "mip-o" : "mip-d";
}

MipModel::MipModel(MipVariant variant, MipConfig config, LearningSet data)
    : variant_(variant), config_(config), data_(std::move(data)) {}

uint32_t MipModel::add_var(const std::string& name, VarKind kind) {
  if (index_.count(name)) throw InputError("duplicate variable name: " + name);
  const auto idx = static_cast<uint32_t>(vars_.size());
  vars_.push_back({name, kind});
  index_.emplace(name, idx);
  return idx;
}

void MipModel::add_row(LinRow row) {
  for (const auto& term : row.terms) {
    if (term.var >= vars_.size()) throw InputError("row references an undeclared variable");
  }
  rows_.push_back(std::move(row));
}

void MipModel::set_objective(std::vector<LinTerm> terms) {
  for (const auto& term : terms) {
    if (term.var >= vars_.size()) throw InputError("objective references an undeclared variable");
  }
  objective_ = std::move(terms);
}

std::optional<uint32_t> MipModel::find_var(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

uint32_t MipModel::var_index(const std::string& name) const {
  auto idx = find_var(name);
  if (!idx) throw InputError("unknown variable: " + name);
  return *idx;
}

size_t MipModel::binary_count() const {
  size_t n = 0;
  for (const auto& v : vars_) n += v.kind == VarKind::binary ? 1 : 0;
  return n;
}

namespace {

std::string sanitize_identifier(const std::string& id) {
  std::string out;
  for (char ch : id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ? ch : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "a" + out;
  return out;
}

constexpr Value kOne = Value::from_units(Value::kScale);

}  // namespace

MipModel encode_mip(const LearningSet& data, MipVariant variant, const MipConfig& config) {
  if (!data.values_in_unit_range()) {
    throw InputError("values must lie in [0,1]; rescale the learning set first");
  }
  const int n = data.criteria().count();
  const int p = data.classes();

  MipModel m(variant, config, data);

  // Alternative names, deduplicated after sanitizing.
  {
    std::map<std::string, int> used;
    for (const auto& alt : data.alternatives()) {
      std::string name = sanitize_identifier(alt.id);
      auto [it, fresh] = used.emplace(name, 0);
      if (!fresh) name += "_" + std::to_string(++it->second);
      m.alt_names_.push_back(name);
    }
  }

  const bool optimizing = variant == MipVariant::optimizing;
  uint32_t alpha = 0;
  if (optimizing) alpha = m.add_var("alpha", VarKind::continuous);
  const uint32_t lambda = m.add_var("lambda", VarKind::continuous);

  std::vector<std::vector<uint32_t>> b(static_cast<size_t>(p - 1));
  for (int h = 1; h <= p - 1; ++h) {
    for (int i = 1; i <= n; ++i) {
      b[static_cast<size_t>(h - 1)].push_back(
          m.add_var("b_" + std::to_string(h) + "_" + std::to_string(i), VarKind::continuous));
    }
  }
  std::vector<uint32_t> w;
  for (int i = 1; i <= n; ++i) {
    w.push_back(m.add_var("w_" + std::to_string(i), VarKind::continuous));
  }

  // Frontiers adjacent to each alternative's class: the one below (class-1
  // alternatives have none) and the one above (top-class alternatives have
  // none). Vote and threshold indicators exist only there.
  struct AltVars {
    std::vector<int> frontiers;
    std::map<int, std::vector<uint32_t>> c, d;
    std::optional<uint32_t> x, y;
  };
  std::vector<AltVars> av(data.size());
  for (size_t a = 0; a < data.size(); ++a) {
    const int cls = data.alternatives()[a].label;
    const std::string& id = m.alt_name(a);
    if (cls - 1 >= 1) av[a].frontiers.push_back(cls - 1);
    if (cls <= p - 1) av[a].frontiers.push_back(cls);
    for (int k : av[a].frontiers) {
      for (int i = 1; i <= n; ++i) {
        const std::string suffix = id + "_" + std::to_string(k) + "_" + std::to_string(i);
        av[a].c[k].push_back(m.add_var("c_" + suffix, VarKind::continuous));
        av[a].d[k].push_back(m.add_var("d_" + suffix, VarKind::binary));
      }
    }
    if (cls - 1 >= 1) av[a].x = m.add_var("x_" + id, VarKind::continuous);
    if (cls <= p - 1) av[a].y = m.add_var("y_" + id, VarKind::continuous);
  }

  uint32_t row_seq = 0;
  auto row_name = [&row_seq]() { return "r" + std::to_string(++row_seq); };
  const Value big_m = config.big_m;
  const Value eps = config.epsilon;

  // Threshold indicators: d = 1 exactly when the alternative reaches the
  // frontier entry, the strict side realized through epsilon.
  for (size_t a = 0; a < data.size(); ++a) {
    const auto& profile = data.alternatives()[a].profile;
    for (int k : av[a].frontiers) {
      for (int i = 0; i < n; ++i) {
        const Value v = profile[static_cast<size_t>(i)];
        const uint32_t bki = b[static_cast<size_t>(k - 1)][static_cast<size_t>(i)];
        const uint32_t dki = av[a].d[k][static_cast<size_t>(i)];
        m.add_row({row_name(),
                   {{bki, kOne}, {dki, big_m}},
                   Sense::le,
                   Value::from_units(v.units() + big_m.units())});
        m.add_row({row_name(),
                   {{bki, kOne}, {dki, big_m}},
                   Sense::ge,
                   Value::from_units(v.units() + eps.units())});
      }
    }
  }

  // Votes: c = w when the indicator is up, 0 otherwise.
  for (size_t a = 0; a < data.size(); ++a) {
    for (int k : av[a].frontiers) {
      for (int i = 0; i < n; ++i) {
        const uint32_t cki = av[a].c[k][static_cast<size_t>(i)];
        const uint32_t dki = av[a].d[k][static_cast<size_t>(i)];
        m.add_row({row_name(), {{cki, kOne}, {w[static_cast<size_t>(i)], kOne.negated()}}, Sense::le,
                   Value::from_units(0)});
        m.add_row({row_name(), {{cki, kOne}, {dki, kOne.negated()}}, Sense::le, Value::from_units(0)});
        m.add_row({row_name(),
                   {{cki, kOne}, {w[static_cast<size_t>(i)], kOne.negated()}, {dki, kOne.negated()}},
                   Sense::ge,
                   kOne.negated()});
      }
    }
  }

  // Frontier dominance.
  for (int i = 0; i < n; ++i) {
    for (int h = 2; h <= p - 1; ++h) {
      m.add_row({row_name(),
                 {{b[static_cast<size_t>(h - 1)][static_cast<size_t>(i)], kOne},
                  {b[static_cast<size_t>(h - 2)][static_cast<size_t>(i)], kOne.negated()}},
                 Sense::ge,
                 Value::from_units(0)});
    }
  }

  // Weight normalization, optimizing variant only.
  if (optimizing) {
    LinRow norm{row_name(), {}, Sense::eq, kOne};
    for (uint32_t wi : w) norm.terms.push_back({wi, kOne});
    m.add_row(std::move(norm));
  }

  // Vote balances around each adjacent frontier.
  for (size_t a = 0; a < data.size(); ++a) {
    const int cls = data.alternatives()[a].label;
    if (av[a].x) {
      LinRow lower{row_name(), {}, Sense::eq, Value::from_units(0)};
      for (uint32_t cki : av[a].c[cls - 1]) lower.terms.push_back({cki, kOne});
      lower.terms.push_back({lambda, kOne.negated()});
      lower.terms.push_back({*av[a].x, kOne.negated()});
      m.add_row(std::move(lower));
    }
    if (av[a].y) {
      LinRow upper{row_name(), {}, Sense::eq, Value::from_units(0)};
      for (uint32_t cki : av[a].c[cls]) upper.terms.push_back({cki, kOne});
      upper.terms.push_back({lambda, kOne.negated()});
      upper.terms.push_back({*av[a].y, kOne});
      m.add_row(std::move(upper));
    }
  }

  if (optimizing) {
    // The margin is below every slack; maximizing it is minimizing -alpha.
    for (size_t a = 0; a < data.size(); ++a) {
      if (av[a].x) {
        m.add_row({row_name(), {{alpha, kOne}, {*av[a].x, kOne.negated()}}, Sense::le,
                   Value::from_units(0)});
      }
      if (av[a].y) {
        m.add_row({row_name(), {{alpha, kOne}, {*av[a].y, kOne.negated()}}, Sense::le,
                   Value::from_units(0)});
      }
    }
    m.set_objective({{alpha, kOne.negated()}});
  } else {
    // At least one full vote of slack on both sides of each frontier.
    for (size_t a = 0; a < data.size(); ++a) {
      if (av[a].x) m.add_row({row_name(), {{*av[a].x, kOne}}, Sense::ge, kOne});
      if (av[a].y) m.add_row({row_name(), {{*av[a].y, kOne}}, Sense::ge, kOne});
    }
    m.set_objective({});
  }

  return m;
}

MipModel encode_mip_o(const LearningSet& data, const MipConfig& config) {
  return encode_mip(data, MipVariant::optimizing, config);
}

MipModel encode_mip_d(const LearningSet& data, const MipConfig& config) {
  return encode_mip(data, MipVariant::decision, config);
}

namespace {

void append_terms(std::string& out, const MipModel& m, const std::vector<LinTerm>& terms) {
  for (size_t t = 0; t < terms.size(); ++t) {
    const Value coef = terms[t].coef;
    const bool negative = coef.units() < 0;
    const Value mag = negative ? coef.negated() : coef;
    if (t == 0) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    out += mag.str();
    out += ' ';
    out += m.vars()[terms[t].var].name;
  }
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
  }
  return "<=";
}

}  // namespace

std::string write_lp(const MipModel& m) {
  std::string out = "Minimize\n obj: ";
  if (m.objective().empty()) {
    out += '0';
  } else {
    append_terms(out, m, m.objective());
  }
  out += "\nSubject To\n";
  for (const auto& row : m.rows()) {
    out += ' ';
    out += row.name;
    out += ": ";
    append_terms(out, m, row.terms);
    out += ' ';
    out += sense_text(row.sense);
    out += ' ';
    out += row.rhs.str();
    out += '\n';
  }
  std::string binaries;
  for (const auto& v : m.vars()) {
    if (v.kind == VarKind::binary) binaries += ' ' + v.name + '\n';
  }
  if (!binaries.empty()) {
    out += "Binaries\n";
    out += binaries;
  }
  out += "End\n";
  return out;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool looks_numeric(const std::string& tok) {
  const char c = tok.front();
  return (c >= '0' && c <= '9') || (c == '-' && tok.size() > 1);
}

// Parses "[sign] coef name ..." into terms, returning the position after the
// last term.
size_t parse_terms(const std::vector<std::string>& toks, size_t pos,
                   std::vector<std::pair<std::string, Value>>& terms) {
  int sign = 1;
  while (pos < toks.size()) {
    const std::string& tok = toks[pos];
    if (tok == "+") {
      sign = 1;
      ++pos;
      continue;
    }
    if (tok == "-") {
      sign = -1;
      ++pos;
      continue;
    }
    if (!looks_numeric(tok)) break;
    Value coef = Value::parse(tok);
    if (sign < 0) coef = coef.negated();
    sign = 1;
    ++pos;
    if (pos >= toks.size() || looks_numeric(toks[pos])) {
      // A bare trailing constant: only the zero objective is allowed.
      if (coef.units() == 0) continue;
      throw ParseError("constant term in LP expression");
    }
    terms.emplace_back(toks[pos], coef);
    ++pos;
  }
  return pos;
}

}  // namespace

ParsedLp read_lp(std::string_view text) {
  enum class Section { none, objective, rows, bounds, binaries, done };
  Section section = Section::none;
  ParsedLp out;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '\\') continue;

    if (trimmed == "Minimize") {
      section = Section::objective;
      continue;
    }
    if (trimmed == "Subject To") {
      section = Section::rows;
      continue;
    }
    if (trimmed == "Bounds") {
      section = Section::bounds;
      continue;
    }
    if (trimmed == "Binaries") {
      section = Section::binaries;
      continue;
    }
    if (trimmed == "End") {
      section = Section::done;
      continue;
    }

    auto toks = tokenize(trimmed);
    switch (section) {
      case Section::objective: {
        if (toks.empty() || toks[0].back() != ':') throw ParseError("bad objective line: " + line);
        toks.erase(toks.begin());
        size_t pos = parse_terms(toks, 0, out.objective);
        if (pos != toks.size()) throw ParseError("trailing tokens in objective: " + line);
        break;
      }
      case Section::rows: {
        if (toks.empty() || toks[0].back() != ':') throw ParseError("bad constraint line: " + line);
        ParsedLp::Row row;
        row.name = toks[0].substr(0, toks[0].size() - 1);
        size_t pos = parse_terms(toks, 1, row.terms);
        if (pos + 2 != toks.size()) throw ParseError("bad constraint line: " + line);
        const std::string& sense = toks[pos];
        if (sense == "<=") {
          row.sense = Sense::le;
        } else if (sense == ">=") {
          row.sense = Sense::ge;
        } else if (sense == "=") {
          row.sense = Sense::eq;
        } else {
          throw ParseError("bad sense '" + sense + "'");
        }
        row.rhs = Value::parse(toks[pos + 1]);
        out.rows.push_back(std::move(row));
        break;
      }
      case Section::binaries: {
        for (auto& tok : toks) out.binaries.push_back(std::move(tok));
        break;
      }
      case Section::bounds:
        throw ParseError("Bounds entries are not produced by this writer: " + line);
      case Section::none:
      case Section::done:
        throw ParseError("unexpected LP content: " + line);
    }
  }
  return out;
}

bool structurally_equal(const MipModel& m, const ParsedLp& parsed) {
  auto term_eq = [&](const std::vector<LinTerm>& a,
                     const std::vector<std::pair<std::string, Value>>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (m.vars()[a[i].var].name != b[i].first || a[i].coef != b[i].second) return false;
    }
    return true;
  };
  if (!term_eq(m.objective(), parsed.objective)) return false;
  if (m.rows().size() != parsed.rows.size()) return false;
  for (size_t r = 0; r < m.rows().size(); ++r) {
    const auto& a = m.rows()[r];
    const auto& b = parsed.rows[r];
    if (a.name != b.name || a.sense != b.sense || a.rhs != b.rhs) return false;
    if (!term_eq(a.terms, b.terms)) return false;
  }
  std::vector<std::string> model_binaries;
  for (const auto& v : m.vars()) {
    if (v.kind == VarKind::binary) model_binaries.push_back(v.name);
  }
  std::vector<std::string> parsed_binaries = parsed.binaries;
  std::sort(model_binaries.begin(), model_binaries.end());
  std::sort(parsed_binaries.begin(), parsed_binaries.end());
  return model_binaries == parsed_binaries;
}

MipSolution parse_solution_text(std::string_view text) {
  MipSolution out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() == 1 && toks[0] == "INFEASIBLE") {
      out.feasible = false;
      return out;
    }
    if (toks.size() != 2) throw ParseError("bad solution line: " + line);
    try {
      size_t used = 0;
      const double v = std::stod(toks[1], &used);
      if (used != toks[1].size()) throw std::invalid_argument(toks[1]);
      out.values[toks[0]] = v;
    } catch (const std::exception&) {
      throw ParseError("bad solution value: " + line);
    }
    any = true;
  }
  if (!any) throw ParseError("empty solution text");
  out.feasible = true;
  return out;
}

namespace {

double value_or_zero(const std::map<std::string, double>& values, const std::string& name) {
  auto it = values.find(name);
  return it == values.end() ? 0.0 : it->second;
}

double require_value(const std::map<std::string, double>& values, const std::string& name) {
  auto it = values.find(name);
  if (it == values.end()) throw InputError("solution is missing variable " + name);
  return it->second;
}

}  // namespace

MrSortModel decode_mrsort(const MipModel& m, const std::map<std::string, double>& values) {
  const LearningSet& data = m.data();
  const int n = data.criteria().count();
  const int p = data.classes();

  const Value lambda = Value::from_double(require_value(values, "lambda"));
  std::vector<Value> weights;
  for (int i = 1; i <= n; ++i) {
    weights.push_back(Value::from_double(require_value(values, "w_" + std::to_string(i))));
  }
  std::vector<Profile> frontiers;
  for (int h = 1; h <= p - 1; ++h) {
    Profile f;
    for (int i = 1; i <= n; ++i) {
      f.push_back(Value::from_double(
          require_value(values, "b_" + std::to_string(h) + "_" + std::to_string(i))));
    }
    frontiers.push_back(std::move(f));
  }

  MrSortModel model(data.criteria(), p, std::move(frontiers), std::move(weights), lambda);
  const auto violations = extends(model.to_uncs(), data);
  if (!violations.empty()) {
    throw FaithfulnessError("decoded model misassigns " + violations.front().id + " (" +
                            std::to_string(violations.size()) + " violations)");
  }
  return model;
}

bool satisfies_point(const MipModel& m, const std::map<std::string, double>& values,
                     double tolerance) {
  for (const auto& v : m.vars()) {
    const double x = value_or_zero(values, v.name);
    if (x < -tolerance) return false;
    if (v.kind == VarKind::binary &&
        std::min(std::abs(x), std::abs(x - 1.0)) > tolerance) {
      return false;
    }
  }
  for (const auto& row : m.rows()) {
    double lhs = 0;
    for (const auto& term : row.terms) {
      lhs += term.coef.to_double() * value_or_zero(values, m.vars()[term.var].name);
    }
    const double rhs = row.rhs.to_double();
    const bool ok = row.sense == Sense::le   ? lhs <= rhs + tolerance
                    : row.sense == Sense::ge ? lhs >= rhs - tolerance
                                             : std::abs(lhs - rhs) <= tolerance;
    if (!ok) return false;
  }
  return true;
}

namespace {

Value rescale_value(Value v, Value min, Value max) {
  if (max == min) return Value::from_units(0);
  const __int128 num = static_cast<__int128>(v.units() - min.units()) * Value::kScale;
  const __int128 den = max.units() - min.units();
  // Round to nearest.
  const __int128 q = (2 * num + den) / (2 * den);
  return Value::from_units(static_cast<int64_t>(q));
}

}  // namespace

LearningSet unit_rescale(const LearningSet& data, RescaleMap* map) {
  const int n = data.criteria().count();
  RescaleMap local;
  local.columns.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& col = local.columns[static_cast<size_t>(i)];
    for (const auto& alt : data.alternatives()) col.values.push_back(alt.profile[static_cast<size_t>(i)]);
    std::sort(col.values.begin(), col.values.end());
    col.values.erase(std::unique(col.values.begin(), col.values.end()), col.values.end());
    if (col.values.empty()) {
      col.min = col.max = Value::from_units(0);
    } else {
      col.min = col.values.front();
      col.max = col.values.back();
    }
  }

  std::vector<Alternative> alts;
  for (const auto& alt : data.alternatives()) {
    Alternative scaled = alt;
    for (int i = 0; i < n; ++i) {
      const auto& col = local.columns[static_cast<size_t>(i)];
      scaled.profile[static_cast<size_t>(i)] =
          rescale_value(alt.profile[static_cast<size_t>(i)], col.min, col.max);
    }
    alts.push_back(std::move(scaled));
  }
  if (map) *map = local;
  return LearningSet(data.criteria(), data.classes(), std::move(alts));
}

MrSortModel to_raw_units(const MrSortModel& unit_model, const RescaleMap& map,
                         const CriteriaSpec& criteria) {
  const int n = criteria.count();
  if (static_cast<int>(map.columns.size()) != n || unit_model.criteria().count() != n) {
    throw InputError("rescale map does not match the criteria");
  }
  std::vector<Profile> frontiers;
  for (const auto& unit_frontier : unit_model.frontiers()) {
    Profile f;
    for (int i = 0; i < n; ++i) {
      const auto& col = map.columns[static_cast<size_t>(i)];
      const Value t = unit_frontier[static_cast<size_t>(i)];
      Value raw = Value::above_all();
      for (const Value v : col.values) {
        if (!t.is_above_all() && rescale_value(v, col.min, col.max) >= t) {
          raw = v;
          break;
        }
      }
      f.push_back(raw);
    }
    frontiers.push_back(std::move(f));
  }
  return MrSortModel(criteria, unit_model.classes(), std::move(frontiers), unit_model.weights(),
                     unit_model.lambda());
}

namespace {

std::string run_command_capture_mip(const std::string& command) {
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw BridgeError("cannot start: " + command);
  std::string output;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  pclose(pipe);
  return output;
}

}  // namespace

MipRunResult solve_mip_external(const MipModel& model, const std::string& command,
                                double timeout_seconds) {
  if (command.empty()) throw BridgeError("no MIP solver command configured");
  const auto start = std::chrono::steady_clock::now();

  static std::atomic<uint64_t> counter{0};
  std::random_device rd;
  const auto path = (std::filesystem::temp_directory_path() /
                     ("ncs-lp-" + std::to_string(::getpid()) + "-" +
                      std::to_string(counter.fetch_add(1)) + "-" + std::to_string(rd()) + ".lp"))
                        .string();
  struct Cleanup {
    std::string path;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
  } cleanup{path};

  write_text_file(path, write_lp(model));
  std::string invocation;
  if (timeout_seconds > 0) invocation = "timeout " + std::to_string(timeout_seconds) + " ";
  invocation += command + " '" + path + "'";
  const std::string output = run_command_capture_mip(invocation);

  MipRunResult result;
  result.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  MipSolution solution;
  try {
    solution = parse_solution_text(output);
  } catch (const ParseError& e) {
    if (timeout_seconds > 0 && output.empty()) {
      result.status = MipRunStatus::budget_exceeded;
      return result;
    }
    throw BridgeError(std::string("unparsable MIP solver output: ") + e.what());
  }
  if (!solution.feasible) {
    result.status = MipRunStatus::infeasible;
    return result;
  }
  result.model = decode_mrsort(model, solution.values);
  result.status = MipRunStatus::ok;
  return result;
}

}  // namespace ncs
