#include "ncs/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ncs/errors.hpp"

namespace ncs {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

LearningSet read_learning_csv(std::istream& in, const std::vector<std::string>& minimize,
                              std::optional<int> classes) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty learning-set file");
  auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header.front()) != "id" || trim(header.back()) != "class") {
    throw ParseError("learning-set header must be `id,<criteria...>,class`");
  }

  std::vector<Criterion> criteria;
  for (size_t i = 1; i + 1 < header.size(); ++i) {
    criteria.push_back({trim(header[i]), Direction::maximize});
  }
  std::unordered_set<std::string> wanted(minimize.begin(), minimize.end());
  for (auto& c : criteria) {
    if (wanted.erase(c.name)) c.direction = Direction::minimize;
  }
  if (!wanted.empty()) {
    throw InputError("unknown minimize criterion: " + *wanted.begin());
  }
  CriteriaSpec spec(std::move(criteria));

  std::vector<Alternative> alts;
  int max_label = 1;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != spec.count() + 2) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(spec.count() + 2) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Alternative alt;
    alt.id = trim(fields.front());
    for (int i = 0; i < spec.count(); ++i) {
      Value v = Value::parse(trim(fields[static_cast<size_t>(i) + 1]));
      if (spec.at(i).direction == Direction::minimize) v = v.negated();
      alt.profile.push_back(v);
    }
    const std::string cls = trim(fields.back());
    try {
      size_t used = 0;
      alt.label = std::stoi(cls, &used);
      if (used != cls.size()) throw std::invalid_argument(cls);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": bad class '" + cls + "'");
    }
    max_label = std::max(max_label, alt.label);
    alts.push_back(std::move(alt));
  }

  const int p = classes.value_or(std::max(2, max_label));
  return LearningSet(std::move(spec), p, std::move(alts));
}

LearningSet read_learning_csv_file(const std::string& path, const std::vector<std::string>& minimize,
                                   std::optional<int> classes) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_learning_csv(in, minimize, classes);
}

void write_learning_csv(const LearningSet& data, std::ostream& out) {
  out << "id";
  for (const auto& c : data.criteria().list()) out << ',' << c.name;
  out << ",class\n";
  for (const auto& alt : data.alternatives()) {
    out << alt.id;
    for (int i = 0; i < data.criteria().count(); ++i) {
      Value v = alt.profile[static_cast<size_t>(i)];
      if (data.criteria().at(i).direction == Direction::minimize) v = v.negated();
      out << ',' << v.str();
    }
    out << ',' << alt.label << '\n';
  }
}

namespace {

// Values are emitted through the exact decimal printer rather than a float
// serializer, so files carry the stored decimals verbatim.
void append_criteria_json(std::string& out, const CriteriaSpec& spec) {
  out += "  \"criteria\": [\n";
  for (int i = 0; i < spec.count(); ++i) {
    const auto& c = spec.at(i);
    out += "    {\"name\": ";
    out += nlohmann::json(c.name).dump();
    out += ", \"direction\": \"";
    out += c.direction == Direction::minimize ? "minimize" : "maximize";
    out += "\"}";
    if (i + 1 < spec.count()) out += ',';
    out += '\n';
  }
  out += "  ],\n";
}

void append_frontiers_json(std::string& out, const CriteriaSpec& spec,
                           const std::vector<Profile>& frontiers) {
  out += "  \"frontiers\": [\n";
  for (size_t h = 0; h < frontiers.size(); ++h) {
    out += "    [";
    for (int i = 0; i < spec.count(); ++i) {
      Value v = frontiers[h][static_cast<size_t>(i)];
      if (v.is_above_all()) {
        out += "null";
      } else {
        if (spec.at(i).direction == Direction::minimize) v = v.negated();
        out += v.str();
      }
      if (i + 1 < spec.count()) out += ", ";
    }
    out += ']';
    if (h + 1 < frontiers.size()) out += ',';
    out += '\n';
  }
  out += "  ]";
}

}  // namespace

std::string write_model_json(const UncsModel& model) {
  std::string out = "{\n";
  append_criteria_json(out, model.criteria());
  out += "  \"classes\": " + std::to_string(model.classes()) + ",\n";
  append_frontiers_json(out, model.criteria(), model.frontiers());
  out += ",\n  \"sufficient\": [";
  const auto minimal = model.sufficient().minimal_members();
  for (size_t i = 0; i < minimal.size(); ++i) {
    out += std::to_string(minimal[i]);
    if (i + 1 < minimal.size()) out += ", ";
  }
  out += "]\n}\n";
  return out;
}

std::string write_model_json(const MrSortModel& model) {
  std::string out = "{\n";
  append_criteria_json(out, model.criteria());
  out += "  \"classes\": " + std::to_string(model.classes()) + ",\n";
  append_frontiers_json(out, model.criteria(), model.frontiers());
  out += ",\n  \"weights\": [";
  for (size_t i = 0; i < model.weights().size(); ++i) {
    out += model.weights()[i].str();
    if (i + 1 < model.weights().size()) out += ", ";
  }
  out += "],\n  \"lambda\": " + model.lambda().str() + "\n}\n";
  return out;
}

std::string write_model_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return write_model_json(m); }, model);
}

namespace {

Value value_from_json(const nlohmann::json& j) {
  if (!j.is_number()) throw ParseError("expected a number in model file");
  return Value::from_double(j.get<double>());
}

}  // namespace

AnyModel read_model_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model JSON: ") + e.what());
  }
  try {
    std::vector<Criterion> criteria;
    for (const auto& c : j.at("criteria")) {
      Criterion crit;
      crit.name = c.at("name").get<std::string>();
      const std::string dir = c.at("direction").get<std::string>();
      if (dir == "minimize") {
        crit.direction = Direction::minimize;
      } else if (dir == "maximize") {
        crit.direction = Direction::maximize;
      } else {
        throw ParseError("bad direction '" + dir + "'");
      }
      criteria.push_back(std::move(crit));
    }
    CriteriaSpec spec(std::move(criteria));

    const int classes = j.at("classes").get<int>();
    std::vector<Profile> frontiers;
    for (const auto& row : j.at("frontiers")) {
      Profile f;
      if (static_cast<int>(row.size()) != spec.count()) {
        throw ParseError("frontier row length does not match the criteria");
      }
      for (int i = 0; i < spec.count(); ++i) {
        const auto& cell = row[static_cast<size_t>(i)];
        if (cell.is_null()) {
          f.push_back(Value::above_all());
        } else {
          Value v = value_from_json(cell);
          if (spec.at(i).direction == Direction::minimize) v = v.negated();
          f.push_back(v);
        }
      }
      frontiers.push_back(std::move(f));
    }

    if (j.contains("sufficient")) {
      std::vector<uint32_t> minimal;
      for (const auto& m : j.at("sufficient")) minimal.push_back(m.get<uint32_t>());
      UpSet upset = UpSet::from_minimal(spec.count(), minimal);
      return UncsModel(std::move(spec), classes, std::move(frontiers), std::move(upset));
    }
    std::vector<Value> weights;
    for (const auto& w : j.at("weights")) weights.push_back(value_from_json(w));
    Value lambda = value_from_json(j.at("lambda"));
    return MrSortModel(std::move(spec), classes, std::move(frontiers), std::move(weights), lambda);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model JSON: ") + e.what());
  }
}

AnyModel read_model_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_model_json(in);
}

UncsModel as_uncs(const AnyModel& model) {
  if (const auto* u = std::get_if<UncsModel>(&model)) return *u;
  return std::get<MrSortModel>(model).to_uncs();
}

const CriteriaSpec& criteria_of(const AnyModel& model) {
  return std::visit([](const auto& m) -> const CriteriaSpec& { return m.criteria(); }, model);
}

std::vector<std::string> minimized_names(const CriteriaSpec& spec) {
  std::vector<std::string> out;
  for (const auto& c : spec.list()) {
    if (c.direction == Direction::minimize) out.push_back(c.name);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw ParseError("failed writing " + path);
}

}  // namespace ncs
