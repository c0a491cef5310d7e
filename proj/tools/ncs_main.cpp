// Command-line front end: generation, encoding, learning, checking,
// evaluation, and the benchmark grid. Artifacts go to files through -o;
// standard output carries human-readable summaries only.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncs/bench.hpp"
#include "ncs/errors.hpp"
#include "ncs/eval.hpp"
#include "ncs/io.hpp"
#include "ncs/mip.hpp"
#include "ncs/solver.hpp"
#include "ncs/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnrepresentable = 1;
constexpr int kExitUsage = 2;

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : csv) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string coalition_names(uint32_t mask, const ncs::CriteriaSpec& spec) {
  if (mask == 0) return "{}";
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < spec.count(); ++i) {
    if (!(mask >> i & 1u)) continue;
    if (!first) out += ", ";
    out += spec.at(i).name;
    first = false;
  }
  return out + "}";
}

std::string frontier_text(const ncs::CriteriaSpec& spec, const ncs::Profile& frontier) {
  std::string out = "(";
  for (int i = 0; i < spec.count(); ++i) {
    ncs::Value v = frontier[static_cast<size_t>(i)];
    if (!v.is_above_all() && spec.at(i).direction == ncs::Direction::minimize) v = v.negated();
    out += v.str();
    if (i + 1 < spec.count()) out += ", ";
  }
  return out + ")";
}

void print_model_summary(std::ostream& out, const ncs::AnyModel& model) {
  const auto& spec = ncs::criteria_of(model);
  if (const auto* mr = std::get_if<ncs::MrSortModel>(&model)) {
    out << "MR-Sort model: " << mr->classes() << " classes, " << spec.count() << " criteria\n";
    for (size_t h = 0; h < mr->frontiers().size(); ++h) {
      out << "  frontier " << h + 1 << ": " << frontier_text(spec, mr->frontiers()[h]) << '\n';
    }
    out << "  weights: (";
    for (size_t i = 0; i < mr->weights().size(); ++i) {
      out << mr->weights()[i].str() << (i + 1 < mr->weights().size() ? ", " : "");
    }
    out << "), threshold: " << mr->lambda().str() << '\n';
    return;
  }
  const auto& u = std::get<ncs::UncsModel>(model);
  out << "U-NCS model: " << u.classes() << " classes, " << spec.count() << " criteria\n";
  for (size_t h = 0; h < u.frontiers().size(); ++h) {
    out << "  frontier " << h + 1 << ": " << frontier_text(spec, u.frontiers()[h]) << '\n';
  }
  out << "  minimal sufficient coalitions:";
  const auto minimal = u.sufficient().minimal_members();
  if (minimal.empty()) out << " none";
  for (uint32_t mask : minimal) out << ' ' << coalition_names(mask, spec);
  out << '\n';
}

struct DataOptions {
  std::string path;
  std::string minimize;
  int classes = 0;
};

ncs::LearningSet load_data(const DataOptions& opt) {
  std::optional<int> classes;
  if (opt.classes > 0) classes = opt.classes;
  return ncs::read_learning_csv_file(opt.path, split_names(opt.minimize), classes);
}

void add_data_options(CLI::App* cmd, DataOptions& opt) {
  cmd->add_option("--data", opt.path, "learning-set CSV")->required();
  cmd->add_option("--minimize", opt.minimize,
                  "comma-separated names of criteria whose scale descends");
  cmd->add_option("--classes", opt.classes, "class count override (default: largest label)");
}

int cmd_gen_model(int criteria, int classes, uint64_t seed, const std::string& out_path) {
  ncs::GenConfig cfg{criteria, classes, 0, seed};
  ncs::Rng rng(ncs::derive_seed(seed, 0));
  const ncs::MrSortModel model = ncs::gen_mrsort(cfg, rng);
  ncs::write_text_file(out_path, ncs::write_model_json(model));
  print_model_summary(std::cout, ncs::AnyModel{model});
  std::cout << "written to " << out_path << '\n';
  return kExitOk;
}

int cmd_gen_data(const std::string& model_path, int count, uint64_t seed,
                 const std::string& out_path) {
  const ncs::AnyModel any = ncs::read_model_json_file(model_path);
  const auto* mr = std::get_if<ncs::MrSortModel>(&any);
  if (!mr) throw ncs::InputError("gen-data needs a weights+lambda model file");
  ncs::Rng rng(ncs::derive_seed(seed, 1));
  const ncs::LearningSet data = ncs::gen_learning_set(*mr, count, rng);
  std::ofstream out(out_path);
  if (!out) throw ncs::ParseError("cannot open " + out_path + " for writing");
  ncs::write_learning_csv(data, out);
  std::cout << "generated " << data.size() << " alternatives over " << data.criteria().count()
            << " criteria, " << data.classes() << " classes; written to " << out_path << '\n';
  return kExitOk;
}

int cmd_encode(const DataOptions& data_opt, const std::string& format,
               const std::string& out_path, const std::string& vocab_path) {
  const ncs::LearningSet data = load_data(data_opt);
  if (format == "dimacs") {
    const ncs::CnfInstance cnf = ncs::encode(data);
    for (const auto& [a, b] : cnf.conflicting_duplicates()) {
      std::cerr << "note: " << a << " and " << b
                << " share a profile but not a class; the instance is unsatisfiable\n";
    }
    ncs::write_text_file(out_path, ncs::write_dimacs(cnf));
    if (!vocab_path.empty()) {
      ncs::write_text_file(vocab_path, ncs::vocabulary_json(*cnf.vocabulary()));
    }
    std::cout << "encoded " << cnf.var_count() << " variables, " << cnf.clause_count()
              << " clauses; written to " << out_path << '\n';
    return kExitOk;
  }
  if (format != "lp-o" && format != "lp-d") {
    throw ncs::InputError("unknown format '" + format + "' (dimacs, lp-o, lp-d)");
  }
  ncs::LearningSet working = data;
  if (!data.values_in_unit_range()) {
    std::cerr << "note: values rescaled onto [0,1] per criterion for the MIP formulation\n";
    working = ncs::unit_rescale(data);
  }
  const ncs::MipModel model =
      format == "lp-o" ? ncs::encode_mip_o(working) : ncs::encode_mip_d(working);
  ncs::write_text_file(out_path, ncs::write_lp(model));
  std::cout << "encoded " << model.vars().size() << " variables (" << model.binary_count()
            << " binary), " << model.rows().size() << " constraints; written to " << out_path
            << '\n';
  return kExitOk;
}

int learn_sat(const ncs::LearningSet& data, bool external, const std::string& command,
              const ncs::SolverConfig& config, const std::string& out_path) {
  const ncs::CnfInstance cnf = ncs::encode(data);
  for (const auto& [a, b] : cnf.conflicting_duplicates()) {
    std::cerr << "note: " << a << " and " << b << " share a profile but not a class\n";
  }
  const ncs::SolveResult result =
      external ? ncs::solve_external(cnf, command, config.max_seconds) : ncs::solve(cnf, config);
  if (result.status == ncs::SolveStatus::budget_exceeded) {
    std::cerr << "solve budget exceeded before a verdict was reached\n";
    return kExitUsage;
  }
  if (result.status == ncs::SolveStatus::unsat) {
    std::cout << "UNREPRESENTABLE\n";
    return kExitUnrepresentable;
  }
  const ncs::UncsModel model = ncs::decode(*cnf.vocabulary(), result.assignment);
  if (!ncs::extends(model, data).empty()) {
    std::cerr << "internal error: decoded model does not extend the learning set\n";
    return kExitUsage;
  }
  print_model_summary(std::cout, ncs::AnyModel{model});
  if (!out_path.empty()) {
    ncs::write_text_file(out_path, ncs::write_model_json(model));
    std::cout << "written to " << out_path << '\n';
  }
  return kExitOk;
}

int learn_mip(const ncs::LearningSet& data, ncs::MipVariant variant, const std::string& command,
              double max_seconds, const std::string& out_path) {
  ncs::RescaleMap map;
  const bool rescaled = !data.values_in_unit_range();
  const ncs::LearningSet working = rescaled ? ncs::unit_rescale(data, &map) : data;
  const ncs::MipModel mip = variant == ncs::MipVariant::optimizing ? ncs::encode_mip_o(working)
                                                                   : ncs::encode_mip_d(working);
  const ncs::MipRunResult run = ncs::solve_mip_external(mip, command, max_seconds);
  if (run.status == ncs::MipRunStatus::budget_exceeded) {
    std::cerr << "solve budget exceeded before a verdict was reached\n";
    return kExitUsage;
  }
  if (run.status == ncs::MipRunStatus::infeasible) {
    std::cout << "UNREPRESENTABLE\n";
    return kExitUnrepresentable;
  }
  ncs::MrSortModel model = *run.model;
  if (rescaled) {
    model = ncs::to_raw_units(model, map, data.criteria());
    if (!ncs::extends(model.to_uncs(), data).empty()) {
      std::cerr << "internal error: rescaled model does not extend the learning set\n";
      return kExitUsage;
    }
  }
  print_model_summary(std::cout, ncs::AnyModel{model});
  if (!out_path.empty()) {
    ncs::write_text_file(out_path, ncs::write_model_json(model));
    std::cout << "written to " << out_path << '\n';
  }
  return kExitOk;
}

int cmd_learn(const DataOptions& data_opt, const std::string& method, std::string command,
              const ncs::SolverConfig& config, const std::string& out_path) {
  const ncs::LearningSet data = load_data(data_opt);
  if (method == "sat") {
    return learn_sat(data, false, "", config, out_path);
  }
  if (method == "sat-external") {
    if (command.empty()) command = env_or_empty("NCS_SAT_CMD");
    if (command.empty()) {
      throw ncs::InputError("sat-external needs --solver-cmd or NCS_SAT_CMD");
    }
    return learn_sat(data, true, command, config, out_path);
  }
  if (method == "mip-o" || method == "mip-d") {
    if (command.empty()) command = env_or_empty("NCS_MIP_CMD");
    if (command.empty()) {
      throw ncs::InputError(method + " needs --solver-cmd or NCS_MIP_CMD");
    }
    const auto variant =
        method == "mip-o" ? ncs::MipVariant::optimizing : ncs::MipVariant::decision;
    return learn_mip(data, variant, command, config.max_seconds, out_path);
  }
  throw ncs::InputError("unknown method '" + method + "'");
}

int cmd_check(const std::string& model_path, const std::string& data_path) {
  const ncs::AnyModel any = ncs::read_model_json_file(model_path);
  const auto& spec = ncs::criteria_of(any);
  const ncs::LearningSet data =
      ncs::read_learning_csv_file(data_path, ncs::minimized_names(spec),
                                  std::visit([](const auto& m) { return m.classes(); }, any));
  const ncs::UncsModel model = ncs::as_uncs(any);
  const auto violations = ncs::extends(model, data);
  if (violations.empty()) {
    std::cout << "extends: ok (" << data.size() << " alternatives)\n";
    return kExitOk;
  }
  std::cout << "extends: " << violations.size() << " violation(s)\n";
  for (const auto& v : violations) {
    std::cout << "  " << v.id << ": recorded " << v.expected << ", model says " << v.computed
              << '\n';
  }
  return kExitUnrepresentable;
}

int cmd_eval(const std::string& path_a, const std::string& path_b, int64_t samples,
             uint64_t seed) {
  const ncs::UncsModel a = ncs::as_uncs(ncs::read_model_json_file(path_a));
  const ncs::UncsModel b = ncs::as_uncs(ncs::read_model_json_file(path_b));
  if (samples <= 0) samples = ncs::default_sample_size(a.criteria().count());
  const double err = ncs::err_rate(a, b, samples, seed);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", err);
  std::cout << "err-rate: " << buf << " (" << samples << " samples)\n";
  return kExitOk;
}

int cmd_oracle(const DataOptions& data_opt, const std::string& out_path) {
  const ncs::LearningSet data = load_data(data_opt);
  const auto model = ncs::brute_force_representable(data);
  if (!model) {
    std::cout << "UNREPRESENTABLE\n";
    return kExitUnrepresentable;
  }
  print_model_summary(std::cout, ncs::AnyModel{*model});
  if (!out_path.empty()) {
    ncs::write_text_file(out_path, ncs::write_model_json(*model));
    std::cout << "written to " << out_path << '\n';
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path, int threads) {
  ncs::BenchConfig cfg = ncs::bench_config_from_json(ncs::read_text_file(config_path));
  if (threads > 0) cfg.threads = threads;
  const auto rows = ncs::run_grid(cfg);
  std::ofstream out(out_path);
  if (!out) throw ncs::ParseError("cannot open " + out_path + " for writing");
  ncs::write_bench_csv(rows, out);

  size_t failures = 0;
  for (const auto& r : rows) failures += r.failure.empty() ? 0 : 1;
  std::cout << rows.size() << " rows (" << failures << " failures); written to " << out_path
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learning non-compensatory sorting models from assignment examples"};
  app.require_subcommand(1);

  // gen-model
  auto* gen_model = app.add_subcommand("gen-model", "generate a random MR-Sort ground truth");
  int gm_criteria = 4, gm_classes = 2;
  uint64_t gm_seed = 0;
  std::string gm_out;
  gen_model->add_option("--criteria", gm_criteria, "criteria count")->required();
  gen_model->add_option("--classes", gm_classes, "class count")->required();
  gen_model->add_option("--seed", gm_seed, "random seed");
  gen_model->add_option("-o,--output", gm_out, "model JSON path")->required();

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "sample a learning set from a model");
  std::string gd_model, gd_out;
  int gd_count = 16;
  uint64_t gd_seed = 0;
  gen_data->add_option("--model", gd_model, "MR-Sort model JSON")->required();
  gen_data->add_option("--count", gd_count, "number of alternatives")->required();
  gen_data->add_option("--seed", gd_seed, "random seed");
  gen_data->add_option("-o,--output", gd_out, "learning-set CSV path")->required();

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "emit the CNF or an LP formulation");
  DataOptions enc_data;
  std::string enc_format, enc_out, enc_vocab;
  add_data_options(encode_cmd, enc_data);
  encode_cmd->add_option("--format", enc_format, "dimacs | lp-o | lp-d")->required();
  encode_cmd->add_option("-o,--output", enc_out, "output path")->required();
  encode_cmd->add_option("--vocab", enc_vocab, "also write the variable map as JSON (dimacs only)");

  // learn
  auto* learn = app.add_subcommand("learn", "learn a model that extends the learning set");
  DataOptions learn_data;
  std::string learn_method = "sat", learn_cmd_str, learn_out;
  ncs::SolverConfig solver_config;
  add_data_options(learn, learn_data);
  learn->add_option("--method", learn_method, "sat | sat-external | mip-o | mip-d");
  learn->add_option("--solver-cmd", learn_cmd_str, "external solver command");
  learn->add_option("--max-conflicts", solver_config.max_conflicts, "embedded solver budget");
  learn->add_option("--max-seconds", solver_config.max_seconds, "solve budget in seconds");
  learn->add_flag("!--plain-search", solver_config.clause_learning,
                  "disable conflict-driven clause learning");
  learn->add_option("-o,--output", learn_out, "model JSON path");

  // check
  auto* check = app.add_subcommand("check", "verify a model extends a learning set");
  std::string check_model, check_data;
  check->add_option("--model", check_model, "model JSON")->required();
  check->add_option("--data", check_data, "learning-set CSV")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "estimate the disagreement of two models");
  std::string eval_a, eval_b;
  int64_t eval_samples = 0;
  uint64_t eval_seed = 0;
  eval_cmd->add_option("--model-a", eval_a, "model JSON")->required();
  eval_cmd->add_option("--model-b", eval_b, "model JSON")->required();
  eval_cmd->add_option("--samples", eval_samples, "sample count (default by criteria count)");
  eval_cmd->add_option("--seed", eval_seed, "random seed");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exhaustive representability check (tiny instances)");
  DataOptions oracle_data;
  std::string oracle_out;
  add_data_options(oracle, oracle_data);
  oracle->add_option("-o,--output", oracle_out, "model JSON path");

  // bench
  auto* bench = app.add_subcommand("bench", "run the benchmark grid");
  std::string bench_config, bench_out;
  int bench_threads = 0;
  bench->add_option("--config", bench_config, "benchmark config JSON")->required();
  bench->add_option("-o,--output", bench_out, "results CSV path")->required();
  bench->add_option("--threads", bench_threads, "worker pool size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_model->parsed()) return cmd_gen_model(gm_criteria, gm_classes, gm_seed, gm_out);
    if (gen_data->parsed()) return cmd_gen_data(gd_model, gd_count, gd_seed, gd_out);
    if (encode_cmd->parsed()) return cmd_encode(enc_data, enc_format, enc_out, enc_vocab);
    if (learn->parsed()) {
      return cmd_learn(learn_data, learn_method, learn_cmd_str, solver_config, learn_out);
    }
    if (check->parsed()) return cmd_check(check_model, check_data);
    if (eval_cmd->parsed()) return cmd_eval(eval_a, eval_b, eval_samples, eval_seed);
    if (oracle->parsed()) return cmd_oracle(oracle_data, oracle_out);
    if (bench->parsed()) return cmd_bench(bench_config, bench_out, bench_threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
