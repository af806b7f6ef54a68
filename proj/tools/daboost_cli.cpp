// Command-line harness: run one boosting engine, reproduce the synthetic
// majority-vote experiment, or compare AdaBoost and DABoost side by side.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "daboost/daboost.hpp"

namespace {

using daboost::Algorithm;
using daboost::StepRule;
using daboost::WeightingMode;

struct DataFlags {
  std::string data_path;
  std::string format = "csv";
  std::string label_col = "last";
  std::string positive_label;
  std::string delimiter = ",";
  bool has_header = false;
  std::size_t toy_n = 1000;
  std::size_t toy_dim = 100;
};

struct EngineFlags {
  std::size_t rounds = 100;
  Algorithm algorithm = Algorithm::adaboost;
  WeightingMode mode = WeightingMode::reweight;
  StepRule step_rule = StepRule::log_rule;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.data_path, "Input file (csv or libsvm format)");
  cmd->add_option("--format", f.format, "Input format")
      ->check(CLI::IsMember({"csv", "libsvm", "toy"}))
      ->capture_default_str();
  cmd->add_option("--label-col", f.label_col, "CSV label column index (0-based) or 'last'")
      ->capture_default_str();
  cmd->add_option("--positive-label", f.positive_label,
                  "CSV label token mapped to +1 (default: infer 1 vs -1/0)");
  cmd->add_option("--delimiter", f.delimiter, "CSV field delimiter")->capture_default_str();
  cmd->add_flag("--has-header", f.has_header, "Skip the first CSV line");
  cmd->add_option("--n", f.toy_n, "Sample count for --format toy")->capture_default_str();
  cmd->add_option("--dim", f.toy_dim, "Feature count for --format toy")->capture_default_str();
}

void add_engine_flags(CLI::App* cmd, EngineFlags& f, bool with_algo,
                      bool with_test_fraction = true) {
  if (with_algo) {
    cmd->add_option("--algo", f.algorithm, "Boosting engine")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Algorithm>{{"adaboost", Algorithm::adaboost},
                                             {"gradproj", Algorithm::gradient_projection},
                                             {"daboost", Algorithm::daboost}}));
  }
  cmd->add_option("--rounds", f.rounds, "Boosting rounds")->capture_default_str();
  cmd->add_option("--mode", f.mode, "Weak-learner weighting mode")
      ->transform(CLI::CheckedTransformer(std::map<std::string, WeightingMode>{
          {"reweight", WeightingMode::reweight}, {"resample", WeightingMode::resample}}));
  cmd->add_option("--step-rule", f.step_rule, "Step-size rule")
      ->transform(CLI::CheckedTransformer(std::map<std::string, StepRule>{
          {"log", StepRule::log_rule}, {"sqrt", StepRule::sqrt_rule}}));
  cmd->add_option("--lambda", f.lambda, "Per-round importance weight (daboost)")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for every random stage")->capture_default_str();
  if (with_test_fraction) {
    cmd->add_option("--test-fraction", f.test_fraction,
                    "Held-out fraction; 0 trains on everything")
        ->capture_default_str();
  }
}

daboost::Dataset load_dataset(const DataFlags& f, std::uint64_t seed) {
  if (f.format == "toy") {
    return daboost::generate_majority_toy(f.toy_n, f.toy_dim, seed);
  }
  if (f.data_path.empty()) {
    throw std::invalid_argument("--data is required for format '" + f.format + "'");
  }
  if (f.format == "libsvm") return daboost::load_libsvm(f.data_path);

  daboost::CsvSchema schema;
  if (f.label_col != "last") {
    std::size_t col = 0;
    const char* first = f.label_col.data();
    const char* last = first + f.label_col.size();
    auto [ptr, ec] = std::from_chars(first, last, col);
    if (ec != std::errc{} || ptr != last) {
      throw std::invalid_argument("--label-col must be a column index or 'last'");
    }
    schema.label_column = col;
  }
  if (f.delimiter.size() != 1) {
    throw std::invalid_argument("--delimiter must be a single character");
  }
  schema.positive_label = f.positive_label;
  schema.delimiter = f.delimiter[0];
  schema.has_header = f.has_header;
  return daboost::load_csv(f.data_path, schema);
}

daboost::BoostConfig make_config(const EngineFlags& f) {
  daboost::BoostConfig config;
  config.rounds = f.rounds;
  config.algorithm = f.algorithm;
  config.weighting_mode = f.mode;
  config.seed = f.seed;
  config.lambda = f.lambda;
  config.step_rule = f.step_rule;
  return config;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::adaboost:
      return "adaboost";
    case Algorithm::gradient_projection:
      return "gradproj";
    case Algorithm::daboost:
      return "daboost";
  }
  return "?";
}

const char* status_name(daboost::RunStatus s) {
  switch (s) {
    case daboost::RunStatus::completed:
      return "completed";
    case daboost::RunStatus::zero_error_stop:
      return "zero_error_stop";
    case daboost::RunStatus::weak_learner_exhausted:
      return "weak_learner_exhausted";
    case daboost::RunStatus::running:
      return "running";
  }
  return "?";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw daboost::DataError("cannot open output file " + path);
  return out;
}

void dump_model(std::ostream& out, const daboost::Ensemble& ensemble) {
  for (const daboost::EnsembleTerm& term : ensemble) {
    const auto* stump = dynamic_cast<const daboost::Stump*>(term.hypothesis.get());
    if (!stump) throw std::runtime_error("model dump supports stump ensembles only");
    out << daboost::detail::format_double(term.coefficient) << ' ' << stump->feature_index()
        << ' ' << daboost::detail::format_double(stump->threshold()) << ' '
        << stump->polarity() << '\n';
  }
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? daboost::detail::format_double(*v) : std::string();
}

// Per-round columns for two engines side by side; rows run to the longer
// record list and cells are empty where an engine had already stopped.
void write_merged_csv(std::ostream& out, const std::vector<daboost::RoundRecord>& ada,
                      const std::vector<daboost::RoundRecord>& da) {
  out << "round";
  for (const char* name : {"adaboost", "daboost"}) {
    out << ',' << name << "_epsilon," << name << "_step," << name << "_train_error," << name
        << "_test_error," << name << "_exp_loss";
  }
  out << '\n';
  const std::size_t rows = std::max(ada.size(), da.size());
  for (std::size_t r = 0; r < rows; ++r) {
    out << (r + 1);
    for (const auto* records : {&ada, &da}) {
      if (r < records->size()) {
        const daboost::RoundRecord& rec = (*records)[r];
        out << ',' << daboost::detail::format_double(rec.epsilon) << ','
            << daboost::detail::format_double(rec.step) << ','
            << daboost::detail::format_double(rec.train_error) << ','
            << opt_cell(rec.test_error) << ',' << daboost::detail::format_double(rec.exp_loss);
      } else {
        out << ",,,,,";
      }
    }
    out << '\n';
  }
}

struct EngineSummary {
  double final_train_error = 0.0;
  std::optional<double> best_test_error;
  std::optional<std::size_t> best_test_round;
};

EngineSummary summarize(const daboost::BoostResult& result, const daboost::Dataset& train) {
  EngineSummary s;
  s.final_train_error = result.records.empty()
                            ? daboost::zero_one_error(result.ensemble, train)
                            : result.records.back().train_error;
  for (const daboost::RoundRecord& rec : result.records) {
    if (rec.test_error && (!s.best_test_error || *rec.test_error < *s.best_test_error)) {
      s.best_test_error = rec.test_error;
      s.best_test_round = rec.round;
    }
  }
  return s;
}

int cmd_run(const DataFlags& data_flags, const EngineFlags& engine_flags,
            const std::string& out_path, const std::string& model_path) {
  const daboost::Dataset full = load_dataset(data_flags, engine_flags.seed);
  std::optional<std::pair<daboost::Dataset, daboost::Dataset>> split;
  const daboost::Dataset* train = &full;
  const daboost::Dataset* test = nullptr;
  if (engine_flags.test_fraction > 0.0) {
    split = daboost::train_test_split(full, engine_flags.test_fraction, engine_flags.seed);
    train = &split->first;
    test = &split->second;
  }

  const daboost::BoostResult result = daboost::run_boosting(make_config(engine_flags), *train, test);

  if (!out_path.empty()) {
    const auto rows = result.records.empty() ? std::vector<daboost::CurveRow>{}
                                             : daboost::curve_table(result.records);
    auto out = open_output(out_path);
    daboost::write_curve_csv(out, rows);
  }
  if (!model_path.empty()) {
    auto out = open_output(model_path);
    dump_model(out, result.ensemble);
  }

  const EngineSummary summary = summarize(result, *train);
  std::cout << "algorithm: " << algorithm_name(engine_flags.algorithm) << '\n'
            << "rounds_completed: " << result.records.size() << '\n'
            << "status: " << status_name(result.status) << '\n'
            << "final_train_error: " << daboost::detail::format_double(summary.final_train_error)
            << '\n';
  if (test) {
    const auto final_test = result.records.empty() ? daboost::zero_one_error(result.ensemble, *test)
                                                   : *result.records.back().test_error;
    std::cout << "final_test_error: " << daboost::detail::format_double(final_test) << '\n';
  }
  return 0;
}

std::string zero_error_round_report(const std::vector<daboost::RoundRecord>& records) {
  for (const daboost::RoundRecord& rec : records) {
    if (rec.train_error == 0.0) return std::to_string(rec.round);
  }
  return "not_reached";
}

int cmd_toy(const DataFlags& data_flags, const EngineFlags& engine_flags,
            const std::string& out_path) {
  const daboost::Dataset train =
      daboost::generate_majority_toy(data_flags.toy_n, data_flags.toy_dim, engine_flags.seed);

  EngineFlags flags = engine_flags;
  flags.algorithm = Algorithm::adaboost;
  const daboost::BoostResult ada = daboost::run_boosting(make_config(flags), train);
  flags.algorithm = Algorithm::daboost;
  const daboost::BoostResult da = daboost::run_boosting(make_config(flags), train);

  std::cout << "adaboost_zero_train_error_round: " << zero_error_round_report(ada.records)
            << '\n'
            << "daboost_zero_train_error_round: " << zero_error_round_report(da.records) << '\n';
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    write_merged_csv(out, ada.records, da.records);
  }
  return 0;
}

void print_engine_summary(const char* name, const EngineSummary& s) {
  std::cout << name << ',' << daboost::detail::format_double(s.final_train_error) << ','
            << opt_cell(s.best_test_error) << ','
            << (s.best_test_round ? std::to_string(*s.best_test_round) : std::string()) << '\n';
}

int cmd_compare(const DataFlags& data_flags, const EngineFlags& engine_flags,
                const std::string& out_path) {
  const daboost::Dataset full = load_dataset(data_flags, engine_flags.seed);
  std::optional<std::pair<daboost::Dataset, daboost::Dataset>> split;
  const daboost::Dataset* train = &full;
  const daboost::Dataset* test = nullptr;
  if (engine_flags.test_fraction > 0.0) {
    split = daboost::train_test_split(full, engine_flags.test_fraction, engine_flags.seed);
    train = &split->first;
    test = &split->second;
  }

  EngineFlags flags = engine_flags;
  flags.algorithm = Algorithm::adaboost;
  const daboost::BoostResult ada = daboost::run_boosting(make_config(flags), *train, test);
  flags.algorithm = Algorithm::daboost;
  const daboost::BoostResult da = daboost::run_boosting(make_config(flags), *train, test);

  if (!out_path.empty()) {
    auto out = open_output(out_path);
    write_merged_csv(out, ada.records, da.records);
  }
  std::cout << "engine,final_train_error,best_test_error,best_test_round\n";
  print_engine_summary("adaboost", summarize(ada, *train));
  print_engine_summary("daboost", summarize(da, *train));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boosting toolkit: AdaBoost, gradient projection, and DABoost on stumps"};
  app.require_subcommand(1);

  DataFlags data_flags;
  EngineFlags engine_flags;
  std::string out_path;
  std::string model_path;

  CLI::App* run = app.add_subcommand("run", "Run one engine and write its error curves");
  add_data_flags(run, data_flags);
  add_engine_flags(run, engine_flags, /*with_algo=*/true);
  run->add_option("--out", out_path, "Curve CSV output path");
  run->add_option("--model-out", model_path,
                  "Text dump: coefficient feature threshold polarity per term");

  CLI::App* toy = app.add_subcommand(
      "toy", "Majority-vote synthetic check: rounds until 0% training error");
  toy->add_option("--n", data_flags.toy_n, "Sample count")->capture_default_str();
  toy->add_option("--dim", data_flags.toy_dim, "Feature count")->capture_default_str();
  EngineFlags toy_engine_flags;
  toy_engine_flags.rounds = 10;
  add_engine_flags(toy, toy_engine_flags, /*with_algo=*/false, /*with_test_fraction=*/false);
  toy->add_option("--out", out_path, "Merged per-engine curve CSV output path");

  CLI::App* compare = app.add_subcommand("compare", "Run AdaBoost and DABoost side by side");
  add_data_flags(compare, data_flags);
  add_engine_flags(compare, engine_flags, /*with_algo=*/false);
  compare->add_option("--out", out_path, "Merged per-engine curve CSV output path");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(data_flags, engine_flags, out_path, model_path);
    if (toy->parsed()) return cmd_toy(data_flags, toy_engine_flags, out_path);
    if (compare->parsed()) return cmd_compare(data_flags, engine_flags, out_path);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const daboost::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
