// SPDX-License-Identifier: Apache-2.0
#include "mint/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "mint/data/dataset_io.hpp"
#include "mint/data/splits.hpp"
#include "mint/data/standardizer.hpp"
#include "mint/data/tensorize.hpp"
#include "mint/data/windows.hpp"
#include "mint/eval/discriminative.hpp"
#include "mint/rvae/model.hpp"

namespace mint::cli {

namespace fs = std::filesystem;

namespace {

const std::string& require_path(const std::string& path, const char* key) {
  if (path.empty()) throw UsageError(std::string(key) + " is required for this command");
  if (!fs::is_regular_file(path)) throw UsageError(std::string(key) + ": no such file '" + path + "'");
  return path;
}

std::vector<data::SequenceRecord> load_records(const std::string& path, const char* key) {
  return data::load_dataset(require_path(path, key));
}

fs::path prepare_out(const RunConfig& config) {
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("run.out: cannot create directory '" + config.out + "'");
  std::ofstream ini(dir / "config.ini");
  write_ini(ini, config);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

data::Standardizer standardizer_for(const RunConfig& config, const std::vector<data::SequenceRecord>& records) {
  if (!config.standardizer.empty()) {
    return data::load_standardizer(require_path(config.standardizer, "data.standardizer"));
  }
  return data::fit_standardizer(records);
}

std::vector<data::WindowSample> records_as_windows(const std::vector<data::SequenceRecord>& records) {
  std::vector<data::WindowSample> out;
  for (const auto& r : records) out.push_back(data::make_window(r.frames, r.id));
  return out;
}

std::string percent(std::size_t part, std::size_t whole) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << (whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0)
    << '%';
  return s.str();
}

void write_vae_history(const fs::path& p, const std::vector<rvae::EpochLog>& history) {
  auto out = open_out(p);
  out << "epoch,total,pose,emotion,label,kl,beta,tau\n";
  for (const auto& e : history) {
    const auto& l = e.loss;
    out << e.epoch << ',' << l.total << ',' << l.pose << ',' << l.emotion << ',' << l.label << ',' << l.kl << ','
        << l.beta_used << ',' << l.tau_used << '\n';
  }
}

void write_detector_history(const fs::path& p, const std::vector<detect::DetectorEpoch>& history) {
  auto out = open_out(p);
  out << "epoch,train_loss,validation_loss,validation_auroc\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << e.train_loss << ',' << e.validation_loss << ',' << e.validation_auroc << '\n';
  }
}

std::string file_tag(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

pipeline::ExperimentConfig logged_experiment(const RunConfig& config, std::ostream& log) {
  auto e = experiment_config(config);
  e.log = [&log](const std::string& m) { log << m << '\n'; };
  return e;
}

void print_summary(std::ostream& log, const std::vector<pipeline::VariantReport>& reports) {
  log << std::fixed << std::setprecision(3);
  log << "variant            frame_auroc      sequence_auroc\n";
  for (const auto& vr : reports) {
    log << std::left << std::setw(18) << vr.name << ' ' << vr.report.mean.frame_auroc << " +/- "
        << vr.report.stddev.frame_auroc << "  " << vr.report.mean.sequence_auroc << " +/- "
        << vr.report.stddev.sequence_auroc << '\n';
  }
  log << std::defaultfloat;
}

}  // namespace

void cmd_preprocess(const RunConfig& config, std::ostream& log) {
  const auto records = load_records(config.dataset, "data.dataset");
  const auto standardizer = standardizer_for(config, records);
  const auto dir = prepare_out(config);
  const auto standardized = standardizer.apply(records);
  data::save_dataset(standardized, (dir / "standardized.jsonl").string());
  data::save_standardizer(standardizer, (dir / "standardizer.json").string());
  const auto set = data::window_sequences(standardized, config.detector.window_length, config.train_stride);
  auto index = open_out(dir / "windows.csv");
  index << "record_id,start,label\n";
  for (const auto& w : set.windows) index << w.record_id << ',' << w.start << ',' << w.window_label << '\n';

  const auto balance = data::class_balance(records);
  const auto positive_windows = data::count_positive_windows(set.windows);
  log << "sequences: " << balance.sequences << '\n'
      << "frames: " << balance.frames << " (" << percent(balance.positive_frames, balance.frames)
      << " positive)\n"
      << "windows: " << set.windows.size() << " (" << percent(positive_windows, set.windows.size())
      << " positive, " << set.skipped_records << " sequences shorter than a window)\n";
}

void cmd_train_vae(const RunConfig& config, std::ostream& log) {
  const auto records = load_records(config.dataset, "data.dataset");
  const auto standardizer = standardizer_for(config, records);
  const auto windows =
      data::window_sequences(standardizer.apply(records), config.detector.window_length, config.train_stride).windows;
  if (windows.empty()) throw std::runtime_error("no sequence spans a full window");
  const auto dir = prepare_out(config);
  const auto hyper = scaled_vae(config);
  log << "training VAE on " << windows.size() << " windows for " << hyper.epochs << " epochs\n";
  nn::Rng rng(config.seed);
  rvae::RvaeTrainOptions opts;
  const std::size_t every = std::max<std::size_t>(1, hyper.epochs / 10);
  opts.on_epoch = [&](const rvae::EpochLog& e) {
    if ((e.epoch + 1) % every == 0) log << "epoch " << e.epoch + 1 << " loss " << e.loss.total << '\n';
  };
  const auto result = rvae::train_rvae(windows, hyper, rng, opts);
  rvae::save_rvae(result.model, standardizer, (dir / "vae.json").string());
  write_vae_history(dir / "vae_loss.csv", result.history);
}

void cmd_generate(const RunConfig& config, std::ostream& log) {
  auto loaded = rvae::load_rvae(require_path(config.vae_checkpoint, "data.vae_checkpoint"));
  auto records = load_records(config.dataset, "data.dataset");
  if (loaded.standardizer) records = loaded.standardizer->apply(records);
  std::vector<data::FrameFeature> pool;
  for (const auto& r : records)
    for (const auto& f : r.frames)
      if (!config.generate.positive_only || f.label == 1) pool.push_back(f);
  if (pool.empty()) throw std::runtime_error("the dataset has no frames to seed generation");
  const auto dir = prepare_out(config);

  std::vector<data::WindowSample> windows;
  if (config.generate.positive_only) {
    auto model = std::make_shared<const rvae::RvaeModel>(std::move(loaded.model));
    auto next = rvae::positive_window_generator(model, std::move(pool), config.seed, config.generate.length);
    while (windows.size() < config.generate.count) windows.push_back(next());
  } else {
    nn::Rng rng(config.seed);
    for (auto& g : rvae::generate(loaded.model, config.generate.count, config.generate.length, rng, pool)) {
      windows.push_back(std::move(g.window));
    }
  }
  std::size_t positives = 0;
  for (auto& w : windows) {
    if (loaded.standardizer) {
      for (auto& f : w.frames) f = loaded.standardizer->invert(f);
    }
    for (const auto& f : w.frames) {
      if (const auto problem = check_frame(f)) throw std::runtime_error("generated frame invalid: " + *problem);
    }
    positives += w.window_label == 1;
  }
  data::save_dataset(data::windows_as_records(windows, "synthetic", data::Environment::kEnv1),
                     (dir / "synthetic.jsonl").string());
  log << "generated " << windows.size() << " windows (" << percent(positives, windows.size())
      << " positive), all frames valid\n";
}

void cmd_train_detector(const RunConfig& config, std::ostream& log) {
  const auto records = load_records(config.dataset, "data.dataset");
  auto experiment = logged_experiment(config, log);
  if (!config.synthetic.empty()) {
    experiment.synthetic_pool = records_as_windows(load_records(config.synthetic, "data.synthetic"));
  }
  const auto dir = prepare_out(config);
  const auto split = data::stratified_kfold(records, config.folds, config.seed).front();
  const auto train = data::select(records, split.train);
  const auto holdout = data::select(records, split.validation);
  log << "training on " << train.size() << " sequences, reporting on " << holdout.size() << '\n';

  std::vector<pipeline::VariantReport> reports;
  for (auto variant : config.variants) {
    const std::string name = pipeline::to_string(variant);
    auto run = pipeline::train_and_evaluate(train, holdout, variant, experiment, config.seed);
    const auto tag = file_tag(name);
    detect::save_detector(*run.detector, run.standardizer, (dir / ("detector_" + tag + ".json")).string());
    write_detector_history(dir / ("detector_" + tag + "_loss.csv"), run.detector_history);
    if (!run.vae_history.empty()) write_vae_history(dir / ("vae_" + tag + "_loss.csv"), run.vae_history);
    pipeline::VariantReport vr{name, eval::aggregate({"holdout"}, {run.evaluation.metrics}), {}};
    vr.runs.push_back(std::move(run));
    reports.push_back(std::move(vr));
  }
  auto results = open_out(dir / "results.csv");
  results << "variant";
  for (const char* m : eval::MetricSet::names()) results << ',' << m;
  results << '\n';
  for (const auto& vr : reports) {
    results << vr.name;
    for (double v : vr.report.mean.values()) results << ',' << v;
    results << '\n';
  }
  pipeline::write_outputs(dir.string(), reports, "train-detector");
  print_summary(log, reports);
}

void cmd_evaluate(const RunConfig& config, std::ostream& log) {
  auto loaded = detect::load_detector(require_path(config.detector_checkpoint, "data.detector_checkpoint"));
  auto records = load_records(config.dataset, "data.dataset");
  if (!config.standardizer.empty()) {
    records = data::load_standardizer(require_path(config.standardizer, "data.standardizer")).apply(records);
  } else if (loaded.standardizer) {
    records = loaded.standardizer->apply(records);
  }
  const auto dir = prepare_out(config);
  fs::create_directories(dir / "predictions");
  const std::size_t length = loaded.detector.config().window_length;
  pipeline::RunOutcome run;
  for (const auto& r : records) {
    if (r.frames.size() < length) continue;
    run.record_probs.push_back(detect::predict_sequence(loaded.detector, r, config.eval_stride));
    run.test_records.push_back(r);
    auto csv = open_out(dir / "predictions" / (std::to_string(run.test_records.size() - 1) + ".csv"));
    detect::write_prediction_csv(csv, r, run.record_probs.back());
  }
  auto rule = experiment_config(config).rule;
  rule.window_length = length;
  run.evaluation = eval::evaluate_probabilities(run.test_records, run.record_probs, rule, config.eval_stride);
  const auto& c = loaded.detector.config();
  const std::string name = std::string(detect::to_string(c.backbone)) + "/" + data::to_string(c.input_mode);
  pipeline::VariantReport vr{name, eval::aggregate({"all"}, {run.evaluation.metrics}), {}};
  vr.runs.push_back(std::move(run));
  pipeline::write_outputs(dir.string(), {vr}, "evaluate");
  print_summary(log, {vr});
}

void cmd_crossval(const RunConfig& config, std::ostream& log) {
  const auto records = load_records(config.dataset, "data.dataset");
  const auto experiment = logged_experiment(config, log);
  const auto dir = prepare_out(config);
  std::vector<pipeline::VariantReport> reports;
  for (auto variant : config.variants) reports.push_back(pipeline::cross_validate(records, variant, experiment));
  pipeline::write_outputs(dir.string(), reports, "crossval");
  print_summary(log, reports);
}

void cmd_heldout_env3(const RunConfig& config, std::ostream& log) {
  auto records = load_records(config.dataset, "data.dataset");
  std::vector<data::SequenceRecord> env12, env3;
  if (!config.env3_dataset.empty()) {
    env12 = std::move(records);
    env3 = load_records(config.env3_dataset, "data.env3_dataset");
  } else {
    for (auto& r : records) (r.env == data::Environment::kEnv3 ? env3 : env12).push_back(std::move(r));
  }
  if (env3.empty()) throw UsageError("no Env 3 records: set data.env3_dataset or include env 3 in data.dataset");
  if (env12.empty()) throw UsageError("no Env 1/2 training records");
  const auto experiment = logged_experiment(config, log);
  const auto dir = prepare_out(config);
  std::vector<pipeline::VariantReport> reports;
  for (auto variant : config.variants) reports.push_back(pipeline::heldout_env3(env12, env3, variant, experiment));
  pipeline::write_outputs(dir.string(), reports, "heldout-env3");
  print_summary(log, reports);
}

void cmd_discriminative_score(const RunConfig& config, std::ostream& log) {
  const auto real_records = load_records(config.dataset, "data.dataset");
  const auto synthetic_records = load_records(config.synthetic, "data.synthetic");
  const auto standardizer = standardizer_for(config, real_records);
  const std::size_t length = synthetic_records.empty() ? config.detector.window_length
                                                       : synthetic_records.front().frames.size();
  const auto real = data::window_sequences(standardizer.apply(real_records), length, config.train_stride).windows;
  const auto synthetic = records_as_windows(standardizer.apply(synthetic_records));
  const auto dir = prepare_out(config);
  nn::Rng rng(config.seed);
  const auto r = eval::discriminative_score(real, synthetic, rng, config.discriminative);
  auto out = open_out(dir / "discriminative.txt");
  out << "real_windows = " << real.size() << "\nsynthetic_windows = " << synthetic.size()
      << "\ntest_size = " << r.test_size << "\naccuracy = " << r.accuracy << "\nscore = " << r.score << '\n';
  log << "discriminative score " << r.score << " (held-out accuracy " << r.accuracy << " on " << r.test_size
      << " windows)\n";
}

void cmd_make_benchmark(const RunConfig& config, std::ostream& log) {
  auto b = config.benchmark;
  b.seed = config.seed;
  const auto records = data::make_benchmark(b);
  const auto dir = prepare_out(config);
  data::save_dataset(records, (dir / "benchmark.jsonl").string());
  const auto balance = data::class_balance(records);
  log << "wrote " << records.size() << " sequences, " << balance.frames << " frames ("
      << percent(balance.positive_frames, balance.frames) << " positive)\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimodal recurrent VAE augmentation and intent detection", "mint"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> scale;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one key, section.key=value (repeatable)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--scale", scale, "multiplier for training epochs and warm-up");

  using Command = void (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"preprocess", "standardize and window a dataset, print class balance", cmd_preprocess},
      {"train-vae", "train the recurrent VAE and save a checkpoint", cmd_train_vae},
      {"generate", "sample synthetic windows from a VAE checkpoint", cmd_generate},
      {"train-detector", "train one detector per variant", cmd_train_detector},
      {"evaluate", "score a detector checkpoint on a dataset", cmd_evaluate},
      {"crossval", "stratified k-fold cross-validation", cmd_crossval},
      {"heldout-env3", "train on Env 1+2 halves, test on Env 3", cmd_heldout_env3},
      {"discriminative-score", "real-vs-synthetic classifier score", cmd_discriminative_score},
      {"make-benchmark", "write a procedural benchmark dataset", cmd_make_benchmark},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) subs.emplace_back(app.add_subcommand(name, help), fn);
  auto* keys = app.add_subcommand("config-keys", "list every config key with its default");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    if (keys->parsed()) {
      for (const auto& k : config_keys()) {
        out << k.name << " = " << get_value(config, k.name) << "    ; " << k.help << '\n';
      }
      return kExitOk;
    }
    if (!config_path.empty()) apply_ini_file(config, config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + o + "'");
      set_value(config, o.substr(0, eq), o.substr(eq + 1));
    }
    if (seed) config.seed = *seed;
    if (out_dir) config.out = *out_dir;
    if (scale) config.scale = *scale;
    validate(config);
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) fn(config, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace mint::cli
