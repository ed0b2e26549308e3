// SPDX-License-Identifier: Apache-2.0
#include "mint/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace mint::cli {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void parse(const std::string& key, const std::string& v, std::size_t& out) {
  if (v.empty() || v.front() == '-') bad_value(key, v, "a non-negative integer");
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
}

void parse(const std::string& key, const std::string& v, double& out) {
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a number");
}

void parse(const std::string& key, const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    out = true;
  } else if (v == "false" || v == "0" || v == "no" || v == "off") {
    out = false;
  } else {
    bad_value(key, v, "a boolean");
  }
}

void parse(const std::string&, const std::string& v, std::string& out) { out = v; }

void parse(const std::string& key, const std::string& v, detect::Backbone& out) {
  try {
    out = detect::backbone_from_string(v);
  } catch (const std::invalid_argument&) {
    bad_value(key, v, "gru, lstm or transformer");
  }
}

void parse(const std::string& key, const std::string& v, data::Environment& out) {
  std::size_t n = 0;
  parse(key, v, n);
  if (n < 1 || n > 3) bad_value(key, v, "an environment 1, 2 or 3");
  out = data::environment_from_int(static_cast<int>(n));
}

void parse(const std::string& key, const std::string& v, std::array<std::size_t, 3>& out) {
  const auto items = split_list(v);
  if (items.size() != out.size()) bad_value(key, v, "three comma-separated widths");
  for (std::size_t i = 0; i < out.size(); ++i) parse(key, items[i], out[i]);
}

void parse(const std::string& key, const std::string& v, std::vector<pipeline::Variant>& out) {
  std::vector<pipeline::Variant> parsed;
  const auto items = split_list(v);
  if (items.size() == 1 && items.front() == "all") {
    parsed.assign(pipeline::all_variants().begin(), pipeline::all_variants().end());
  } else {
    for (const auto& item : items) {
      try {
        parsed.push_back(pipeline::variant_from_string(item));
      } catch (const std::invalid_argument&) {
        bad_value(key, item, "pose_only, emotion_only, multimodal, multimodal+vae or all");
      }
    }
  }
  if (parsed.empty()) bad_value(key, v, "a non-empty variant list");
  out = std::move(parsed);
}

std::string format(std::size_t v) { return std::to_string(v); }
std::string format(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}
std::string format(bool v) { return v ? "true" : "false"; }
std::string format(const std::string& v) { return v; }
std::string format(detect::Backbone v) { return detect::to_string(v); }
std::string format(data::Environment v) { return std::to_string(data::to_int(v)); }
std::string format(const std::array<std::size_t, 3>& v) {
  return format(v[0]) + "," + format(v[1]) + "," + format(v[2]);
}
std::string format(const std::vector<pipeline::Variant>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : ",") + std::string(pipeline::to_string(x));
  return out;
}

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Access>
Entry field(std::string name, std::string help, Access access) {
  Entry e{{name, std::move(help)}, {}, {}};
  e.set = [name, access](RunConfig& c, const std::string& v) { parse(name, v, access(c)); };
  e.get = [access](const RunConfig& c) { return format(access(c)); };
  return e;
}

#define MINT_FIELD(key, member, help) field(key, help, [](auto& c) -> auto& { return c.member; })

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      MINT_FIELD("data.dataset", dataset, "JSON Lines dataset of sequences"),
      MINT_FIELD("data.env3_dataset", env3_dataset, "held-out Env 3 dataset; empty splits data.dataset by env"),
      MINT_FIELD("data.standardizer", standardizer, "standardizer JSON to reuse instead of fitting"),
      MINT_FIELD("data.synthetic", synthetic, "synthetic window dataset"),
      MINT_FIELD("data.vae_checkpoint", vae_checkpoint, "VAE checkpoint for generate"),
      MINT_FIELD("data.detector_checkpoint", detector_checkpoint, "detector checkpoint for evaluate"),

      MINT_FIELD("run.seed", seed, "master seed"),
      MINT_FIELD("run.scale", scale, "multiplier for VAE epochs, warm-up and detector epochs"),
      MINT_FIELD("run.out", out, "output directory"),

      MINT_FIELD("vae.lambda_pose", vae.lambda_pose, "pose loss weight"),
      MINT_FIELD("vae.lambda_emotion", vae.lambda_emotion, "emotion loss weight"),
      MINT_FIELD("vae.lambda_label", vae.lambda_label, "label loss weight"),
      MINT_FIELD("vae.beta_max", vae.beta_max, "final KL weight"),
      MINT_FIELD("vae.warmup_epochs", vae.warmup_epochs, "epochs of linear KL warm-up"),
      MINT_FIELD("vae.free_bits", vae.free_bits, "per-dimension KL floor"),
      MINT_FIELD("vae.confidence_floor", vae.confidence_floor, "added to keypoint confidence in the pose weight"),
      MINT_FIELD("vae.huber_delta", vae.huber_delta, "Huber transition point"),
      MINT_FIELD("vae.pose_coord_weight", vae.pose_coord_weight, "coordinate term share of the pose loss"),
      MINT_FIELD("vae.pose_conf_weight", vae.pose_conf_weight, "confidence term share of the pose loss"),
      MINT_FIELD("vae.latent_dim", vae.latent_dim, "latent size"),
      MINT_FIELD("vae.mlp_dims", vae.mlp_dims, "encoder MLP widths"),
      MINT_FIELD("vae.encoder_hidden", vae.encoder_hidden, "encoder GRU width"),
      MINT_FIELD("vae.decoder_hidden", vae.decoder_hidden, "decoder GRU width"),
      MINT_FIELD("vae.decoder_input_dim", vae.decoder_input_dim, "decoder input projection width"),
      MINT_FIELD("vae.output_hidden", vae.output_hidden, "decoder output MLP width"),
      MINT_FIELD("vae.dropout", vae.dropout, "encoder dropout rate"),
      MINT_FIELD("vae.batch_size", vae.batch_size, "windows per step"),
      MINT_FIELD("vae.epochs", vae.epochs, "training epochs before scaling"),
      MINT_FIELD("vae.learning_rate", vae.learning_rate, "Adam step size"),
      MINT_FIELD("vae.weight_decay", vae.weight_decay, "L2 weight decay"),

      MINT_FIELD("detector.backbone", detector.backbone, "gru, lstm or transformer"),
      MINT_FIELD("detector.hidden", detector.hidden, "hidden width H"),
      MINT_FIELD("detector.reference_hidden", reference_hidden, "pick H per backbone and modality"),
      MINT_FIELD("detector.heads", detector.heads, "attention heads"),
      MINT_FIELD("detector.window_length", detector.window_length, "frames per window"),
      MINT_FIELD("detector.epochs", detector.epochs, "training epochs before scaling"),
      MINT_FIELD("detector.batch_size", detector.batch_size, "windows per step"),
      MINT_FIELD("detector.learning_rate", detector.learning_rate, "Adam step size"),
      MINT_FIELD("detector.weight_decay", detector.weight_decay, "L2 weight decay"),
      MINT_FIELD("detector.patience", detector.patience, "early-stopping patience in epochs"),
      MINT_FIELD("detector.variants", variants, "comma list of pose_only, emotion_only, multimodal, multimodal+vae, or all"),

      MINT_FIELD("experiment.train_stride", train_stride, "window stride on training sequences"),
      MINT_FIELD("experiment.eval_stride", eval_stride, "window stride for prediction and sequence metrics"),
      MINT_FIELD("experiment.target_positive_fraction", target_positive_fraction, "positive window share after augmentation"),
      MINT_FIELD("experiment.folds", folds, "cross-validation folds"),
      MINT_FIELD("experiment.early_stopping_folds", early_stopping_folds, "inner split for early stopping; 0 disables"),
      MINT_FIELD("experiment.threshold", rule.threshold, "per-frame probability threshold"),
      MINT_FIELD("experiment.k_run", rule.k_run, "consecutive frames that fire a window"),

      MINT_FIELD("generate.count", generate.count, "windows to emit"),
      MINT_FIELD("generate.length", generate.length, "frames per generated window"),
      MINT_FIELD("generate.positive_only", generate.positive_only, "emit only positive windows"),

      MINT_FIELD("discriminative.hidden", discriminative.hidden, "classifier GRU width"),
      MINT_FIELD("discriminative.epochs", discriminative.epochs, "classifier epochs"),
      MINT_FIELD("discriminative.batch_size", discriminative.batch_size, "classifier batch size"),
      MINT_FIELD("discriminative.learning_rate", discriminative.learning_rate, "classifier step size"),
      MINT_FIELD("discriminative.train_fraction", discriminative.train_fraction, "per-class training share"),

      MINT_FIELD("benchmark.sequences", benchmark.sequences, "sequences to synthesize"),
      MINT_FIELD("benchmark.min_length", benchmark.min_length, "shortest sequence"),
      MINT_FIELD("benchmark.max_length", benchmark.max_length, "longest sequence"),
      MINT_FIELD("benchmark.positive_sequence_fraction", benchmark.positive_sequence_fraction, "share of sequences with an onset"),
      MINT_FIELD("benchmark.onset_min_fraction", benchmark.onset_min_fraction, "earliest onset as a fraction of length"),
      MINT_FIELD("benchmark.onset_max_fraction", benchmark.onset_max_fraction, "latest onset as a fraction of length"),
      MINT_FIELD("benchmark.signal_strength", benchmark.signal_strength, "pose cue scale"),
      MINT_FIELD("benchmark.emotion_strength", benchmark.emotion_strength, "emotion cue scale"),
      MINT_FIELD("benchmark.noise", benchmark.noise, "coordinate jitter"),
      MINT_FIELD("benchmark.distractor_probability", benchmark.distractor_probability, "chance of a distractor gesture"),
      MINT_FIELD("benchmark.dropout_probability", benchmark.dropout_probability, "chance a keypoint is dropped"),
      MINT_FIELD("benchmark.env", benchmark.env, "environment tag 1-3"),
      MINT_FIELD("benchmark.id_prefix", benchmark.id_prefix, "sequence id prefix"),
  };
  return table;
}

#undef MINT_FIELD

const Entry& find(const std::string& key) {
  static const auto index = [] {
    std::map<std::string, const Entry*> m;
    for (const auto& e : entries()) m[e.key.name] = &e;
    return m;
  }();
  const auto it = index.find(key);
  if (it == index.end()) throw ConfigError("unknown config key '" + key + "'");
  return *it->second;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const auto keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  find(key).set(config, trim(value));
}

std::string get_value(const RunConfig& config, const std::string& key) { return find(key).get(config); }

void apply_ini(RunConfig& config, std::istream& in, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(source + ": key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) {
      try {
        set_value(config, section + "." + key, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
      }
    }
  }
}

void apply_ini_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_ini(config, in, path);
}

void write_ini(std::ostream& out, const RunConfig& config) {
  std::string section;
  for (const auto& e : entries()) {
    const auto dot = e.key.name.find('.');
    const auto s = e.key.name.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    out << e.key.name.substr(dot + 1) << " = " << e.get(config) << '\n';
  }
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.scale > 0.0, "run.scale must be > 0");
  require(c.train_stride > 0 && c.eval_stride > 0, "experiment strides must be > 0");
  require(c.folds >= 2, "experiment.folds must be >= 2");
  require(c.early_stopping_folds == 0 || c.early_stopping_folds >= 2,
          "experiment.early_stopping_folds must be 0 or >= 2");
  require(c.target_positive_fraction > 0.0 && c.target_positive_fraction < 1.0,
          "experiment.target_positive_fraction must lie in (0, 1)");
  require(c.generate.count > 0, "generate.count must be > 0");
  require(c.generate.length >= 2, "generate.length must be >= 2");
  require(c.discriminative.train_fraction > 0.0 && c.discriminative.train_fraction < 1.0,
          "discriminative.train_fraction must lie in (0, 1)");
  require(c.discriminative.hidden > 0 && c.discriminative.batch_size > 0,
          "discriminative.hidden and batch_size must be > 0");
  require(c.benchmark.sequences > 0 && c.benchmark.min_length <= c.benchmark.max_length,
          "benchmark needs sequences > 0 and min_length <= max_length");
  try {
    scaled_vae(c).validate();
    scaled_detector(c).validate();
    experiment_config(c).rule.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

rvae::RvaeHyper scaled_vae(const RunConfig& config) { return config.vae.scaled(config.scale); }

detect::DetectorConfig scaled_detector(const RunConfig& config) {
  auto d = config.detector;
  d.epochs = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(d.epochs) * config.scale)));
  return d;
}

pipeline::ExperimentConfig experiment_config(const RunConfig& config) {
  pipeline::ExperimentConfig e;
  e.vae = scaled_vae(config);
  e.detector = scaled_detector(config);
  e.reference_hidden = config.reference_hidden;
  e.train_stride = config.train_stride;
  e.eval_stride = config.eval_stride;
  e.target_positive_fraction = config.target_positive_fraction;
  e.folds = config.folds;
  e.early_stopping_folds = config.early_stopping_folds;
  e.seed = config.seed;
  e.rule = config.rule;
  e.rule.window_length = config.detector.window_length;
  return e;
}

}  // namespace mint::cli
