// labeldist command-line front end: wires ingestion, calibration,
// metrics, simulation, and training into reproducible runs. Every
// command is a pure function of (config file, flags): reruns produce
// byte-identical output files. Exit codes: 0 success, 1 input error,
// 2 internal invariant failure. Diagnostics go to stderr, data to files.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "labeldist/calibration.hpp"
#include "labeldist/classifier.hpp"
#include "labeldist/config.hpp"
#include "labeldist/dataset.hpp"
#include "labeldist/errors.hpp"
#include "labeldist/labels.hpp"
#include "labeldist/metrics.hpp"
#include "labeldist/report.hpp"
#include "labeldist/rng.hpp"
#include "labeldist/simulator.hpp"

namespace {

using namespace labeldist;

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Hash of the effective run configuration (sorted key=value lines), for
// manifests; reruns with an identical config carry an identical hash.
std::uint64_t run_config_hash(const Config& config) {
  std::string canonical;
  for (const auto& [key, value] : config.entries()) {
    canonical += key;
    canonical += '=';
    canonical += value;
    canonical += '\n';
  }
  return fnv1a64(canonical);
}

// Seeds are always explicit: flag, else config key, else an error.
// No wall-clock fallbacks anywhere.
std::uint64_t resolve_seed(const Config& config, const std::optional<std::uint64_t>& flag) {
  if (flag.has_value()) return *flag;
  if (config.has("seed")) return config.get_u64("seed");
  throw InputError("no seed given: pass --seed or set `seed` in the config file");
}

std::filesystem::path ensure_outdir(const std::string& out) {
  if (out.empty()) throw InputError("output directory must not be empty");
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw InputError("cannot create output directory '" + out + "'");
  }
  return dir;
}

std::string out_path(const std::filesystem::path& dir, const std::string& name) {
  return (dir / name).string();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (std::string& p : parts) {
    const auto lo = p.find_first_not_of(" \t");
    const auto hi = p.find_last_not_of(" \t");
    p = (lo == std::string::npos) ? std::string() : p.substr(lo, hi - lo + 1);
  }
  return parts;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& part : split_list(text)) {
    if (part.empty()) throw InputError("seeds: empty entry in '" + text + "'");
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(part, &pos);
    } catch (const std::exception&) {
      throw InputError("seeds: '" + part + "' is not an unsigned integer");
    }
    if (pos != part.size()) throw InputError("seeds: '" + part + "' is not an unsigned integer");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw InputError("seeds: empty list");
  return seeds;
}

SmoothingMode parse_smooth_mode(const Config& config) {
  const std::string mode = config.get_string("smooth_mode", "literal");
  if (mode == "literal") return SmoothingMode::Literal;
  if (mode == "standard") return SmoothingMode::Standard;
  throw InputError("smooth_mode must be literal or standard, got '" + mode + "'");
}

SingleVoteMode parse_vote_mode(const Config& config) {
  const std::string mode = config.get_string("vote_mode", "sampled");
  if (mode == "sampled") return SingleVoteMode::SampledVote;
  if (mode == "old_gold") return SingleVoteMode::OldGold;
  throw InputError("vote_mode must be sampled or old_gold, got '" + mode + "'");
}

// Calibration request: none | temp:<s> | temp:auto | smooth:<alpha> |
// smooth:auto. `auto` picks the grid value whose calibrated mean
// prediction entropy best matches the human mean entropy.
struct CalibSpec {
  enum class What { None, Temp, Smooth };
  What what = What::None;
  bool automatic = false;
  double value = 0.0;
};

CalibSpec parse_calib_spec(const std::string& text) {
  CalibSpec spec;
  if (text.empty() || text == "none") return spec;
  const std::size_t colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "temp") {
    spec.what = CalibSpec::What::Temp;
  } else if (head == "smooth") {
    spec.what = CalibSpec::What::Smooth;
  } else {
    throw InputError("calib: expected none, temp:<s|auto>, or smooth:<alpha|auto>, got '" +
                     text + "'");
  }
  if (tail == "auto") {
    spec.automatic = true;
    return spec;
  }
  if (tail.empty()) throw InputError("calib: missing value in '" + text + "'");
  std::size_t pos = 0;
  try {
    spec.value = std::stod(tail, &pos);
  } catch (const std::exception&) {
    throw InputError("calib: '" + tail + "' is not a number");
  }
  if (pos != tail.size()) throw InputError("calib: '" + tail + "' is not a number");
  return spec;
}

std::string calib_method_name(const CalibrationMethod& method) {
  switch (method.kind) {
    case CalibrationKind::None: return "none";
    case CalibrationKind::TempScale: return "temp_scale";
    case CalibrationKind::PredSmooth:
      return method.mode == SmoothingMode::Literal ? "pred_smooth_literal"
                                                   : "pred_smooth_standard";
    case CalibrationKind::TrainSmooth: return "train_smooth";
  }
  return "none";
}

double mean_human_entropy(const std::vector<AnnotationRecord>& records) {
  double sum = 0.0;
  for (const AnnotationRecord& rec : records) {
    sum += entropy(to_distribution(rec.counts));
  }
  return records.empty() ? 0.0 : sum / static_cast<double>(records.size());
}

// Prediction logits in record order; every record must have one.
std::vector<std::array<double, kNumLabels>> match_logits(
    const std::vector<AnnotationRecord>& records,
    const std::vector<PredictionRecord>& predictions) {
  std::unordered_map<std::string, const PredictionRecord*> by_uid;
  by_uid.reserve(predictions.size());
  for (const PredictionRecord& pred : predictions) {
    if (!by_uid.emplace(pred.uid, &pred).second) {
      throw InputError("duplicate prediction uid '" + pred.uid + "'");
    }
  }
  std::vector<std::array<double, kNumLabels>> logits;
  logits.reserve(records.size());
  for (const AnnotationRecord& rec : records) {
    const auto it = by_uid.find(rec.uid);
    if (it == by_uid.end()) throw InputError("no prediction for uid '" + rec.uid + "'");
    logits.push_back(it->second->logits);
  }
  return logits;
}

std::unordered_map<std::string, std::vector<double>> load_feature_map(const std::string& path) {
  std::unordered_map<std::string, std::vector<double>> map;
  for (FeatureRow& row : load_features(path)) {
    if (!map.emplace(row.uid, std::move(row.x)).second) {
      throw InputError(path + ": duplicate feature uid '" + row.uid + "'");
    }
  }
  return map;
}

const std::vector<double>& feature_for(
    const std::unordered_map<std::string, std::vector<double>>& features,
    const std::string& uid) {
  const auto it = features.find(uid);
  if (it == features.end()) throw InputError("no feature vector for uid '" + uid + "'");
  return it->second;
}

// True-distribution sidecar: header uid,p_e,p_n,p_c then one row per
// example with full-precision probabilities.
void save_true_dists(const std::string& path, const std::vector<FeatureRow>& features,
                     const std::vector<LabelDistribution>& dists) {
  std::string body = "uid,p_e,p_n,p_c\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    body += features[i].uid;
    for (int c = 0; c < kNumLabels; ++c) {
      body += ',';
      body += format_g17(dists[i][c]);
    }
    body += '\n';
  }
  write_text_file(path, body);
}

std::unordered_map<std::string, LabelDistribution> load_true_dists(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open true-distribution file '" + path + "'");
  std::unordered_map<std::string, LabelDistribution> map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "uid,p_e,p_n,p_c") {
        throw InputError(path + ":1: expected header uid,p_e,p_n,p_c");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto parts = split_list(line);
    if (parts.size() != 1 + kNumLabels) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected uid and " +
                       std::to_string(kNumLabels) + " probabilities");
    }
    LabelDistribution dist;
    for (int c = 0; c < kNumLabels; ++c) {
      std::size_t pos = 0;
      try {
        dist[c] = std::stod(parts[static_cast<std::size_t>(c) + 1], &pos);
      } catch (const std::exception&) {
        throw InputError(path + ":" + std::to_string(lineno) + ": bad probability");
      }
      if (pos != parts[static_cast<std::size_t>(c) + 1].size()) {
        throw InputError(path + ":" + std::to_string(lineno) + ": bad probability");
      }
    }
    validate_distribution(dist, path + ":" + std::to_string(lineno));
    if (!map.emplace(parts[0], dist).second) {
      throw InputError(path + ":" + std::to_string(lineno) + ": duplicate uid '" + parts[0] + "'");
    }
  }
  return map;
}

TrainConfig train_config_from(const Config& config, std::uint64_t seed) {
  TrainConfig tc;
  // The 1e-5 order of magnitude belongs to finetuning a large pretrained
  // encoder; a fresh linear head wants the desk-scale default.
  tc.learning_rate = config.get_double("lr", 1e-2);
  tc.batch_size = static_cast<int>(config.get_int("batch_size", 128));
  tc.epochs_phase1 = static_cast<int>(config.get_int("epochs_phase1", 3));
  tc.epochs_phase2 = static_cast<int>(config.get_int("epochs_phase2", 9));
  const std::string opt = config.get_string("optimizer", "sgd");
  if (opt == "sgd") {
    tc.optimizer = Optimizer::Sgd;
  } else if (opt == "adam") {
    tc.optimizer = Optimizer::Adam;
  } else {
    throw InputError("optimizer must be sgd or adam, got '" + opt + "'");
  }
  if (!(tc.learning_rate > 0.0)) throw InputError("lr must be positive");
  if (tc.batch_size < 1) throw InputError("batch_size must be >= 1");
  if (tc.epochs_phase1 < 0 || tc.epochs_phase2 < 0) throw InputError("epochs must be >= 0");
  tc.seed = seed;
  return tc;
}

// ---------------------------------------------------------------------------
// evaluate

void run_evaluate(const Config& config, const std::filesystem::path& outdir,
                  const std::string& calib_flag) {
  const auto records = load_annotations(config.get_string("annotations"));
  const auto predictions = load_predictions(config.get_string("predictions"));
  if (records.empty()) throw InputError("annotation file has no records");
  const int bins = static_cast<int>(config.get_int("bins", kDefaultBins));
  const SmoothingMode mode = parse_smooth_mode(config);

  const std::string calib_text =
      !calib_flag.empty() ? calib_flag : config.get_string("calib", "none");
  const CalibSpec spec = parse_calib_spec(calib_text);

  std::optional<CalibrationMethod> method;
  std::optional<double> target_entropy;
  std::optional<double> achieved_entropy;
  if (spec.what == CalibSpec::What::Temp) {
    if (spec.automatic) {
      HyperparamGrid grid;
      grid.values = config.has("temp_grid") ? parse_grid(config.get_string("temp_grid"))
                                            : default_temp_scale_grid();
      grid.target_entropy = mean_human_entropy(records);
      const auto fit = fit_entropy_match_temp(match_logits(records, predictions), grid);
      method = CalibrationMethod::temp_scale(fit.scalar);
      target_entropy = grid.target_entropy;
      achieved_entropy = fit.achieved_entropy;
    } else {
      method = CalibrationMethod::temp_scale(spec.value);
    }
  } else if (spec.what == CalibSpec::What::Smooth) {
    if (spec.automatic) {
      HyperparamGrid grid;
      grid.values = config.has("alpha_grid") ? parse_grid(config.get_string("alpha_grid"))
                                             : default_alpha_grid();
      grid.target_entropy = mean_human_entropy(records);
      std::vector<LabelDistribution> dists;
      for (const auto& logits : match_logits(records, predictions)) {
        dists.push_back(softmax(logits));
      }
      const auto fit = fit_entropy_match_pred(dists, grid, mode);
      method = CalibrationMethod::pred_smooth(fit.scalar, mode);
      target_entropy = grid.target_entropy;
      achieved_entropy = fit.achieved_entropy;
    } else {
      method = CalibrationMethod::pred_smooth(spec.value, mode);
    }
  }

  const auto pairs = build_scored_pairs(predictions, records, method);
  const MetricsReport report = score_pairs(pairs);

  std::vector<LabelDistribution> human_dists;
  std::vector<LabelDistribution> pred_dists;
  human_dists.reserve(pairs.size());
  pred_dists.reserve(pairs.size());
  for (const ScoredPair& pair : pairs) {
    human_dists.push_back(pair.human);
    pred_dists.push_back(pair.pred);
  }

  ReportDoc doc;
  add_metrics(doc, report);
  doc.add("entropy_human", mean_human_entropy(records));
  doc.add("min_extreme_prob_human", min_extreme_prob(human_dists));
  doc.add_text("tie_break", "lowest_index");
  doc.add_text("calib_method",
               method.has_value() ? calib_method_name(*method) : "none");
  if (method.has_value()) doc.add("calib_scalar", method->scalar);
  if (target_entropy.has_value()) doc.add("calib_target_entropy", *target_entropy);
  if (achieved_entropy.has_value()) doc.add("calib_achieved_entropy", *achieved_entropy);

  write_text_file(out_path(outdir, "report.txt"), doc.str());
  write_histogram_csv(out_path(outdir, "hist_human.csv"), entropy_histogram(human_dists, bins));
  write_histogram_csv(out_path(outdir, "hist_pred.csv"), entropy_histogram(pred_dists, bins));
  write_binned_jsd_csv(out_path(outdir, "binned_jsd.csv"), binned_jsd(pairs, bins));
}

// ---------------------------------------------------------------------------
// sweep

void run_sweep(const Config& config, const std::filesystem::path& outdir) {
  const auto records = load_annotations(config.get_string("annotations"));
  const auto predictions = load_predictions(config.get_string("predictions"));
  if (records.empty()) throw InputError("annotation file has no records");
  const SmoothingMode mode = parse_smooth_mode(config);
  const std::string method = config.get_string("method");
  if (method != "temp" && method != "smooth") {
    throw InputError("method must be temp or smooth, got '" + method + "'");
  }

  HyperparamGrid grid;
  if (config.has("grid")) {
    grid.values = parse_grid(config.get_string("grid"));
  } else {
    grid.values = method == "temp" ? default_temp_scale_grid() : default_alpha_grid();
  }
  grid.target_entropy = mean_human_entropy(records);

  const auto logits = match_logits(records, predictions);
  EntropyMatchResult fit;
  if (method == "temp") {
    fit = fit_entropy_match_temp(logits, grid);
  } else {
    std::vector<LabelDistribution> dists;
    dists.reserve(logits.size());
    for (const auto& l : logits) dists.push_back(softmax(l));
    fit = fit_entropy_match_pred(dists, grid, mode);
  }

  std::vector<SweepRow> rows;
  rows.reserve(fit.grid.size());
  for (std::size_t i = 0; i < fit.grid.size(); ++i) {
    const GridPointEval& point = fit.grid[i];
    SweepRow row;
    row.value = point.value;
    row.feasible = point.feasible;
    row.entropy_matched = i == fit.grid_index;
    if (point.feasible) {
      const CalibrationMethod m = method == "temp"
                                      ? CalibrationMethod::temp_scale(point.value)
                                      : CalibrationMethod::pred_smooth(point.value, mode);
      const MetricsReport rep = evaluate(predictions, records, m);
      row.kl = rep.kl;
      row.jsd = rep.jsd;
      row.mean_entropy = rep.mean_entropy;
    }
    rows.push_back(row);
  }
  write_sweep_csv(out_path(outdir, "sweep.csv"), rows);

  ReportDoc doc;
  doc.add_text("method", method == "temp" ? "temp_scale"
                                          : (mode == SmoothingMode::Literal
                                                 ? "pred_smooth_literal"
                                                 : "pred_smooth_standard"));
  doc.add("target_entropy", grid.target_entropy);
  doc.add("matched_value", fit.scalar);
  doc.add("matched_entropy", fit.achieved_entropy);
  doc.add_int("grid_size", static_cast<std::int64_t>(fit.grid.size()));
  write_text_file(out_path(outdir, "sweep_summary.txt"), doc.str());
}

// ---------------------------------------------------------------------------
// human-baseline

void run_human_baseline(const Config& config, std::uint64_t seed,
                        const std::filesystem::path& outdir) {
  const auto records = load_annotations(config.get_string("annotations"));
  const int resamples = static_cast<int>(config.get_int("resamples", 10));
  if (resamples < 1) throw InputError("resamples must be >= 1");
  const MetricsReport report = estimate_human_baseline(records, resamples, seed);

  ReportDoc doc;
  add_metrics(doc, report);
  doc.add_int("resamples", resamples);
  doc.add_text("tie_break", "lowest_index");
  write_text_file(out_path(outdir, "report.txt"), doc.str());
}

// ---------------------------------------------------------------------------
// gen-synthetic

void run_gen_synthetic(const Config& config, std::uint64_t seed,
                       const std::filesystem::path& outdir) {
  SyntheticWorldConfig world_config;
  world_config.n_examples = config.get_int("n_examples");
  world_config.dim = static_cast<int>(config.get_int("dim", 8));
  world_config.tau_gen = config.get_double("tau_gen", 1.0);
  world_config.votes = config.get_int("votes", 100);
  world_config.mean_scale = config.get_double("mean_scale", 2.0);
  world_config.feature_noise = config.get_double("feature_noise", 1.0);
  world_config.old_label_votes = static_cast<int>(config.get_int("old_label_votes", 5));
  world_config.seed = seed;
  const std::int64_t eval_size = config.get_int("eval_size", 0);
  if (eval_size < 0 || eval_size > world_config.n_examples) {
    throw InputError("eval_size must lie in [0, n_examples]");
  }

  const SyntheticWorld world = generate_synthetic(world_config);
  save_annotations(out_path(outdir, "annotations.jsonl"), world.records);
  save_features(out_path(outdir, "features.csv"), world.features);
  save_true_dists(out_path(outdir, "true_dist.csv"), world.features, world.true_dists);

  if (eval_size > 0) {
    const DatasetSplit split =
        repartition(world.records, static_cast<std::size_t>(eval_size), seed);
    save_annotations(out_path(outdir, "annotations_train.jsonl"), split.train);
    save_annotations(out_path(outdir, "annotations_eval.jsonl"), split.eval);
  }

  ReportDoc doc;
  doc.add_text("command", "gen-synthetic");
  doc.add_text("rng", std::string(kRngAlgorithm));
  doc.add_text("seed", std::to_string(static_cast<unsigned long long>(seed)));
  doc.add_text("config_hash", hex64(run_config_hash(config)));
  doc.add_int("n_examples", world_config.n_examples);
  doc.add_int("dim", world_config.dim);
  doc.add_int("votes", world_config.votes);
  doc.add_int("old_label_votes", world_config.old_label_votes);
  doc.add_int("eval_size", eval_size);
  doc.add("tau_gen", world_config.tau_gen);
  doc.add("mean_scale", world_config.mean_scale);
  doc.add("feature_noise", world_config.feature_noise);
  write_text_file(out_path(outdir, "manifest.txt"), doc.str());
}

// ---------------------------------------------------------------------------
// train

Label gold_label_for(const AnnotationRecord& rec, SingleVoteMode vote_mode,
                     std::uint64_t seed, std::size_t index) {
  if (vote_mode == SingleVoteMode::OldGold) return rec.old_label;
  const std::int64_t total = rec.counts.total();
  if (total <= 0) throw InputError("record '" + rec.uid + "' has no votes to sample from");
  Rng rng(derive_seed(seed, "train-vote", index));
  std::int64_t pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
  for (int i = 0; i < kNumLabels; ++i) {
    if (pick < rec.counts[i]) return static_cast<Label>(i);
    pick -= rec.counts[i];
  }
  return static_cast<Label>(kNumLabels - 1);
}

void run_train(const Config& config, std::uint64_t seed,
               const std::filesystem::path& outdir) {
  const auto records = load_annotations(config.get_string("annotations"));
  if (records.empty()) throw InputError("annotation file has no records");
  const auto features = load_feature_map(config.get_string("features"));
  const SingleVoteMode vote_mode = parse_vote_mode(config);
  const std::string targets = config.get_string("targets", "onehot");
  const bool two_phase = config.has("multi_annotations");
  if (two_phase && targets != "onehot") {
    throw InputError("targets applies to single-phase runs; two-phase training fixes "
                     "one-hot singles and soft multis");
  }

  const TrainConfig tc = train_config_from(config, derive_seed(seed, "train"));

  std::vector<TrainExample> singles;
  singles.reserve(records.size());
  std::vector<DynamicsCsvRow> dynamics_rows;
  dynamics_rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AnnotationRecord& rec = records[i];
    TrainExample ex;
    ex.x = feature_for(features, rec.uid);
    if (targets == "onehot") {
      ex.target = one_hot(gold_label_for(rec, vote_mode, seed, i));
    } else if (targets == "smoothed") {
      const double alpha = config.get_double("alpha");
      ex.target = smooth_target(gold_label_for(rec, vote_mode, seed, i), alpha);
    } else if (targets == "soft") {
      ex.target = to_distribution(rec.counts);
    } else {
      throw InputError("targets must be onehot, smoothed, or soft, got '" + targets + "'");
    }
    singles.push_back(std::move(ex));
    dynamics_rows.push_back({rec.uid, {}});
  }
  const int dim = static_cast<int>(singles.front().x.size());

  ClassifierParams params;
  std::vector<DynamicsRow> dynamics;
  std::int64_t n_multis = 0;
  if (two_phase) {
    const auto multi_records = load_annotations(config.get_string("multi_annotations"));
    if (multi_records.empty()) throw InputError("multi annotation file has no records");
    // -1 means "no training-target smoothing"; valid alphas live in [0, 1).
    const double train_smooth_alpha = config.get_double("train_smooth_alpha", -1.0);
    std::vector<TrainExample> multis;
    multis.reserve(multi_records.size());
    for (const AnnotationRecord& rec : multi_records) {
      TrainExample ex;
      ex.x = feature_for(features, rec.uid);
      if (train_smooth_alpha >= 0.0) {
        ex.target = smooth_target(majority_label(rec.counts), train_smooth_alpha);
      } else {
        ex.target = to_distribution(rec.counts);
      }
      multis.push_back(std::move(ex));
    }
    n_multis = static_cast<std::int64_t>(multis.size());
    const TwoPhaseResult result = two_phase_train(singles, multis, tc);
    params = result.params;
    dynamics = result.phase1_dynamics;
  } else {
    const std::string loss_name = config.get_string("loss", "ce");
    LossKind loss = LossKind::CrossEntropy;
    if (loss_name == "kl") {
      loss = LossKind::Kl;
    } else if (loss_name != "ce") {
      throw InputError("loss must be ce or kl, got '" + loss_name + "'");
    }
    const int epochs = static_cast<int>(config.get_int("epochs", tc.epochs_phase1));
    if (epochs < 0) throw InputError("epochs must be >= 0");
    const TrainResult result =
        train(init_params(dim, tc.seed), singles, tc, epochs, loss);
    params = result.params;
    dynamics = result.dynamics;
  }

  for (std::size_t i = 0; i < dynamics.size(); ++i) dynamics_rows[i].stats = dynamics[i];

  save_model(out_path(outdir, "model.txt"), params, seed, train_config_hash(tc));
  write_dynamics_csv(out_path(outdir, "dynamics.csv"), dynamics_rows);

  if (config.has("predict_features")) {
    const auto predict_rows = load_features(config.get_string("predict_features"));
    std::vector<PredictionRecord> predictions;
    predictions.reserve(predict_rows.size());
    for (const FeatureRow& row : predict_rows) {
      PredictionRecord pred;
      pred.uid = row.uid;
      pred.logits = forward(params, row.x);
      predictions.push_back(std::move(pred));
    }
    save_predictions(out_path(outdir, "predictions.jsonl"), predictions);
  }

  ReportDoc doc;
  doc.add_text("command", "train");
  doc.add_text("rng", std::string(kRngAlgorithm));
  doc.add_text("seed", std::to_string(static_cast<unsigned long long>(seed)));
  doc.add_text("config_hash", hex64(run_config_hash(config)));
  doc.add_text("train_config_hash", hex64(train_config_hash(tc)));
  doc.add_text("mode", two_phase ? "two_phase" : "single_phase");
  doc.add_text("targets", targets);
  doc.add_int("n_singles", static_cast<std::int64_t>(singles.size()));
  doc.add_int("n_multis", n_multis);
  doc.add_int("dim", dim);
  doc.add_text("lr", format_g17(tc.learning_rate));
  doc.add_int("batch_size", tc.batch_size);
  doc.add_int("epochs_phase1", tc.epochs_phase1);
  doc.add_int("epochs_phase2", tc.epochs_phase2);
  write_text_file(out_path(outdir, "train_summary.txt"), doc.str());
}

// ---------------------------------------------------------------------------
// simulate

void run_simulate(const Config& config, const std::optional<std::uint64_t>& seed_flag,
                  const std::filesystem::path& outdir, bool no_validate) {
  const auto pool = load_annotations(config.get_string("annotations"));
  if (pool.empty()) throw InputError("annotation file has no records");
  const auto features = load_feature_map(config.get_string("features"));
  const auto eval_records = load_annotations(config.get_string("eval_annotations"));
  if (eval_records.empty()) throw InputError("eval annotation file has no records");

  const std::string eval_against = config.get_string("eval_against", "counts");
  std::unordered_map<std::string, LabelDistribution> true_dists;
  if (eval_against == "true") {
    true_dists = load_true_dists(config.get_string("true_dist"));
  } else if (eval_against != "counts") {
    throw InputError("eval_against must be counts or true, got '" + eval_against + "'");
  }

  const auto plans = parse_plans(config.get_string("plans"));
  if (!no_validate) {
    for (const BudgetPlan& plan : plans) validate_plan(plan);
  }

  std::vector<SelectionStrategy> strategies;
  for (const std::string& name : split_list(config.get_string("strategies", "random"))) {
    strategies.push_back(selection_strategy_from_name(name));
  }
  // An explicit `seeds` list wins; otherwise the root seed runs alone.
  const std::vector<std::uint64_t> seeds =
      config.has("seeds")
          ? parse_seed_list(config.get_string("seeds"))
          : std::vector<std::uint64_t>{resolve_seed(config, seed_flag)};

  const SingleVoteMode vote_mode = parse_vote_mode(config);
  // -1 means "no training-target smoothing"; valid alphas live in [0, 1).
  const double train_smooth_alpha = config.get_double("train_smooth_alpha", -1.0);

  const bool needs_hardness =
      std::find(strategies.begin(), strategies.end(), SelectionStrategy::MostHard) !=
      strategies.end();

  // Hardness probe: a phase-1-style pass over the full pool on its
  // aggregated gold labels; the per-example mean gold-label confidence
  // ranks examples for most_hard selection.
  std::unordered_map<std::uint64_t, std::unordered_map<std::string, double>> hardness_by_seed;
  if (needs_hardness) {
    for (std::uint64_t seed : seeds) {
      std::vector<TrainExample> probe;
      probe.reserve(pool.size());
      for (const AnnotationRecord& rec : pool) {
        probe.push_back({feature_for(features, rec.uid), one_hot(rec.old_label)});
      }
      const int dim = static_cast<int>(probe.front().x.size());
      TrainConfig probe_config = train_config_from(config, derive_seed(seed, "probe"));
      const TrainResult result =
          train(init_params(dim, probe_config.seed), probe, probe_config,
                probe_config.epochs_phase1, LossKind::CrossEntropy);
      auto& scores = hardness_by_seed[seed];
      for (std::size_t i = 0; i < pool.size(); ++i) {
        scores[pool[i].uid] = result.dynamics[i].mean_gold_prob;
      }
    }
  }

  std::vector<SimulateRow> rows;
  for (const SelectionStrategy strategy : strategies) {
    for (const BudgetPlan& plan : plans) {
      for (const std::uint64_t seed : seeds) {
        // Under --no-validate a literal out-of-balance plan is carried
        // as stated in the output row but built with its true vote count.
        BudgetPlan build_plan = plan;
        build_plan.budget = plan.n_single + plan.n_multi * plan.k_way;

        const auto* hardness =
            needs_hardness && strategy == SelectionStrategy::MostHard
                ? &hardness_by_seed.at(seed)
                : nullptr;
        const auto multi_pool =
            select_examples(pool, static_cast<std::size_t>(plan.n_multi), strategy,
                            derive_seed(seed, "select"), hardness);
        std::unordered_set<std::string> multi_uids;
        for (const AnnotationRecord& rec : multi_pool) multi_uids.insert(rec.uid);
        std::vector<AnnotationRecord> single_pool;
        single_pool.reserve(pool.size() - multi_pool.size());
        for (const AnnotationRecord& rec : pool) {
          if (multi_uids.count(rec.uid) == 0) single_pool.push_back(rec);
        }

        const TrainingSets sets =
            build_training_sets(single_pool, multi_pool, build_plan, seed, vote_mode);

        std::vector<TrainExample> singles;
        singles.reserve(sets.singles.size());
        for (const SingleExample& ex : sets.singles) {
          singles.push_back({feature_for(features, ex.uid), one_hot(ex.vote)});
        }
        std::vector<TrainExample> multis;
        multis.reserve(sets.multis.size());
        for (const MultiExample& ex : sets.multis) {
          TrainExample multi_ex;
          multi_ex.x = feature_for(features, ex.uid);
          if (train_smooth_alpha >= 0.0) {
            multi_ex.target = smooth_target(majority_label(ex.counts), train_smooth_alpha);
          } else {
            multi_ex.target = to_distribution(ex.counts);
          }
          multis.push_back(std::move(multi_ex));
        }
        if (singles.empty()) throw InputError("plan produced no single-annotated examples");

        const TrainConfig tc = train_config_from(config, derive_seed(seed, "train"));
        const TwoPhaseResult trained = two_phase_train(singles, multis, tc);

        std::vector<ScoredPair> pairs;
        pairs.reserve(eval_records.size());
        for (const AnnotationRecord& rec : eval_records) {
          ScoredPair pair;
          pair.uid = rec.uid;
          pair.old_label = rec.old_label;
          if (eval_against == "true") {
            const auto it = true_dists.find(rec.uid);
            if (it == true_dists.end()) {
              throw InputError("no true distribution for uid '" + rec.uid + "'");
            }
            pair.human = it->second;
          } else {
            pair.human = to_distribution(rec.counts);
          }
          pair.pred = softmax(forward(trained.params, feature_for(features, rec.uid)));
          pairs.push_back(std::move(pair));
        }

        SimulateRow row;
        row.strategy = selection_strategy_name(strategy);
        row.plan = plan;
        row.seed = seed;
        row.report = score_pairs(pairs);
        rows.push_back(std::move(row));
      }
    }
  }
  write_simulate_csv(out_path(outdir, "simulate.csv"), rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"labeldist: estimating and calibrating label distributions "
               "under annotator disagreement"};
  app.require_subcommand(1);

  struct CommonOpts {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
  };

  auto add_common = [](CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")
        ->required();
    cmd->add_option("--out", opts.out, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "root seed (overrides the config `seed` key)");
  };

  CommonOpts eval_opts;
  std::string calib_flag;
  CLI::App* cmd_evaluate = app.add_subcommand(
      "evaluate", "score predictions against multi-annotated records");
  add_common(cmd_evaluate, eval_opts);
  cmd_evaluate->add_option("--calib", calib_flag,
                           "calibration: none, temp:<s|auto>, smooth:<alpha|auto>");

  CommonOpts sweep_opts;
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "divergence vs. calibration hyperparameter over a grid");
  add_common(cmd_sweep, sweep_opts);

  CommonOpts sim_opts;
  bool no_validate = false;
  CLI::App* cmd_simulate = app.add_subcommand(
      "simulate", "annotation-budget allocation study with two-phase training");
  add_common(cmd_simulate, sim_opts);
  cmd_simulate->add_flag("--no-validate", no_validate,
                         "carry out-of-balance literal plans without budget validation");

  CommonOpts gen_opts;
  CLI::App* cmd_gen = app.add_subcommand(
      "gen-synthetic", "generate a synthetic world with known true distributions");
  add_common(cmd_gen, gen_opts);

  CommonOpts train_opts;
  CLI::App* cmd_train = app.add_subcommand(
      "train", "train the linear softmax classifier on feature vectors");
  add_common(cmd_train, train_opts);

  CommonOpts hb_opts;
  CLI::App* cmd_hb = app.add_subcommand(
      "human-baseline", "annotator self-agreement via vote-split resampling");
  add_common(cmd_hb, hb_opts);

  try {
    app.parse(argc, argv);

    if (*cmd_evaluate) {
      const Config config = Config::parse_file(eval_opts.config_path);
      run_evaluate(config, ensure_outdir(eval_opts.out), calib_flag);
    } else if (*cmd_sweep) {
      const Config config = Config::parse_file(sweep_opts.config_path);
      run_sweep(config, ensure_outdir(sweep_opts.out));
    } else if (*cmd_simulate) {
      const Config config = Config::parse_file(sim_opts.config_path);
      run_simulate(config, sim_opts.seed, ensure_outdir(sim_opts.out), no_validate);
    } else if (*cmd_gen) {
      const Config config = Config::parse_file(gen_opts.config_path);
      run_gen_synthetic(config, resolve_seed(config, gen_opts.seed),
                        ensure_outdir(gen_opts.out));
    } else if (*cmd_train) {
      const Config config = Config::parse_file(train_opts.config_path);
      run_train(config, resolve_seed(config, train_opts.seed),
                ensure_outdir(train_opts.out));
    } else if (*cmd_hb) {
      const Config config = Config::parse_file(hb_opts.config_path);
      run_human_baseline(config, resolve_seed(config, hb_opts.seed),
                         ensure_outdir(hb_opts.out));
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const labeldist::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
