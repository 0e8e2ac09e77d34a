#include "labeldist/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "labeldist/errors.hpp"
#include "labeldist/rng.hpp"

namespace labeldist {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(const std::string& path, std::size_t lineno,
                            const std::string& msg) {
  throw InputError(path + ":" + std::to_string(lineno) + ": " + msg);
}

std::int64_t read_count(const json& counter, const char* key,
                        const std::string& path, std::size_t lineno) {
  if (!counter.contains(key)) return 0;
  const json& v = counter.at(key);
  if (!v.is_number_integer())
    fail_line(path, lineno, std::string("label_counter.") + key + " must be an integer");
  const std::int64_t c = v.get<std::int64_t>();
  if (c < 0)
    fail_line(path, lineno, std::string("label_counter.") + key + " is negative");
  return c;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // no newline translation
  if (!out) throw InputError("cannot write file: " + path);
  return out;
}

}  // namespace

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::vector<AnnotationRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail_line(path, lineno, "record must be a JSON object");

    AnnotationRecord rec;
    if (!j.contains("uid") || !j.at("uid").is_string())
      fail_line(path, lineno, "missing string field 'uid'");
    rec.uid = j.at("uid").get<std::string>();
    if (rec.uid.empty()) fail_line(path, lineno, "uid must be non-empty");
    if (!seen.insert(rec.uid).second)
      fail_line(path, lineno, "duplicate uid '" + rec.uid + "'");

    if (!j.contains("label_counter") || !j.at("label_counter").is_object())
      fail_line(path, lineno, "missing object field 'label_counter'");
    const json& counter = j.at("label_counter");
    rec.counts[Label::Entailment] = read_count(counter, "e", path, lineno);
    rec.counts[Label::Neutral] = read_count(counter, "n", path, lineno);
    rec.counts[Label::Contradiction] = read_count(counter, "c", path, lineno);
    if (rec.counts.total() == 0) fail_line(path, lineno, "zero annotations");

    if (!j.contains("old_label") || !j.at("old_label").is_string())
      fail_line(path, lineno, "missing string field 'old_label'");
    try {
      rec.old_label = label_from_letter(j.at("old_label").get<std::string>());
    } catch (const InputError& e) {
      fail_line(path, lineno, e.what());
    }

    if (j.contains("premise")) {
      if (!j.at("premise").is_string())
        fail_line(path, lineno, "'premise' must be a string");
      rec.premise = j.at("premise").get<std::string>();
    }
    if (j.contains("hypothesis")) {
      if (!j.at("hypothesis").is_string())
        fail_line(path, lineno, "'hypothesis' must be a string");
      rec.hypothesis = j.at("hypothesis").get<std::string>();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_annotations(const std::string& path,
                      const std::vector<AnnotationRecord>& records) {
  std::ofstream out = open_for_write(path);
  // Lines are assembled by hand with a fixed key order so reruns are
  // byte-identical.
  for (const AnnotationRecord& rec : records) {
    out << "{\"uid\": \"" << json_escape(rec.uid) << "\", \"label_counter\": {\"e\": "
        << rec.counts[Label::Entailment] << ", \"n\": " << rec.counts[Label::Neutral]
        << ", \"c\": " << rec.counts[Label::Contradiction] << "}, \"old_label\": \""
        << label_letter(rec.old_label) << "\"";
    if (rec.premise) out << ", \"premise\": \"" << json_escape(*rec.premise) << "\"";
    if (rec.hypothesis)
      out << ", \"hypothesis\": \"" << json_escape(*rec.hypothesis) << "\"";
    out << "}\n";
  }
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::vector<PredictionRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    PredictionRecord rec;
    if (!j.contains("uid") || !j.at("uid").is_string())
      fail_line(path, lineno, "missing string field 'uid'");
    rec.uid = j.at("uid").get<std::string>();
    if (rec.uid.empty()) fail_line(path, lineno, "uid must be non-empty");
    if (!seen.insert(rec.uid).second)
      fail_line(path, lineno, "duplicate uid '" + rec.uid + "'");
    if (!j.contains("logits") || !j.at("logits").is_array() ||
        j.at("logits").size() != kNumLabels)
      fail_line(path, lineno, "'logits' must be an array of 3 numbers");
    for (int i = 0; i < kNumLabels; ++i) {
      const json& v = j.at("logits").at(i);
      if (!v.is_number()) fail_line(path, lineno, "'logits' must be numeric");
      rec.logits[i] = v.get<double>();
      if (!std::isfinite(rec.logits[i]))
        fail_line(path, lineno, "logit " + std::to_string(i) + " is not finite");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& records) {
  std::ofstream out = open_for_write(path);
  for (const PredictionRecord& rec : records) {
    out << "{\"uid\": \"" << json_escape(rec.uid) << "\", \"logits\": ["
        << format_double(rec.logits[0]) << ", " << format_double(rec.logits[1])
        << ", " << format_double(rec.logits[2]) << "]}\n";
  }
}

LabelDistribution to_distribution(const LabelCounts& counts) {
  const std::int64_t total = counts.total();
  if (total <= 0) throw InputError("to_distribution: zero annotations");
  LabelDistribution d;
  for (int i = 0; i < kNumLabels; ++i) {
    if (counts[i] < 0) throw InputError("to_distribution: negative count");
    d[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return d;
}

Label majority_label(const LabelCounts& counts) {
  if (counts.total() <= 0) throw InputError("majority_label: zero annotations");
  return argmax_label(counts);
}

DatasetSplit repartition(const std::vector<AnnotationRecord>& records,
                         std::size_t n_eval, std::uint64_t seed) {
  if (n_eval > records.size())
    throw InputError("repartition: n_eval (" + std::to_string(n_eval) +
                     ") exceeds record count (" + std::to_string(records.size()) + ")");
  Rng rng(derive_seed(seed, "repartition"));
  std::vector<std::uint32_t> order =
      rng.permutation(static_cast<std::uint32_t>(records.size()));
  std::vector<bool> in_eval(records.size(), false);
  for (std::size_t i = 0; i < n_eval; ++i) in_eval[order[i]] = true;

  DatasetSplit split;
  split.seed = seed;
  split.eval.reserve(n_eval);
  split.train.reserve(records.size() - n_eval);
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_eval[i] ? split.eval : split.train).push_back(records[i]);
  }
  return split;
}

LabelCounts subsample_annotations(const LabelCounts& counts, std::int64_t k,
                                  std::uint64_t seed) {
  const std::int64_t total = counts.total();
  if (k <= 0) throw InputError("subsample_annotations: k must be positive");
  if (k > total)
    throw InputError("subsample_annotations: k (" + std::to_string(k) +
                     ") exceeds total annotations (" + std::to_string(total) + ")");

  // Partial Fisher-Yates over the multiset of individual votes laid out
  // in canonical label order.
  std::vector<std::uint8_t> votes;
  votes.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < kNumLabels; ++i) {
    votes.insert(votes.end(), static_cast<std::size_t>(counts[i]),
                 static_cast<std::uint8_t>(i));
  }
  Rng rng(derive_seed(seed, "subsample"));
  LabelCounts out;
  std::size_t n = votes.size();
  for (std::int64_t drawn = 0; drawn < k; ++drawn) {
    const std::size_t j = static_cast<std::size_t>(rng.below(n));
    ++out[votes[j]];
    votes[j] = votes[n - 1];
    --n;
  }
  return out;
}

}  // namespace labeldist
