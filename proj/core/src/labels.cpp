#include "labeldist/labels.hpp"

#include <cmath>

#include "labeldist/errors.hpp"

namespace labeldist {

char label_letter(Label label) {
  switch (label) {
    case Label::Entailment: return 'e';
    case Label::Neutral: return 'n';
    case Label::Contradiction: return 'c';
  }
  throw std::logic_error("label_letter: bad enum value");
}

std::string label_name(Label label) {
  switch (label) {
    case Label::Entailment: return "entailment";
    case Label::Neutral: return "neutral";
    case Label::Contradiction: return "contradiction";
  }
  throw std::logic_error("label_name: bad enum value");
}

Label label_from_letter(const std::string& letter) {
  if (letter == "e") return Label::Entailment;
  if (letter == "n") return Label::Neutral;
  if (letter == "c") return Label::Contradiction;
  throw InputError("unknown label letter '" + letter + "' (expected e, n, or c)");
}

bool is_valid_distribution(const LabelDistribution& d) {
  double sum = 0.0;
  for (double v : d.p) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  return std::fabs(sum - 1.0) <= kDistributionSumTolerance;
}

void validate_distribution(const LabelDistribution& d, const std::string& context) {
  if (is_valid_distribution(d)) return;
  std::string where = context.empty() ? "" : context + ": ";
  throw InputError(where + "invalid label distribution [" +
                   std::to_string(d[0]) + ", " + std::to_string(d[1]) + ", " +
                   std::to_string(d[2]) + "] (entries must be >= 0 and sum to 1)");
}

int argmax_index(const LabelDistribution& d) {
  int best = 0;
  for (int i = 1; i < kNumLabels; ++i) {
    if (d[i] > d[best]) best = i;
  }
  return best;
}

Label argmax_label(const LabelDistribution& d) {
  return static_cast<Label>(argmax_index(d));
}

Label argmax_label(const LabelCounts& c) {
  int best = 0;
  for (int i = 1; i < kNumLabels; ++i) {
    if (c[i] > c[best]) best = i;
  }
  return static_cast<Label>(best);
}

LabelDistribution uniform_distribution() {
  return LabelDistribution{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
}

LabelDistribution one_hot(Label l) {
  LabelDistribution d;
  d[l] = 1.0;
  return d;
}

}  // namespace labeldist
