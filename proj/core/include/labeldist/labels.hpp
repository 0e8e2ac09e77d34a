#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace labeldist {

inline constexpr int kNumLabels = 3;

// Canonical label order: entailment < neutral < contradiction.
// Every index-based structure in the toolkit uses this order.
enum class Label : std::uint8_t {
  Entailment = 0,
  Neutral = 1,
  Contradiction = 2,
};

inline constexpr std::array<Label, kNumLabels> kAllLabels{
    Label::Entailment, Label::Neutral, Label::Contradiction};

char label_letter(Label label);              // 'e' / 'n' / 'c'
std::string label_name(Label label);         // "entailment" / ...
Label label_from_letter(const std::string& letter);  // throws InputError

// Per-label annotation tallies. All counts >= 0; a usable record has
// total() > 0.
struct LabelCounts {
  std::array<std::int64_t, kNumLabels> counts{};

  std::int64_t& operator[](Label l) { return counts[static_cast<int>(l)]; }
  std::int64_t operator[](Label l) const { return counts[static_cast<int>(l)]; }
  std::int64_t& operator[](int i) { return counts[i]; }
  std::int64_t operator[](int i) const { return counts[i]; }

  std::int64_t total() const { return counts[0] + counts[1] + counts[2]; }
};

// Probability vector over the three labels. Valid when every entry is
// >= 0 and the entries sum to 1 within 1e-9.
struct LabelDistribution {
  std::array<double, kNumLabels> p{};

  double& operator[](Label l) { return p[static_cast<int>(l)]; }
  double operator[](Label l) const { return p[static_cast<int>(l)]; }
  double& operator[](int i) { return p[i]; }
  double operator[](int i) const { return p[i]; }
};

inline constexpr double kDistributionSumTolerance = 1e-9;

bool is_valid_distribution(const LabelDistribution& d);
// Throws InputError when the invariant is violated; `context` prefixes
// the message.
void validate_distribution(const LabelDistribution& d,
                           const std::string& context = {});

// Index of the largest entry; ties broken toward the lowest canonical
// index. This single tie-break rule is shared by majority_label,
// accuracy argmaxes, and smoothing.
int argmax_index(const LabelDistribution& d);
Label argmax_label(const LabelDistribution& d);
Label argmax_label(const LabelCounts& c);

LabelDistribution uniform_distribution();
LabelDistribution one_hot(Label l);

}  // namespace labeldist
