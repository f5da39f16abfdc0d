#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace treetab {

/// Lowercases, splits punctuation into standalone tokens, then splits on
/// whitespace. The shared tokenization for BLEU and ROUGE.
std::vector<std::string> tokenize_for_metrics(std::string_view text);

/// Sentence-level BLEU-4: modified n-gram precisions n=1..4 with add-one
/// smoothing on zero numerators for n >= 2, geometric mean, and brevity
/// penalty exp(1 - r/c) when c < r. Empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference);

/// N-gram overlap F1 (n = 1 or 2) on the shared tokenization. 0 when both
/// sides are empty.
double rouge_n(std::string_view candidate, std::string_view reference, int n);

/// Token-level longest-common-subsequence F1.
double rouge_l(std::string_view candidate, std::string_view reference);

/// Normalizes both sides (lowercase, trim, collapse internal whitespace,
/// strip "," thousands separators, numeric parse with 1e-6 tolerance),
/// splits the answer on "|", and compares value multisets.
bool denotation_match(std::string_view answer, const std::vector<std::string>& gold);

}  // namespace treetab
