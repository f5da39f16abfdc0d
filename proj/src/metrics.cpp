#include "treetab/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include "treetab/cell.hpp"

namespace treetab {

namespace {

bool is_ascii_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

using Counts = std::map<std::vector<std::string>, std::size_t>;

Counts ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    Counts counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(i + n))]++;
    }
    return counts;
}

std::size_t clipped_overlap(const Counts& cand, const Counts& ref) {
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

std::size_t total(const Counts& counts) {
    std::size_t sum = 0;
    for (const auto& [_, count] : counts) sum += count;
    return sum;
}

}  // namespace

std::vector<std::string> tokenize_for_metrics(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    };
    for (char raw : text) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (is_ascii_punct(c)) {
            flush();
            tokens.push_back(std::string(1, c));
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return tokens;
}

double bleu(std::string_view candidate, std::string_view reference) {
    auto cand = tokenize_for_metrics(candidate);
    auto ref = tokenize_for_metrics(reference);
    if (cand.empty()) return 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        Counts cc = ngram_counts(cand, n);
        Counts rc = ngram_counts(ref, n);
        double matches = static_cast<double>(clipped_overlap(cc, rc));
        double count = static_cast<double>(total(cc));
        double p;
        if (n >= 2 && matches == 0.0) {
            p = (matches + 1.0) / (count + 1.0);  // add-one smoothing
        } else if (count == 0.0 || matches == 0.0) {
            return 0.0;  // unsmoothed unigram miss
        } else {
            p = matches / count;
        }
        log_sum += 0.25 * std::log(p);
    }

    double c = static_cast<double>(cand.size());
    double r = static_cast<double>(ref.size());
    double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    return bp * std::exp(log_sum);
}

double rouge_n(std::string_view candidate, std::string_view reference, int n) {
    auto cand = tokenize_for_metrics(candidate);
    auto ref = tokenize_for_metrics(reference);
    Counts cc = ngram_counts(cand, static_cast<std::size_t>(n));
    Counts rc = ngram_counts(ref, static_cast<std::size_t>(n));
    std::size_t cand_total = total(cc);
    std::size_t ref_total = total(rc);
    if (cand_total == 0 || ref_total == 0) return 0.0;

    double overlap = static_cast<double>(clipped_overlap(cc, rc));
    double precision = overlap / static_cast<double>(cand_total);
    double recall = overlap / static_cast<double>(ref_total);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    auto cand = tokenize_for_metrics(candidate);
    auto ref = tokenize_for_metrics(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    // Token-level LCS, one rolling row.
    std::vector<std::size_t> prev(ref.size() + 1, 0);
    std::vector<std::size_t> cur(ref.size() + 1, 0);
    for (std::size_t i = 1; i <= cand.size(); ++i) {
        for (std::size_t j = 1; j <= ref.size(); ++j) {
            if (cand[i - 1] == ref[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    double lcs = static_cast<double>(prev[ref.size()]);
    if (lcs == 0.0) return 0.0;
    double precision = lcs / static_cast<double>(cand.size());
    double recall = lcs / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

struct NormItem {
    bool is_number = false;
    double number = 0.0;
    std::string text;

    bool operator<(const NormItem& other) const {
        if (is_number != other.is_number) return is_number && !other.is_number;
        if (is_number) return number < other.number;
        return text < other.text;
    }
};

// lowercase, trim, collapse internal whitespace; numeric-looking values
// (thousands separators stripped) become numbers.
NormItem normalize_item(std::string_view raw) {
    std::string collapsed;
    bool in_space = false;
    for (char c : trim_view(raw)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space && !collapsed.empty()) collapsed.push_back(' ');
            in_space = true;
        } else {
            collapsed.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            in_space = false;
        }
    }
    while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();

    NormItem item;
    CellValue parsed = parse_cell(collapsed);
    if (parsed.is_number()) {
        item.is_number = true;
        item.number = parsed.number();
    }
    item.text = std::move(collapsed);
    return item;
}

std::vector<std::string> split_answer(std::string_view answer) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : answer) {
        if (c == '|') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

bool denotation_match(std::string_view answer, const std::vector<std::string>& gold) {
    std::vector<NormItem> left;
    for (const auto& part : split_answer(answer)) left.push_back(normalize_item(part));

    std::vector<NormItem> right;
    right.reserve(gold.size());
    for (const auto& g : gold) right.push_back(normalize_item(g));

    if (left.size() != right.size()) return false;
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    for (std::size_t i = 0; i < left.size(); ++i) {
        const NormItem& a = left[i];
        const NormItem& b = right[i];
        if (a.is_number != b.is_number) return false;
        if (a.is_number) {
            if (std::fabs(a.number - b.number) > 1e-6) return false;
        } else if (a.text != b.text) {
            return false;
        }
    }
    return true;
}

}  // namespace treetab
