#pragma once

// Free-text prediction -> label mapping and the metric suite. Matching is
// synonym-table driven (the table ships as an editable data file; the
// compiled-in default is kept identical by a test). A prediction that names
// no label, or more than one, is Unmapped — a value, not an error — and
// scores as wrong.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdkit/error.hpp"
#include "fdkit/labels.hpp"
#include "fdkit/util.hpp"

namespace fdkit {

// Phrases recognized for each base category, keyed by four-scheme code.
using SynonymTable = std::map<std::string, std::vector<std::string>>;

inline const SynonymTable& default_synonyms() {
    static const SynonymTable table = {
        {"NO", {"normal", "no fault", "healthy", "healthy bearing", "normal operation"}},
        {"IRF", {"inner race fault", "inner race", "inner ring fault", "irf", "inner race defect"}},
        {"ORF", {"outer race fault", "outer race", "outer ring fault", "orf", "outer race defect"}},
        {"REF",
         {"rolling element fault", "rolling element", "ball fault", "roller fault", "ref",
          "rolling element defect"}},
    };
    return table;
}

inline SynonymTable load_synonyms(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("IoError", "cannot open synonym table " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail("MalformedLine", std::string("bad synonym table: ") + e.what());
    }
    SynonymTable table;
    for (const auto& [code, phrases] : j.items()) {
        label_from_code(code, LabelScheme::Four);  // validates the key
        for (const auto& p : phrases) table[code].push_back(p.get<std::string>());
    }
    return table;
}

namespace detail {

inline std::vector<std::string> tokenize_prediction(const std::string& lowered) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : lowered) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(c);
        } else if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

inline bool contains_token_seq(const std::vector<std::string>& tokens,
                               const std::vector<std::string>& phrase) {
    if (phrase.empty() || phrase.size() > tokens.size()) return false;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < phrase.size(); ++j)
            if (tokens[i + j] != phrase[j]) {
                match = false;
                break;
            }
        if (match) return true;
    }
    return false;
}

// size cues: inch values scanned before punctuation stripping, and digit
// suffixes glued to an abbreviation token ("irf3").
inline std::set<int> inch_size_cues(const std::string& lowered) {
    std::set<int> sizes;
    static const std::pair<const char*, int> needles[] = {
        {"0.007", 0}, {".007", 0}, {"0.014", 1}, {".014", 1}, {"0.021", 2}, {".021", 2}};
    for (const auto& [needle, idx] : needles)
        if (lowered.find(needle) != std::string::npos) sizes.insert(idx);
    return sizes;
}

}  // namespace detail

// Map a free-text prediction onto the scheme's label set; std::nullopt is
// Unmapped. Deterministic: lowercase, strip punctuation, match synonyms as
// contiguous token sequences; the ten-label scheme additionally needs a
// size cue (digit suffix or inch value).
inline std::optional<Label> map_prediction(const std::string& text, LabelScheme scheme,
                                           const SynonymTable& synonyms = default_synonyms()) {
    const std::string lowered = to_lower(text);
    const std::vector<std::string> tokens = detail::tokenize_prediction(lowered);

    std::set<std::string> base_matches;
    std::set<int> suffix_sizes;
    for (const auto& [code, phrases] : synonyms) {
        for (const std::string& phrase : phrases) {
            if (detail::contains_token_seq(tokens, detail::tokenize_prediction(to_lower(phrase))))
                base_matches.insert(code);
        }
        if (code == "NO") continue;
        const std::string abbrev = to_lower(code);
        for (int digit = 1; digit <= 3; ++digit) {
            const std::string suffixed = abbrev + std::to_string(digit);
            if (std::find(tokens.begin(), tokens.end(), suffixed) != tokens.end()) {
                base_matches.insert(code);
                suffix_sizes.insert(digit - 1);
            }
        }
    }

    if (base_matches.size() != 1) return std::nullopt;  // none, or ambiguous multi-label
    const std::string code = *base_matches.begin();

    if (scheme == LabelScheme::Four) return label_from_code(code, LabelScheme::Four);

    if (code == "NO") return Label{LabelScheme::Ten, 0};
    std::set<int> sizes = detail::inch_size_cues(lowered);
    sizes.insert(suffix_sizes.begin(), suffix_sizes.end());
    if (sizes.size() != 1) return std::nullopt;  // missing or conflicting size cue
    const int size_idx = *sizes.begin();
    const int rank = label_from_code(code, LabelScheme::Four).index;  // 1..3 for faults
    return Label{LabelScheme::Ten, 1 + (rank - 1) * 3 + size_idx};
}

// Rows are true classes, columns are predicted classes plus a trailing
// Unmapped column.
struct ConfusionMatrix {
    std::vector<std::string> labels;                  // class codes, canonical order
    std::vector<std::vector<std::uint64_t>> counts;   // k rows x (k+1) cols

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& row : counts)
            for (std::uint64_t c : row) t += c;
        return t;
    }
};

struct EvalReport {
    double accuracy = 0;
    double macro_precision = 0;
    double macro_recall = 0;
    double macro_f1 = 0;
    struct PerClass {
        std::string label;
        double precision = 0;
        double recall = 0;
        double f1 = 0;
        std::uint64_t support = 0;
        bool degenerate = false;  // a 0/0 precision or recall was defined as 0
    };
    std::vector<PerClass> per_class;
    std::uint64_t unmapped_count = 0;
    std::uint64_t total = 0;
};

struct ScoredEval {
    EvalReport report;
    ConfusionMatrix confusion;
};

// Score (true, mapped-or-Unmapped) pairs. Unmapped counts as wrong for
// accuracy and as a false negative of the true class. Macro averages are
// unweighted means over the class set (union of true and mapped labels).
inline ScoredEval score(const std::vector<std::pair<Label, std::optional<Label>>>& pairs) {
    if (pairs.empty()) fail("EmptyInput", "score of no predictions");
    const LabelScheme scheme = pairs.front().first.scheme;
    std::set<int> class_set;
    for (const auto& [truth, pred] : pairs) {
        if (truth.scheme != scheme || (pred && pred->scheme != scheme))
            fail("InvalidParameter", "mixed label schemes in one evaluation");
        class_set.insert(truth.index);
        if (pred) class_set.insert(pred->index);
    }

    std::vector<int> classes(class_set.begin(), class_set.end());
    std::map<int, std::size_t> col_of;
    for (std::size_t i = 0; i < classes.size(); ++i) col_of[classes[i]] = i;
    const std::size_t k = classes.size();

    ScoredEval out;
    out.confusion.labels.reserve(k);
    for (int c : classes) out.confusion.labels.push_back(label_code(Label{scheme, c}));
    out.confusion.counts.assign(k, std::vector<std::uint64_t>(k + 1, 0));

    for (const auto& [truth, pred] : pairs) {
        const std::size_t row = col_of[truth.index];
        const std::size_t col = pred ? col_of[pred->index] : k;
        out.confusion.counts[row][col] += 1;
    }

    EvalReport& rep = out.report;
    rep.total = pairs.size();
    std::uint64_t correct = 0;
    for (std::size_t i = 0; i < k; ++i) correct += out.confusion.counts[i][i];
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.total);
    for (const auto& [truth, pred] : pairs)
        if (!pred) rep.unmapped_count += 1;

    double sum_p = 0, sum_r = 0, sum_f = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::uint64_t tp = out.confusion.counts[i][i];
        std::uint64_t row_sum = 0, col_sum = 0;
        for (std::size_t j = 0; j <= k; ++j) row_sum += out.confusion.counts[i][j];
        for (std::size_t j = 0; j < k; ++j) col_sum += out.confusion.counts[j][i];

        EvalReport::PerClass pc;
        pc.label = out.confusion.labels[i];
        pc.support = row_sum;
        const std::uint64_t fp = col_sum - tp;
        const std::uint64_t fn = row_sum - tp;
        if (tp + fp == 0) {
            pc.precision = 0.0;
            pc.degenerate = true;
        } else {
            pc.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        if (tp + fn == 0) {
            pc.recall = 0.0;
            pc.degenerate = true;
        } else {
            pc.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        }
        pc.f1 = (pc.precision + pc.recall) > 0.0
                    ? 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall)
                    : 0.0;
        sum_p += pc.precision;
        sum_r += pc.recall;
        sum_f += pc.f1;
        rep.per_class.push_back(pc);
    }
    rep.macro_precision = sum_p / static_cast<double>(k);
    rep.macro_recall = sum_r / static_cast<double>(k);
    rep.macro_f1 = sum_f / static_cast<double>(k);
    return out;
}

// --- report rendering --------------------------------------------------------

inline nlohmann::json report_to_json(const ScoredEval& scored) {
    const EvalReport& r = scored.report;
    nlohmann::json j;
    j["accuracy"] = r.accuracy;
    j["macro_precision"] = r.macro_precision;
    j["macro_recall"] = r.macro_recall;
    j["macro_f1"] = r.macro_f1;
    j["unmapped_count"] = r.unmapped_count;
    j["total"] = r.total;
    for (const auto& pc : r.per_class) {
        nlohmann::json pj;
        pj["label"] = pc.label;
        pj["precision"] = pc.precision;
        pj["recall"] = pc.recall;
        pj["f1"] = pc.f1;
        pj["support"] = pc.support;
        pj["degenerate"] = pc.degenerate;
        j["per_class"].push_back(pj);
    }
    j["confusion"]["labels"] = scored.confusion.labels;
    for (const auto& row : scored.confusion.counts) j["confusion"]["rows"].push_back(row);
    return j;
}

inline std::string render_report_table(const ScoredEval& scored) {
    const EvalReport& r = scored.report;
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line),
                  "accuracy %.4f | macro P %.4f R %.4f F1 %.4f | unmapped %llu/%llu\n", r.accuracy,
                  r.macro_precision, r.macro_recall, r.macro_f1,
                  static_cast<unsigned long long>(r.unmapped_count),
                  static_cast<unsigned long long>(r.total));
    out << line;
    out << "class      precision   recall       f1  support\n";
    for (const auto& pc : r.per_class) {
        std::snprintf(line, sizeof(line), "%-10s %9.4f %8.4f %8.4f %8llu%s\n", pc.label.c_str(),
                      pc.precision, pc.recall, pc.f1, static_cast<unsigned long long>(pc.support),
                      pc.degenerate ? "  (0/0 -> 0)" : "");
        out << line;
    }
    return out.str();
}

inline std::string confusion_to_csv(const ConfusionMatrix& cm) {
    std::string out = "true\\pred";
    for (const std::string& l : cm.labels) out += "," + l;
    out += ",Unmapped\n";
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out += cm.labels[i];
        for (std::uint64_t c : cm.counts[i]) out += "," + std::to_string(c);
        out += "\n";
    }
    return out;
}

}  // namespace fdkit
