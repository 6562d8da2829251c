#pragma once

// The label vocabulary, centralized: short codes (NO, IRF, ORF, REF, and
// IRF1..REF3 in the detailed scheme) and the canonical long surface strings
// used as prompt outputs. Suffixes 1/2/3 map to 0.007/0.014/0.021 inches.

#include <string>

#include "fdkit/error.hpp"
#include "fdkit/types.hpp"

namespace fdkit {

enum class LabelScheme { Four, Ten };

inline const char* to_string(LabelScheme s) { return s == LabelScheme::Four ? "four" : "ten"; }

inline LabelScheme scheme_from_string(const std::string& s) {
    if (s == "four" || s == "4") return LabelScheme::Four;
    if (s == "ten" || s == "10") return LabelScheme::Ten;
    fail("InvalidParameter", "unknown label scheme '" + s + "'");
}

struct Label {
    LabelScheme scheme = LabelScheme::Four;
    int index = 0;  // canonical class index within the scheme

    friend bool operator==(const Label&, const Label&) = default;
};

inline int class_count(LabelScheme s) { return s == LabelScheme::Four ? 4 : 10; }

namespace detail {

constexpr const char* kFourCodes[4] = {"NO", "IRF", "ORF", "REF"};
constexpr const char* kFourTexts[4] = {"Normal", "Inner Race Fault", "Outer Race Fault",
                                       "Rolling Element Fault"};
constexpr const char* kTenCodes[10] = {"NO",   "IRF1", "IRF2", "IRF3", "ORF1",
                                       "ORF2", "ORF3", "REF1", "REF2", "REF3"};
constexpr const char* kTenTexts[10] = {"Normal",
                                       "Inner Race Fault (0.007 inch)",
                                       "Inner Race Fault (0.014 inch)",
                                       "Inner Race Fault (0.021 inch)",
                                       "Outer Race Fault (0.007 inch)",
                                       "Outer Race Fault (0.014 inch)",
                                       "Outer Race Fault (0.021 inch)",
                                       "Rolling Element Fault (0.007 inch)",
                                       "Rolling Element Fault (0.014 inch)",
                                       "Rolling Element Fault (0.021 inch)"};

inline int kind_rank(FaultKind k) {
    switch (k) {
        case FaultKind::Normal: return 0;
        case FaultKind::InnerRace: return 1;
        case FaultKind::OuterRace: return 2;
        case FaultKind::RollingElement: return 3;
    }
    return 0;
}

}  // namespace detail

// Short code, e.g. "IRF3".
inline std::string label_code(const Label& l) {
    if (l.index < 0 || l.index >= class_count(l.scheme)) fail("InvalidParameter", "label index out of range");
    return l.scheme == LabelScheme::Four ? detail::kFourCodes[l.index] : detail::kTenCodes[l.index];
}

// Canonical long string used as the prompt output, e.g. "Inner Race Fault (0.021 inch)".
inline std::string label_text(const Label& l) {
    if (l.index < 0 || l.index >= class_count(l.scheme)) fail("InvalidParameter", "label index out of range");
    return l.scheme == LabelScheme::Four ? detail::kFourTexts[l.index] : detail::kTenTexts[l.index];
}

inline Label label_from_code(const std::string& code, LabelScheme scheme) {
    for (int i = 0; i < class_count(scheme); ++i) {
        const char* c = scheme == LabelScheme::Four ? detail::kFourCodes[i] : detail::kTenCodes[i];
        if (code == c) return Label{scheme, i};
    }
    fail("InvalidParameter", "unknown label code '" + code + "'");
}

inline Label label_for(const FaultAnnotation& fault, LabelScheme scheme) {
    fault.validate();
    const int rank = detail::kind_rank(fault.kind);
    if (scheme == LabelScheme::Four) return Label{scheme, rank};
    if (fault.kind == FaultKind::Normal) return Label{scheme, 0};
    if (!fault.size_inches) fail("MissingSizeForTenScheme", "ten-label scheme needs a fault size");
    const int size_idx = size_index(*fault.size_inches);
    if (size_idx < 0) fail("MissingSizeForTenScheme", "fault size is not one of the known values");
    return Label{scheme, 1 + (rank - 1) * 3 + size_idx};
}

}  // namespace fdkit
