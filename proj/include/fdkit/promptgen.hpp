#pragma once

// Assembly of {instruction, input, output} records: template instantiation
// with machine information and working conditions, the two input tracks
// (encoded FFT vector / statistical summary), subset building with the
// 230-per-class-and-size sampling layout, and JSONL corpus I/O.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fdkit/error.hpp"
#include "fdkit/features.hpp"
#include "fdkit/labels.hpp"
#include "fdkit/preprocess.hpp"
#include "fdkit/types.hpp"
#include "fdkit/util.hpp"

namespace fdkit {

enum class Track { FFT, Stat };

inline const char* to_string(Track t) { return t == Track::FFT ? "fft" : "stat"; }

inline Track track_from_string(const std::string& s) {
    if (s == "fft") return Track::FFT;
    if (s == "stat") return Track::Stat;
    fail("InvalidParameter", "unknown track '" + s + "'");
}

// Machine description substituted into the instruction. Geometry is an
// ordered key/value list so rendering is deterministic.
struct EquipInfo {
    std::string name;
    std::string model;
    std::vector<std::pair<std::string, std::string>> geometry;

    std::string render() const {
        std::string out = "name: " + name + ", model: " + model;
        for (const auto& [k, v] : geometry) out += ", " + k + ": " + v;
        return out;
    }
};

// Default rig description (the CWRU drive-end bearing); configuration, not a
// hard-coded fact — callers may substitute their own.
inline EquipInfo default_equip_info() {
    EquipInfo e;
    e.name = "SKF 6205-2RS JEM";
    e.model = "deep groove ball bearing";
    e.geometry = {{"pitch diameter", "1.537 in"},
                  {"ball diameter", "0.3126 in"},
                  {"ball count", "9"}};
    return e;
}

inline std::string make_instruction(const std::optional<EquipInfo>& equip, int load_hp,
                                    int speed_rpm, Track track) {
    const std::string tail = track == Track::FFT
                                 ? "please predict the operating status of the bearing based on "
                                   "the following FFT vector."
                                 : "please predict the operating status of the bearing based on "
                                   "the following time-domain and frequency-domain features.";
    std::string head;
    if (equip) {
        head = "Given machine information: " + equip->render() + "; and working conditions: ";
    } else {
        head = "Given working conditions: ";  // machine-specification ablation
    }
    return head + std::to_string(load_hp) + " hp, " + std::to_string(speed_rpm) + " rpm, " + tail;
}

// "name: value" pairs, time-domain features first, 6 significant digits.
inline std::string render_stat_input(const FeatureVector& fv) {
    const auto values = fv.values();
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += "; ";
        out += FeatureVector::kNames[i];
        out += ": ";
        out += format_sig(values[i], 6);
    }
    return out;
}

using InputPayload = std::variant<EncodedSample, FeatureVector>;

inline std::string make_input(Track track, const InputPayload& payload) {
    if (track == Track::FFT) {
        if (!std::holds_alternative<EncodedSample>(payload))
            fail("TrackMismatch", "FFT track requires an encoded spectrum payload");
        return std::get<EncodedSample>(payload).text;
    }
    if (!std::holds_alternative<FeatureVector>(payload))
        fail("TrackMismatch", "Stat track requires a feature vector payload");
    return render_stat_input(std::get<FeatureVector>(payload));
}

struct RecordMeta {
    Label label;
    std::string subset_id;
    std::string source_id;
    std::string record_id;
    Track track = Track::FFT;
};

struct PromptRecord {
    std::string instruction;
    std::string input;
    std::string output;
    RecordMeta meta;
};

// "0HPDE", "3HPFE", ...
inline std::string subset_id_for(int load_hp, SensorPosition pos) {
    return std::to_string(load_hp) + "HP" + to_string(pos);
}

struct BuildOptions {
    Track track = Track::FFT;
    LabelScheme scheme = LabelScheme::Four;
    int k_per_class = 230;        // segments per (fault kind, size) group and for Normal
    std::size_t segment_length = kDefaultSegmentLength;
    int decimals = kDefaultDecimals;
    SegmentMode mode = SegmentMode::RandomStart;
    std::uint64_t seed = 0;
    bool one_sided = false;
    bool include_equip_info = true;  // false = machine-specification ablation
    EquipInfo equip = default_equip_info();
};

namespace detail {

// class groups in canonical order: Normal, then each fault kind x size
struct ClassGroup {
    FaultAnnotation annotation;
    std::vector<const TimeSeriesSignal*> signals;
};

inline std::vector<ClassGroup> class_groups(const std::vector<TimeSeriesSignal>& signals) {
    std::vector<ClassGroup> groups;
    groups.push_back({FaultAnnotation{FaultKind::Normal, std::nullopt}, {}});
    for (FaultKind kind : {FaultKind::InnerRace, FaultKind::OuterRace, FaultKind::RollingElement})
        for (double size : kFaultSizesInches)
            groups.push_back({FaultAnnotation{kind, size}, {}});

    for (const TimeSeriesSignal& s : signals) {
        for (ClassGroup& g : groups) {
            if (g.annotation.kind != s.fault.kind) continue;
            if (g.annotation.kind != FaultKind::Normal &&
                size_index(*g.annotation.size_inches) != size_index(*s.fault.size_inches))
                continue;
            g.signals.push_back(&s);
            break;
        }
    }
    for (ClassGroup& g : groups)
        std::sort(g.signals.begin(), g.signals.end(),
                  [](const TimeSeriesSignal* a, const TimeSeriesSignal* b) {
                      return a->source_id < b->source_id;
                  });
    return groups;
}

inline std::string group_name(const FaultAnnotation& a) {
    std::string n = to_string(a.kind);
    if (a.size_inches) n += "/" + format_sig(*a.size_inches, 2);
    return n;
}

}  // namespace detail

// Build one condition subset: k_per_class records for Normal and for each
// (fault kind, size) pair — 2300 records per condition at the default 230.
// All signals must share one (load, sensor position) pair. Deterministic
// under the seed regardless of signal order.
inline std::vector<PromptRecord> build_subset(const std::vector<TimeSeriesSignal>& signals,
                                              const BuildOptions& opts) {
    if (signals.empty()) fail("EmptyInput", "build_subset of no signals");
    const int load = signals.front().load_hp;
    const SensorPosition pos = signals.front().sensor_position;
    const int rpm = signals.front().speed_rpm;
    for (const TimeSeriesSignal& s : signals)
        if (s.load_hp != load || s.sensor_position != pos)
            fail("MixedCondition", "signals span more than one (load, sensor position) pair");

    const std::string subset = subset_id_for(load, pos);
    const std::optional<EquipInfo> equip =
        opts.include_equip_info ? std::optional<EquipInfo>(opts.equip) : std::nullopt;

    std::vector<PromptRecord> records;
    records.reserve(static_cast<std::size_t>(opts.k_per_class) * 10);

    for (const detail::ClassGroup& group : detail::class_groups(signals)) {
        if (group.signals.empty())
            fail("MissingClass", "no signal for class " + detail::group_name(group.annotation) +
                                     " in subset " + subset);
        const Label label = label_for(group.annotation, opts.scheme);

        // spread the k_per_class segments over the group's signals
        const std::size_t n_sig = group.signals.size();
        for (std::size_t si = 0; si < n_sig; ++si) {
            const TimeSeriesSignal& sig = *group.signals[si];
            std::size_t quota = static_cast<std::size_t>(opts.k_per_class) / n_sig +
                                (si < static_cast<std::size_t>(opts.k_per_class) % n_sig ? 1 : 0);
            if (quota == 0) continue;
            const std::uint64_t seg_seed = mix_seed(opts.seed, sig.source_id);
            std::vector<Segment> segments =
                segment(sig, opts.segment_length, quota, opts.mode, seg_seed);

            const std::string instruction = make_instruction(equip, load, rpm, opts.track);
            for (Segment& seg : segments) {
                PromptRecord rec;
                rec.instruction = instruction;
                if (opts.track == Track::FFT) {
                    EncodeOptions eo;
                    eo.decimals = opts.decimals;
                    eo.one_sided = opts.one_sided;
                    rec.input = make_input(Track::FFT, encode(fft_magnitude(seg), eo));
                } else {
                    rec.input = make_input(Track::Stat, compute_features(seg, sig.sampling_rate_hz));
                }
                rec.output = label_text(label);
                rec.meta.label = label;
                rec.meta.subset_id = subset;
                rec.meta.source_id = sig.source_id;
                rec.meta.track = opts.track;
                records.push_back(std::move(rec));
            }
        }
    }

    char idbuf[32];
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::snprintf(idbuf, sizeof(idbuf), "%s#%04zu", subset.c_str(), i);
        records[i].meta.record_id = idbuf;
    }
    return records;
}

// --- JSONL corpus I/O --------------------------------------------------------

inline nlohmann::json record_to_json(const PromptRecord& r) {
    nlohmann::json j;
    j["instruction"] = r.instruction;
    j["input"] = r.input;
    j["output"] = r.output;
    j["meta"]["label"] = label_code(r.meta.label);
    j["meta"]["scheme"] = to_string(r.meta.label.scheme);
    j["meta"]["subset_id"] = r.meta.subset_id;
    j["meta"]["source_id"] = r.meta.source_id;
    j["meta"]["record_id"] = r.meta.record_id;
    j["meta"]["track"] = to_string(r.meta.track);
    return j;
}

inline PromptRecord record_from_json(const nlohmann::json& j) {
    PromptRecord r;
    r.instruction = j.at("instruction").get<std::string>();
    r.input = j.at("input").get<std::string>();
    r.output = j.at("output").get<std::string>();
    const nlohmann::json& m = j.at("meta");
    const LabelScheme scheme = scheme_from_string(m.at("scheme").get<std::string>());
    r.meta.label = label_from_code(m.at("label").get<std::string>(), scheme);
    r.meta.subset_id = m.at("subset_id").get<std::string>();
    r.meta.source_id = m.at("source_id").get<std::string>();
    r.meta.record_id = m.at("record_id").get<std::string>();
    r.meta.track = track_from_string(m.at("track").get<std::string>());
    return r;
}

inline void write_jsonl(const std::vector<PromptRecord>& records, const std::string& path) {
    if (records.empty()) fail("EmptyInput", "refusing to write an empty corpus");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("IoError", "cannot create " + path);
    for (const PromptRecord& r : records) out << record_to_json(r).dump() << "\n";
    if (!out) fail("IoError", "short write to " + path);
}

inline std::vector<PromptRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::vector<PromptRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            fail("MalformedLine", "line " + std::to_string(lineno) + " of " + path + ": " + e.what());
        }
    }
    return records;
}

}  // namespace fdkit
