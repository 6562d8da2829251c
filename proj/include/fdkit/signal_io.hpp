#pragma once

// Loading vibration recordings into TimeSeriesSignal values. Three on-disk
// forms are recognized:
//   - MAT-v5 files (CWRU layout, variables named like "X097_DE_time"),
//   - raw little-endian float64 streams (*.f64),
//   - UTF-8 text, one decimal per line (*.txt).
// A signal store is a directory of <id>.f64 files with <id>.json sidecars
// carrying sampling rate, sensor position, condition and fault annotation.

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdkit/error.hpp"
#include "fdkit/mat5.hpp"
#include "fdkit/types.hpp"

namespace fdkit {

struct OperatingCondition {
    int load_hp = 0;
    int speed_rpm = 1797;
};

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

inline bool looks_like_mat_v5(const std::vector<unsigned char>& bytes) {
    return bytes.size() >= 128 && std::memcmp(bytes.data(), "MATLAB 5.0", 10) == 0;
}

inline std::vector<double> parse_f64_stream(const std::vector<unsigned char>& bytes) {
    if (bytes.size() % 8 != 0)
        fail("TruncatedFile", "float64 stream length is not a multiple of 8");
    std::vector<double> samples(bytes.size() / 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, bytes.data() + 8 * i, 8);
        const std::uint16_t probe = 0x0102;
        if (*reinterpret_cast<const unsigned char*>(&probe) == 0x01)
            bits = mat5::detail::swap64(bits);  // stream is little-endian by contract
        std::memcpy(&samples[i], &bits, 8);
    }
    return samples;
}

inline std::vector<double> parse_text_samples(const std::vector<unsigned char>& bytes) {
    std::vector<double> samples;
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        if (line.empty()) continue;
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0' || errno == ERANGE)
            fail("MalformedLine", "line " + std::to_string(lineno) + " is not a decimal number");
        samples.push_back(v);
    }
    return samples;
}

inline void write_f64_stream(const std::string& path, const std::vector<double>& samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("IoError", "cannot create " + path);
    for (double v : samples) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        const std::uint16_t probe = 0x0102;
        if (*reinterpret_cast<const unsigned char*>(&probe) == 0x01)
            bits = mat5::detail::swap64(bits);
        char buf[8];
        std::memcpy(buf, &bits, 8);
        out.write(buf, 8);
    }
    if (!out) fail("IoError", "short write to " + path);
}

namespace detail {

inline std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

// Pick the recording channel out of a parsed MAT variable map. CWRU names
// channels by convention ("X097_DE_time", "X097_FE_time"); selection is a
// substring match, disambiguated by the optional hint.
inline std::pair<std::string, std::vector<double>> select_channel(
    const std::map<std::string, std::vector<double>>& variables,
    std::optional<SensorPosition> channel_hint) {
    std::vector<std::string> candidates;
    for (const auto& [name, values] : variables) {
        bool de = name.find("DE_time") != std::string::npos;
        bool fe = name.find("FE_time") != std::string::npos;
        if (!de && !fe) continue;
        if (channel_hint) {
            if (*channel_hint == SensorPosition::DriveEnd && !de) continue;
            if (*channel_hint == SensorPosition::FanEnd && !fe) continue;
        }
        candidates.push_back(name);
    }
    if (candidates.empty())
        fail("NoMatchingChannel", "no DE_time/FE_time variable matches the requested channel");
    if (candidates.size() > 1) {
        std::string names;
        for (const auto& n : candidates) names += (names.empty() ? "" : ", ") + n;
        fail("AmbiguousChannel", "multiple candidate channels (" + names + "); pass a channel hint");
    }
    return {candidates.front(), variables.at(candidates.front())};
}

inline TimeSeriesSignal load_signal(const std::string& path,
                                    std::optional<SensorPosition> channel_hint,
                                    const FaultAnnotation& annotation,
                                    const OperatingCondition& condition,
                                    double sampling_rate_hz = 12000.0) {
    std::vector<unsigned char> bytes = read_file_bytes(path);

    TimeSeriesSignal sig;
    sig.sampling_rate_hz = sampling_rate_hz;
    sig.load_hp = condition.load_hp;
    sig.speed_rpm = condition.speed_rpm;
    sig.fault = annotation;

    if (looks_like_mat_v5(bytes)) {
        auto variables = mat5::parse_mat_v5(bytes);
        auto [name, values] = select_channel(variables, channel_hint);
        sig.samples = std::move(values);
        sig.source_id = detail::file_stem(path) + ":" + name;
        sig.sensor_position = name.find("FE_time") != std::string::npos ? SensorPosition::FanEnd
                                                                        : SensorPosition::DriveEnd;
    } else {
        sig.samples = detail::ends_with(path, ".txt") ? parse_text_samples(bytes)
                                                      : parse_f64_stream(bytes);
        sig.source_id = detail::file_stem(path);
        sig.sensor_position = channel_hint.value_or(SensorPosition::DriveEnd);
    }

    sig.validate();
    return sig;
}

// --- signal store -----------------------------------------------------------

inline nlohmann::json signal_meta_json(const TimeSeriesSignal& sig) {
    nlohmann::json j;
    j["source_id"] = sig.source_id;
    j["sampling_rate_hz"] = sig.sampling_rate_hz;
    j["sensor_position"] = to_string(sig.sensor_position);
    j["load_hp"] = sig.load_hp;
    j["speed_rpm"] = sig.speed_rpm;
    j["fault"]["kind"] = to_string(sig.fault.kind);
    if (sig.fault.size_inches) j["fault"]["size_inches"] = *sig.fault.size_inches;
    return j;
}

inline void save_signal(const std::string& dir, const TimeSeriesSignal& sig) {
    sig.validate();
    std::filesystem::create_directories(dir);
    std::string base = (std::filesystem::path(dir) / sig.source_id).string();
    write_f64_stream(base + ".f64", sig.samples);
    std::ofstream meta(base + ".json", std::ios::trunc);
    if (!meta) fail("IoError", "cannot create " + base + ".json");
    meta << signal_meta_json(sig).dump(2) << "\n";
}

inline TimeSeriesSignal load_stored_signal(const std::string& f64_path) {
    std::string meta_path = f64_path.substr(0, f64_path.size() - 4) + ".json";
    std::ifstream meta(meta_path);
    if (!meta) fail("IoError", "missing sidecar " + meta_path);
    nlohmann::json j;
    try {
        meta >> j;
    } catch (const nlohmann::json::exception& e) {
        fail("MalformedLine", "bad sidecar " + meta_path + ": " + e.what());
    }

    TimeSeriesSignal sig;
    sig.samples = parse_f64_stream(read_file_bytes(f64_path));
    sig.source_id = j.at("source_id").get<std::string>();
    sig.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
    sig.sensor_position = sensor_position_from_string(j.at("sensor_position").get<std::string>());
    sig.load_hp = j.at("load_hp").get<int>();
    sig.speed_rpm = j.at("speed_rpm").get<int>();
    sig.fault.kind = fault_kind_from_string(j.at("fault").at("kind").get<std::string>());
    if (j.at("fault").contains("size_inches"))
        sig.fault.size_inches = j.at("fault").at("size_inches").get<double>();
    sig.validate();
    return sig;
}

inline std::vector<TimeSeriesSignal> load_signal_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".f64")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<TimeSeriesSignal> signals;
    signals.reserve(paths.size());
    for (const auto& p : paths) signals.push_back(load_stored_signal(p));
    return signals;
}

}  // namespace fdkit
