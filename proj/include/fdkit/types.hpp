#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fdkit/error.hpp"

namespace fdkit {

enum class SensorPosition { DriveEnd, FanEnd };

inline const char* to_string(SensorPosition p) {
    return p == SensorPosition::DriveEnd ? "DE" : "FE";
}

inline SensorPosition sensor_position_from_string(const std::string& s) {
    if (s == "DE" || s == "de" || s == "drive-end" || s == "driveend") return SensorPosition::DriveEnd;
    if (s == "FE" || s == "fe" || s == "fan-end" || s == "fanend") return SensorPosition::FanEnd;
    fail("InvalidParameter", "unknown sensor position '" + s + "'");
}

enum class FaultKind { Normal, InnerRace, OuterRace, RollingElement };

inline const char* to_string(FaultKind k) {
    switch (k) {
        case FaultKind::Normal: return "normal";
        case FaultKind::InnerRace: return "inner_race";
        case FaultKind::OuterRace: return "outer_race";
        case FaultKind::RollingElement: return "rolling_element";
    }
    return "?";
}

inline FaultKind fault_kind_from_string(const std::string& s) {
    if (s == "normal") return FaultKind::Normal;
    if (s == "inner_race" || s == "inner") return FaultKind::InnerRace;
    if (s == "outer_race" || s == "outer") return FaultKind::OuterRace;
    if (s == "rolling_element" || s == "ball" || s == "rolling") return FaultKind::RollingElement;
    fail("InvalidParameter", "unknown fault kind '" + s + "'");
}

// Defect diameters present in the CWRU recordings, in inches.
constexpr double kFaultSizesInches[3] = {0.007, 0.014, 0.021};

// 0/1/2 for the three known sizes, -1 otherwise.
inline int size_index(double inches) {
    for (int i = 0; i < 3; ++i)
        if (std::fabs(inches - kFaultSizesInches[i]) < 1e-9) return i;
    return -1;
}

struct FaultAnnotation {
    FaultKind kind = FaultKind::Normal;
    std::optional<double> size_inches;  // absent iff kind == Normal

    void validate() const {
        if (kind == FaultKind::Normal) {
            if (size_inches) fail("InvalidAnnotation", "Normal must not carry a fault size");
        } else {
            if (!size_inches) fail("InvalidAnnotation", "fault annotation requires a size");
            if (size_index(*size_inches) < 0)
                fail("InvalidAnnotation", "fault size must be one of 0.007/0.014/0.021 inches");
        }
    }
};

// One vibration recording plus the context needed downstream (operating
// condition, sensor position, fault annotation).
struct TimeSeriesSignal {
    std::vector<double> samples;
    double sampling_rate_hz = 12000.0;
    SensorPosition sensor_position = SensorPosition::DriveEnd;
    int load_hp = 0;
    int speed_rpm = 1797;
    FaultAnnotation fault;
    std::string source_id;

    void validate() const {
        if (samples.empty()) fail("InvalidSignal", "empty sample sequence");
        for (double v : samples)
            if (!std::isfinite(v)) fail("InvalidSignal", "non-finite sample in " + source_id);
        if (!(sampling_rate_hz > 0.0)) fail("InvalidSignal", "sampling rate must be positive");
        if (speed_rpm < 1 || speed_rpm > 100000) fail("InvalidSignal", "speed_rpm out of range");
        if (load_hp < 0 || load_hp > 3) fail("InvalidSignal", "load_hp must be 0..3");
        fault.validate();
    }
};

// Nominal shaft speeds for the four motor loads (0..3 hp).
constexpr int kSpeedRpmForLoad[4] = {1797, 1772, 1750, 1730};

}  // namespace fdkit
