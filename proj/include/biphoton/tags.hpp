#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "biphoton/filter.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

/// One detector click. Channels: 0 = A+, 1 = A-, 2 = B+, 3 = B-.
/// Timestamps are integer ticks (picoseconds by default).
struct TagEvent {
    std::uint8_t channel = 0;
    std::uint64_t t = 0;

    friend bool operator==(const TagEvent&, const TagEvent&) = default;
};

/// Time-ordered click record shared by the simulator and the analyzer.
struct TagStream {
    std::uint64_t ticks_per_second = 1'000'000'000'000ull;  // picoseconds
    std::uint64_t duration_ticks = 0;
    std::vector<TagEvent> events;

    double duration_seconds() const {
        return static_cast<double>(duration_ticks) / static_cast<double>(ticks_per_second);
    }
    /// Monotone timestamps, channels in range, all t < duration.
    void validate() const;

    friend bool operator==(const TagStream&, const TagStream&) = default;
};

/// Monte Carlo source parameters. Pairs are born at uniform times, routed
/// both-to-Alice / both-to-Bob / split with weights 1/4, 1/4, 1/2; split
/// pairs draw their (+,-) outcome from general_rates, same-side pairs
/// project each photon independently. Every click is thinned by the
/// detector efficiency, jittered, and merged with per-detector dark counts.
struct SimConfig {
    double pair_rate = 1e5;    ///< produced pairs per second
    double duration = 1.0;     ///< seconds
    HwpAngles angles{0.39269908169872414, 0.39269908169872414};  // pi/8, pi/8
    OperatingPoint point{0.0, -1.0};
    FilterSpec filter = FilterSpec::gaussian(7.8);
    double efficiency = 0.60;     ///< per-detector detection probability
    double dark_rate = 25.0;      ///< per-detector dark counts per second
    double jitter_sigma = 50.0;   ///< Gaussian timing jitter, ticks
    std::uint64_t seed = 1;

    void validate() const;
};

/// Seed-deterministic tag-stream generation; identical configs give
/// byte-identical streams.
TagStream simulate_tags(const SimConfig& config, const quad::Settings& settings = {});

enum class TagFormat { binary, csv };

/// Binary layout (little-endian): magic "TTAG", version u8 = 1,
/// ticks_per_second u64, duration_ticks u64, then {channel u8, t u64}
/// records with no padding. CSV: header "channel,t_ps", one event per line.
void write_tags(const TagStream& stream, const std::filesystem::path& path,
                TagFormat format);

/// Reads either format (sniffed from the magic); rejects bad magic/version,
/// truncated records, out-of-range channels and non-monotone timestamps.
TagStream read_tags(const std::filesystem::path& path);

/// Tallies recovered from one pass over a stream.
struct CoincidenceReport {
    std::array<std::uint64_t, 4> singles{};  ///< clicks per channel
    std::uint64_t rpp = 0, rpm = 0, rmp = 0, rmm = 0;
    std::uint64_t doubles_aa = 0, doubles_bb = 0;
    std::uint64_t triples = 0;
    double window = 0.0;                      ///< ticks
    std::array<std::int64_t, 4> offsets{};    ///< ticks, added per channel
    double duration_seconds = 0.0;
    /// Fraction of events with more than one partner candidate; above 10%
    /// the pairing is flagged ambiguous.
    double multiply_matchable_fraction = 0.0;
    bool ambiguous = false;

    std::uint64_t coincidences() const { return rpp + rpm + rmp + rmm; }
};

/// Coincidence analysis: applies per-channel offsets, then pairs Alice and
/// Bob clicks within the window, greedy nearest-in-time with every click
/// consumed at most once. Doubles pair the two same-side detectors the same
/// way; a triple is counted whenever an arriving click raises the number of
/// distinct channels inside the trailing window to three or more.
CoincidenceReport analyze(const TagStream& stream, double window_ticks,
                          const std::array<std::int64_t, 4>& offsets = {});

struct CorrelationEstimate {
    double e = 0.0;
    double std_error = 0.0;
};

/// E = (rpp - rpm - rmp + rmm) / total with its binomial standard error.
/// Throws when the report holds no coincidences.
CorrelationEstimate correlation_from_report(const CoincidenceReport& report);

}  // namespace biphoton
