#include "biphoton/tags.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace biphoton {

namespace {

// Deterministic draws layered over mt19937_64 raw output, so streams do not
// depend on library distribution internals beyond the engine itself.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 64.0) {  // Knuth multiplication
            const double limit = std::exp(-mean);
            std::uint64_t n = 0;
            double product = uniform();
            while (product > limit) {
                ++n;
                product *= uniform();
            }
            return n;
        }
        // split recursively so the multiplication never underflows
        const std::uint64_t half = poisson(0.5 * mean);
        return half + poisson(mean - 0.5 * mean);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

enum Channel : std::uint8_t { kAPlus = 0, kAMinus = 1, kBPlus = 2, kBMinus = 3 };

}  // namespace

void TagStream::validate() const {
    if (ticks_per_second == 0) throw std::invalid_argument("ticks_per_second is zero");
    std::uint64_t last = 0;
    for (const TagEvent& e : events) {
        if (e.channel > 3)
            throw std::invalid_argument("tag channel out of range 0..3");
        if (e.t < last)
            throw std::invalid_argument("tag timestamps are not monotone");
        if (e.t >= duration_ticks)
            throw std::invalid_argument("tag timestamp beyond the stream duration");
        last = e.t;
    }
}

void SimConfig::validate() const {
    if (!(pair_rate >= 0.0)) throw std::invalid_argument("pair rate must be >= 0");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("efficiency must lie in [0, 1]");
    if (!(dark_rate >= 0.0)) throw std::invalid_argument("dark rate must be >= 0");
    if (!(jitter_sigma >= 0.0)) throw std::invalid_argument("jitter must be >= 0");
}

TagStream simulate_tags(const SimConfig& config, const quad::Settings& settings) {
    config.validate();

    TagStream stream;
    stream.duration_ticks = static_cast<std::uint64_t>(
        std::llround(config.duration * static_cast<double>(stream.ticks_per_second)));
    const double duration_ticks = static_cast<double>(stream.duration_ticks);

    // Split-pair outcome weights from the model rates at this setting.
    const CoincidenceRates rates =
        general_rates(config.angles, config.point, config.filter, settings);
    const double total = rates.total();
    double split_cdf[4] = {0.25, 0.5, 0.75, 1.0};
    if (total > 0.0) {
        split_cdf[0] = rates.rpp / total;
        split_cdf[1] = split_cdf[0] + rates.rpm / total;
        split_cdf[2] = split_cdf[1] + rates.rmp / total;
        split_cdf[3] = 1.0;
    }

    // Independent single-photon projection probabilities for same-side pairs:
    // P(+ | H) = cos^2 2theta, P(+ | V) = sin^2 2theta after the HWP.
    auto plus_given_h = [](double theta) {
        const double c = std::cos(2.0 * theta);
        return c * c;
    };
    const double p_plus_h[2] = {plus_given_h(config.angles.alpha),
                                plus_given_h(config.angles.beta)};

    Rng rng(config.seed);
    std::vector<TagEvent> events;

    auto emit = [&](std::uint8_t channel, double t_ticks) {
        if (rng.uniform() >= config.efficiency) return;
        const double jittered = t_ticks + config.jitter_sigma * rng.normal();
        if (jittered < 0.0 || jittered >= duration_ticks) return;
        events.push_back({channel, static_cast<std::uint64_t>(jittered)});
    };

    const std::uint64_t pairs = rng.poisson(config.pair_rate * config.duration);
    for (std::uint64_t i = 0; i < pairs; ++i) {
        const double birth = rng.uniform() * duration_ticks;
        const double route = rng.uniform();
        if (route < 0.5) {
            // split: one photon each side, joint outcome from the model
            const double u = rng.uniform();
            std::uint8_t a_ch, b_ch;
            if (u < split_cdf[0]) {
                a_ch = kAPlus;
                b_ch = kBPlus;
            } else if (u < split_cdf[1]) {
                a_ch = kAPlus;
                b_ch = kBMinus;
            } else if (u < split_cdf[2]) {
                a_ch = kAMinus;
                b_ch = kBPlus;
            } else {
                a_ch = kAMinus;
                b_ch = kBMinus;
            }
            emit(a_ch, birth);
            emit(b_ch, birth);
        } else {
            // both photons to one side; H and V projected independently
            const bool alice = route < 0.75;
            const int side = alice ? 0 : 1;
            const std::uint8_t plus = alice ? kAPlus : kBPlus;
            const std::uint8_t minus = alice ? kAMinus : kBMinus;
            const double ph = p_plus_h[side];
            emit(rng.uniform() < ph ? plus : minus, birth);         // H photon
            emit(rng.uniform() < 1.0 - ph ? plus : minus, birth);   // V photon
        }
    }

    // dark counts are not subject to the detection-efficiency thinning
    for (std::uint8_t channel = 0; channel < 4; ++channel) {
        const std::uint64_t darks = rng.poisson(config.dark_rate * config.duration);
        for (std::uint64_t i = 0; i < darks; ++i) {
            const double t = rng.uniform() * duration_ticks;
            events.push_back({channel, static_cast<std::uint64_t>(t)});
        }
    }

    std::sort(events.begin(), events.end(), [](const TagEvent& a, const TagEvent& b) {
        return a.t != b.t ? a.t < b.t : a.channel < b.channel;
    });
    stream.events = std::move(events);
    return stream;
}

namespace {

struct CandidatePair {
    std::uint64_t gap;
    std::uint32_t first, second;  // indices into the adjusted event list
};

struct AdjustedEvent {
    std::int64_t t;
    std::uint8_t channel;
};

// Greedy nearest-in-time matching: candidates sorted by gap, every event
// consumed at most once. Ties break on position, so results do not depend
// on construction order. Returns the number of events with several
// candidates, for the ambiguity diagnostic.
template <class Accept, class Tally>
std::uint64_t greedy_match(const std::vector<AdjustedEvent>& events, double window,
                           Accept&& partners, Tally&& tally) {
    std::vector<CandidatePair> candidates;
    std::vector<std::uint32_t> candidate_count(events.size(), 0);
    const auto w = static_cast<std::int64_t>(window);

    std::size_t lo = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        while (lo < i && events[i].t - events[lo].t > w) ++lo;
        for (std::size_t j = lo; j < i; ++j) {
            if (!partners(events[j].channel, events[i].channel)) continue;
            candidates.push_back({static_cast<std::uint64_t>(events[i].t - events[j].t),
                                  static_cast<std::uint32_t>(j),
                                  static_cast<std::uint32_t>(i)});
            ++candidate_count[i];
            ++candidate_count[j];
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const CandidatePair& a, const CandidatePair& b) {
                  if (a.gap != b.gap) return a.gap < b.gap;
                  if (a.first != b.first) return a.first < b.first;
                  return a.second < b.second;
              });

    std::vector<char> consumed(events.size(), 0);
    for (const CandidatePair& c : candidates) {
        if (consumed[c.first] || consumed[c.second]) continue;
        consumed[c.first] = consumed[c.second] = 1;
        tally(events[c.first], events[c.second]);
    }

    std::uint64_t multi = 0;
    for (std::uint32_t n : candidate_count) multi += (n > 1);
    return multi;
}

}  // namespace

CoincidenceReport analyze(const TagStream& stream, double window_ticks,
                          const std::array<std::int64_t, 4>& offsets) {
    stream.validate();
    if (!(window_ticks > 0.0))
        throw std::invalid_argument("coincidence window must be > 0");

    CoincidenceReport report;
    report.window = window_ticks;
    report.offsets = offsets;
    report.duration_seconds = stream.duration_seconds();

    std::vector<AdjustedEvent> events;
    events.reserve(stream.events.size());
    for (const TagEvent& e : stream.events) {
        events.push_back({static_cast<std::int64_t>(e.t) + offsets[e.channel],
                          e.channel});
        ++report.singles[e.channel];
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const AdjustedEvent& a, const AdjustedEvent& b) {
                         return a.t != b.t ? a.t < b.t : a.channel < b.channel;
                     });

    auto alice = [](std::uint8_t ch) { return ch <= 1; };
    const std::uint64_t multi = greedy_match(
        events, window_ticks,
        [&](std::uint8_t a, std::uint8_t b) { return alice(a) != alice(b); },
        [&](const AdjustedEvent& x, const AdjustedEvent& y) {
            const AdjustedEvent& a = alice(x.channel) ? x : y;
            const AdjustedEvent& b = alice(x.channel) ? y : x;
            const bool a_plus = a.channel == 0;
            const bool b_plus = b.channel == 2;
            if (a_plus && b_plus) ++report.rpp;
            else if (a_plus) ++report.rpm;
            else if (b_plus) ++report.rmp;
            else ++report.rmm;
        });

    greedy_match(events, window_ticks,
                 [](std::uint8_t a, std::uint8_t b) {
                     return (a == 0 && b == 1) || (a == 1 && b == 0);
                 },
                 [&](const AdjustedEvent&, const AdjustedEvent&) { ++report.doubles_aa; });
    greedy_match(events, window_ticks,
                 [](std::uint8_t a, std::uint8_t b) {
                     return (a == 2 && b == 3) || (a == 3 && b == 2);
                 },
                 [&](const AdjustedEvent&, const AdjustedEvent&) { ++report.doubles_bb; });

    // triples: transitions of the trailing-window distinct-channel count to >= 3
    {
        const auto w = static_cast<std::int64_t>(window_ticks);
        std::size_t lo = 0;
        bool in_triple = false;
        std::array<std::uint32_t, 4> in_window{};
        std::uint32_t distinct = 0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            while (lo < i && events[i].t - events[lo].t > w) {
                if (--in_window[events[lo].channel] == 0) --distinct;
                ++lo;
            }
            if (in_window[events[i].channel]++ == 0) ++distinct;
            if (distinct >= 3) {
                if (!in_triple) ++report.triples;
                in_triple = true;
            } else {
                in_triple = false;
            }
        }
    }

    if (!events.empty()) {
        report.multiply_matchable_fraction =
            static_cast<double>(multi) / static_cast<double>(events.size());
        report.ambiguous = report.multiply_matchable_fraction > 0.10;
    }
    return report;
}

CorrelationEstimate correlation_from_report(const CoincidenceReport& report) {
    const double total = static_cast<double>(report.coincidences());
    if (!(total > 0.0))
        throw std::domain_error("correlation undefined: no coincidences in report");
    const double e = (static_cast<double>(report.rpp) - static_cast<double>(report.rpm) -
                      static_cast<double>(report.rmp) + static_cast<double>(report.rmm)) /
                     total;
    const double variance = std::max(1.0 - e * e, 0.0) / total;
    return {e, std::sqrt(variance)};
}

}  // namespace biphoton
