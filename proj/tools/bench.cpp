// Serial versus OpenMP timings for the three data-parallel kernels:
// temperature sweep rows, oracle tau grid, amplitude map rows.
#include <chrono>
#include <cstdio>

#include "biphoton/amplitude.hpp"
#include "biphoton/crystal.hpp"
#include "biphoton/oracle.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/sweep.hpp"

namespace bp = biphoton;

namespace {

template <class F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* kernel, double serial_ms, double parallel_ms) {
    std::printf("%-16s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n", kernel,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
    std::printf("OpenMP threads available: %s\n",
                bp::parallel_available() ? "yes" : "no (serial fallback)");

    const bp::CrystalConfig config;
    const bp::FilterSpec filter = bp::FilterSpec::gaussian(7.8);

    {
        const bp::SweepRequest request{5.0, 35.1, 0.01};
        std::vector<bp::SweepRow> serial, parallel;
        const double ts = time_ms(
            [&] { serial = bp::temperature_sweep_serial(config, filter, request); });
        const double tp =
            time_ms([&] { parallel = bp::temperature_sweep(config, filter, request); });
        report("sweep", ts, tp);
        if (serial.size() != parallel.size()) std::printf("  MISMATCH in row count!\n");
    }
    {
        const bp::HwpAngles angles{0.3, 1.1};
        const bp::OperatingPoint point{5.0, -1.0};
        bp::OracleOptions options;
        options.points_per_unit = 512.0;
        bp::OracleResult serial, parallel;
        const double ts = time_ms(
            [&] { serial = bp::oracle_rates_serial(angles, point, filter, options); });
        const double tp =
            time_ms([&] { parallel = bp::oracle_rates(angles, point, filter, options); });
        report("oracle grid", ts, tp);
        if (serial.rates.rpp != parallel.rates.rpp)
            std::printf("  MISMATCH between serial and parallel oracle!\n");
    }
    {
        bp::GridSpec grid;
        grid.na = grid.nb = 161;
        const bp::OperatingPoint point{5.0, -1.0};
        std::vector<bp::AmplitudeSample> serial, parallel;
        const double ts = time_ms([&] {
            serial = bp::amplitude_map_serial(grid, point, bp::FilterSpec::gaussian(1.0),
                                              40.0);
        });
        const double tp = time_ms([&] {
            parallel = bp::amplitude_map(grid, point, bp::FilterSpec::gaussian(1.0), 40.0);
        });
        report("amplitude map", ts, tp);
        if (serial.size() != parallel.size()) std::printf("  MISMATCH in sample count!\n");
    }
    return 0;
}
