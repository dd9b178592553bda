#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "biphoton/amplitude.hpp"
#include "biphoton/sweep.hpp"

namespace biphoton {

/// Measured-correlation CSV: columns T_C,E[,sigma], '.' decimal separator.
/// A header row and '#' comment lines are tolerated.
std::vector<MeasuredPoint> read_measured_csv(const std::filesystem::path& path);

/// Columns: T_C,m,E,I1,I2,Rpp,Rpm,relative_rate. Annotated (failed) rows
/// carry the note in a trailing comment.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Columns: tau_a,tau_b,re_first,im_first,re_second,im_second,re_sum,im_sum.
void write_amplitude_csv(std::ostream& out, const std::vector<AmplitudeSample>& samples);

}  // namespace biphoton
