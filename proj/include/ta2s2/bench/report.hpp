#ifndef TA2S2_BENCH_REPORT_HPP_
#define TA2S2_BENCH_REPORT_HPP_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ta2s2/tmcmc.hpp"

namespace ta2s2::bench {

using json = nlohmann::ordered_json;

std::string to_string(PriorKind kind);
PriorKind prior_kind_from_string(const std::string& name);
std::string to_string(ExponentConvention convention);
ExponentConvention exponent_convention_from_string(const std::string& name);

// Sampler settings. Worker count is left out: it never changes results and
// is reported under "timings" instead.
json to_json(const RunConfig& cfg);

// [{tau, ess}, ...] for the levels after the initial one.
json ladder_json(const RunReport& report);

// Per-level stall/crumb statistics.
json level_diagnostics_json(const RunReport& report);

// Count, per-coordinate mean/std and the minimum-H sample.
json samples_summary_json(const WeightedSampleSet& samples, const KernelConfig& kernel);

json timings_json(const RunReport& report, int workers);

// Recursively drops every "timings" member.
json strip_timings(json j);

void write_json(const std::filesystem::path& path, const json& j);

}  // namespace ta2s2::bench

#endif  // TA2S2_BENCH_REPORT_HPP_
