#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mechlearn/harness.hpp"

namespace mechlearn {

// Canonical tokens used in trace CSVs.
//   arrival      "b0;b2"
//   prices       "3;0;8" (empty in fixed-price mode)
//   allocation   "b0:i1|i2;b2:-" over the arriving buyers
//   winner set   "b0;b2" ("-" when nobody wins)
std::string arrival_token(const BuyerSet& arrival);
std::string prices_token(const std::optional<std::vector<int>>& prices);
std::string observation_token(const Observation& obs, const BuyerSet& arrival);

// Header `t,arrival,prices,predicted,truth,mistake,cumulative,events`, one
// LF-terminated line per record. Deterministic in the trace.
std::string emit_csv(const std::vector<TraceRecord>& trace);
void write_csv(const std::vector<TraceRecord>& trace, const std::filesystem::path& path);

// {learner, n, m, V, total_mistakes, bound, pass, rounds, margin, formula,
//  event_counts, diagnostic}
std::string summary_to_json(const RunSummary& summary, int indent = 2);
// Reads back the fields written above; throws InputError when learner, n, m,
// V, total_mistakes, bound or pass is missing.
RunSummary summary_from_json(std::string_view text);

// Throws std::runtime_error when the file cannot be written or read.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace mechlearn
