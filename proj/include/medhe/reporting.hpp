#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "medhe/accounting.hpp"
#include "medhe/orchestrator.hpp"

namespace medhe {

/// Round CSV, one row per round.
std::string round_csv_header();
std::string round_csv_row(const RoundReport& r);

nlohmann::json round_to_json(const RoundReport& r);

/// JSON view of a breakdown, with the known published discrepancies flagged
/// in a "notes" array (the headline 32 MB vs the derived 30.5 MB, the HE-only
/// 6385 MB figure, the slot-model choice).
nlohmann::json breakdown_to_json(const CommBreakdown& br);

/// Human-readable five-step table mirroring the published derivation.
std::string render_breakdown_table(const CommBreakdown& br);

/// Minimal SVG line chart (one polyline per series) for plot-ready output.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series);

void write_text_file(const std::string& path, const std::string& content);

/// JSON-safe number: infinities are emitted as the string "infinite".
nlohmann::json json_number(double v);

std::string format_mb_1dp(uint64_t bytes);
std::string format_mb_2dp(uint64_t bytes);

}  // namespace medhe
