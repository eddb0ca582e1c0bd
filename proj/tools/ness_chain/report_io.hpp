#pragma once

#include <string>

#include <json.hpp>

#include "ness/currents.hpp"
#include "ness/kernel_table.hpp"
#include "ness_chain/run_config.hpp"

namespace ness::cli {

/// 17 significant digits, "nan"/"inf" spelled out; stable across runs.
std::string format_number(double x);

nlohmann::json report_to_json(const CurrentReport& rep, const RunConfig& cfg);
nlohmann::json table_to_json(const KernelTable& table);

/// Long-form CSV: quantity,order,site,source,value,cutoff_dependent (sites 1-based).
std::string report_to_csv(const CurrentReport& rep);

/// Quotes a CSV field when it contains separators or quotes.
std::string csv_field(const std::string& s);

}  // namespace ness::cli
