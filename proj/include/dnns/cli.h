#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dnns/config.h"
#include "dnns/simulator.h"

namespace dnns {

// Entry point of the `dnns` tool. args[0] is the program name. Returns the
// process exit code; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "# seed=<s> config_hash=<hex>" provenance line written atop every output.
std::string provenance(std::uint64_t seed, std::uint64_t hash);

// Per-trial and pooled summary rows for one campaign, in algorithm order.
std::string campaign_summary_csv(const RunReport& rep, const SimConfig& cfg, const std::string& comment);

// Writes records_<algo>_t<trial>.csv and summary.csv into dir.
void write_campaign(const RunReport& rep, const SimConfig& cfg, const std::string& dir);

}  // namespace dnns
