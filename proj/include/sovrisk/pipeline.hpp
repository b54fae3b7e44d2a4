#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sovrisk/config.hpp"
#include "sovrisk/table.hpp"

namespace sovrisk {

// Command implementations behind the CLI. Each reads/writes plain files in
// the workspace directory, is deterministic given (inputs, config, seed),
// and throws DataError (user error) or NumericError (numerical failure).

struct IngestReport {
    int monthly_rows = 0;
    int monthly_gap_months = 0;
    int event_count = 0;
    int event_months = 0; // distinct calendar months with an active event
    int daily_rows = 0;
    bool events_empty_warning = false;
};

// Validates and normalizes the three input files into `workspace`
// (monthly.csv, events.csv, daily.csv) and writes ingest_report.txt.
IngestReport cmd_ingest(const std::string& monthly_csv, const std::string& events_csv,
                        const std::optional<std::string>& daily_csv,
                        const std::string& workspace);

// Builds derived columns (returns, spread, liquidity, event dummies,
// cumulative counts, band-pass output) into features.csv per the [features]
// and [filter:*] config sections.
void cmd_features(const std::string& workspace, const Config& cfg);

// One row per configured event filter: n, CAAR, adjusted Patell, GRANKT.
Table cmd_eventstudy(const std::string& workspace, const Config& cfg);

// One report column per [garch:*] section; non-convergence is flagged in the
// output rather than thrown.
Table cmd_garch(const std::string& workspace, const Config& cfg, uint64_t seed);

// Heckman (and optional IV-GMM) reports per the [select] section.
Table cmd_select(const std::string& workspace, const Config& cfg);

// Regenerates a combined human-readable summary of every report present in
// the workspace.
std::string cmd_report(const std::string& workspace);

} // namespace sovrisk
