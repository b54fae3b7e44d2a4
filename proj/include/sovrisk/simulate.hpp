#pragma once

#include <cstdint>
#include <string>

#include "sovrisk/config.hpp"

namespace sovrisk {

// Generates a synthetic workspace under `outdir`: monthly.csv (yields, a
// benchmark consol yield, and control series), events.csv drawn from the
// configured composition, optional daily.csv around one event, and
// manifest.csv recording the data-generating truth for recovery scoring.
// Deterministic given (config, seed).
void simulate_workspace(const Config& cfg, uint64_t seed, const std::string& outdir);

} // namespace sovrisk
