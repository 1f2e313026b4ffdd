#pragma once

#include <string>

#include "cemkit/system.h"

namespace cemkit::toy {

// Bundled 3-zone demonstration system: ~8 technologies, storage, three
// corridors, hydro budgets, 8760-hour synthetic series, 6-period horizon with
// load growth, and IRA-style current policies.
SystemData make_system();

Scenario current_policies_scenario();
// National CO2 cap on the net-zero trajectory (scaled to toy size) with a
// $200/t buyout; no other policies.
Scenario net_zero_scenario();
// Scale factor mapping the national Mt schedule onto the toy system.
inline constexpr double kNetZeroCapScale = 2.0e-3;

Configuration base_config();
Configuration uc_config();
Configuration economic_retirement_config();
Configuration short_sample_config(int weeks = 20);
Configuration foresight_config(int weeks = 20);

// Writes system/, scenarios/ and configs/ under the directory.
void write_kit(const std::string& directory);

}  // namespace cemkit::toy
