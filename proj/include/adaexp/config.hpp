#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaexp/experiment.hpp"
#include "adaexp/montecarlo.hpp"
#include "adaexp/outcomes.hpp"
#include "adaexp/semisynthetic.hpp"

namespace adaexp {

std::string weighting_name(Weighting w);
std::optional<Weighting> parse_weighting(const std::string& name);

// Parsed run configuration. Sections are optional; each subcommand checks for
// the sections it needs. Schema violations and unknown keys raise
// ConfigError with an actionable message.
struct RunConfig {
  std::optional<OutcomeModel> outcome;
  std::optional<DesignConfig> design;  // includes the selection rule
  std::optional<StudyConfig> study;
  std::optional<SemiConfig> semi;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<std::string> warnings;  // soft assumption diagnostics
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Shifts arm 1's mean so that the signal sqrt(N)(mean0 - mean1) equals c;
// Gaussian models only (the histogram illustration config).
OutcomeModel model_with_signal(const OutcomeModel& base, double c, long n);

// Trial CSV round trip: a `# key=value,...` metadata line carrying e0,
// p2_arm0, the interim statistics, and sigma_hat, then a
// `stage,arm,outcome` table with stage in {1, 2}.
void write_trial_data(std::ostream& out, const TrialData& trial);
TrialData read_trial_data(std::istream& in);
TrialData load_trial_data(const std::string& path);

}  // namespace adaexp
