#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "reins/model.hpp"

namespace reins {

/// 17-significant-digit decimal rendering; round-trips doubles exactly and
/// keeps CSV output byte-stable.
std::string format_g17(double v);

std::vector<double> linspace(double lo, double hi, int n);

/// Writes `value` into the config field addressed by a dotted path such as
/// "insurer.alpha" or "claims.lambda". The pseudo-path "eta" is accepted only
/// by the retention_feedback target, which needs the premium as an input.
/// Throws ConfigError for unknown paths.
void apply_param(ModelBundle& bundle, const std::string& dotted_path, double value);

struct SweepSpec {
    std::string param1;
    std::vector<double> values1;
    std::optional<std::string> param2;
    std::vector<double> values2;
    std::string target = "a0_star";  // a0_star | eta_star | pi_I | pi_R | retention_feedback
    double t_eval = 5.0;
    double eta_feedback = 0.7;  // premium used by retention_feedback unless "eta" is swept
    int jobs = 1;
};

/// Evaluates the sweep target on one fully-applied bundle.
double eval_sweep_target(const ModelBundle& bundle, const SweepSpec& spec, double eta_override);

/// Runs the cross product of sweep values, evaluating cells concurrently up to
/// spec.jobs, and emits CSV rows in deterministic ascending order. Failed cells
/// produce NaN rows and a diagnostic on `diag`. Returns the number of cells
/// that succeeded.
int run_sweep(const ModelBundle& base, const SweepSpec& spec, std::ostream& out,
              std::ostream& diag);

}  // namespace reins
