#pragma once

#include <string>

#include "hrm3d/trend.hpp"

namespace hrm3d {

// Deterministic text renderings: the same report always produces the same
// bytes. Missing mean-depth values render as "NA".

std::string eval_csv(const EvalResult &result);
std::string eval_table(const EvalResult &result);

std::string sweep_csv(const TrendReport &report);
std::string sweep_table(const TrendReport &report);

// Hand-emitted chart of mean depth error against the height offset, one
// solid empirical polyline and one dashed closed-form polyline per model.
std::string sweep_svg(const TrendReport &report);

std::string oracle_csv(const OracleReport &report);
std::string oracle_table(const OracleReport &report);

std::string verification_text(const VerificationOutcome &outcome);

}  // namespace hrm3d
