#pragma once

#include <string_view>
#include <vector>

#include "gridcast/data.hpp"

namespace gridcast {

// Rolling feeds the true observation back after every step; static feeds
// the model's own prediction, producing a recursive multi-step forecast.
enum class EvalMode { Rolling, Static };

EvalMode parse_eval_mode(std::string_view text);
std::string_view to_string(EvalMode mode);

struct ForecastSeries {
	std::vector<data::TimePoint> timestamps;
	std::vector<double> predicted;
	std::vector<double> actual; // empty when no ground truth is attached

	std::size_t size() const { return predicted.size(); }
};

} // namespace gridcast
