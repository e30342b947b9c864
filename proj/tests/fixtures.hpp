#pragma once

#include <string>

#include "hfh/pipeline.hpp"

namespace hfh::testing {

/// Standard map k = 1.2, automatic depth, wide scan on; computed once per process with its step
/// outputs written to step_dir().
const PipelineResult& standard_run();
std::string step_dir();

RunConfig standard_config(double k = 1.2);

}  // namespace hfh::testing
