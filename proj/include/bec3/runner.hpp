#pragma once

#include <string>

#include "bec3/config.hpp"

namespace bec3::runner {

/// Executes a validated config: runs the solvers and writes the artifact
/// files into the output directory. Returns the process exit status
/// (0 success, 1 solver failure). Configuration problems throw ConfigError.
int run(const config::RunConfig& cfg);

/// Writes a machine-readable error record into the output directory.
void write_error_record(const std::string& directory, const std::string& type,
                        const std::string& message);

}  // namespace bec3::runner
