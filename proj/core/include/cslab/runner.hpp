#pragma once

#include <exception>
#include <string>
#include <vector>

#include "cslab/config.hpp"

namespace cslab::cli {

/// Process exit codes, one per error class.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,         // anything not listed below
  kExitConfig = 2,        // ConfigError, command-line usage
  kExitInvalidInput = 3,  // InvalidInput, ContractViolation, CapacityError, UnsupportedQuery
  kExitNumerical = 4,     // NumericalError and subclasses
  kExitIo = 5,            // IoError
};

int exit_code(const std::exception& error) noexcept;

const char* version() noexcept;

struct RunReport {
  std::vector<std::string> data_files;  // relative to output_dir, manifest excluded
  std::string summary;                  // one human-readable line
};

/// Dispatches to the module and writes data files plus manifest.txt into
/// config.output_dir (created if missing). Data files are a pure function of
/// the config; the timestamp appears only in the manifest.
RunReport run(const config::RunConfig& config);

}  // namespace cslab::cli
