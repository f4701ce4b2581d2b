#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "masv/agent/system.hpp"
#include "masv/spec/validate.hpp"

namespace masv::testing {

std::filesystem::path fixture_path(const std::string& name);
std::filesystem::path golden_path(const std::string& name);
std::string read_text(const std::filesystem::path& p);

/// Loads a spec or fails the calling test with its diagnostics.
spec::ValidatedSpec load_fixture(const std::string& name);
spec::ValidatedSpec load_text(const std::string& text);
std::unique_ptr<agent::AgentSystem> system_for(const std::string& fixture);
std::unique_ptr<agent::AgentSystem> system_from_text(const std::string& text);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Runs the masv binary with `args` (a shell-quoted string). Captures
/// stdout, plus stderr when `with_stderr`.
CommandResult run_masv(const std::string& args, bool with_stderr = false);

}  // namespace masv::testing
