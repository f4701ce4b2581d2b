#include "fixtures.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace masv::testing {

std::filesystem::path fixture_path(const std::string& name) { return std::filesystem::path(MASV_FIXTURES) / name; }

std::filesystem::path golden_path(const std::string& name) { return std::filesystem::path(MASV_GOLDEN) / name; }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

spec::ValidatedSpec load_text(const std::string& text) {
  auto r = spec::load_spec(text);
  if (!r) {
    std::string msg = "spec failed to load:";
    for (const auto& d : r.diagnostics) msg += "\n  " + d.format();
    throw std::runtime_error(msg);
  }
  return std::move(*r.spec);
}

spec::ValidatedSpec load_fixture(const std::string& name) { return load_text(read_text(fixture_path(name))); }

std::unique_ptr<agent::AgentSystem> system_for(const std::string& fixture) {
  return std::make_unique<agent::AgentSystem>(load_fixture(fixture));
}

std::unique_ptr<agent::AgentSystem> system_from_text(const std::string& text) {
  return std::make_unique<agent::AgentSystem>(load_text(text));
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("masv-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

CommandResult run_masv(const std::string& args, bool with_stderr) {
  std::string cmd = std::string("MASV_LOG=quiet '") + MASV_BIN + "' " + args +
                    (with_stderr ? " 2>&1" : " 2>/dev/null");
  CommandResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace masv::testing
