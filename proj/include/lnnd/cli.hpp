#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lnnd::cli {

/// Exit codes of `run`.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConvergence = 2;
inline constexpr int kStatistical = 3;

/// Entry point of lnnd_lab. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Sectioned key = value file. Repeated keys are kept in order.
struct Manifest {
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;

  static Manifest parse(const std::string& text, const std::string& origin);
  std::vector<std::string> values(const std::string& section, const std::string& key) const;
};

}  // namespace lnnd::cli
