#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtsched {

// Command implementations behind the command-line front end. Each returns a
// process exit code: 0 success, 1 runtime failure, 2 parse/validation error,
// 3 oracle instance over the search bound. All output is buffered and
// written only on success, so a failing invocation emits no partial CSV.

int cmd_run(const std::string& scenario_path, const std::vector<std::string>& overrides,
            std::ostream& out, std::ostream& err, int threads = 1);

int cmd_oracle(const std::string& instance_path, std::ostream& out, std::ostream& err);

int cmd_list(std::ostream& out);

}  // namespace rtsched
