#ifndef TRIFLOW_CLI_HPP
#define TRIFLOW_CLI_HPP

namespace triflow {

/// Command-line entry point with subcommands run / mms / check-mesh /
/// version. Returns the process exit code: 0 on success, 2 for usage errors,
/// 3 for configuration errors, 4 for mesh errors, 5 for runtime failures.
int cli_main(int argc, const char* const* argv);

}  // namespace triflow

#endif
