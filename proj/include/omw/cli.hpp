#ifndef OMW_CLI_HPP
#define OMW_CLI_HPP

namespace omw::cli {

// Exit codes: configuration problems, numerical failures (including a failed
// verification and under-truncation), and a non-positive witness difference
// where a positive one is required get distinct values.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoViolation = 4;

// Full command-line entry point (verify | sweep | optimize | feasibility |
// simulate). Never throws; errors are reported on stderr and mapped to the
// exit codes above.
int run(int argc, const char* const* argv);

}  // namespace omw::cli

#endif
