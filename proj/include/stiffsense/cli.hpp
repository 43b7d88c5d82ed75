#pragma once

namespace stiffsense::cli {

// Full command-line front end. Exit codes: 0 success, 1 verification bound
// failed, 2 invalid input, 3 overflow or solver failure during simulation.
int run(int argc, const char* const* argv);

}  // namespace stiffsense::cli
