// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aquacast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 2;
inline constexpr int kExitInternal = 3;

/// Parses `args` (without the program name), runs the subcommand and maps
/// errors to exit codes: 2 for bad input or configuration, 3 for violated
/// internal invariants.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aquacast::cli
