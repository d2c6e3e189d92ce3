#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace modspace::cli {

/// Runs one command line (without the program name). Exit status: 0 when every
/// asserted invariant holds, 2 when one fails, 1 on input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace modspace::cli
