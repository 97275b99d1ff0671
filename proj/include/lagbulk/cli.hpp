#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lagbulk/ensembles.hpp"

namespace lagbulk::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kParameterFailure = 1;
inline constexpr int kGuardFailure = 2;

/// Runs the command line; args excludes the program name.  Results go to out
/// (or the --out file), diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Plain-text tridiagonal: line 1 k, line 2 the k diagonal entries, line 3 the
/// k-1 off-diagonal entries.
SymTridiagonal read_matrix(std::istream& in);
SymTridiagonal read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const SymTridiagonal& t);

}  // namespace lagbulk::cli
