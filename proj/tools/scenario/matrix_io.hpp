#pragma once

#include <filesystem>
#include <string_view>

#include "nessresp/operator.hpp"

namespace nessresp::scenario {

/// "1.5", "-2i", "0.5-0.25i", "1e-3+2E+1i" and friends.
/// Throws std::invalid_argument on anything else.
cplx parse_complex(std::string_view token);

/// Plain-text complex matrix: one row per line, whitespace separated entries,
/// '#' starts a comment. Throws std::runtime_error naming file and line.
Matrix read_matrix_file(const std::filesystem::path& path);

}  // namespace nessresp::scenario
