#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pdncg/problems.hpp"
#include "pdncg/solver.hpp"

namespace pdncg::io {

/// Binary PGM (P5, maxval 255). Pixels are quantized as round(255 v) after
/// clamping to [0, 1]; reading maps back to v / 255.
void write_pgm(const std::filesystem::path& path, const Image& image);
Image read_pgm(const std::filesystem::path& path);
std::string encode_pgm(const Image& image);

/// Header "stage,iter,f,grad_norm,pcg_iters,alpha,backtracks,time_s".
std::string trace_csv(const std::vector<IterationRecord>& trace);

/// Flat key=value text, one pair per line, '#' starts a comment. Duplicate
/// keys and keys outside `allowed` throw std::invalid_argument naming the
/// line.
std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::set<std::string>& allowed);
std::map<std::string, std::string> read_config(const std::filesystem::path& path,
                                               const std::set<std::string>& allowed);

}  // namespace pdncg::io
