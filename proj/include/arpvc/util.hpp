// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace arpvc {

/// Runs fn(0..n-1) on up to `workers` threads (0 = hardware concurrency,
/// honoring ARPVC_WORKERS). Each index must be independent; callers aggregate
/// results in index order so output stays deterministic.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

int resolve_workers(int requested);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::vector<std::string> read_lines(const std::string& path);

/// FNV-1a 64 over a file's bytes; used to report model/stream checksums.
std::uint64_t file_checksum(const std::string& path);

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace arpvc
