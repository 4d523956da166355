// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evomerge {

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace evomerge
