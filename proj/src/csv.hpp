// Copyright 2026 The FTT Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal RFC 4180 reader for the GMNS tables.

#ifndef FTT_SRC_CSV_HPP_
#define FTT_SRC_CSV_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ftt::csv {

struct Table {
  std::string source;  // file name used in error messages
  std::vector<std::string> header;
  // Each row keeps its 1-based line number in the file.
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

  // kNoColumn when absent.
  std::size_t column(std::string_view name) const;
  // Throws kMissingColumn.
  std::size_t required_column(std::string_view name) const;
};

inline constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

// An empty file yields an empty header and no rows.
Table Read(const std::filesystem::path& path);

std::vector<std::string> SplitLine(std::string_view line);

std::optional<double> ParseDouble(std::string_view text);
std::optional<long long> ParseInteger(std::string_view text);

}  // namespace ftt::csv

#endif  // FTT_SRC_CSV_HPP_
