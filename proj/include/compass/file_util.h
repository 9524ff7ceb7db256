// Copyright 2026 The Compass Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMPASS_FILE_UTIL_H_
#define COMPASS_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace compass {

// Throws Error(kInvalidInput) "<path>: cannot read" on failure.
std::string ReadFile(const std::filesystem::path &path);
// Writes via a temporary file and rename.
void WriteFile(const std::filesystem::path &path, std::string_view contents);

}  // namespace compass

#endif  // COMPASS_FILE_UTIL_H_
