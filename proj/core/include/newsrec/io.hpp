/*
 * Copyright 2026 The newsrec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NEWSREC_IO_HPP_
#define NEWSREC_IO_HPP_

#include <cstdint>
#include <fstream>
#include <string>

namespace newsrec::io {

// Binary formats are little-endian; the library targets little-endian hosts.

std::ofstream open_output(const std::string& path, bool binary = true);
std::ifstream open_input(const std::string& path, bool binary = true);

void write_u32(std::ostream& out, std::uint32_t value);
void write_u64(std::ostream& out, std::uint64_t value);
void write_bytes(std::ostream& out, const void* data, std::size_t size);
void write_string(std::ostream& out, const std::string& value);

// Readers throw Error naming `context` (typically the file path) when the
// stream ends early or is unreadable.
std::uint32_t read_u32(std::istream& in, const std::string& context);
std::uint64_t read_u64(std::istream& in, const std::string& context);
void read_bytes(std::istream& in, void* data, std::size_t size, const std::string& context);
std::string read_string(std::istream& in, const std::string& context);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

bool file_exists(const std::string& path);

}  // namespace newsrec::io

#endif  // NEWSREC_IO_HPP_
