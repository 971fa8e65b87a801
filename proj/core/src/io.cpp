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

#include "newsrec/io.hpp"

#include <filesystem>
#include <sstream>

#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

namespace newsrec::io {

std::ofstream open_output(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::out | std::ios::binary | std::ios::trunc
                                 : std::ios::out | std::ios::trunc);
  if (!out) throw Error(cat("cannot open file for writing: ", path));
  return out;
}

std::ifstream open_input(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::in | std::ios::binary : std::ios::in);
  if (!in) throw Error(cat("cannot open file for reading: ", path));
  return in;
}

void write_u32(std::ostream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

void write_u64(std::ostream& out, std::uint64_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

void write_bytes(std::ostream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

void write_string(std::ostream& out, const std::string& value) {
  write_u32(out, static_cast<std::uint32_t>(value.size()));
  write_bytes(out, value.data(), value.size());
}

std::uint32_t read_u32(std::istream& in, const std::string& context) {
  std::uint32_t value = 0;
  read_bytes(in, &value, sizeof(value), context);
  return value;
}

std::uint64_t read_u64(std::istream& in, const std::string& context) {
  std::uint64_t value = 0;
  read_bytes(in, &value, sizeof(value), context);
  return value;
}

void read_bytes(std::istream& in, void* data, std::size_t size, const std::string& context) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) {
    throw Error(cat("corrupt or truncated file: ", context));
  }
}

std::string read_string(std::istream& in, const std::string& context) {
  const std::uint32_t size = read_u32(in, context);
  std::string value(size, '\0');
  if (size > 0) read_bytes(in, value.data(), size, context);
  return value;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_input(path, false);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path, false);
  out << content;
  if (!out) throw Error(cat("failed writing file: ", path));
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

}  // namespace newsrec::io
