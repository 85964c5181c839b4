#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cateval {

using json = nlohmann::json;

/// One bad line from a newline-delimited record file.
struct RecordError {
  std::size_t line_no = 0;  // 1-based
  std::string message;
};

struct JsonlReadResult {
  std::vector<json> records;
  std::vector<RecordError> errors;
};

/// Reads a .jsonl file. Malformed lines are collected, not fatal; blank
/// lines are skipped. Throws EnvironmentError if the file cannot be opened.
JsonlReadResult read_jsonl(const std::filesystem::path& path);

/// Writes records one per line. Throws EnvironmentError on I/O failure.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

/// Appends a single record and flushes; used by the response journal.
void append_jsonl(const std::filesystem::path& path, const json& record);

}  // namespace cateval
