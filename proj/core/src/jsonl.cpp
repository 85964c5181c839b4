#include "cateval/jsonl.hpp"

#include <fstream>

#include "cateval/errors.hpp"

namespace cateval {

JsonlReadResult read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EnvironmentError("cannot open " + path.string());
  JsonlReadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      out.errors.push_back({line_no, "malformed json"});
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw EnvironmentError("cannot write " + path.string());
  for (const auto& rec : records) out << rec.dump() << '\n';
  if (!out) throw EnvironmentError("write failed for " + path.string());
}

void append_jsonl(const std::filesystem::path& path, const json& record) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw EnvironmentError("cannot append to " + path.string());
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw EnvironmentError("append failed for " + path.string());
}

}  // namespace cateval
