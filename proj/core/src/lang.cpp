#include "cateval/lang.hpp"

#include <algorithm>
#include <cctype>

namespace cateval::lang {

const std::vector<std::string>& all() {
  static const std::vector<std::string> tags = {kJava, kPython, kJavaScript};
  return tags;
}

bool known(const std::string& tag) {
  const auto& tags = all();
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::optional<std::string> normalize(const std::string& tag) {
  std::string t;
  t.reserve(tag.size());
  for (char c : tag) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "py" || t == "python" || t == "python3") return std::string(kPython);
  if (t == "js" || t == "javascript" || t == "node") return std::string(kJavaScript);
  if (t == "java") return std::string(kJava);
  return std::nullopt;
}

}  // namespace cateval::lang
