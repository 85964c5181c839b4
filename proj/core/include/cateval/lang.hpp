#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cateval {

/// Closed registry of source-language tags. Dataset loaders and the harness
/// reject tags outside this set.
namespace lang {

inline constexpr const char* kJava = "java";
inline constexpr const char* kPython = "python";
inline constexpr const char* kJavaScript = "javascript";

const std::vector<std::string>& all();
bool known(const std::string& tag);

/// Normalizes aliases ("py" -> "python", "js" -> "javascript", case folds);
/// nullopt for tags outside the registry.
std::optional<std::string> normalize(const std::string& tag);

}  // namespace lang

}  // namespace cateval
