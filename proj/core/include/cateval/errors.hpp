#pragma once

#include <stdexcept>
#include <string>

namespace cateval {

/// Bad run configuration: unknown dataset, missing template, invalid spec.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The ambient environment is unusable for the requested operation
/// (missing toolchain, unwritable sandbox). Distinct from candidate failures.
struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Source text could not be lexed or parsed.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A morphism site was produced for a different source revision.
struct StaleSite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A rewrite produced text that no longer parses; the site is unusable.
struct RewriteFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No applicable site for a morphism kind at its turn in a chain.
struct InapplicableKind : std::runtime_error {
  InapplicableKind(const std::string& kind, std::size_t step)
      : std::runtime_error("no applicable site for " + kind + " at chain step " +
                           std::to_string(step)),
        kind_name(kind), step_index(step) {}
  std::string kind_name;
  std::size_t step_index;
};

}  // namespace cateval
