#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dynsys/sysdef.hpp"

namespace dynsys {

struct Diagnostic {
  int line = 0;  // 1-based
  int col = 0;   // 1-based byte column
  std::string message;

  std::string str() const;
};

struct ParseResult {
  std::optional<SystemDef> system;
  std::optional<Diagnostic> error;

  bool ok() const { return system.has_value(); }
};

/// Parses a .dsys document. Total: any byte sequence either parses or yields
/// a positioned diagnostic; never throws on malformed input.
ParseResult parse_system_def(std::string_view text);

/// Canonical .dsys emission; parse_system_def(emit_dsys(s)) is equivalent to
/// s rule-by-rule.
std::string emit_dsys(const SystemDef& sys);

/// Loads a system by built-in name or .dsys file path (values containing a
/// path separator or ending in .dsys are treated as paths).
struct LoadResult {
  std::optional<SystemDef> system;
  std::string error;
};
LoadResult load_system(const std::string& name_or_path);

}  // namespace dynsys
