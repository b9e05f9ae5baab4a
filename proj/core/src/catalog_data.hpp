#pragma once

#include <array>
#include <span>
#include <string_view>

namespace dtss::detail {

struct EmbeddedFile {
  std::string_view name;
  std::string_view text;
  std::string_view sha256;
};

std::span<const EmbeddedFile> embedded_catalog_files();

}  // namespace dtss::detail
