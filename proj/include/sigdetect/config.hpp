// config.hpp - flat key = value configuration files with '#' comments.
#pragma once

#include <map>
#include <string>

namespace sigdetect {

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text);
ConfigMap load_config(const std::string& path);

/// Overlay wins on conflicts (CLI flags override the file).
ConfigMap merge_config(const ConfigMap& base, const ConfigMap& overlay);

}  // namespace sigdetect
