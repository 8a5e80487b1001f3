#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace keplerlab::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `key = value` lines; '#' starts a comment; blank lines are ignored. Keys are
/// long option names without the leading dashes. Order of appearance is kept.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text, const std::string& origin);

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

}  // namespace keplerlab::cli
