#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace shapereg {

/// A caller broke a documented precondition (negative count, mismatched
/// dimensions, out-of-range parameter).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Search or segmentation configuration failed validation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// File was readable but its contents do not parse as the expected format.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, const std::string& what,
              std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(compose(path, what, offset)),
        path_(std::move(path)),
        offset_(offset) {}

  const std::string& path() const noexcept { return path_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  static std::string compose(const std::string& path, const std::string& what,
                             std::optional<std::size_t> offset) {
    std::string msg = path + ": " + what;
    if (offset) msg += " (at byte " + std::to_string(*offset) + ")";
    return msg;
  }

  std::string path_;
  std::optional<std::size_t> offset_;
};

}  // namespace shapereg
