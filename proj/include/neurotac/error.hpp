#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace neurotac {

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(what + ": " + path.string()), path_(path) {}

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// A file was read but its contents are malformed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(what + ": " + path.string()), path_(path) {}

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace neurotac
