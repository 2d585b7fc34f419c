#pragma once

#include <stdexcept>
#include <string>

namespace har {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data (dataset files, CSV reports).
class ParseError : public Error {
public:
    using Error::Error;
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what) {}
};

// Invalid configuration or argument combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace har
