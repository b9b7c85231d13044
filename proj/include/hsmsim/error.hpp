#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsmsim {

// Bad scenario/config input: negative delays, empty sweeps, malformed profiles.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A scenario references something that does not exist (host, file, cartridge).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Broken engine invariant; aborts the run.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// FTP command-level failure (e.g. AUTH missing from an agreement).
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hsmsim
