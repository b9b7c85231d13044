#pragma once

#include <string>
#include <variant>

namespace hsmsim {

// Client talks to the host holding the data.
struct Direct {
    friend bool operator==(const Direct &, const Direct &) = default;
};
// Data is forwarded through another host.
struct Relay {
    std::string via;
    friend bool operator==(const Relay &, const Relay &) = default;
};
using DataPath = std::variant<Direct, Relay>;

}  // namespace hsmsim
