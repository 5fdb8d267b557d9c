#pragma once

#include <stdexcept>
#include <string>

namespace sqz {

// Unphysical or out-of-range argument. Never clamped silently.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string &what) : std::domain_error(what) {}
};

// Config parse/validation failure; carries the full error listing.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string &what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string &what) : std::runtime_error(what) {}
};

} // namespace sqz
