#pragma once

#include <stdexcept>
#include <string>

namespace srxbar {

/// Raised when an experiment config file (or CLI override) is invalid.
/// The CLI maps this to exit code 2; everything else maps to 3.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested enumeration would exceed the configured cap.
class enumeration_limit_error : public std::length_error {
public:
    explicit enumeration_limit_error(const std::string& what) : std::length_error(what) {}
};

/// Raised when aging would collapse the conductance window.
class aging_collapse_error : public std::domain_error {
public:
    explicit aging_collapse_error(const std::string& what) : std::domain_error(what) {}
};

}  // namespace srxbar
