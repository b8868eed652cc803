#pragma once

#include <string>

namespace prefixseal::cli {

inline constexpr const char* kPasswordEnv = "PREFIXSEAL_PASSWORD";
inline constexpr const char* kPepperEnv = "PREFIXSEAL_PEPPER";

// PREFIXSEAL_PASSWORD, else an echo-free prompt on the controlling terminal
// when stdin is interactive. Throws MissingPassword otherwise. Passwords are
// never accepted on the command line.
std::string obtain_password();

// Optional application-wide pepper from PREFIXSEAL_PEPPER; empty when unset.
std::string obtain_pepper();

} // namespace prefixseal::cli
