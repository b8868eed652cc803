#include "prefixseal/cli/password.hpp"

#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "prefixseal/error.hpp"

namespace prefixseal::cli {

namespace {

std::string prompt_on_tty() {
    std::FILE* tty = std::fopen("/dev/tty", "r+");
    if (tty == nullptr) throw Error(ErrorCode::MissingPassword, "no terminal available for the password prompt");
    const int fd = fileno(tty);
    termios saved{};
    const bool have_termios = tcgetattr(fd, &saved) == 0;
    if (have_termios) {
        termios quiet = saved;
        quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
        tcsetattr(fd, TCSAFLUSH, &quiet);
    }
    std::fputs("Password: ", tty);
    std::fflush(tty);
    std::string line;
    for (int c; (c = std::fgetc(tty)) != EOF && c != '\n';) line.push_back(static_cast<char>(c));
    if (have_termios) tcsetattr(fd, TCSAFLUSH, &saved);
    std::fputs("\n", tty);
    std::fclose(tty);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace

std::string obtain_password() {
    if (const char* env = std::getenv(kPasswordEnv); env != nullptr && *env != '\0') return env;
    if (isatty(STDIN_FILENO) == 0)
        throw Error(ErrorCode::MissingPassword, std::string("set ") + kPasswordEnv + " or run interactively");
    std::string pw = prompt_on_tty();
    if (pw.empty()) throw Error(ErrorCode::MissingPassword, "empty password");
    return pw;
}

std::string obtain_pepper() {
    const char* env = std::getenv(kPepperEnv);
    return env == nullptr ? std::string() : std::string(env);
}

} // namespace prefixseal::cli
