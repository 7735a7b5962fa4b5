#pragma once

#include <stdexcept>
#include <string>

namespace qdist {

// Malformed input text (DIMACS, LRAT, JSON shapes). Carries a 1-based line
// number when the format is line-oriented; 0 means "not line-specific".
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &msg, size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    size_t line() const { return line_; }

  private:
    size_t line_;
};

// A derived result failed its independent re-check. This is never a user
// error: it means an encoder or solver produced something inconsistent.
class SoundnessError : public std::runtime_error {
  public:
    explicit SoundnessError(const std::string &msg) : std::runtime_error(msg) {}
};

// A code failed a structural precondition (e.g. CSS orthogonality).
class InvalidCodeError : public std::runtime_error {
  public:
    explicit InvalidCodeError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace qdist
