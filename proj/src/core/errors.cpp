#include "premlog/errors.hpp"

namespace premlog {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

LoadError::LoadError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

IterationCapExceeded::IterationCapExceeded(std::size_t cap)
    : Error("iteration cap of " + std::to_string(cap) +
            " exceeded (evaluation may not terminate)"),
      cap_(cap) {}

}  // namespace premlog
