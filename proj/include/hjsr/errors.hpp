#ifndef HJSR_ERRORS_HPP_
#define HJSR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hjsr {

struct DimensionError : std::invalid_argument {
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hjsr

#endif  // HJSR_ERRORS_HPP_
