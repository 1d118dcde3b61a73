#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dualscheme/common.hpp"

namespace dualscheme {

/// Thrown for malformed expression text; the message carries the column.
class ParseError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// A scalar arithmetic expression over x1..xd.
///
/// Grammar (usual precedence, '^' right-associative, unary minus binds looser
/// than '^' so -x1^2 == -(x1^2)):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | '+' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' index | func '(' args ')' | '(' expr ')' | 'pi'
///
/// Functions: abs, sin, cos, exp, log, sqrt (one argument); max, min (two or more).
///
/// Parsed text is compiled to a flat postfix program, so evaluation does not
/// allocate and an Expression is cheap to copy.
class Expression {
 public:
  static Expression parse(std::string_view text, int dimension);

  double operator()(const Vec& x) const;

  const std::string& text() const { return text_; }
  int dimension() const { return dimension_; }

  struct Instruction;

 private:
  Expression(std::string text, int dimension, std::shared_ptr<const std::vector<Instruction>> code,
             int max_stack);

  std::string text_;
  int dimension_ = 0;
  std::shared_ptr<const std::vector<Instruction>> code_;
  int max_stack_ = 0;
};

/// Splits a comma-separated list of expressions at top-level commas.
std::vector<std::string> split_expression_list(std::string_view text);

}  // namespace dualscheme
