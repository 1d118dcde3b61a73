#include "dualscheme/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace dualscheme {

enum class OpCode { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Sin, Cos, Exp, Log, Sqrt, Max, Min };

struct Expression::Instruction {
  OpCode op;
  double value = 0.0;  // Const
  int index = 0;       // Var
};

namespace {

using Instruction = Expression::Instruction;

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dimension_(dimension) {}

  std::vector<Instruction> run() {
    parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return std::move(code_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("expression '" + std::string(text_) + "': " + message + " at column " +
                     std::to_string(pos_ + 1));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void emit(OpCode op) { code_.push_back({op}); }

  void parse_expr() {
    parse_term();
    while (true) {
      if (accept('+')) {
        parse_term();
        emit(OpCode::Add);
      } else if (accept('-')) {
        parse_term();
        emit(OpCode::Sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    while (true) {
      if (accept('*')) {
        parse_unary();
        emit(OpCode::Mul);
      } else if (accept('/')) {
        parse_unary();
        emit(OpCode::Div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(OpCode::Neg);
      return;
    }
    if (accept('+')) {
      parse_unary();
      return;
    }
    parse_power();
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      emit(OpCode::Pow);
    }
  }

  void parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      parse_expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      parse_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      parse_identifier();
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void parse_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("bad number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    code_.push_back({OpCode::Const, value});
  }

  void parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "pi") {
      code_.push_back({OpCode::Const, std::numbers::pi});
      return;
    }
    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index < 1 || index > dimension_) {
        pos_ = start;
        fail("variable '" + std::string(name) + "' outside x1..x" + std::to_string(dimension_));
      }
      code_.push_back({OpCode::Var, 0.0, index - 1});
      return;
    }

    struct Func {
      std::string_view name;
      OpCode op;
      bool variadic;
    };
    static constexpr Func kFunctions[] = {
        {"abs", OpCode::Abs, false}, {"sin", OpCode::Sin, false},  {"cos", OpCode::Cos, false},
        {"exp", OpCode::Exp, false}, {"log", OpCode::Log, false},  {"sqrt", OpCode::Sqrt, false},
        {"max", OpCode::Max, true},  {"min", OpCode::Min, true},
    };
    const auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                 [&](const Func& f) { return f.name == name; });
    if (it == std::end(kFunctions)) {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    parse_expr();
    int args = 1;
    while (accept(',')) {
      parse_expr();
      ++args;
      if (it->variadic) emit(it->op);
    }
    expect(')');
    if (!it->variadic && args != 1) fail(std::string(name) + " takes one argument");
    if (it->variadic && args < 2) fail(std::string(name) + " takes at least two arguments");
    if (!it->variadic) emit(it->op);
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
  std::vector<Instruction> code_;
};

int stack_depth(const std::vector<Instruction>& code) {
  int depth = 0;
  int peak = 0;
  for (const Instruction& ins : code) {
    switch (ins.op) {
      case OpCode::Const:
      case OpCode::Var: ++depth; break;
      case OpCode::Add:
      case OpCode::Sub:
      case OpCode::Mul:
      case OpCode::Div:
      case OpCode::Pow:
      case OpCode::Max:
      case OpCode::Min: --depth; break;
      default: break;
    }
    peak = std::max(peak, depth);
  }
  return peak;
}

}  // namespace

Expression::Expression(std::string text, int dimension, std::shared_ptr<const std::vector<Instruction>> code,
                       int max_stack)
    : text_(std::move(text)), dimension_(dimension), code_(std::move(code)), max_stack_(max_stack) {}

Expression Expression::parse(std::string_view text, int dimension) {
  if (dimension <= 0) throw InputError("expression: dimension must be positive");
  auto code = std::make_shared<const std::vector<Instruction>>(Parser(text, dimension).run());
  const int depth = stack_depth(*code);
  return Expression(std::string(text), dimension, std::move(code), depth);
}

double Expression::operator()(const Vec& x) const {
  require_dimension(x, dimension_, "expression");
  constexpr int kSmallStack = 64;
  double small[kSmallStack];
  std::vector<double> large;
  double* stack = small;
  if (max_stack_ > kSmallStack) {
    large.resize(static_cast<std::size_t>(max_stack_));
    stack = large.data();
  }
  int top = -1;
  for (const Instruction& ins : *code_) {
    switch (ins.op) {
      case OpCode::Const: stack[++top] = ins.value; break;
      case OpCode::Var: stack[++top] = x[ins.index]; break;
      case OpCode::Neg: stack[top] = -stack[top]; break;
      case OpCode::Add: stack[top - 1] += stack[top]; --top; break;
      case OpCode::Sub: stack[top - 1] -= stack[top]; --top; break;
      case OpCode::Mul: stack[top - 1] *= stack[top]; --top; break;
      case OpCode::Div: stack[top - 1] /= stack[top]; --top; break;
      case OpCode::Pow: {
        const double base = stack[top - 1];
        const double e = stack[top];
        stack[top - 1] = (e == 2.0) ? base * base : std::pow(base, e);
        --top;
        break;
      }
      case OpCode::Max: stack[top - 1] = std::max(stack[top - 1], stack[top]); --top; break;
      case OpCode::Min: stack[top - 1] = std::min(stack[top - 1], stack[top]); --top; break;
      case OpCode::Abs: stack[top] = std::abs(stack[top]); break;
      case OpCode::Sin: stack[top] = std::sin(stack[top]); break;
      case OpCode::Cos: stack[top] = std::cos(stack[top]); break;
      case OpCode::Exp: stack[top] = std::exp(stack[top]); break;
      case OpCode::Log: stack[top] = std::log(stack[top]); break;
      case OpCode::Sqrt: stack[top] = std::sqrt(stack[top]); break;
    }
  }
  return stack[top];
}

std::vector<std::string> split_expression_list(std::string_view text) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      std::string_view piece = text.substr(start, i - start);
      while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front()))) piece.remove_prefix(1);
      while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back()))) piece.remove_suffix(1);
      if (!piece.empty()) parts.emplace_back(piece);
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return parts;
}

}  // namespace dualscheme
