// Copyright 2026 The Fragalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fragalloc/rules/parser.h"

#include <cctype>
#include <charconv>
#include <cmath>

#include "fragalloc/error.h"

namespace fragalloc::rules {
namespace {

enum class Tok {
  kIdent,
  kVariable,
  kNumber,
  kLParen,
  kRParen,
  kComma,
  kPeriod,
  kImplies,
  kColon,
  kCompare,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string Describe(const Token& t) {
  if (t.kind == Tok::kEnd) return "end of input";
  return "'" + t.text + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    while (true) {
      SkipBlanks();
      Token t{Tok::kEnd, "", line_, column_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          Advance();
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = std::islower(static_cast<unsigned char>(c)) ? Tok::kIdent
                                                             : Tok::kVariable;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::kNumber;
        t.text = LexNumber();
      } else {
        t.text = std::string(1, c);
        char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        switch (c) {
          case '(':
            t.kind = Tok::kLParen;
            break;
          case ')':
            t.kind = Tok::kRParen;
            break;
          case ',':
            t.kind = Tok::kComma;
            break;
          case '.':
            t.kind = Tok::kPeriod;
            break;
          case '+':
            t.kind = Tok::kPlus;
            break;
          case '-':
            t.kind = Tok::kMinus;
            break;
          case '*':
            t.kind = Tok::kStar;
            break;
          case '/':
            t.kind = Tok::kSlash;
            break;
          case ':':
            if (next == '-') {
              t.kind = Tok::kImplies;
              t.text = ":-";
            } else {
              t.kind = Tok::kColon;
            }
            break;
          case '=':
          case '!':
            if (next != '=') {
              throw ParseError(line_, column_,
                               std::string("unexpected character '") + c + "'");
            }
            t.kind = Tok::kCompare;
            t.text = std::string(1, c) + "=";
            break;
          case '<':
          case '>':
            t.kind = Tok::kCompare;
            if (next == '=') t.text += "=";
            break;
          default:
            throw ParseError(line_, column_,
                             std::string("unexpected character '") + c + "'");
        }
        for (size_t i = 0; i < t.text.size(); ++i) Advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void Advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  bool DigitAt(size_t p) const {
    return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
  }

  void SkipBlanks() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else {
        break;
      }
    }
  }

  // digits ["." digits] [("e"|"E") ["+"|"-"] digits]; a period not followed
  // by a digit terminates the clause instead.
  std::string LexNumber() {
    size_t start = pos_;
    while (DigitAt(pos_)) Advance();
    if (pos_ < src_.size() && src_[pos_] == '.' && DigitAt(pos_ + 1)) {
      Advance();
      while (DigitAt(pos_)) Advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (DigitAt(p)) {
        while (pos_ < p) Advance();
        while (DigitAt(pos_)) Advance();
      }
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).Run()) {}

  Program ParseAll() {
    Program program;
    while (Peek().kind != Tok::kEnd) ParseClause(&program);
    for (const Rule& r : program.rules) CheckSafety(r);
    CollectArities(program);
    return program;
  }

  Atom ParseSingleAtom() {
    Atom atom = ParseAtomTok();
    if (Peek().kind == Tok::kPeriod) Next();
    if (Peek().kind != Tok::kEnd) Fail(Peek(), "expected end of input");
    return atom;
  }

 private:
  const Token& Peek(size_t ahead = 0) const {
    size_t i = std::min(index_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& Next() {
    const Token& t = tokens_[index_];
    if (index_ + 1 < tokens_.size()) ++index_;
    return t;
  }
  [[noreturn]] void Fail(const Token& at, const std::string& msg) const {
    throw ParseError(at.line, at.column, msg + " but found " + Describe(at));
  }
  const Token& Expect(Tok kind, const char* what) {
    if (Peek().kind != kind) Fail(Peek(), std::string("expected ") + what);
    return Next();
  }

  void ParseClause(Program* program) {
    const Token& start = Peek();
    Atom head = ParseAtomTok();
    if (Peek().kind == Tok::kImplies) {
      Next();
      Rule rule{std::move(head), {}};
      rule.body.push_back(ParseLiteral());
      while (Peek().kind == Tok::kComma) {
        Next();
        rule.body.push_back(ParseLiteral());
      }
      Expect(Tok::kPeriod, "'.'");
      program->rules.push_back(std::move(rule));
      return;
    }
    Expect(Tok::kPeriod, "'.' or ':-'");
    for (const Term& t : head.args) {
      if (t.is_variable()) {
        throw ParseError(
            start.line, start.column,
            "fact " + head.ToString() + " contains variable " + t.variable());
      }
    }
    program->facts.push_back(ToGround(head));
  }

  Atom ParseAtomTok() {
    const Token& name = Expect(Tok::kIdent, "predicate name");
    Atom atom{name.text, {}};
    Expect(Tok::kLParen, "'('");
    atom.args.push_back(ParseTerm());
    while (Peek().kind == Tok::kComma) {
      Next();
      atom.args.push_back(ParseTerm());
    }
    Expect(Tok::kRParen, "',' or ')'");
    return atom;
  }

  Term VariableTerm(const std::string& name) {
    if (name == "_") return Term::Var("_" + std::to_string(++anonymous_));
    return Term::Var(name);
  }

  Value NumberValue(const Token& t, bool negative) {
    double v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || !std::isfinite(v)) {
      throw ParseError(t.line, t.column, "number out of range: " + t.text);
    }
    return Value::Number(negative ? -v : v);
  }

  Term ParseTerm() {
    const Token& t = Peek();
    switch (t.kind) {
      case Tok::kVariable:
        Next();
        return VariableTerm(t.text);
      case Tok::kIdent:
        Next();
        return Term(Value::Symbol(t.text));
      case Tok::kNumber:
        Next();
        return Term(NumberValue(t, false));
      case Tok::kMinus:
        if (Peek(1).kind == Tok::kNumber) {
          Next();
          return Term(NumberValue(Next(), true));
        }
        break;
      default:
        break;
    }
    Fail(t, "expected a term");
  }

  Literal ParseLiteral() {
    const Token& t = Peek();
    if (t.kind == Tok::kIdent && Peek(1).kind == Tok::kLParen) {
      return ParseAtomTok();
    }
    if (t.kind == Tok::kVariable && Peek(1).kind == Tok::kIdent &&
        Peek(1).text == "is") {
      std::string var = Next().text;
      if (var == "_") Fail(t, "expected a named variable");
      Next();
      if (Peek().kind == Tok::kIdent && Peek().text == "sum" &&
          Peek(1).kind == Tok::kLParen) {
        Next();
        Next();
        const Token& value = Expect(Tok::kVariable, "summed variable");
        if (value.text == "_") Fail(value, "expected a named variable");
        Expect(Tok::kColon, "':'");
        Atom source = ParseAtomTok();
        Expect(Tok::kRParen, "')'");
        return Aggregation{var, value.text, std::move(source)};
      }
      return Binding{var, ParseExpr()};
    }
    Expr lhs = ParseExpr();
    const Token& op = Peek();
    if (op.kind != Tok::kCompare) Fail(op, "expected a comparison operator");
    Next();
    Expr rhs = ParseExpr();
    CompareOp cmp = CompareOp::kEq;
    if (op.text == "!=") cmp = CompareOp::kNe;
    if (op.text == "<") cmp = CompareOp::kLt;
    if (op.text == ">") cmp = CompareOp::kGt;
    if (op.text == "<=") cmp = CompareOp::kLe;
    if (op.text == ">=") cmp = CompareOp::kGe;
    return Comparison{cmp, std::move(lhs), std::move(rhs)};
  }

  Expr ParseExpr() {
    Expr lhs = ParseProduct();
    while (Peek().kind == Tok::kPlus || Peek().kind == Tok::kMinus) {
      auto kind =
          Next().kind == Tok::kPlus ? Expr::Kind::kAdd : Expr::Kind::kSubtract;
      lhs = Expr::Binary(kind, std::move(lhs), ParseProduct());
    }
    return lhs;
  }

  Expr ParseProduct() {
    Expr lhs = ParseUnary();
    while (Peek().kind == Tok::kStar || Peek().kind == Tok::kSlash) {
      auto kind = Next().kind == Tok::kStar ? Expr::Kind::kMultiply
                                            : Expr::Kind::kDivide;
      lhs = Expr::Binary(kind, std::move(lhs), ParseUnary());
    }
    return lhs;
  }

  Expr ParseUnary() {
    if (Peek().kind == Tok::kMinus) {
      if (Peek(1).kind == Tok::kNumber) return Expr::Leaf(ParseTerm());
      Next();
      return Expr::Negate(ParseUnary());
    }
    if (Peek().kind == Tok::kLParen) {
      Next();
      Expr inner = ParseExpr();
      Expect(Tok::kRParen, "')'");
      return inner;
    }
    return Expr::Leaf(ParseTerm());
  }

  std::vector<Token> tokens_;
  size_t index_ = 0;
  int anonymous_ = 0;
};

}  // namespace

Program ParseProgram(std::string_view text) { return Parser(text).ParseAll(); }

Atom ParseAtom(std::string_view text) { return Parser(text).ParseSingleAtom(); }

}  // namespace fragalloc::rules
