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

#ifndef FRAGALLOC_RULES_PARSER_H_
#define FRAGALLOC_RULES_PARSER_H_

#include <string_view>

#include "fragalloc/rules/program.h"

namespace fragalloc::rules {

// Parses rule-language source:
//
//   program     := { clause }            clause := (fact | rule) "."
//   fact        := atom                  rule   := atom ":-" literal {","
//   literal} atom        := ident "(" term {"," term} ")" literal     := atom |
//   comparison | binding | aggregation comparison  := expr
//   ("=="|"!="|"<"|">"|"<="|">=") expr binding     := VARIABLE "is" expr
//   aggregation := VARIABLE "is" "sum" "(" VARIABLE ":" atom ")"
//
// `%` starts a line comment. Each `_` is a fresh anonymous variable.
// Every rule is checked for safety and the program for consistent arities.
// Throws ParseError (with line and column) or InputError.
Program ParseProgram(std::string_view text);

// Parses a single atom such as a query goal; a trailing "." is optional.
Atom ParseAtom(std::string_view text);

}  // namespace fragalloc::rules

#endif  // FRAGALLOC_RULES_PARSER_H_
