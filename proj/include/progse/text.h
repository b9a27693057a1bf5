// Copyright 2026 The Progse Authors. All Rights Reserved.
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


#ifndef PROGSE_TEXT_H_
#define PROGSE_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace progse {

// Shortest round-trippable decimal form ("%.17g"); "inf"/"-inf"/"nan".
std::string FormatDouble(double v);
// Parses a full token as a double, throwing kFormat with `what` on failure.
double ParseDouble(std::string_view token, const std::string& what);
long long ParseInt(std::string_view token, const std::string& what);

std::vector<std::string> Split(std::string_view text, char sep);
std::string_view Trim(std::string_view text);

}  // namespace progse

#endif  // PROGSE_TEXT_H_
