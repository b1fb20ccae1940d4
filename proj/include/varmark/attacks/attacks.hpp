// Copyright 2026 The varmark Authors.
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "varmark/common/rng.hpp"

namespace varmark::attacks {

enum class AttackType { kNone, kTypeI, kTypeII, kTypeIII };

enum class Attribute {
  // Type I: block structure.
  kIncrementStyle,
  kLoopForm,
  kIfSwitch,
  kNestedIf,
  // Type II: variable attributes.
  kNamingStyle,
  kDeclarationPosition,
  kDeclarationInit,
  kMultiDeclaration,
  kTemporary,
};

std::string_view AttributeName(Attribute a);
std::vector<Attribute> TypeIAttributes();
std::vector<Attribute> TypeIIAttributes();

struct AttackSpec {
  AttackType type = AttackType::kNone;
  // Empty means every attribute of the type.
  std::vector<Attribute> attributes;
  // Fraction of variables renamed by Type III, in (0, 1].
  double rename_fraction = 1.0;
  std::uint64_t seed = 0;

  // "none", "type1", "type2", "type3@0.25", ...
  std::string Name() const;
};

// Rewrites every applicable site of `a` with probability `site_prob`. A pass
// that would leave parse errors is dropped, returning `source` unchanged.
std::string ApplyAttribute(std::string_view source, Attribute a, Rng& rng, double site_prob = 0.5);

std::string AttackTypeI(std::string_view source, std::uint64_t seed,
                        const std::vector<Attribute>& attributes = {});
std::string AttackTypeII(std::string_view source, std::uint64_t seed,
                         const std::vector<Attribute>& attributes = {});
// Renames ceil(p * V) uniformly chosen variables to var0, var1, ... The
// chosen sets are nested in p for a fixed seed. Throws InvalidArgument unless
// 0 < p <= 1.
std::string AttackTypeIII(std::string_view source, double p, std::uint64_t seed);

std::string ApplyAttack(std::string_view source, const AttackSpec& spec);

}  // namespace varmark::attacks
