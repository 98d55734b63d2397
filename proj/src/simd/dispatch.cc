/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "calboost/simd/kernels.h"

namespace calboost::simd {

#if defined(CALBOOST_HAVE_AVX2)
extern const KernelTable kAvx2KernelTable;
#endif
#if defined(CALBOOST_HAVE_NEON)
extern const KernelTable kNeonKernelTable;
#endif

std::string_view KernelLevelName(KernelLevel level) {
  switch (level) {
    case KernelLevel::kScalar:
      return "scalar";
    case KernelLevel::kAvx2:
      return "avx2";
    case KernelLevel::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable* Avx2Kernels() {
#if defined(CALBOOST_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2KernelTable : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* NeonKernels() {
#if defined(CALBOOST_HAVE_NEON)
  // NEON is architectural on AArch64.
  return &kNeonKernelTable;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> AvailableKernels() {
  std::vector<const KernelTable*> tables = {&ScalarKernels()};
  if (const KernelTable* t = Avx2Kernels()) tables.push_back(t);
  if (const KernelTable* t = NeonKernels()) tables.push_back(t);
  return tables;
}

namespace {

const KernelTable* FindLevel(KernelLevel level) {
  for (const KernelTable* table : AvailableKernels()) {
    if (table->level == level) return table;
  }
  return nullptr;
}

const KernelTable* SelectInitial() {
  if (const char* env = std::getenv("CALBOOST_KERNELS")) {
    const std::string_view name(env);
    for (KernelLevel level :
         {KernelLevel::kScalar, KernelLevel::kAvx2, KernelLevel::kNeon}) {
      if (name == KernelLevelName(level)) {
        if (const KernelTable* table = FindLevel(level)) return table;
      }
    }
  }
  const std::vector<const KernelTable*> tables = AvailableKernels();
  return tables.back();
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{SelectInitial()};
  return slot;
}

}  // namespace

const KernelTable& ActiveKernels() {
  return *ActiveSlot().load(std::memory_order_acquire);
}

void SetActiveKernels(KernelLevel level) {
  const KernelTable* table = FindLevel(level);
  if (table == nullptr) {
    throw std::invalid_argument("kernel level not available: " +
                                std::string(KernelLevelName(level)));
  }
  ActiveSlot().store(table, std::memory_order_release);
}

}  // namespace calboost::simd
