#include "ganlab/kernels.hpp"

#include <stdexcept>

namespace ganlab::kernels {

extern const Table kScalarTable;
#if defined(GANLAB_HAVE_AVX2_BUILD)
extern const Table kAvx2Table;
#endif
#if defined(GANLAB_HAVE_NEON_BUILD)
extern const Table kNeonTable;
#endif

namespace {

const Table* detect_best() {
#if defined(GANLAB_HAVE_AVX2_BUILD)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &kAvx2Table;
  }
#endif
#if defined(GANLAB_HAVE_NEON_BUILD)
  return &kNeonTable;  // baseline on aarch64
#endif
  return &kScalarTable;
}

const Table* g_active = nullptr;

const Table* active_ptr() {
  if (g_active == nullptr) g_active = detect_best();
  return g_active;
}

}  // namespace

const Table& active() { return *active_ptr(); }

const Table* find(const std::string& name) {
  if (name == "scalar") return &kScalarTable;
#if defined(GANLAB_HAVE_AVX2_BUILD)
  if (name == "avx2" && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &kAvx2Table;
  }
#endif
#if defined(GANLAB_HAVE_NEON_BUILD)
  if (name == "neon") return &kNeonTable;
#endif
  return nullptr;
}

std::vector<std::string> available() {
  std::vector<std::string> names;
#if defined(GANLAB_HAVE_AVX2_BUILD)
  if (find("avx2") != nullptr) names.push_back("avx2");
#endif
#if defined(GANLAB_HAVE_NEON_BUILD)
  names.push_back("neon");
#endif
  names.push_back("scalar");
  return names;
}

void force_isa(const std::string& name) {
  const Table* t = find(name);
  if (t == nullptr) {
    throw std::invalid_argument("kernel implementation not available: " + name);
  }
  g_active = t;
}

void reset_isa() { g_active = detect_best(); }

}  // namespace ganlab::kernels
