#include "kaclab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace kaclab {

int default_threads() {
  if (const char* env = std::getenv("KACLAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

int resolve_threads(int requested) { return requested > 0 ? requested : default_threads(); }

}  // namespace kaclab
