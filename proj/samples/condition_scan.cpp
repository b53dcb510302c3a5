// Prints an ASCII map of the linear-case solvability region over (lambda, mu) in [-5, 5]^2.
#include "iterfun/conditions.hpp"

#include <cstdio>

int main() {
  const int n = 41;
  for (int j = n - 1; j >= 0; --j) {
    const double mu = -5.0 + 10.0 * j / (n - 1);
    std::printf("%5.2f ", mu);
    for (int i = 0; i < n; ++i) {
      const double lambda = -5.0 + 10.0 * i / (n - 1);
      std::putchar(iterfun::check_linear_case(lambda, mu) ? '#' : '.');
    }
    std::putchar('\n');
  }
  std::printf("      lambda from -5 (left) to 5 (right); '#' = existence conditions hold\n");
  return 0;
}
