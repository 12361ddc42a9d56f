#include <cstdio>

#include "ecoc/code_matrix.hpp"

int main() {
  using ecoc::Orientation;
  for (auto o : {Orientation::keep_bottom_right, Orientation::keep_top_left}) {
    const auto a = ecoc::build_code_matrix(10, o), b = ecoc::build_code_matrix(26, o);
    std::printf("%s: n=10 m=%zu, n=26 m=%zu\n", o == Orientation::keep_bottom_right ? "keep-bottom-right" : "keep-top-left",
                a.m(), b.m());
  }
  const auto a = ecoc::build_code_matrix(10), b = ecoc::build_code_matrix(26);
  return a.m() == 2 && b.m() == 6 ? 0 : 1;
}
