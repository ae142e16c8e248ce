#pragma once

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "gscat/graph.hpp"
#include "gscat/random.hpp"

namespace gscat::testing {

inline Matrix fixture_weights() {
  Matrix w(4, 4);
  w << 0, 2, 1, 1,
       2, 0, 1, 0,
       1, 1, 0, 0,
       1, 0, 0, 0;
  return w;
}

inline Permutation fixture_permutation() { return Permutation({2, 0, 3, 1}); }

inline SimpleGraph path_graph(int n) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = 1.0;
  return validate(w);
}

inline SimpleGraph cycle_graph(int n) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) w(i, (i + 1) % n) = w((i + 1) % n, i) = 1.0;
  return validate(w);
}

inline SimpleGraph complete_graph(int n) {
  Matrix w = Matrix::Ones(n, n);
  w.diagonal().setZero();
  return validate(w);
}

/// Erdos-Renyi graph with uniform (0.1, 1] weights, redrawn until connected.
inline SimpleGraph random_graph(int n, Rng& rng, double p = 0.4) {
  while (true) {
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (bernoulli(rng, p)) w(i, j) = w(j, i) = uniform(rng, 0.1, 1.0);
    if (is_connected(w)) return validate(w);
  }
}

inline Vector random_signal(int n, Rng& rng) {
  Vector f(n);
  for (int i = 0; i < n; ++i) f(i) = normal(rng);
  return f;
}

inline std::filesystem::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = std::filesystem::temp_directory_path() / "gscat_tests" /
             (std::string(info->test_suite_name()) + "." + info->name());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gscat::testing

#define EXPECT_THROW_CODE(stmt, expected)                        \
  do {                                                           \
    try {                                                        \
      stmt;                                                      \
      ADD_FAILURE() << "expected " #expected;                    \
    } catch (const ::gscat::Error& e) {                          \
      EXPECT_EQ(e.code(), ::gscat::ErrorCode::expected) << e.what(); \
    }                                                            \
  } while (0)
