#pragma once

#include <string>
#include <vector>

#include "cf/diffop.hpp"

namespace cf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

// Runs acceptance criterion id (1..kCriterionCount). Exceptions inside a
// criterion are caught and reported as a failure.
CriterionResult run_criterion(int id);
// Runs the given criteria, or all of them when ids is empty.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

// "criterion <id> PASS|FAIL <name>: <detail> (<seconds> s)".
std::string format(const CriterionResult& r);

// Operator equality by action: apply both to each test function and compare
// at `points` random parameter points, relative tolerance tol.
bool same_action(const DiffOp& a, const DiffOp& b, const std::vector<Expr>& tests, int points,
                 double tol, unsigned seed = 7);

// theta_k, theta_k^2, sin(theta_k), exp(theta_k / 2), theta_k cos(theta_k).
std::vector<Expr> test_functions(int k = 1);

}  // namespace cf
