#pragma once

#include <string>
#include <vector>

namespace ssb {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;  // worst measured quantity against its threshold
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  double perturb_kappa_b = 0.0;  // relative perturbation of kappa_B (sensitivity hook)
  int jobs = 1;
};

// Invariant suites shared by the CLI and the acceptance binary.
SuiteResult suite_ground_state();       // closed-form soliton, kappa, N_c (d=1, p=3,5)
SuiteResult suite_airy();               // W(Ai, BB) = 1, Im BB = pi Ai, Ai(0), Ai'(0)
SuiteResult suite_wkb();                // V+- Wronskian; f+- decay slope
SuiteResult suite_green();              // L H = identity on test functions, d = 1 and 3
SuiteResult suite_kappa_b(const VerifyOptions& opt = {});  // kappa_B 2 kappa / N_c = 1
SuiteResult suite_wronskian_ad();       // W(A, D) r^{d-1} = 1, d = 1 and 3
SuiteResult suite_interior_oracle();    // Picard vs direct shooting at r_K
SuiteResult suite_turning_phase();      // turning-point phase identity

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opt = {});

}  // namespace ssb
