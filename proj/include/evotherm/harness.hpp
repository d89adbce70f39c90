#pragma once

#include "evotherm/scenario.hpp"

namespace evotherm {

struct ReportItem {
  std::string item;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Machine-readable verification report: certificate plus identity and
/// equation residuals, each carrying its threshold.
struct VerificationReport {
  std::string scenario;
  WellPosednessCertificate certificate;
  std::vector<ReportItem> items;

  bool all_pass() const;
  std::string to_json() const;
};

/// Certificate and identity residuals; no time stepping.
VerificationReport build_static_report(const Scenario& scenario,
                                       const BlockSystem& system);

/// Static report plus the variant-dependent equation residuals of a
/// completed solve.
VerificationReport build_report(const Scenario& scenario,
                                const BlockSystem& system,
                                const Trajectory& traj);

/// Trajectory CSV: header `step,time,field,component_index,value`, floats
/// with 17 significant digits.
std::string trajectory_csv(const Trajectory& traj, const BlockSystem& system,
                           const std::vector<std::string>& fields);
std::string recovered_csv(const RecoveredFields& fields,
                          const BlockSystem& system);

/// Full scenario run: assemble, certify, solve, write trajectory CSV,
/// recovered-fields CSV and report JSON into out_dir.
/// Returns 0 if every report item passes, 2 on verification failure.
/// With dry_run only assembly and certification run and only the report
/// is written.
int run_scenario(const Scenario& scenario, const std::string& out_dir,
                 bool dry_run);

/// Report only, printed to stdout; no files. Returns 0 or 2.
int verify_scenario(const Scenario& scenario);

struct StudyRow {
  std::string label;   // sweep value or variant name
  double deviation = 0.0;
  double ratio = 0.0;  // previous deviation / this one; 0 for the first row
  std::string warning;
};

struct StudyResult {
  std::string kind;
  std::vector<StudyRow> rows;
  bool monotone_warning = false;

  std::string to_csv() const;
};

/// Parameter studies. alpha_limit and eps_limit compare the (v, theta)
/// blocks against a classical_limit reference; model_compare compares the
/// other variants against two_temperature (sweep values ignored);
/// dt_refine compares full states against a solve at min(values)/8.
/// Independent solves run on up to EVOTHERM_THREADS workers.
StudyResult run_study(const std::string& kind, const Scenario& scenario,
                      std::vector<double> values);

}  // namespace evotherm
