// Rendering of verification results: machine-readable JSON report and the
// one-line-per-criterion console format.
#pragma once

#include <sstream>
#include <string>

#include "zslab/json_io.hpp"
#include "zslab/verify.hpp"

namespace zslab {

// The JSON report is bit-identical across runs for identical inputs, so it
// carries the deterministic residual verdicts; wall-clock enforcement of the
// per-criterion time budgets lives in the console lines and the exit code.
inline json suite_report_json(const verify::Options& opt, const verify::SuiteResult& suite) {
  json root;
  root["seed"] = opt.seed;
  root["corpus_size"] = opt.corpus_size;
  root["n_modes"] = opt.n_modes;
  root["n_spec"] = opt.n_spec;
  root["criteria"] = json::array();
  for (const auto& c : suite.criteria) {
    json jc;
    jc["criterion"] = c.criterion;
    jc["title"] = c.title;
    if (c.time_limit > 0.0) jc["time_limit"] = c.time_limit;
    jc["pass"] = c.checks_pass;
    jc["checks"] = json::array();
    for (const auto& chk : c.checks) {
      json jk;
      jk["identity"] = chk.id;
      jk["statement"] = chk.statement;
      if (chk.m > 0) jk["m"] = chk.m;
      jk["residual"] = chk.residual;
      jk["tolerance"] = chk.tolerance;
      jk["pass"] = chk.pass;
      jc["checks"].push_back(std::move(jk));
    }
    root["criteria"].push_back(std::move(jc));
  }
  root["pass"] = suite.checks_pass;
  return root;
}

inline std::string criterion_line(const verify::CriterionResult& c) {
  std::ostringstream os;
  os << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.criterion << ": " << c.title;
  double worst_margin = 0.0;
  const verify::Check* worst = nullptr;
  for (const auto& chk : c.checks) {
    const double margin = chk.tolerance > 0.0 ? chk.residual / chk.tolerance : 0.0;
    if (worst == nullptr || margin > worst_margin) {
      worst_margin = margin;
      worst = &chk;
    }
  }
  if (worst != nullptr) {
    os << " (worst: " << worst->id << " residual " << worst->residual << " vs tol "
       << worst->tolerance << ")";
  }
  os << " [" << c.seconds << " s";
  if (c.time_limit > 0.0) os << " / limit " << c.time_limit << " s";
  os << "]";
  return os.str();
}

}  // namespace zslab
