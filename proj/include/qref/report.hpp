#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qref/constraint.hpp"
#include "qref/flow.hpp"
#include "qref/models.hpp"
#include "qref/moments.hpp"
#include "qref/symbolic_state.hpp"

namespace qref {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "qref";
inline constexpr const char* kToolVersion = "0.1.0";
// Bumped whenever the report layout changes shape.
inline constexpr const char* kReportSchema = "qref-report/1";

// Every run produces exactly one envelope: the inputs echoed back, the
// results for the task kind, and a status that is "ok", "warning" (ok with
// caveats listed in warnings) or "verdict-failure" (the computation finished
// and the answer is negative).
struct ReportEnvelope {
    std::string task;
    Json inputs = Json::object();
    Json results = Json::object();
    std::vector<std::string> warnings;
    std::string status = "ok";
};

Json envelope_json(const ReportEnvelope& r);

// Machine form: stable key order, two-space indent, trailing newline. Equal
// envelopes serialize to identical bytes.
std::string render_json(const ReportEnvelope& r);

// Human form: an indented key/value walk of the same tree.
std::string render_text(const ReportEnvelope& r);

Json json_complex(Cplx v);  // [re, im]
Json json_poly(const NCPolynomial& p);

Json json_reference_rows(const std::vector<ModelReferenceRow>& rows);
Json json_clock_rows(const std::vector<ModelClockRow>& rows);
Json json_almost_positive(const AlmostPositiveReport& r);
Json json_uncertainty(const UncertaintyProduct& r);
Json json_reduction(const StagedReduction& r);
Json json_anchors(const std::vector<ModelAnchor>& rows);
Json json_identities(const std::vector<SymbolicIdentity>& rows);

// One row per sample: tau, t_Z, re/im of every reference-free basis word,
// then the smallest moment-matrix eigenvalue at that sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Summary: step counts, truncation warnings, first and final sample, and the
// worst moment-matrix eigenvalue along the way.
Json json_trajectory(const Trajectory& traj);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace qref
