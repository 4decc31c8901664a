#include "qref/report.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <sstream>

#include "qref/dsl.hpp"

namespace qref {

namespace {

std::string word_label(const SignaturePtr& sig, const Word& w) {
    return render_expression(NCPolynomial::word(sig, w));
}

Json json_scalar(const Scalar& s) { return s.render(); }

Json json_sample(const Trajectory& traj, const TrajectorySample& s) {
    Json moments = Json::object();
    for (size_t k = 0; k < traj.words.size(); ++k)
        moments[word_label(traj.basis->sig, traj.words[k])] = json_complex(s.moments[k]);
    return Json{{"tau", s.tau}, {"t_Z", s.t_Z}, {"moments", std::move(moments)}};
}

bool is_plain(const Json& j) {
    return j.is_primitive() || (j.is_array() && j.empty()) || (j.is_object() && j.empty());
}

std::string plain_text(const Json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        return s.empty() ? "\"\"" : s;
    }
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_float()) return format_double(j.get<double>());
    if (j.is_null()) return "-";
    if (j.is_array()) return "[]";
    if (j.is_object()) return "{}";
    return j.dump();
}

size_t inline_width(const Json& arr) {
    size_t total = 0;
    for (const auto& e : arr) total += plain_text(e).size() + 1;
    return total;
}

void text_walk(std::ostream& os, const Json& j, int indent) {
    std::string pad(indent, ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (is_plain(value)) {
                os << pad << key << ": " << plain_text(value) << "\n";
            } else if (value.is_array() &&
                       std::all_of(value.begin(), value.end(),
                                   [](const Json& e) { return e.is_primitive(); }) &&
                       inline_width(value) <= 72) {
                os << pad << key << ":";
                for (const auto& e : value) os << " " << plain_text(e);
                os << "\n";
            } else {
                os << pad << key << ":\n";
                text_walk(os, value, indent + 2);
            }
        }
        return;
    }
    if (j.is_array()) {
        for (const auto& e : j) {
            if (is_plain(e)) {
                os << pad << "- " << plain_text(e) << "\n";
            } else if (e.is_object()) {
                bool first = true;
                for (const auto& [key, value] : e.items()) {
                    std::string lead = first ? pad + "- " : pad + "  ";
                    first = false;
                    if (is_plain(value)) {
                        os << lead << key << ": " << plain_text(value) << "\n";
                    } else {
                        os << lead << key << ":\n";
                        text_walk(os, value, indent + 4);
                    }
                }
                if (first) os << pad << "- {}\n";
            } else {
                os << pad << "-\n";
                text_walk(os, e, indent + 2);
            }
        }
        return;
    }
    os << pad << plain_text(j) << "\n";
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Json json_complex(Cplx v) { return Json::array({v.real(), v.imag()}); }

Json json_poly(const NCPolynomial& p) { return render_expression(p); }

Json envelope_json(const ReportEnvelope& r) {
    Json j = Json::object();
    j["schema"] = kReportSchema;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["task"] = r.task;
    j["inputs"] = r.inputs;
    j["status"] = r.status;
    j["warnings"] = r.warnings;
    j["results"] = r.results;
    return j;
}

std::string render_json(const ReportEnvelope& r) { return envelope_json(r).dump(2) + "\n"; }

std::string render_text(const ReportEnvelope& r) {
    std::ostringstream os;
    os << kToolName << " " << kToolVersion << " | " << r.task << " | status: " << r.status
       << "\n";
    if (!r.inputs.empty()) {
        os << "inputs:\n";
        text_walk(os, r.inputs, 2);
    }
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    os << "results:\n";
    text_walk(os, r.results, 2);
    return os.str();
}

Json json_reference_rows(const std::vector<ModelReferenceRow>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        Json j = Json::object();
        j["candidate"] = row.candidate;
        j["constraint"] = row.constraint_name;
        j["verdict"] = to_string(row.report.verdict);
        j["lapse"] = json_poly(row.report.lapse);
        j["right_factor"] =
            row.report.right_factor ? json_poly(*row.report.right_factor) : Json(nullptr);
        j["lapse_hermitian"] = row.report.lapse_hermitian;
        j["lapse_commutes_with_right_factor"] = row.report.lapse_commutes_with_right_factor;
        j["lapse_commutes_with_reference"] = row.report.lapse_commutes_with_reference;
        j["right_factor_hermitian"] = row.report.right_factor_hermitian;
        j["obstruction"] = json_poly(row.report.obstruction);
        j["notes"] = row.report.notes;
        out.push_back(std::move(j));
    }
    return out;
}

Json json_clock_rows(const std::vector<ModelClockRow>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        Json j = Json::object();
        j["clock"] = row.clock;
        j["frame"] = row.frame;
        if (!row.note.empty()) j["note"] = row.note;
        if (row.report) {
            Json r = Json::object();
            r["classification"] = to_string(row.report->classification);
            r["rate"] = json_poly(row.report->rate);
            r["rate_is_constant_of_motion"] = row.report->rate_is_constant_of_motion;
            r["ideal_rate"] =
                row.report->ideal_rate ? Json(row.report->ideal_rate->render()) : Json(nullptr);
            j["report"] = std::move(r);
        } else {
            j["report"] = nullptr;
        }
        out.push_back(std::move(j));
    }
    return out;
}

Json json_almost_positive(const AlmostPositiveReport& r) {
    Json j = Json::object();
    j["constraint_residual"] = r.constraint_residual;
    j["parameterization_residual"] = r.parameterization_residual;
    j["reality_residual"] = r.reality_residual;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["pass_constraint"] = r.pass_constraint;
    j["pass_parameterization"] = r.pass_parameterization;
    j["pass_positivity"] = r.pass_positivity;
    j["pass"] = r.pass;
    return j;
}

Json json_uncertainty(const UncertaintyProduct& r) {
    Json j = Json::object();
    j["reference_variance"] = json_complex(r.reference_variance);
    j["mixed_covariance"] = json_complex(r.mixed_covariance);
    j["product"] = r.product;
    j["bound"] = r.bound;
    j["saturated"] = r.saturated;
    return j;
}

Json json_reduction(const StagedReduction& r) {
    Json j = Json::object();
    j["commutator_flag"] = r.flag_zero ? "zero" : "formal";
    j["stage1"] = Json{{"ok", r.stage1_ok}, {"notes", r.stage1_notes}};
    j["commutator_identity_holds"] = r.comm_identity_holds;
    Json rows = Json::array();
    for (const auto& s : r.stage2) {
        Json row = Json::object();
        row["constraint"] = s.constraint_name;
        row["lapse"] = json_poly(s.lapse);
        row["right_factor"] = json_poly(s.right_factor);
        row["reduced_hamiltonian"] = json_poly(s.reduced_hamiltonian);
        row["obstruction"] = json_poly(s.obstruction);
        row["hermiticity_defect"] = json_poly(s.hermiticity_defect);
        row["right_factor_hermitian"] = s.right_factor_hermitian;
        row["obstruction_matches_commutator_flag"] = s.obstruction_matches_commutator_flag;
        row["ok"] = s.ok;
        rows.push_back(std::move(row));
    }
    j["stage2"] = Json{{"ok", r.stage2_ok}, {"rows", std::move(rows)}};
    Json st3 = Json::object();
    st3["reduced_constraint"] = json_poly(r.reduced_constraint);
    st3["reduced_constraint_hermitian"] = r.reduced_constraint_hermitian;
    st3["lapse"] = json_poly(r.lapse3);
    st3["lapse_inverse"] = json_poly(r.lapse3_inverse);
    st3["right_factor"] = json_poly(r.right_factor3);
    st3["right_factor_hermitian"] = r.right_factor3_hermitian;
    st3["obstruction"] = json_poly(r.obstruction3);
    if (!r.obstruction3_note.empty()) st3["obstruction_note"] = r.obstruction3_note;
    st3["lapse_constant_of_motion"] = r.lapse3_constant_of_motion;
    st3["ok"] = r.stage3_ok;
    j["stage3"] = std::move(st3);
    j["constraints_commute"] = r.constraints_commute;
    j["notes"] = r.notes;
    j["ok"] = r.ok;
    return j;
}

Json json_anchors(const std::vector<ModelAnchor>& rows) {
    Json out = Json::array();
    for (const auto& a : rows)
        out.push_back(Json{
            {"name", a.name}, {"expected", a.expected}, {"actual", a.actual}, {"holds", a.holds}});
    return out;
}

Json json_identities(const std::vector<SymbolicIdentity>& rows) {
    Json out = Json::array();
    for (const auto& a : rows)
        out.push_back(Json{{"name", a.name},
                           {"expected", json_scalar(a.expected)},
                           {"actual", json_scalar(a.actual)},
                           {"holds", a.holds}});
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "tau,t_Z";
    for (const auto& w : traj.words) {
        std::string label = word_label(traj.basis->sig, w);
        os << ",re(" << label << "),im(" << label << ")";
    }
    os << ",min_eigenvalue\n";
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        double eig = moment_matrix(state_at(traj, i)).min_eigenvalue;
        os << format_double(s.tau) << "," << format_double(s.t_Z);
        for (const auto& m : s.moments)
            os << "," << format_double(m.real()) << "," << format_double(m.imag());
        os << "," << format_double(eig) << "\n";
    }
}

Json json_trajectory(const Trajectory& traj) {
    Json j = Json::object();
    j["samples"] = traj.samples.size();
    j["constraint"] = json_poly(traj.constraint);
    Json words = Json::array();
    for (const auto& w : traj.words) words.push_back(word_label(traj.basis->sig, w));
    j["words"] = std::move(words);
    double worst = 0.0;
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        double eig = moment_matrix(state_at(traj, i)).min_eigenvalue;
        if (i == 0 || eig < worst) worst = eig;
    }
    j["min_eigenvalue"] = worst;
    j["warnings"] = traj.warnings;
    if (!traj.samples.empty()) {
        j["initial"] = json_sample(traj, traj.samples.front());
        j["final"] = json_sample(traj, traj.samples.back());
    }
    return j;
}

}  // namespace qref
