#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "qref/dsl.hpp"
#include "qref/report.hpp"

using namespace qref;

namespace {

struct Settings {
    bool json = false;
    std::optional<double> hbar;
    std::optional<double> tol;
    std::optional<double> tau;
    std::optional<double> dt;
    std::optional<int> degree;
    std::string out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadParameter("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double pick(const std::optional<double>& flag, const SourceDocument& doc, const char* key,
            double fallback) {
    if (flag) return *flag;
    if (doc.task)
        if (auto v = doc.task->number(key)) return *v;
    return fallback;
}

int pick_degree(const Settings& s, const SourceDocument& doc, int fallback) {
    double v = fallback;
    if (s.degree)
        v = *s.degree;
    else if (doc.task) {
        if (auto t = doc.task->number("degree")) v = *t;
    }
    int d = static_cast<int>(v);
    if (d != v || d < 1 || d > 8) throw BadParameter("degree must be an integer in [1, 8]");
    return d;
}

// Emits the report on stdout. Exit code 1 signals a negative verdict from an
// otherwise successful run; warnings keep exit code 0.
int finish(ReportEnvelope env, const Settings& s) {
    if (!env.warnings.empty() && env.status == "ok") env.status = "warning";
    std::cout << (s.json ? render_json(env) : render_text(env));
    return env.status == "verdict-failure" ? 1 : 0;
}

std::string letter_name(const SourceDocument& doc, GenId id) { return doc.sig->decl(id).name; }

struct DocRun {
    SourceDocument doc;
    std::string constraint_name;
    NCPolynomial constraint;
    std::vector<GenId> candidates;
    std::vector<std::string> warnings;
};

GenId resolve_letter(const SourceDocument& doc, const std::string& name, const char* role) {
    GenId id = doc.sig->find_optional(name);
    if (id < 0) throw BadParameter(std::string(role) + " '" + name + "' is not declared");
    return id;
}

DocRun prepare(const std::string& path) {
    DocRun r{parse_document(read_file(path)), {}, {}, {}, {}};
    const SourceDocument& doc = r.doc;
    if (doc.constraints.empty()) throw BadParameter("document declares no constraint");
    r.constraint_name = doc.constraints.front().first;
    if (doc.task) {
        auto wanted = doc.task->idents("constraint");
        if (!wanted.empty()) r.constraint_name = wanted.front();
    }
    const NCPolynomial* c = doc.constraint(r.constraint_name);
    if (!c) throw BadParameter("unknown constraint '" + r.constraint_name + "'");
    r.constraint = *c;

    std::vector<std::string> names;
    if (doc.task) names = doc.task->idents("candidates");
    if (names.empty()) {
        for (const auto& g : doc.sig->generators())
            if (g.kind == GenKind::Position) r.candidates.push_back(g.id);
    } else {
        for (const auto& n : names) {
            GenId id = resolve_letter(doc, n, "candidate");
            if (doc.sig->decl(id).kind != GenKind::Position)
                throw BadParameter("candidate '" + n + "' is not a position letter");
            r.candidates.push_back(id);
        }
    }
    return r;
}

Json doc_inputs(const std::string& path, const DocRun& r) {
    Json j = Json::object();
    j["file"] = path;
    j["constraint"] = r.constraint_name;
    return j;
}

std::string verdict_status(const std::vector<ModelReferenceRow>& rows) {
    for (const auto& row : rows)
        if (row.report.verdict == Verdict::Invalid) return "verdict-failure";
    return "ok";
}

int run_analyze_doc(const std::string& path, const Settings& s) {
    DocRun r = prepare(path);
    std::vector<ModelReferenceRow> rows;
    for (GenId z : r.candidates) {
        std::string name = letter_name(r.doc, z);
        try {
            ConstraintSpec spec(r.doc.sig, r.constraint, {z});
            rows.push_back({name, r.constraint_name, attempt_factorization(spec, z)});
        } catch (const NotLinearInMomentum& e) {
            r.warnings.push_back(name + ": " + e.what());
        } catch (const LapseNotInvertible& e) {
            r.warnings.push_back(name + ": " + e.what());
        }
    }
    ReportEnvelope env;
    env.task = "analyze";
    env.inputs = doc_inputs(path, r);
    env.results["reference"] = json_reference_rows(rows);
    env.warnings = r.warnings;
    env.status = verdict_status(rows);
    return finish(std::move(env), s);
}

Model document_model(const DocRun& r, std::vector<GenId> clocks) {
    Model m;
    m.name = "document";
    m.sig = r.doc.sig;
    m.constraints = {r.constraint};
    m.constraint_names = {r.constraint_name};
    for (GenId z : r.candidates) m.candidates.push_back({z, 0});
    m.clock_letters = std::move(clocks);
    m.params = r.doc.params;
    return m;
}

int run_clocks_doc(const std::string& path, const Settings& s) {
    DocRun r = prepare(path);

    std::vector<GenId> frames;
    for (GenId z : r.candidates) {
        std::string name = letter_name(r.doc, z);
        try {
            ConstraintSpec spec(r.doc.sig, r.constraint, {z});
            attempt_factorization(spec, z);
            frames.push_back(z);
        } catch (const NotLinearInMomentum& e) {
            r.warnings.push_back(name + ": " + e.what());
        } catch (const LapseNotInvertible& e) {
            r.warnings.push_back(name + ": " + e.what());
        }
    }

    std::vector<GenId> clocks;
    std::vector<std::string> names;
    if (r.doc.task) names = r.doc.task->idents("clocks");
    if (names.empty()) {
        for (const auto& g : r.doc.sig->generators())
            if (g.kind == GenKind::Position) clocks.push_back(g.id);
    } else {
        for (const auto& n : names) clocks.push_back(resolve_letter(r.doc, n, "clock"));
    }

    DocRun filtered = r;
    filtered.candidates = frames;
    Model m = document_model(filtered, clocks);

    ReportEnvelope env;
    env.task = "clocks";
    env.inputs = doc_inputs(path, r);
    env.results["clocks"] = json_clock_rows(run_clock_report(m));
    env.warnings = r.warnings;
    return finish(std::move(env), s);
}

struct PreparedState {
    MomentState state;
    int degree;
    double hbar;
    double tol;
    std::vector<std::string> warnings;
};

PreparedState build_state(const DocRun& r, const Settings& s) {
    const SourceDocument& doc = r.doc;
    if (!doc.state) throw BadParameter("document has no state section");
    int degree = pick_degree(s, doc, 2);
    double hbar = pick(s.hbar, doc, "hbar", 1.0);
    double tol = pick(s.tol, doc, "tol", 1e-9);
    if (hbar <= 0) throw BadParameter("hbar must be positive");
    if (tol <= 0) throw BadParameter("tol must be positive");

    GenId ref = doc.state->reference_id;
    BasisPtr basis = enumerate_commutant_basis(doc.sig, ref, degree);

    MomentMap reduced;
    for (const auto& [w, v] : doc.state->moments) reduced[w] = v;
    reduced.emplace(Word{}, Cplx{1.0, 0.0});

    std::set<Word, WordLess> reduced_words;
    for (const auto& w : basis->words) {
        bool has_ref = false;
        for (GenId g : w) has_ref = has_ref || g == ref;
        if (!has_ref) reduced_words.insert(w);
    }
    std::vector<std::string> warnings;
    for (const auto& [w, v] : reduced)
        if (!reduced_words.count(w))
            warnings.push_back("moment " + render_expression(NCPolynomial::word(doc.sig, w)) +
                               " lies outside the degree-" + std::to_string(degree) +
                               " commutant basis and is ignored");

    Env env{{"hbar", hbar}};
    if (doc.task)
        for (const auto& e : doc.task->entries)
            if (e.number && doc.params.count(e.key)) env[e.key] = *e.number;

    MomentState st =
        MomentState::extend_from_reduced(basis, reduced, doc.state->time, r.constraint, env);
    return {std::move(st), degree, hbar, tol, std::move(warnings)};
}

Json state_inputs(const std::string& path, const DocRun& r, const PreparedState& ps) {
    Json j = doc_inputs(path, r);
    j["reference"] = r.doc.state->reference;
    j["degree"] = ps.degree;
    j["hbar"] = ps.hbar;
    j["tol"] = ps.tol;
    return j;
}

int run_check_state(const std::string& path, const Settings& s) {
    DocRun r = prepare(path);
    PreparedState ps = build_state(r, s);

    AlmostPositiveReport rep = check_almost_positive(ps.state, ps.tol);
    ReportEnvelope env;
    env.task = "check-state";
    env.inputs = state_inputs(path, r, ps);
    env.results["t_Z"] = ps.state.t_Z();
    env.results["conditions"] = json_almost_positive(rep);
    env.results["uncertainty"] = json_uncertainty(uncertainty_product_check(ps.state, ps.tol));
    env.results["witness"] = json_complex(nonpositivity_witness(ps.state));
    env.warnings = ps.warnings;
    env.status = rep.pass ? "ok" : "verdict-failure";
    return finish(std::move(env), s);
}

int run_evolve(const std::string& path, const Settings& s) {
    DocRun r = prepare(path);

    std::optional<double> tau = s.tau;
    if (!tau && r.doc.task) tau = r.doc.task->number("tau");
    if (!tau) throw BadParameter("evolve needs --tau or a task tau entry");
    double dt = pick(s.dt, r.doc, "dt", 1e-3);

    Settings with_default = s;
    if (!with_default.degree && !(r.doc.task && r.doc.task->number("degree")))
        with_default.degree = 4;
    PreparedState ps = build_state(r, with_default);

    Trajectory traj = evolve(ps.state, *tau, dt);
    AlmostPositiveReport fin =
        check_almost_positive(state_at(traj, traj.samples.size() - 1), ps.tol);

    ReportEnvelope env;
    env.task = "evolve";
    env.inputs = state_inputs(path, r, ps);
    env.inputs["tau"] = *tau;
    env.inputs["dt"] = dt;
    env.results["trajectory"] = json_trajectory(traj);
    env.results["final_conditions"] = json_almost_positive(fin);
    env.warnings = ps.warnings;
    for (const auto& w : traj.warnings) env.warnings.push_back(w);
    if (!s.out.empty()) {
        std::ofstream f(s.out);
        if (!f) throw BadParameter("cannot write file: " + s.out);
        write_trajectory_csv(f, traj);
        env.results["csv"] = s.out;
    }
    env.status = fin.pass ? "ok" : "verdict-failure";
    return finish(std::move(env), s);
}

int run_model(const std::string& name, const std::string& action,
              const std::vector<std::string>& raw_params, const Settings& s) {
    std::map<std::string, std::string> params;
    for (const auto& kv : raw_params) {
        auto pos = kv.find('=');
        if (pos == std::string::npos || pos == 0)
            throw BadParameter("--param expects key=value, got \"" + kv + "\"");
        std::string key = kv.substr(0, pos);
        if (!params.emplace(key, kv.substr(pos + 1)).second)
            throw BadParameter("duplicate parameter '" + key + "'");
    }
    Model m = build_model(name, params);

    ReportEnvelope env;
    env.task = "model-" + action;
    Json in = Json::object();
    in["model"] = name;
    in["action"] = action;
    in["params"] = Json(params);
    env.inputs = std::move(in);

    if (action == "analyze") {
        auto rows = run_reference_report(m);
        env.results["description"] = m.description;
        env.results["reference"] = json_reference_rows(rows);
        env.results["notes"] = m.notes;
        env.status = verdict_status(rows);
    } else if (action == "clocks") {
        env.results["clocks"] = json_clock_rows(run_clock_report(m));
    } else {
        StagedReduction red = staged_reduction(m);
        env.results["reduction"] = json_reduction(red);
        env.status = red.ok ? "ok" : "verdict-failure";
    }
    return finish(std::move(env), s);
}

int run_identities(const Settings& s) {
    auto structural = verify_structural_identities();
    auto anchors = model_anchor_identities();
    bool all = true;
    for (const auto& row : structural) all = all && row.holds;
    for (const auto& row : anchors) all = all && row.holds;

    ReportEnvelope env;
    env.task = "identities";
    env.results["structural"] = json_identities(structural);
    env.results["model_anchors"] = json_anchors(anchors);
    env.status = all ? "ok" : "verdict-failure";
    if (s.json) return finish(std::move(env), s);

    size_t held = 0, total = structural.size() + anchors.size();
    for (const auto& row : structural) {
        std::cout << (row.holds ? "PASS " : "FAIL ") << row.name << "\n";
        if (!row.holds)
            std::cout << "  expected: " << row.expected.render()
                      << "\n  actual:   " << row.actual.render() << "\n";
        held += row.holds;
    }
    for (const auto& row : anchors) {
        std::cout << (row.holds ? "PASS " : "FAIL ") << row.name << "\n";
        if (!row.holds)
            std::cout << "  expected: " << row.expected << "\n  actual:   " << row.actual << "\n";
        held += row.holds;
    }
    std::cout << held << "/" << total << " identities hold\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator-algebra analysis of reference frames and constraints"};
    app.fallthrough();
    app.require_subcommand(1);

    Settings s;
    app.add_flag("--json", s.json, "machine-readable report on stdout");
    app.add_option("--hbar", s.hbar, "numeric value of hbar for state checks");
    app.add_option("--degree", s.degree, "maximum moment degree");
    app.add_option("--tol", s.tol, "numeric tolerance for state checks");
    app.add_option("--tau", s.tau, "gauge-parameter endpoint for evolve");
    app.add_option("--dt", s.dt, "integration step for evolve");
    app.add_option("--out", s.out, "trajectory export path for evolve (delimited records)");

    std::string file;
    auto* analyze = app.add_subcommand("analyze", "factorization verdicts for a document");
    analyze->add_option("file", file, "document to analyze")->required();
    auto* clocks = app.add_subcommand("clocks", "clock classification for a document");
    clocks->add_option("file", file, "document to analyze")->required();
    auto* check = app.add_subcommand("check-state", "almost-positivity checks for a state");
    check->add_option("file", file, "document with a state section")->required();
    auto* evolve_cmd = app.add_subcommand("evolve", "integrate the gauge flow of a state");
    evolve_cmd->add_option("file", file, "document with a state section")->required();

    auto* model = app.add_subcommand("model", "run one of the built-in models");
    std::string model_name;
    std::string action = "analyze";
    std::vector<std::string> raw_params;
    model->add_option("name", model_name, "model id")->required();
    model->add_option("action", action, "analyze, clocks or reduce")
        ->check(CLI::IsMember({"analyze", "clocks", "reduce"}));
    model->add_option("--param", raw_params, "model parameter as key=value")
        ->allow_extra_args(false);

    app.add_subcommand("identities", "verify the exact identity suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return run_analyze_doc(file, s);
        if (clocks->parsed()) return run_clocks_doc(file, s);
        if (check->parsed()) return run_check_state(file, s);
        if (evolve_cmd->parsed()) return run_evolve(file, s);
        if (model->parsed()) return run_model(model_name, action, raw_params, s);
        return run_identities(s);
    } catch (const ParseError& e) {
        std::cerr << "parse error at " << e.line << ":" << e.column << ": " << e.what() << "\n";
        return 2;
    } catch (const BadParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const AlgebraError& e) {
        std::cerr << "algebra error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
