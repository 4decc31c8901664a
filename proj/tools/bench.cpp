// Timing harness for the numeric moment kernels: every kernel runs once with
// the serial reference policy and once with the OpenMP policy, and the results
// must match bit for bit before a speedup is reported.

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "qref/kernels.hpp"

using namespace qref;

namespace {

struct Problem {
    SignaturePtr sig;
    BasisPtr basis;
    NCPolynomial constraint;
    MomentState state;
    Trajectory trajectory;
};

Problem build_problem(int pairs, int degree, double tau, double dt) {
    auto s = std::make_shared<AlgebraSignature>();
    s->add_pair("z", "e");
    std::vector<std::pair<GenId, GenId>> qp;
    for (int k = 0; k < pairs; ++k) {
        auto [q, p] = s->add_pair("q" + std::to_string(k), "p" + std::to_string(k));
        qp.emplace_back(q, p);
    }
    SignaturePtr sig = s;

    auto half = Scalar::rational(Rational(1, 2));
    RawPoly raw{{Scalar::one(), {sig->find("e")}}};
    for (auto [q, p] : qp) {
        raw.push_back({half, {q, q}});
        raw.push_back({half, {p, p}});
    }
    auto constraint = normal_form(sig, raw);

    // displaced ground states, one coherent blob per pair, so the gauge flow
    // actually moves the moments
    MomentMap reduced{{Word{}, Cplx{1.0, 0.0}}};
    for (int k = 0; k < pairs; ++k) {
        GaussianSpec g;
        g.q = qp[k].first;
        g.p = qp[k].second;
        g.mean_q = 0.8 - 0.2 * k;
        g.mean_p = (k % 2 == 0) ? 0.3 : -0.4;
        reduced = tensor_moments(sig, reduced, gaussian_pair_moments(g, 1.0, degree), degree);
    }

    auto basis = enumerate_commutant_basis(sig, sig->find("z"), degree);
    auto state =
        MomentState::extend_from_reduced(basis, reduced, 0.0, constraint, {{"hbar", 1.0}});
    auto trajectory = evolve(state, tau, dt);
    return Problem{sig, basis, constraint, std::move(state), std::move(trajectory)};
}

template <typename F>
double best_ms(int repeat, F&& fn) {
    double best = 0.0;
    for (int r = 0; r < repeat; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (r == 0 || ms < best) best = ms;
    }
    return best;
}

void print_row(const std::string& task, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-34s %10.2f %12.2f %9.2fx   %s\n", task.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "yes" : "NO");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel timing for the moment kernels"};
    int pairs = 3;
    int degree = 4;
    int repeat = 5;
    int cs_pairs = 400;
    double tau = 2.0;
    double dt = 1e-3;
    app.add_option("--pairs", pairs, "canonical pairs besides the reference")
        ->check(CLI::Range(1, 6));
    app.add_option("--degree", degree, "moment truncation degree")->check(CLI::Range(2, 6));
    app.add_option("--repeat", repeat, "repetitions per kernel, best time wins")
        ->check(CLI::Range(1, 100));
    app.add_option("--cs-pairs", cs_pairs, "number of Cauchy-Schwarz pairs")
        ->check(CLI::Range(1, 100000));
    app.add_option("--tau", tau, "gauge parameter span of the scanned trajectory");
    app.add_option("--dt", dt, "integrator step");
    CLI11_PARSE(app, argc, argv);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif

    auto pr = build_problem(pairs, degree, tau, dt);
    auto matrix_dim = assemble_moment_matrix(pr.state, ExecutionPolicy::Serial).slice.size();
    std::printf("qref-bench | threads: %d\n", threads);
    std::printf("problem: %d canonical pairs + reference, degree %d, %zu commutant words, "
                "matrix dim %zu, %zu trajectory samples\n\n",
                pairs, degree, pr.basis->words.size(), matrix_dim,
                pr.trajectory.samples.size());
    std::printf("%-34s %10s %12s %10s   %s\n", "task", "serial ms", "parallel ms", "speedup",
                "identical");

    bool all_identical = true;

    {
        MomentMatrix serial, parallel;
        double ts = best_ms(repeat, [&] { serial = assemble_moment_matrix(pr.state, ExecutionPolicy::Serial); });
        double tp = best_ms(repeat, [&] { parallel = assemble_moment_matrix(pr.state, ExecutionPolicy::Parallel); });
        bool same = serial.entries == parallel.entries &&
                    serial.min_eigenvalue == parallel.min_eigenvalue;
        all_identical = all_identical && same;
        print_row("moment matrix assembly", ts, tp, same);
    }

    {
        TrajectoryPositivity serial, parallel;
        double ts = best_ms(repeat, [&] { serial = scan_trajectory_positivity(pr.trajectory, 1e-9, ExecutionPolicy::Serial); });
        double tp = best_ms(repeat, [&] { parallel = scan_trajectory_positivity(pr.trajectory, 1e-9, ExecutionPolicy::Parallel); });
        bool same = serial.min_eigenvalues == parallel.min_eigenvalues &&
                    serial.worst == parallel.worst && serial.worst_sample == parallel.worst_sample;
        all_identical = all_identical && same;
        print_row("trajectory positivity scan", ts, tp, same);
        if (!serial.pass)
            std::printf("  note: worst eigenvalue %.3e at sample %zu\n", serial.worst,
                        serial.worst_sample);
    }

    {
        // deterministic pair list over the low-degree slice words
        auto slice = moment_matrix(pr.state).slice;
        std::vector<std::pair<NCPolynomial, NCPolynomial>> cs;
        for (size_t i = 0; i < slice.size() && (int)cs.size() < cs_pairs; ++i)
            for (size_t j = i + 1; j < slice.size() && (int)cs.size() < cs_pairs; ++j)
                cs.emplace_back(NCPolynomial::word(pr.sig, slice[i]),
                                NCPolynomial::word(pr.sig, slice[j]));
        std::vector<double> serial, parallel;
        double ts = best_ms(repeat, [&] { serial = cauchy_schwarz_margins(pr.state, cs, ExecutionPolicy::Serial); });
        double tp = best_ms(repeat, [&] { parallel = cauchy_schwarz_margins(pr.state, cs, ExecutionPolicy::Parallel); });
        bool same = serial == parallel;
        all_identical = all_identical && same;
        print_row("Cauchy-Schwarz margins (" + std::to_string(cs.size()) + ")", ts, tp, same);
    }

    std::printf("\nall parallel results bitwise identical to serial: %s\n",
                all_identical ? "yes" : "NO");
    return all_identical ? 0 : 1;
}
