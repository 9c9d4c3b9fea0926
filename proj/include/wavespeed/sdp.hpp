#pragma once

#include <string>

#include "wavespeed/sdp_instance.hpp"
#include "wavespeed/sos.hpp"

namespace wavespeed::sdp {

struct SolverConfig {
    double margin_tol = 1e-7;
    double duality_gap_tol = 1e-9;
    int max_iter = 200;
    double feas_tol = 1e-9;
    bool verbose = false;
};

// Validated constructor; all tolerances must be positive.
SolverConfig configure(double margin_tol, double duality_gap_tol, int max_iter);

enum class Status { Feasible, Infeasible, Inconclusive };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Feasible: return "feasible";
        case Status::Infeasible: return "infeasible";
        default: return "inconclusive";
    }
}

struct SolveOutcome {
    Status status = Status::Inconclusive;
    // Achieved/bounded eigenvalue margin t*: the instance is feasible iff the
    // maximum t with all blocks >= t*I (subject to the equalities) is >= 0.
    double margin = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double rel_gap = 0.0;
    std::string message;
    Solution solution;  // populated when status == Feasible
};

// Decide feasibility of a block-PSD instance by solving the margin problem
//   maximize t  s.t.  all blocks >= t I, equalities hold
// with a primal-dual interior-point method. Feasible outcomes carry a
// solution whose blocks satisfy the equalities to within feas_tol; verdicts
// near |t*| < margin_tol come back Inconclusive rather than guessed.
SolveOutcome solve_feasibility(const SdpInstance& inst, const SolverConfig& cfg = {});

// Convenience pipeline: assemble, solve, then gate a Feasible verdict on the
// exact-coefficient certificate verification of the program itself.
struct ProgramOutcome {
    Status status = Status::Inconclusive;
    double margin = 0.0;
    int iterations = 0;
    std::string message;
    sos::SosCertificate certificate;  // valid when status == Feasible
    sos::VerifyReport report;
};

ProgramOutcome solve_program(const sos::SosProgram& prog, const SolverConfig& cfg = {});

}  // namespace wavespeed::sdp
