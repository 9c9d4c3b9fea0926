#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavespeed/affine_polynomial.hpp"
#include "wavespeed/sdp_instance.hpp"

namespace wavespeed::sos {

// Region {s_i(u) >= 0, r_j(u) = 0}. An empty set means the whole space.
struct SemialgebraicSet {
    int arity = 0;
    std::vector<Polynomial> inequalities;
    std::vector<Polynomial> equalities;

    static SemialgebraicSet whole_space(int arity) { return {arity, {}, {}}; }
    void check_arity() const;
};

// All monomials of total degree <= ceil(degree/2), graded-lex ordered.
std::vector<Monomial> gram_basis(int arity, int degree);

// Verification thresholds for certificates.
inline constexpr double kResidualTol = 1e-7;
inline constexpr double kEigTol = 1e-8;

struct GramBlock {
    std::vector<Monomial> basis;
    // entry_ids[i][j] for i <= j: decision-variable id of Q(i,j).
    std::vector<std::vector<int>> entry_ids;
    std::string label;
    int side() const { return static_cast<int>(basis.size()); }
};

// Numeric witness: values for the scalar decision variables plus one
// symmetric Gram matrix per block.
struct SosCertificate {
    std::map<int, double> scalar_assignment;
    std::vector<Eigen::MatrixXd> gram_matrices;
    double margin = 0.0;
};

struct VerifyReport {
    double max_residual = 0.0;      // relative to the largest coefficient per row
    double max_eig_violation = 0.0; // most negative Gram eigenvalue, as a violation
    double min_scalar_slack = 0.0;  // most violated scalar inequality
    bool passed = false;
};

// Raw solver output in instance coordinates; see SosProgram::extract_certificate.
using RawSolution = sdp::Solution;

// Collects nonnegativity-on-set constraints, scalar point constraints, and
// the coefficient-matching equalities binding them, over a shared space of
// decision variables (free scalars and Gram-matrix entries). Finished
// programs are immutable and shareable; construction is single-threaded.
class SosProgram {
  public:
    explicit SosProgram(int arity) : arity_(arity) {}

    int arity() const { return arity_; }

    int new_scalar_var(const std::string& name);

    // A polynomial template with one fresh decision variable per monomial.
    struct PolyTemplate {
        int arity = 0;
        std::vector<std::pair<Monomial, int>> coeffs;
        AffinePolynomial to_affine() const;
        Polynomial instantiate(const std::map<int, double>& values) const;
    };
    PolyTemplate new_poly_template(int degree, const std::string& prefix);
    PolyTemplate new_poly_template(const std::vector<Monomial>& support,
                                   const std::string& prefix);

    struct NonnegOptions {
        // Degree of the SOS multiplier sigma_i per inequality (rounded up to
        // even by the Gram basis); defaults make each product reach the
        // expression degree.
        std::vector<int> ineq_multiplier_degrees;
        // Degree of the free multiplier rho_j per equality.
        std::vector<int> eq_multiplier_degrees;
        std::optional<int> master_degree;
        // Optional explicit Gram bases (master, per-inequality); used by the
        // surface method to exploit homogeneity in the auxiliary variables.
        std::optional<std::vector<Monomial>> master_basis;
        std::vector<std::vector<Monomial>> ineq_bases;
        std::string label = "nonneg";
    };

    // S-procedure: expr - sum s_i sigma_i - sum r_j rho_j is constrained to a
    // master Gram block, with each sigma_i itself a Gram block. Feasibility
    // of the assembled program implies expr >= 0 on the set.
    void add_nonneg_on_set(const AffinePolynomial& expr, const SemialgebraicSet& set,
                           const NonnegOptions& opts = {});

    enum class ConstraintKind { Eq0, Ge0 };
    void add_scalar_constraint(const AffineScalar& lin, ConstraintKind kind);

    void add_equation(LinearEquation eq);

    const std::vector<GramBlock>& blocks() const { return blocks_; }
    const std::vector<LinearEquation>& equations() const { return equations_; }
    const std::vector<AffineScalar>& scalar_inequalities() const { return scalar_ineqs_; }
    const std::vector<std::pair<std::string, std::string>>& metadata() const {
        return metadata_;
    }
    void note(const std::string& key, const std::string& value) {
        metadata_.emplace_back(key, value);
    }

    // Standard-form feasibility data with deterministic variable ordering.
    sdp::SdpInstance assemble() const;

    // Map a solver solution on the assembled instance back to program
    // variables, undoing assembly scaling.
    SosCertificate extract_certificate(const RawSolution& raw,
                                       const sdp::SdpInstance& inst) const;

    // A posteriori check: recompute every registered identity from the exact
    // coefficients and report the worst residual and Gram eigenvalue.
    VerifyReport verify_certificate(const SosCertificate& cert) const;

  private:
    enum class VarKind { FreeScalar, GramEntry };
    struct VarInfo {
        VarKind kind;
        std::string name;
        int block = -1, i = -1, j = -1;
    };

    int add_gram_block(std::vector<Monomial> basis, const std::string& label);
    AffinePolynomial gram_expansion(const GramBlock& block) const;

    int arity_;
    std::vector<VarInfo> vars_;
    std::vector<GramBlock> blocks_;
    std::vector<LinearEquation> equations_;
    std::vector<AffineScalar> scalar_ineqs_;
    std::vector<std::pair<std::string, std::string>> metadata_;
};

}  // namespace wavespeed::sos
