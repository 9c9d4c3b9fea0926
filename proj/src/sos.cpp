#include "wavespeed/sos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wavespeed::sos {

namespace {

int even_ceil(int d) { return d + (d & 1); }

void enumerate_rec(int arity, int var, int remaining, std::vector<int>& exps,
                   std::vector<Monomial>& out) {
    if (var == arity) {
        out.push_back(Monomial(exps));
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        exps[var] = e;
        enumerate_rec(arity, var + 1, remaining - e, exps, out);
    }
    exps[var] = 0;
}

std::vector<Monomial> monomials_up_to(int arity, int max_degree) {
    std::vector<Monomial> out;
    std::vector<int> exps(arity, 0);
    enumerate_rec(arity, 0, max_degree, exps, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

void SemialgebraicSet::check_arity() const {
    for (const auto& p : inequalities)
        if (p.arity() != arity) throw std::invalid_argument("SemialgebraicSet: arity mismatch");
    for (const auto& p : equalities)
        if (p.arity() != arity) throw std::invalid_argument("SemialgebraicSet: arity mismatch");
}

std::vector<Monomial> gram_basis(int arity, int degree) {
    if (degree < 0) throw std::invalid_argument("gram_basis: negative degree");
    return monomials_up_to(arity, (degree + 1) / 2);
}

int SosProgram::new_scalar_var(const std::string& name) {
    vars_.push_back({VarKind::FreeScalar, name});
    return static_cast<int>(vars_.size()) - 1;
}

AffinePolynomial SosProgram::PolyTemplate::to_affine() const {
    AffinePolynomial a(arity);
    for (const auto& [m, id] : coeffs)
        a.add_var_term(id, Polynomial::monomial(m, 1));
    return a;
}

Polynomial SosProgram::PolyTemplate::instantiate(const std::map<int, double>& values) const {
    Polynomial p(arity);
    for (const auto& [m, id] : coeffs) {
        auto it = values.find(id);
        if (it == values.end()) throw std::invalid_argument("instantiate: missing value");
        p.add_term(m, rational_from_double(it->second));
    }
    return p;
}

SosProgram::PolyTemplate SosProgram::new_poly_template(int degree, const std::string& prefix) {
    return new_poly_template(monomials_up_to(arity_, degree), prefix);
}

SosProgram::PolyTemplate SosProgram::new_poly_template(const std::vector<Monomial>& support,
                                                       const std::string& prefix) {
    PolyTemplate t;
    t.arity = arity_;
    for (const Monomial& m : support) {
        std::ostringstream name;
        name << prefix << "[" << m.str({}) << "]";
        t.coeffs.emplace_back(m, new_scalar_var(name.str()));
    }
    return t;
}

int SosProgram::add_gram_block(std::vector<Monomial> basis, const std::string& label) {
    GramBlock block;
    block.basis = std::move(basis);
    block.label = label;
    int n = block.side();
    block.entry_ids.assign(n, {});
    for (int i = 0; i < n; ++i) {
        block.entry_ids[i].assign(n, -1);
        for (int j = i; j < n; ++j) {
            std::ostringstream name;
            name << label << ".Q(" << i << "," << j << ")";
            vars_.push_back({VarKind::GramEntry, name.str(),
                             static_cast<int>(blocks_.size()), i, j});
            block.entry_ids[i][j] = static_cast<int>(vars_.size()) - 1;
        }
    }
    blocks_.push_back(std::move(block));
    return static_cast<int>(blocks_.size()) - 1;
}

AffinePolynomial SosProgram::gram_expansion(const GramBlock& block) const {
    AffinePolynomial a(arity_);
    int n = block.side();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Rational c = (i == j) ? 1 : 2;
            a.add_var_term(block.entry_ids[i][j],
                           Polynomial::monomial(block.basis[i] * block.basis[j], c));
        }
    return a;
}

void SosProgram::add_nonneg_on_set(const AffinePolynomial& expr, const SemialgebraicSet& set,
                                   const NonnegOptions& opts) {
    if (expr.arity() != arity_ || set.arity != arity_)
        throw std::invalid_argument("add_nonneg_on_set: arity mismatch");
    set.check_arity();

    const int n_ineq = static_cast<int>(set.inequalities.size());
    const int n_eq = static_cast<int>(set.equalities.size());
    const int expr_deg = std::max(0, expr.degree());

    std::vector<int> sigma_degrees = opts.ineq_multiplier_degrees;
    if (sigma_degrees.empty()) {
        for (const auto& s : set.inequalities)
            sigma_degrees.push_back(even_ceil(std::max(0, expr_deg - s.degree())));
    }
    if (static_cast<int>(sigma_degrees.size()) != n_ineq)
        throw std::invalid_argument("add_nonneg_on_set: one multiplier degree per inequality");
    std::vector<int> rho_degrees = opts.eq_multiplier_degrees;
    if (rho_degrees.empty()) {
        for (const auto& r : set.equalities)
            rho_degrees.push_back(std::max(0, expr_deg - r.degree()));
    }
    if (static_cast<int>(rho_degrees.size()) != n_eq)
        throw std::invalid_argument("add_nonneg_on_set: one multiplier degree per equality");
    if (!opts.ineq_bases.empty() && static_cast<int>(opts.ineq_bases.size()) != n_ineq)
        throw std::invalid_argument("add_nonneg_on_set: one basis per inequality");

    // Gram bases realize even degrees; track the effective degree of each
    // product for the master-degree bookkeeping.
    std::vector<std::vector<Monomial>> sigma_bases(n_ineq);
    int needed = expr_deg;
    std::vector<int> product_degrees(n_ineq, 0);
    for (int i = 0; i < n_ineq; ++i) {
        sigma_bases[i] = opts.ineq_bases.empty() ? gram_basis(arity_, sigma_degrees[i])
                                                 : opts.ineq_bases[i];
        int half = 0;
        for (const Monomial& m : sigma_bases[i]) half = std::max(half, m.degree());
        product_degrees[i] = set.inequalities[i].degree() + 2 * half;
        needed = std::max(needed, product_degrees[i]);
    }
    for (int j = 0; j < n_eq; ++j)
        needed = std::max(needed, set.equalities[j].degree() + rho_degrees[j]);

    int master_degree = opts.master_degree.value_or(even_ceil(needed));
    for (int i = 0; i < n_ineq; ++i)
        if (product_degrees[i] > master_degree) {
            std::ostringstream msg;
            msg << "add_nonneg_on_set: degree bookkeeping violation, product s[" << i
                << "]*sigma[" << i << "] has degree " << product_degrees[i]
                << " > master degree " << master_degree;
            throw std::invalid_argument(msg.str());
        }
    if (expr_deg > master_degree)
        throw std::invalid_argument("add_nonneg_on_set: master degree below expression degree");

    AffinePolynomial identity = expr;

    int master_idx = add_gram_block(
        opts.master_basis ? *opts.master_basis : gram_basis(arity_, master_degree),
        opts.label + ".master");
    identity = identity - gram_expansion(blocks_[master_idx]);

    for (int i = 0; i < n_ineq; ++i) {
        std::ostringstream label;
        label << opts.label << ".sigma" << i;
        int idx = add_gram_block(sigma_bases[i], label.str());
        identity = identity - gram_expansion(blocks_[idx]) * set.inequalities[i];
    }
    for (int j = 0; j < n_eq; ++j) {
        std::ostringstream prefix;
        prefix << opts.label << ".rho" << j;
        PolyTemplate rho = new_poly_template(rho_degrees[j], prefix.str());
        identity = identity - rho.to_affine() * set.equalities[j];
    }

    for (LinearEquation& eq : match_coefficients(identity, AffinePolynomial(arity_)))
        add_equation(std::move(eq));

    std::ostringstream meta;
    meta << "master_degree=" << master_degree << " sigma_degrees=";
    for (int i = 0; i < n_ineq; ++i) meta << (i ? "," : "") << sigma_degrees[i];
    note(opts.label, meta.str());
}

void SosProgram::add_scalar_constraint(const AffineScalar& lin, ConstraintKind kind) {
    for (const auto& [v, c] : lin.coeffs)
        if (v < 0 || v >= static_cast<int>(vars_.size()))
            throw std::invalid_argument("add_scalar_constraint: undeclared variable");
    if (kind == ConstraintKind::Eq0) {
        LinearEquation eq;
        eq.coeffs = lin.coeffs;
        eq.rhs = -lin.constant;
        add_equation(std::move(eq));
    } else {
        scalar_ineqs_.push_back(lin);
    }
}

void SosProgram::add_equation(LinearEquation eq) {
    for (const auto& [v, c] : eq.coeffs)
        if (v < 0 || v >= static_cast<int>(vars_.size()))
            throw std::invalid_argument("add_equation: undeclared variable");
    equations_.push_back(std::move(eq));
}

sdp::SdpInstance SosProgram::assemble() const {
    sdp::SdpInstance inst;
    inst.name = "sos-program";
    for (const GramBlock& b : blocks_) {
        inst.block_sizes.push_back(b.side());
        inst.block_labels.push_back(b.label);
    }

    // Free scalar ids in ascending order define the free-variable layout.
    std::map<int, int> free_index;
    for (int id = 0; id < static_cast<int>(vars_.size()); ++id)
        if (vars_[id].kind == VarKind::FreeScalar) {
            int k = static_cast<int>(free_index.size());
            free_index.emplace(id, k);
        }
    inst.free_var_count = static_cast<int>(free_index.size());

    auto push_row = [&](const std::map<int, Rational>& coeffs, const Rational& rhs,
                        int slack_block) {
        sdp::SdpRow row;
        for (const auto& [id, c] : coeffs) {
            const VarInfo& v = vars_[id];
            if (v.kind == VarKind::GramEntry)
                row.entries.push_back({v.block, v.i, v.j, to_double(c)});
            else
                row.entries.push_back({-1, free_index.at(id), 0, to_double(c)});
        }
        if (slack_block >= 0) row.entries.push_back({slack_block, 0, 0, -1.0});
        row.rhs = to_double(rhs);
        inst.rows.push_back(std::move(row));
    };

    for (const LinearEquation& eq : equations_) push_row(eq.coeffs, eq.rhs, -1);

    // One-dimensional PSD slack per scalar inequality: expr - slack = 0.
    for (const AffineScalar& s : scalar_ineqs_) {
        int blk = static_cast<int>(inst.block_sizes.size());
        inst.block_sizes.push_back(1);
        inst.block_labels.push_back("slack");
        push_row(s.coeffs, -s.constant, blk);
    }

    // Row equilibration, dropping vacuous rows 0 = 0.
    std::vector<sdp::SdpRow> scaled;
    for (const sdp::SdpRow& row : inst.rows) {
        double mx = 0.0;
        for (const sdp::SdpEntry& e : row.entries) mx = std::max(mx, std::abs(e.coef));
        if (mx == 0.0) {
            if (row.rhs != 0.0) {
                scaled.push_back(row);  // structurally infeasible; keep for the solver
                inst.row_scale.push_back(1.0);
            }
            continue;
        }
        sdp::SdpRow r = row;
        for (sdp::SdpEntry& e : r.entries) e.coef /= mx;
        r.rhs /= mx;
        scaled.push_back(std::move(r));
        inst.row_scale.push_back(mx);
    }
    inst.rows = std::move(scaled);

    // Equilibrate free columns; solutions are mapped back by free_scale.
    std::vector<double> colmax(inst.free_var_count, 0.0);
    for (const sdp::SdpRow& row : inst.rows)
        for (const sdp::SdpEntry& e : row.entries)
            if (e.block == -1) colmax[e.i] = std::max(colmax[e.i], std::abs(e.coef));
    inst.free_scale.assign(inst.free_var_count, 1.0);
    for (int k = 0; k < inst.free_var_count; ++k)
        if (colmax[k] > 0.0) inst.free_scale[k] = std::clamp(1.0 / colmax[k], 1e-6, 1e6);
    for (sdp::SdpRow& row : inst.rows)
        for (sdp::SdpEntry& e : row.entries)
            if (e.block == -1) e.coef *= inst.free_scale[e.i];

    return inst;
}

SosCertificate SosProgram::extract_certificate(const RawSolution& raw,
                                               const sdp::SdpInstance& inst) const {
    if (raw.blocks.size() < blocks_.size())
        throw std::invalid_argument("extract_certificate: block count mismatch");
    SosCertificate cert;
    cert.margin = raw.margin;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (raw.blocks[b].rows() != blocks_[b].side())
            throw std::invalid_argument("extract_certificate: block size mismatch");
        cert.gram_matrices.push_back(raw.blocks[b]);
    }
    // Free values arrive in solver units; undo the assembly column scaling.
    if (static_cast<int>(raw.free_vars.size()) != inst.free_var_count)
        throw std::invalid_argument("extract_certificate: free variable count mismatch");
    int k = 0;
    for (int id = 0; id < static_cast<int>(vars_.size()); ++id)
        if (vars_[id].kind == VarKind::FreeScalar) {
            cert.scalar_assignment[id] = inst.free_scale[k] * raw.free_vars[k];
            ++k;
        }
    return cert;
}

VerifyReport SosProgram::verify_certificate(const SosCertificate& cert) const {
    if (cert.gram_matrices.size() != blocks_.size())
        throw std::invalid_argument("verify_certificate: block count mismatch");
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (cert.gram_matrices[b].rows() != blocks_[b].side() ||
            cert.gram_matrices[b].cols() != blocks_[b].side())
            throw std::invalid_argument("verify_certificate: Gram dimension mismatch");

    auto value_of = [&](int id) -> double {
        const VarInfo& v = vars_[id];
        if (v.kind == VarKind::GramEntry) return cert.gram_matrices[v.block](v.i, v.j);
        auto it = cert.scalar_assignment.find(id);
        if (it == cert.scalar_assignment.end())
            throw std::invalid_argument("verify_certificate: missing scalar value");
        return it->second;
    };

    VerifyReport report;
    for (const LinearEquation& eq : equations_) {
        double sum = 0.0, denom = std::abs(to_double(eq.rhs));
        for (const auto& [id, c] : eq.coeffs) {
            double cd = to_double(c);
            sum += cd * value_of(id);
            denom = std::max(denom, std::abs(cd));
        }
        double res = std::abs(sum - to_double(eq.rhs)) / std::max(1.0, denom);
        report.max_residual = std::max(report.max_residual, res);
    }

    double min_eig = 0.0;
    for (const Eigen::MatrixXd& q : cert.gram_matrices) {
        if (q.rows() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    report.max_eig_violation = std::max(0.0, -min_eig);

    report.min_scalar_slack = 0.0;
    for (const AffineScalar& s : scalar_ineqs_) {
        double val = to_double(s.constant);
        for (const auto& [id, c] : s.coeffs) val += to_double(c) * value_of(id);
        report.min_scalar_slack = std::min(report.min_scalar_slack, val);
    }

    report.passed = report.max_residual < kResidualTol &&
                    report.max_eig_violation < kEigTol &&
                    report.min_scalar_slack > -kEigTol;
    return report;
}

}  // namespace wavespeed::sos

namespace wavespeed::sdp {

void SdpInstance::dump(std::ostream& os) const {
    char buf[64];
    os << "sdp-instance v1\n";
    os << "name " << name << "\n";
    os << "blocks " << block_sizes.size();
    for (int s : block_sizes) os << " " << s;
    os << "\nfree " << free_var_count << "\n";
    os << "rows " << rows.size() << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", rows[r].rhs);
        os << "row " << r << " rhs " << buf << "\n";
        for (const SdpEntry& e : rows[r].entries) {
            std::snprintf(buf, sizeof buf, "%.17g", e.coef);
            if (e.block < 0)
                os << "  f " << e.i << " " << buf << "\n";
            else
                os << "  g " << e.block << " " << e.i << " " << e.j << " " << buf << "\n";
        }
    }
}

std::string SdpInstance::dump_string() const {
    std::ostringstream os;
    dump(os);
    return os.str();
}

}  // namespace wavespeed::sdp
