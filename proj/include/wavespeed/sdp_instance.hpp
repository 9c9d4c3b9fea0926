#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace wavespeed::sdp {

// One coefficient of a linear equality row. block >= 0 addresses entry
// (i, j), i <= j, of that PSD block; block == -1 addresses free variable i.
// Off-diagonal coefficients already include the symmetry factor 2, so a row
// reads  sum coef * Q_ij + sum coef * x_i = rhs  over the listed entries.
struct SdpEntry {
    int block;
    int i;
    int j;
    double coef;
};

struct SdpRow {
    std::vector<SdpEntry> entries;
    double rhs = 0.0;
};

// Block-PSD feasibility data in standard form: symmetric matrix variables,
// free scalar variables, and linear equality constraints. Instances are
// immutable once assembled and safe to share between concurrent solves.
struct SdpInstance {
    std::vector<int> block_sizes;
    int free_var_count = 0;
    std::vector<SdpRow> rows;

    // Scaling applied during assembly. Rows were divided by row_scale;
    // free-variable columns were multiplied by free_scale, so an original
    // free value is free_scale[k] * (solver value k).
    std::vector<double> row_scale;
    std::vector<double> free_scale;

    // Provenance metadata.
    std::string name;
    std::vector<std::string> block_labels;

    // Sparse triplet dump (block id, row, col, value per linear map entry),
    // for debugging and cross-solver comparison. Deterministic byte-for-byte
    // for a given instance.
    void dump(std::ostream& os) const;
    std::string dump_string() const;
};

// Solver output in instance coordinates: the PSD matrices (margin already
// folded in), free variables in solver units, and the achieved margin.
struct Solution {
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<double> free_vars;
    double margin = 0.0;
};

}  // namespace wavespeed::sdp
