#pragma once

#include "kfield/dynamics.hpp"
#include "kfield/integrate.hpp"

namespace kfield {

/// Uniform rectangular grid in parameter space R^k.
struct Grid {
    Grid() = default;
    Grid(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> counts_);

    int k() const { return static_cast<int>(counts.size()); }
    double h(int axis) const { return (hi[axis] - lo[axis]) / (counts[axis] - 1); }
    long node_count() const;
    /// Flat index, row-major with the last axis fastest.
    long index(const std::vector<int>& idx) const;
    std::vector<int> unflatten(long flat) const;
    Eigen::VectorXd point(const std::vector<int>& idx) const;
    bool interior(const std::vector<int>& idx, int margin = 1) const;

    std::vector<double> lo, hi;
    std::vector<int> counts;
};

/// Discretized parameterized k-submanifold: q^i at every grid node.
struct Sheet {
    Sheet() = default;
    Sheet(Grid grid_, int n_);

    int n() const { return n_dim; }
    int k() const { return grid.k(); }
    Eigen::VectorXd value(long flat) const;
    void set_value(long flat, const Eigen::VectorXd& q);
    double& at(long flat, int i) { return values[flat * n_dim + i]; }
    double at(long flat, int i) const { return values[flat * n_dim + i]; }

    Grid grid;
    int n_dim = 0;
    std::vector<double> values;  // node-major, coordinates contiguous
};

/// Sample a sheet from a closed-form map t -> q(t).
Sheet sample_sheet(const Grid& grid, int n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f);

/// Central-difference first prolongation at an interior node.
KVelocity sheet_prolong(const Sheet& sheet, const std::vector<int>& idx);
/// Central-difference first and second prolongation at an interior node.
K2Velocity sheet_prolong2(const Sheet& sheet, const std::vector<int>& idx);

/// Sheet gamma(t) = c(lambda_a t^a) built from one integrated geodesic c
/// with c(0) = q and cdot(0) = w, for rank-1 initial data X_a = lambda_a w.
Sheet rank1_sheet(const MetricField& g, const KVelocity& X, const Grid& grid, double integrator_step = 1e-3);

/// Closed-form solution on flat space for a constant symmetric force:
/// q^i(t) = a^i + b^i_a t^a + (1/2) F^i_{ab} t^a t^b.
Sheet flat_newton_sheet(const Tens3& F, const Eigen::VectorXd& a, const Eigen::MatrixXd& b, const Grid& grid);

struct ResidualReport {
    double max_abs = 0.0;
    long interior_nodes = 0;
    long boundary_nodes = 0;
};

/// Central second differences minus the prescribed right-hand side
/// -Gamma dq dq + ginv F, over all interior nodes.
ResidualReport newton_residual(const MetricField& g, const ForceField& F, const Sheet& sheet);

/// Residual against an arbitrary SOPDE coefficient rule.
ResidualReport sopde_residual(const SOPDE& D, const Sheet& sheet);

/// Serialize in the sheet CSV format: header t1..tk,q1..qn, row-major with
/// the last axis fastest, 17 significant digits.
void write_sheet_csv(const Sheet& sheet, const std::string& path, bool overwrite = false);
Sheet read_sheet_csv(const std::string& path);

}  // namespace kfield
