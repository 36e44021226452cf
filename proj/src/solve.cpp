#include "kfield/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kfield {

Grid::Grid(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> counts_)
    : lo(std::move(lo_)), hi(std::move(hi_)), counts(std::move(counts_)) {
    if (lo.size() != hi.size() || lo.size() != counts.size()) throw DimensionError("grid: extent size mismatch");
    if (counts.empty()) throw DimensionError("grid: empty");
    for (size_t a = 0; a < counts.size(); ++a) {
        if (counts[a] < 5) throw DimensionError("grid: at least 5 nodes per axis required");
        if (!(hi[a] > lo[a])) throw DimensionError("grid: empty extent");
    }
}

long Grid::node_count() const {
    long c = 1;
    for (int m : counts) c *= m;
    return c;
}

long Grid::index(const std::vector<int>& idx) const {
    long flat = 0;
    for (int a = 0; a < k(); ++a) flat = flat * counts[a] + idx[a];
    return flat;
}

std::vector<int> Grid::unflatten(long flat) const {
    std::vector<int> idx(k());
    for (int a = k() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % counts[a]);
        flat /= counts[a];
    }
    return idx;
}

Eigen::VectorXd Grid::point(const std::vector<int>& idx) const {
    Eigen::VectorXd t(k());
    for (int a = 0; a < k(); ++a) t(a) = lo[a] + idx[a] * h(a);
    return t;
}

bool Grid::interior(const std::vector<int>& idx, int margin) const {
    for (int a = 0; a < k(); ++a)
        if (idx[a] < margin || idx[a] >= counts[a] - margin) return false;
    return true;
}

Sheet::Sheet(Grid grid_, int n_) : grid(std::move(grid_)), n_dim(n_) {
    values.assign(static_cast<size_t>(grid.node_count()) * n_dim, 0.0);
}

Eigen::VectorXd Sheet::value(long flat) const {
    Eigen::VectorXd q(n_dim);
    for (int i = 0; i < n_dim; ++i) q(i) = at(flat, i);
    return q;
}

void Sheet::set_value(long flat, const Eigen::VectorXd& q) {
    for (int i = 0; i < n_dim; ++i) at(flat, i) = q(i);
}

Sheet sample_sheet(const Grid& grid, int n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
    Sheet s(grid, n);
    const long count = grid.node_count();
    for (long node = 0; node < count; ++node) s.set_value(node, f(grid.point(grid.unflatten(node))));
    return s;
}

namespace {

Eigen::VectorXd node_value(const Sheet& s, std::vector<int> idx, int axis, int shift) {
    idx[axis] += shift;
    return s.value(s.grid.index(idx));
}

Eigen::VectorXd node_value2(const Sheet& s, std::vector<int> idx, int a, int sa, int b, int sb) {
    idx[a] += sa;
    idx[b] += sb;
    return s.value(s.grid.index(idx));
}

}  // namespace

KVelocity sheet_prolong(const Sheet& sheet, const std::vector<int>& idx) {
    if (!sheet.grid.interior(idx)) throw DomainError("sheet_prolong: stencil leaves the grid");
    const int n = sheet.n();
    const int k = sheet.k();
    KVelocity v(n, k);
    v.q = sheet.value(sheet.grid.index(idx));
    for (int a = 0; a < k; ++a) {
        Eigen::VectorXd d =
            (node_value(sheet, idx, a, +1) - node_value(sheet, idx, a, -1)) / (2.0 * sheet.grid.h(a));
        v.qdot.col(a) = d;
    }
    return v;
}

K2Velocity sheet_prolong2(const Sheet& sheet, const std::vector<int>& idx) {
    if (!sheet.grid.interior(idx)) throw DomainError("sheet_prolong2: stencil leaves the grid");
    const int n = sheet.n();
    const int k = sheet.k();
    K2Velocity v(n, k);
    Eigen::VectorXd center = sheet.value(sheet.grid.index(idx));
    v.q = center;
    for (int a = 0; a < k; ++a) {
        const double ha = sheet.grid.h(a);
        Eigen::VectorXd plus = node_value(sheet, idx, a, +1);
        Eigen::VectorXd minus = node_value(sheet, idx, a, -1);
        v.qdot.col(a) = (plus - minus) / (2.0 * ha);
        Eigen::VectorXd diag = (plus - 2.0 * center + minus) / (ha * ha);
        for (int i = 0; i < n; ++i) v.qddot(i, a, a) = diag(i);
        for (int b = a + 1; b < k; ++b) {
            const double hb = sheet.grid.h(b);
            Eigen::VectorXd mixed = (node_value2(sheet, idx, a, +1, b, +1) - node_value2(sheet, idx, a, +1, b, -1) -
                                     node_value2(sheet, idx, a, -1, b, +1) + node_value2(sheet, idx, a, -1, b, -1)) /
                                    (4.0 * ha * hb);
            for (int i = 0; i < n; ++i) {
                v.qddot(i, a, b) = mixed(i);
                v.qddot(i, b, a) = mixed(i);
            }
        }
    }
    return v;
}

Sheet rank1_sheet(const MetricField& g, const KVelocity& X, const Grid& grid, double integrator_step) {
    const int n = X.n();
    const int k = X.k();
    if (grid.k() != k) throw DimensionError("rank1_sheet: grid arity differs from k");

    // decompose X_a = lambda_a w; reject genuinely rank-2 data
    int pivot = -1;
    double best = 0.0;
    for (int a = 0; a < k; ++a)
        if (X.qdot.col(a).norm() > best) {
            best = X.qdot.col(a).norm();
            pivot = a;
        }
    Eigen::VectorXd w;
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
    if (pivot < 0) {
        w = Eigen::VectorXd::Zero(n);
    } else {
        w = X.qdot.col(pivot);
        for (int a = 0; a < k; ++a) {
            const Eigen::VectorXd col = X.qdot.col(a);
            const double lam = col.dot(w) / w.squaredNorm();
            if ((col - lam * w).norm() > 1e-10 * std::max(1.0, col.norm()))
                throw DomainError("rank1_sheet: velocity columns not pairwise proportional");
            lambda(a) = lam;
        }
    }

    Sheet sheet(grid, n);
    const long count = grid.node_count();
    if (pivot < 0) {
        for (long node = 0; node < count; ++node) sheet.set_value(node, X.q);
        return sheet;
    }
    for (long node = 0; node < count; ++node) {
        const Eigen::VectorXd t = grid.point(grid.unflatten(node));
        const double s = lambda.dot(t);
        sheet.set_value(node, geodesic_state(g, X.q, w, s, integrator_step).q);
    }
    return sheet;
}

Sheet flat_newton_sheet(const Tens3& F, const Eigen::VectorXd& a, const Eigen::MatrixXd& b, const Grid& grid) {
    const int n = static_cast<int>(a.size());
    const int k = grid.k();
    if (F.n() != n || F.k() != k) throw DimensionError("flat_newton_sheet: force shape mismatch");
    if (!F.symmetric_in_last(0.0)) throw DomainError("flat_newton_sheet: force not symmetric");
    return sample_sheet(grid, n, [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd q = a + b * t;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int al = 0; al < k; ++al)
                for (int be = 0; be < k; ++be) s += F(i, al, be) * t(al) * t(be);
            q(i) += 0.5 * s;
        }
        return q;
    });
}

ResidualReport sopde_residual(const SOPDE& D, const Sheet& sheet) {
    ResidualReport rep;
    const long count = sheet.grid.node_count();
    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = sheet.grid.unflatten(node);
        if (!sheet.grid.interior(idx)) {
            ++rep.boundary_nodes;
            continue;
        }
        ++rep.interior_nodes;
        K2Velocity p2 = sheet_prolong2(sheet, idx);
        Tens3 A = D.coefficients(p2.project());
        for (int i = 0; i < sheet.n(); ++i)
            for (int al = 0; al < sheet.k(); ++al)
                for (int be = 0; be < sheet.k(); ++be)
                    rep.max_abs = std::max(rep.max_abs, std::abs(p2.qddot(i, al, be) - A(i, al, be)));
    }
    return rep;
}

ResidualReport newton_residual(const MetricField& g, const ForceField& F, const Sheet& sheet) {
    return sopde_residual(newton_sopde(g, F), sheet);
}

void write_sheet_csv(const Sheet& sheet, const std::string& path, bool overwrite) {
    if (!overwrite && std::filesystem::exists(path))
        throw DomainError("refusing to overwrite existing file " + path);
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path + " for writing");
    for (int a = 0; a < sheet.k(); ++a) os << "t" << (a + 1) << ",";
    for (int i = 0; i < sheet.n(); ++i) os << "q" << (i + 1) << (i + 1 < sheet.n() ? "," : "\n");
    char buf[64];
    const long count = sheet.grid.node_count();
    for (long node = 0; node < count; ++node) {
        const Eigen::VectorXd t = sheet.grid.point(sheet.grid.unflatten(node));
        for (int a = 0; a < sheet.k(); ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", t(a));
            os << buf << ",";
        }
        for (int i = 0; i < sheet.n(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", sheet.at(node, i));
            os << buf << (i + 1 < sheet.n() ? "," : "\n");
        }
    }
}

Sheet read_sheet_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw DomainError("empty sheet file " + path);
    int k = 0, n = 0;
    {
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) {
            if (!col.empty() && col[0] == 't')
                ++k;
            else if (!col.empty() && col[0] == 'q')
                ++n;
            else
                throw DomainError("bad sheet header column '" + col + "'");
        }
    }
    if (k < 1 || n < 1) throw DomainError("bad sheet header in " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != k + n) throw DomainError("bad sheet row in " + path);
        rows.push_back(std::move(row));
    }

    // recover per-axis node counts from the row-major layout
    std::vector<double> lo(k), hi(k);
    std::vector<int> counts(k, 0);
    for (int a = 0; a < k; ++a) {
        double mn = rows.front()[a], mx = rows.front()[a];
        for (const auto& r : rows) {
            mn = std::min(mn, r[a]);
            mx = std::max(mx, r[a]);
        }
        lo[a] = mn;
        hi[a] = mx;
    }
    {
        long stride = 1;
        for (int a = k - 1; a >= 0; --a) {
            // distinct values along this axis at this stride, up to the first repeat
            std::vector<double> uniq;
            for (size_t r = 0; r < rows.size(); r += stride) {
                double v = rows[r][a];
                bool seen = false;
                for (double u : uniq)
                    if (u == v) seen = true;
                if (!seen)
                    uniq.push_back(v);
                else
                    break;
            }
            counts[a] = static_cast<int>(uniq.size());
            stride *= counts[a];
        }
    }
    long expect = 1;
    for (int c : counts) expect *= c;
    if (expect != static_cast<long>(rows.size())) throw DomainError("sheet rows do not form a full grid");

    Sheet sheet(Grid(lo, hi, counts), n);
    for (size_t r = 0; r < rows.size(); ++r)
        for (int i = 0; i < n; ++i) sheet.at(static_cast<long>(r), i) = rows[r][k + i];
    return sheet;
}

}  // namespace kfield
