#include "fciiml/dae.hpp"

#include "fciiml/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace fciiml {

JacobianStructure dense_structure(std::size_t n)
{
    JacobianStructure s;
    std::vector<int> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = static_cast<int>(i);
    for (std::size_t j = 0; j < n; ++j) {
        s.column_groups.push_back({static_cast<int>(j)});
        s.rows_of_column.push_back(all);
    }
    return s;
}

void write_residual_history_csv(std::ostream& os, const SolveReport& report)
{
    os << "t,dt";
    for (const auto& b : report.block_names)
        os << ',' << b;
    os << '\n';
    os.precision(10);
    for (const auto& s : report.history) {
        os << s.t << ',' << s.dt;
        for (double v : s.block_norms)
            os << ',' << v;
        os << '\n';
    }
}

double steady_rate_norm(const DaeSystem& sys, std::span<const double> u)
{
    std::vector<double> f(sys.size());
    sys.rhs(u, f);
    const auto sc = sys.scales();
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (sys.is_differential(i))
            m = std::max(m, std::abs(f[i]) / sc[i]);
    return m;
}

struct DaeSolver::Impl {
    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    SpMat J;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    // position in J.valuePtr() for each (column, k-th row of that column)
    std::vector<std::vector<int>> slot;
    std::vector<double> up, rp;
};

DaeSolver::DaeSolver(const DaeSystem& sys, SolverSettings settings)
    : sys_(sys), settings_(settings), impl_(std::make_shared<Impl>())
{
    const auto n = sys_.size();
    const auto sc = sys_.scales();
    scale_.assign(sc.begin(), sc.end());
    diff_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        diff_[i] = sys_.is_differential(i) ? 1 : 0;
    build_pattern();
}

void DaeSolver::build_pattern()
{
    const auto& st = sys_.structure();
    const int n = static_cast<int>(sys_.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < n; ++j)
        for (int i : st.rows_of_column[j])
            trip.emplace_back(i, j, 1.0);
    impl_->J.resize(n, n);
    impl_->J.setFromTriplets(trip.begin(), trip.end());
    impl_->J.makeCompressed();
    impl_->slot.assign(n, {});
    const int* outer = impl_->J.outerIndexPtr();
    const int* inner = impl_->J.innerIndexPtr();
    for (int j = 0; j < n; ++j)
        for (int i : st.rows_of_column[j]) {
            const int* b = inner + outer[j];
            const int* e = inner + outer[j + 1];
            impl_->slot[j].push_back(static_cast<int>(std::lower_bound(b, e, i) - inner));
        }
    impl_->up.resize(n);
    impl_->rp.resize(n);
}

void DaeSolver::residual(std::span<const double> u, std::span<const double> u_old, double dt,
                         std::span<double> r)
{
    sys_.rhs(u, r);
    ++report_.rhs_evaluations;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (diff_[i])
            r[i] = (u[i] - u_old[i] - dt * r[i]) / scale_[i];
        if (!std::isfinite(r[i]))
            throw NonFiniteResidual(sys_.describe(i), -1);
    }
}

bool DaeSolver::factorize(std::span<const double> u, std::span<const double> u_old, double dt,
                          std::span<const double> r0)
{
    const auto& st = sys_.structure();
    auto& up = impl_->up;
    auto& rp = impl_->rp;
    double* val = impl_->J.valuePtr();
    std::copy(u.begin(), u.end(), up.begin());
    for (const auto& group : st.column_groups) {
        for (int j : group)
            up[j] = u[j] + 1.0e-7 * std::max(std::abs(u[j]), scale_[j]);
        residual(up, u_old, dt, rp);
        for (int j : group) {
            const double h = up[j] - u[j];
            const auto& rows = st.rows_of_column[j];
            for (std::size_t k = 0; k < rows.size(); ++k)
                val[impl_->slot[j][k]] = (rp[rows[k]] - r0[rows[k]]) / h;
            up[j] = u[j];
        }
    }
    ++report_.jacobian_evaluations;
    if (!impl_->analyzed) {
        impl_->lu.analyzePattern(impl_->J);
        impl_->analyzed = true;
    }
    impl_->lu.factorize(impl_->J);
    return impl_->lu.info() == Eigen::Success;
}

namespace {
double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}
double sq_norm(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v)
        m += x * x;
    return m;
}
} // namespace

DaeSolver::StepResult DaeSolver::step(std::span<const double> u_old, double dt,
                                      std::span<double> u)
{
    StepResult res;
    const std::size_t n = sys_.size();
    std::vector<double> r(n), trial(n), rt(n);
    Eigen::VectorXd rhs(n);
    std::copy(u_old.begin(), u_old.end(), u.begin());
    try {
        residual(u, u_old, dt, r);
    } catch (const NonFiniteResidual& e) {
        res.why = e.what();
        return res;
    }
    bool fresh = false;
    double prev_norm = -1.0;
    for (int it = 0; it <= settings_.max_newton; ++it) {
        const double rn = max_abs(r);
        if (rn <= settings_.newton_tol) {
            res.ok = true;
            return res;
        }
        if (it == settings_.max_newton)
            break;
        // rebuild the Jacobian unless the previous iteration contracted well
        const bool reuse = fresh && prev_norm >= 0.0 && rn <= 0.25 * prev_norm;
        if (!reuse) {
            try {
                if (!factorize(u, u_old, dt, r)) {
                    res.why = "singular Jacobian";
                    return res;
                }
            } catch (const NonFiniteResidual& e) {
                res.why = e.what();
                return res;
            }
            fresh = true;
        }
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = -r[i];
        Eigen::VectorXd du = impl_->lu.solve(rhs);
        if (impl_->lu.info() != Eigen::Success || !du.allFinite()) {
            res.why = "linear solve failed";
            return res;
        }
        ++res.iterations;
        ++report_.newton_iterations;
        const double r2 = sq_norm(r);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 8; ++ls) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = u[i] + alpha * du[i];
            report_.clamp_events += sys_.project(trial);
            try {
                residual(trial, u_old, dt, rt);
                if (sq_norm(rt) <= (1.0 - 1.0e-4 * alpha) * r2 || max_abs(rt) <= settings_.newton_tol) {
                    accepted = true;
                    break;
                }
            } catch (const NonFiniteResidual&) {
            }
            alpha *= 0.5;
        }
        if (!accepted && reuse) {
            prev_norm = -1.0;
            continue;
        }
        if (!accepted) {
            res.why = "line search failed";
            return res;
        }
        prev_norm = rn;
        std::copy(trial.begin(), trial.end(), u.begin());
        std::swap(r, rt);
        if (alpha < 1.0)
            prev_norm = -1.0; // force a fresh Jacobian after a damped step
    }
    res.why = "Newton iteration limit";
    return res;
}

std::vector<double> DaeSolver::fd_jacobian(std::span<const double> u)
{
    const std::size_t n = sys_.size();
    std::vector<double> f0(n), f1(n), up(u.begin(), u.end()), J(n * n);
    sys_.rhs(u, f0);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = 1.0e-6 * (1.0 + std::abs(u[j]));
        up[j] = u[j] + h;
        sys_.rhs(up, f1);
        for (std::size_t i = 0; i < n; ++i)
            J[i * n + j] = (f1[i] - f0[i]) / h;
        up[j] = u[j];
    }
    return J;
}

std::vector<double> DaeSolver::colored_jacobian(std::span<const double> u)
{
    const std::size_t n = sys_.size();
    const auto& st = sys_.structure();
    std::vector<double> f0(n), f1(n), up(u.begin(), u.end()), J(n * n, 0.0);
    sys_.rhs(u, f0);
    for (const auto& group : st.column_groups) {
        for (int j : group)
            up[j] = u[j] + 1.0e-7 * std::max(std::abs(u[j]), scale_[j]);
        sys_.rhs(up, f1);
        for (int j : group) {
            const double h = up[j] - u[j];
            for (int i : st.rows_of_column[j])
                J[static_cast<std::size_t>(i) * n + j] = (f1[i] - f0[i]) / h;
            up[j] = u[j];
        }
    }
    return J;
}

SolveReport DaeSolver::integrate(std::vector<double>& u, int case_id)
{
    const auto t0 = std::chrono::steady_clock::now();
    report_ = SolveReport{};
    report_.block_names = sys_.block_names();
    const std::size_t n = sys_.size();
    const std::size_t nb = report_.block_names.size();
    std::vector<int> block(n);
    for (std::size_t i = 0; i < n; ++i)
        block[i] = sys_.block_of(i);

    report_.clamp_events += sys_.project(u);
    std::vector<double> next(n);
    double t = 0.0;
    double dt = settings_.dt_initial;
    int halvings = 0;
    double rate = steady_rate_norm(sys_, u);
    if (rate <= settings_.steady_tol) {
        report_.converged = true;
        report_.final_rate_norm = rate;
    }
    while (!report_.converged && t < settings_.t_final && report_.steps < settings_.max_steps) {
        const double h = std::min(dt, settings_.t_final - t);
        const StepResult sr = step(u, h, next);
        if (!sr.ok) {
            ++report_.rejected_steps;
            if (++halvings > settings_.max_halvings || h * 0.5 < settings_.dt_min)
                throw SolverDiverged(case_id, t, sr.why);
            dt = h * 0.5;
            continue;
        }
        halvings = 0;
        ++report_.steps;
        // rate from the step itself: (u_new - u_old) / dt per scaled unknown
        std::vector<double> bn(nb, 0.0);
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::abs(next[i] - u[i]) / (h * scale_[i]);
            bn[block[i]] = std::max(bn[block[i]], r);
            if (diff_[i])
                m = std::max(m, r);
        }
        t += h;
        u.swap(next);
        if (settings_.record_history)
            report_.history.push_back({t, h, std::move(bn)});
        rate = m;
        report_.final_rate_norm = m;
        if (m <= settings_.steady_tol)
            report_.converged = true;
        if (sr.iterations <= settings_.growth_newton_limit)
            dt = std::min(h * settings_.growth, settings_.dt_max);
    }
    report_.t = t;
    report_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report_;
}

} // namespace fciiml
