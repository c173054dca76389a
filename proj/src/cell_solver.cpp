#include "fciiml/cell_solver.hpp"

#include "fciiml/errors.hpp"

#include <cmath>

namespace fciiml {

namespace {

// overpotential for a target current under Butler-Volmer with symmetric-ish
// transfer coefficients
double invert_kinetics(double j, double i0, double T, const PhysicalConstants& k)
{
    const double f = k.F / (k.R * T);
    return std::asinh(j / (2.0 * std::max(i0, 1.0e-30))) / f;
}

} // namespace

CellState initial_condition(const FuelCellModel& model)
{
    const int N = model.nodes();
    const auto& geom = model.parameters().geometry;
    const auto& mat = model.parameters().material;
    const auto& corr = model.correlations();
    const auto& oc = model.conditions();
    CellState s(N);
    const InletState& in_an = model.inlet(Side::Anode);
    const InletState& in_ca = model.inlet(Side::Cathode);
    const double rh_mean = 0.5 * (oc.RH_an_in + oc.RH_ca_in);
    const double lambda0 = corr.lambda_eq(oc.T_in, rh_mean);
    const double i = oc.i_cell;
    const double ahcl = geom.a * geom.h_cl;

    for (int n = 0; n < N; ++n) {
        const double T = model.profiles().T[n];
        const double C_an = model.total_concentration(Side::Anode, n);
        const double C_ca = model.total_concentration(Side::Cathode, n);
        s(n, Var::cH2O_an) = in_an.c[0] / in_an.total() * C_an;
        s(n, Var::cH2_an) = in_an.c[1] / in_an.total() * C_an;
        s(n, Var::v_an) = model.inlet_velocity(Side::Anode);
        s(n, Var::cH2O_ca) = in_ca.c[0] / in_ca.total() * C_ca;
        s(n, Var::cO2_ca) = in_ca.c[2] / in_ca.total() * C_ca;
        s(n, Var::cN2_ca) = in_ca.c[3] / in_ca.total() * C_ca;
        s(n, Var::v_ca) = model.inlet_velocity(Side::Cathode);
        s(n, Var::lambda_an) = lambda0;
        s(n, Var::lambda_ca) = lambda0;
        s(n, Var::ccl_an) = s(n, Var::cH2O_an);
        s(n, Var::ccl_ca) = s(n, Var::cH2O_ca);
        s(n, Var::scl_an) = mat.s_im;
        s(n, Var::scl_ca) = mat.s_im;
        s(n, Var::i_loc) = i;

        const double cH2 = s(n, Var::cH2_an);
        const double cO2 = s(n, Var::cO2_ca);
        const double eta_an = invert_kinetics(i / ahcl, corr.i0(Side::Anode, cH2, T), T,
                                              corr.constants());
        const double eta_ca = invert_kinetics(-i / ahcl, corr.i0(Side::Cathode, cO2, T), T,
                                              corr.constants());
        const double phi_e_an = -i * geom.h_gdl / mat.sigma_e;
        s(n, Var::phi_p_an) = phi_e_an - corr.U(Side::Anode, cH2, T) - eta_an;
        s(n, Var::phi_p_ca) =
            s(n, Var::phi_p_an) - i * geom.h_mb / corr.sigma_p(lambda0, T);
        const double phi_e_ca = s(n, Var::phi_p_ca) + corr.U(Side::Cathode, cO2, T) + eta_ca;
        s(n, Var::phi_ch) = phi_e_ca - i * geom.h_gdl / mat.sigma_e;
    }
    double I = 0.0;
    for (int n = N - 1; n >= 0; --n) {
        I += model.weights()[n] * i;
        s(n, Var::I_plate) = I;
    }
    return s;
}

SteadySolution solve_steady(const FuelCellModel& model, const SolverSettings& settings,
                            const CellState* warm)
{
    SteadySolution out;
    out.state = warm ? *warm : initial_condition(model);
    if (out.state.nodes() != model.nodes())
        throw DomainError("warm-start state has the wrong grid size");
    SolverSettings s = settings;
    if (warm)
        s.dt_initial = std::max(s.dt_initial, kWarmStartDt);
    DaeSolver solver(model, s);
    std::vector<double> u(out.state.values().begin(), out.state.values().end());
    const long long sat0 = model.kinetics_saturation_count();
    out.report = solver.integrate(u, model.conditions().case_id);
    std::copy(u.begin(), u.end(), out.state.values().begin());
    out.kinetics_saturations = model.kinetics_saturation_count() - sat0;
    return out;
}

SteadySolution solve_steady(const ModelParameters& params, const OperatingConditions& oc,
                            std::span<const double> delta, const SolverSettings& settings,
                            const CellState* warm)
{
    const FuelCellModel model(params, oc, delta);
    return solve_steady(model, settings, warm);
}

} // namespace fciiml
