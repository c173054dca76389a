#include "fciiml/conditions.hpp"

#include "fciiml/errors.hpp"

#include <algorithm>
#include <string>

namespace fciiml {

void OperatingConditions::validate() const
{
    const std::string tag = "case " + std::to_string(case_id) + ": ";
    for (double T : {T_in, T_in + dT})
        if (!(T >= 273.0 && T <= 373.0))
            throw DomainError(tag + "temperatures must lie in [273, 373] K");
    for (double p : {p_in_an, p_in_an + dp_an, p_in_ca, p_in_ca + dp_ca})
        if (!(p > 0.0))
            throw DomainError(tag + "pressures must be > 0 along both channels");
    for (double rh : {RH_an_in, RH_ca_in})
        if (!(rh >= 0.0 && rh <= 1.5))
            throw DomainError(tag + "inlet RH must lie in [0, 1.5]");
    if (!(stoich_an >= 1.0 && stoich_ca >= 1.0))
        throw DomainError(tag + "stoichiometric ratios must be >= 1");
    if (!(i_cell >= 0.0))
        throw DomainError(tag + "cell current must be >= 0");
}

std::vector<double> uniform_grid(int N)
{
    std::vector<double> y(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n)
        y[n] = static_cast<double>(n) / static_cast<double>(N - 1);
    return y;
}

ChannelProfiles channel_profiles(const OperatingConditions& oc, const std::vector<double>& y)
{
    ChannelProfiles p;
    p.T.reserve(y.size());
    p.p_an.reserve(y.size());
    p.p_ca.reserve(y.size());
    for (double yn : y) {
        if (!(yn >= 0.0 && yn <= 1.0))
            throw DomainError("channel coordinate outside [0, 1]");
        p.T.push_back(oc.T_in + oc.dT * (1.0 - yn));
        p.p_an.push_back(oc.p_in_an + oc.dp_an * (1.0 - yn));
        p.p_ca.push_back(oc.p_in_ca + oc.dp_ca * yn);
    }
    return p;
}

InletState inlet_state(const OperatingConditions& oc, Side side, const Correlations& corr)
{
    InletState in;
    const double R = corr.constants().R;
    if (side == Side::Anode) {
        in.T = oc.T_in;
        in.p = oc.p_in_an;
    } else {
        in.T = oc.T_in + oc.dT;
        in.p = oc.p_in_ca;
    }
    const double rh = side == Side::Anode ? oc.RH_an_in : oc.RH_ca_in;
    const double total = in.p / (R * in.T);
    const double water = std::min(rh * corr.p_sat(in.T) / (R * in.T), 0.95 * total);
    const double dry = total - water;
    in.c[static_cast<int>(Gas::H2O)] = water;
    if (side == Side::Anode) {
        in.c[static_cast<int>(Gas::H2)] = dry;
    } else {
        in.c[static_cast<int>(Gas::O2)] = 0.21 * dry;
        in.c[static_cast<int>(Gas::N2)] = dry - 0.21 * dry;
    }
    return in;
}

double inlet_velocity(const OperatingConditions& oc, Side side, const CellGeometry& geom,
                      const Correlations& corr)
{
    const InletState in = inlet_state(oc, side, corr);
    const double F = corr.constants().F;
    const double i = std::max(oc.i_cell, kMinFlowCurrent);
    // steady channel balance: inflow - outflow = L_ref * mean(flux) / h_ch
    if (side == Side::Anode)
        return oc.stoich_an * geom.L_ref() * i / (2.0 * F * geom.h_ch * in.c[static_cast<int>(Gas::H2)]);
    return oc.stoich_ca * geom.L_ref() * i / (4.0 * F * geom.h_ch * in.c[static_cast<int>(Gas::O2)]);
}

} // namespace fciiml
