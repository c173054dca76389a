#pragma once

#include "fciiml/dae.hpp"
#include "fciiml/model.hpp"

#include <optional>
#include <span>

namespace fciiml {

/// Start time step when continuing from a nearby converged state [s].
inline constexpr double kWarmStartDt = 1.0;

/// Uniform inlet gas, equilibrated ionomer and kinetics inverted for a
/// uniform current.
CellState initial_condition(const FuelCellModel& model);

struct SteadySolution {
    CellState state;
    SolveReport report;
    long long kinetics_saturations = 0;
};

/// Time-march the model to steady state. An empty `delta` solves the
/// unaugmented model; `warm` continues from a previous state.
SteadySolution solve_steady(const ModelParameters& params, const OperatingConditions& oc,
                            std::span<const double> delta, const SolverSettings& settings,
                            const CellState* warm = nullptr);

SteadySolution solve_steady(const FuelCellModel& model, const SolverSettings& settings,
                            const CellState* warm = nullptr);

} // namespace fciiml
