#pragma once

#include "fciiml/cell_solver.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline fciiml::OperatingConditions nominal_conditions()
{
    fciiml::OperatingConditions oc;
    oc.case_id = 1;
    return oc;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("fciiml_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Converged nominal baseline, solved once per test binary.
inline const fciiml::SteadySolution& nominal_baseline()
{
    static const fciiml::SteadySolution sol = fciiml::solve_steady(
        fciiml::ModelParameters::defaults(), nominal_conditions(), {}, fciiml::SolverSettings{});
    return sol;
}

} // namespace testing_support
