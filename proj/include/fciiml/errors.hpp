#pragma once

#include <stdexcept>
#include <string>

namespace fciiml {

/// Input outside the validity box of a correlation or operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed case data, profile or persisted artifact.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A residual evaluated to NaN or Inf.
class NonFiniteResidual : public std::runtime_error {
public:
    NonFiniteResidual(const std::string& field, int node)
        : std::runtime_error("non-finite residual in '" + field + "' at node " +
                             std::to_string(node)),
          field_(field), node_(node) {}
    const std::string& field() const { return field_; }
    int node() const { return node_; }

private:
    std::string field_;
    int node_;
};

/// Time integration gave up after repeated step halvings.
class SolverDiverged : public std::runtime_error {
public:
    SolverDiverged(int case_id, double last_good_time, const std::string& why)
        : std::runtime_error("solver diverged (case " + std::to_string(case_id) +
                             ", last good t=" + std::to_string(last_good_time) +
                             " s): " + why),
          case_id_(case_id), last_good_time_(last_good_time) {}
    int case_id() const { return case_id_; }
    double last_good_time() const { return last_good_time_; }

private:
    int case_id_;
    double last_good_time_;
};

} // namespace fciiml
