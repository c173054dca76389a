#pragma once

#include "fciiml/augment.hpp"
#include "fciiml/conditions.hpp"
#include "fciiml/keyvalue.hpp"
#include "fciiml/mlp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fciiml {

inline constexpr int kFormatVersion = 1;

/// One dataset entry; the case id lives in `oc.case_id`.
struct CaseRecord {
    OperatingConditions oc;
    std::vector<double> lambda_data;
    std::vector<double> j_data; ///< empty when absent
    std::string provenance = "synthetic";

    int id() const { return oc.case_id; }
    bool operator==(const CaseRecord& o) const;
};

struct Range {
    double lo = 0.0, hi = 0.0;
};

/// Hidden augmentation beta*(lambda_mb) = base + amplitude * logistic(slope
/// (lambda_mb - center)) and the sampling box of the operating conditions.
struct TruthGeneratorSpec {
    int case_count = 40;
    std::uint64_t seed = 1;
    double beta_base = 0.8;
    double beta_amplitude = 0.4;
    double beta_slope = 2.0;
    double beta_center = 8.0;
    Range T_in{333.0, 353.0};
    Range dT{0.0, 10.0};
    Range RH{0.3, 1.0};
    Range i_cell{2000.0, 15000.0};
    Range stoich{1.2, 3.0};
    Range p_in{1.1e5, 1.5e5};
    Range dp{-2.0e4, 0.0};
    int max_retries = 5;
    bool record_current = true;

    double beta(double lambda_mb) const;
    static TruthGeneratorSpec from_keyvalue(const KeyValueFile& kv);
    KeyValueFile to_keyvalue() const;
};

/// Conditions of case `index` and draw `attempt`, independent of how many
/// other cases are sampled.
OperatingConditions sample_conditions(const TruthGeneratorSpec& spec, int index, int attempt);

struct TruthResult {
    std::vector<CaseRecord> cases;
    int dropped = 0;
    std::vector<std::string> warnings;
};

TruthResult generate_truth(const TruthGeneratorSpec& spec, const ModelParameters& params,
                           const SolverSettings& solver, const FixedPointSettings& fp,
                           int workers = 1);

/// conditions.csv plus profiles/case_<id>.csv under `dir`.
void save_cases(const std::string& dir, const std::vector<CaseRecord>& cases);
/// Strict schema checks; `N_y` is the expected profile length.
std::vector<CaseRecord> load_cases(const std::string& dir, int N_y);

struct Split {
    std::vector<CaseRecord> training;
    std::vector<CaseRecord> test;
};
/// Training subset in id order; throws DataError on unknown or duplicate ids.
Split select_training(const std::vector<CaseRecord>& cases, const std::vector<int>& ids);

/// Sealed sidecar with the hidden augmentation; only the verification path
/// reads it back.
void write_truth_sidecar(const std::string& path, const TruthGeneratorSpec& spec);
TruthGeneratorSpec read_truth_sidecar(const std::string& path);

std::string weights_to_string(const MlpModel& model, const std::string& provenance = "");
MlpModel weights_from_string(const std::string& text, const std::string& origin = "<string>");
void save_weights(const std::string& path, const MlpModel& model, const std::string& provenance = "");
/// Rejects unknown versions, shape mismatches and checksum failures.
MlpModel load_weights(const std::string& path);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& text);

} // namespace fciiml
