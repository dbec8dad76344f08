#pragma once

// Unbalanced longitudinal panels on a retrospective time scale: t = 0 at the
// terminal event, negative before it. Datasets are immutable once built and
// safe to share read-only across threads.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace longmix {

struct Observation {
    double time;     // years before the terminal event, <= 0
    double outcome;  // standardized units
};

struct Subject {
    std::string id;
    std::vector<Observation> observations;  // strictly increasing in time
    std::map<std::string, double> covariates;

    double covariate(const std::string& name) const;
    int n_obs() const { return static_cast<int>(observations.size()); }
    double follow_up() const {
        return observations.back().time - observations.front().time;
    }
};

class LongitudinalDataset {
public:
    LongitudinalDataset() = default;

    /// Validates invariants (times <= 0 and >= -horizon, sorted, no
    /// duplicates, finite values, covariates present on every subject).
    LongitudinalDataset(std::vector<Subject> subjects, double horizon = 24.0);

    const std::vector<Subject>& subjects() const { return subjects_; }
    int n_subjects() const { return static_cast<int>(subjects_.size()); }
    long total_observations() const;
    double horizon() const { return horizon_; }

    const std::vector<std::string>& covariate_names() const {
        return covariate_names_;
    }
    bool has_covariate(const std::string& name) const;

    /// Offsets already subtracted from each covariate (zero if uncentered).
    const std::map<std::string, double>& centering_offsets() const {
        return centering_offsets_;
    }

    /// All observation times pooled across subjects, ascending.
    std::vector<double> pooled_times() const;

    friend LongitudinalDataset center_covariates(
        const LongitudinalDataset& ds, const std::map<std::string, double>& centers);

private:
    std::vector<Subject> subjects_;
    std::vector<std::string> covariate_names_;
    std::map<std::string, double> centering_offsets_;
    double horizon_ = 24.0;
};

struct LoadOptions {
    std::string subject_column = "subject_id";
    std::string time_column = "time";
    std::string outcome_column = "outcome";
    double horizon = 24.0;
};

struct LoadResult {
    LongitudinalDataset dataset;
    int dropped_missing_outcome = 0;  // rows with an empty outcome cell
};

/// Parse a CSV stream (header row required; '.' decimal, ',' separator).
/// Columns beyond subject/time/outcome are treated as baseline covariates
/// and must be constant within subject. Errors cite the offending row.
LoadResult load_dataset(std::istream& in, const LoadOptions& opts = {});
LoadResult load_dataset_file(const std::string& path, const LoadOptions& opts = {});

/// Inverse-safe centering: value -> value - center; offsets accumulate in
/// the registry so raw values are recoverable exactly.
LongitudinalDataset center_covariates(const LongitudinalDataset& ds,
                                      const std::map<std::string, double>& centers);

struct CovariateSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
};

struct DatasetSummary {
    int n_subjects = 0;
    long n_observations = 0;
    double follow_up_mean = 0.0;
    double follow_up_sd = 0.0;
    double obs_per_subject_mean = 0.0;
    std::vector<CovariateSummary> covariates;
};

DatasetSummary summarize(const LongitudinalDataset& ds);

/// CSV writer; round-trips bit-exactly through load_dataset.
void write_csv(const LongitudinalDataset& ds, std::ostream& out);
std::string to_csv(const LongitudinalDataset& ds);

/// JSON export mirroring the type structure.
std::string to_json(const LongitudinalDataset& ds);

std::string format_summary(const DatasetSummary& s);

}  // namespace longmix
